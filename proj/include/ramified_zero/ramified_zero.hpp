#pragma once

// Everything except the GMP-backed checkers in oracle.hpp.

#include "ramified_zero/contraction.hpp"
#include "ramified_zero/error.hpp"
#include "ramified_zero/form.hpp"
#include "ramified_zero/io.hpp"
#include "ramified_zero/pairing.hpp"
#include "ramified_zero/ring.hpp"
#include "ramified_zero/solver.hpp"
