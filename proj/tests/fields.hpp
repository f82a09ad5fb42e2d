#pragma once

#include <string>
#include <vector>

#include "ramified_zero/ring.hpp"

namespace rz_test {

struct FieldCase {
  std::string name;
  int e;
  std::vector<std::int64_t> eisenstein;
};

/// x - 2, x^2 - 2, x^2 + 2, x^2 - 2x + 2, x^3 - 2.
inline const std::vector<FieldCase>& standard_fields() {
  static const std::vector<FieldCase> cases{
      {"Q2", 1, {-2}},
      {"x2m2", 2, {-2, 0}},
      {"x2p2", 2, {2, 0}},
      {"x2m2xp2", 2, {2, -2}},
      {"x3m2", 3, {-2, 0, 0}},
  };
  return cases;
}

inline ramified_zero::FieldPtr make(const FieldCase& c) {
  return ramified_zero::Field::make(c.e, c.eisenstein, ramified_zero::default_precision(c.e));
}

inline ramified_zero::FieldPtr q2(int precision = 16) { return ramified_zero::Field::make(1, {-2}, precision); }
inline ramified_zero::FieldPtr sqrt2(int precision = 16) { return ramified_zero::Field::make(2, {-2, 0}, precision); }

}  // namespace rz_test
