#pragma once

// JSON encodings of fields, elements, forms, certificates and solve reports.
//
//   field        {"e": E, "eisenstein": [c_0, ..., c_{e-1}], "precision": N}
//   element      [a_0, ..., a_{e-1}]        meaning sum a_j pi^j
//   form         {"field": {...}, "d": D, "coefficients": [[...], ...]}
//   certificate  {"assignment": [[...], ...], "n_target": N, "pivot": i,
//                 "valuation_achieved": V}
//
// V is an integer or the string "AtLeastPrecision".

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ramified_zero/error.hpp"
#include "ramified_zero/form.hpp"
#include "ramified_zero/ring.hpp"
#include "ramified_zero/solver.hpp"

namespace ramified_zero::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

inline json field_to_json(const Field& f) {
  return json{{"e", f.e()}, {"eisenstein", f.eisenstein()}, {"precision", f.precision()}};
}

inline FieldPtr field_from_json(const json& j) {
  try {
    const int e = j.at("e").get<int>();
    const auto eis = j.at("eisenstein").get<std::vector<std::int64_t>>();
    const int precision = j.contains("precision") ? j.at("precision").get<int>() : default_precision(e);
    return Field::make(e, eis, precision);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadInput, std::string("field: ") + ex.what());
  }
}

inline json element_to_json(const RingElement& a) {
  json out = json::array();
  for (auto c : a.coeffs()) out.push_back(c);
  return out;
}

/// Accepts signed or unsigned 64-bit integers; values are read mod 2^64.
inline RingElement element_from_json(const FieldPtr& f, const json& j) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(f->e())) {
    throw Error(ErrorKind::BadInput, "element literal must be an array of e = " + std::to_string(f->e()) + " integers");
  }
  std::vector<std::uint64_t> raw;
  for (const auto& c : j) {
    if (c.is_number_unsigned()) {
      raw.push_back(c.get<std::uint64_t>());
    } else if (c.is_number_integer()) {
      raw.push_back(static_cast<std::uint64_t>(c.get<std::int64_t>()));
    } else {
      throw Error(ErrorKind::BadInput, "element literal entries must be integers");
    }
  }
  return RingElement(f, std::move(raw));
}

inline json elements_to_json(const std::vector<RingElement>& v) {
  json out = json::array();
  for (const auto& a : v) out.push_back(element_to_json(a));
  return out;
}

inline json form_to_json(const AdditiveForm& form) {
  return json{{"field", field_to_json(form.field())}, {"d", form.d()}, {"coefficients", elements_to_json(form.coefficients())}};
}

inline AdditiveForm form_from_json(const json& j) {
  try {
    const FieldPtr f = field_from_json(j.at("field"));
    std::vector<RingElement> coeffs;
    for (const auto& c : j.at("coefficients")) coeffs.push_back(element_from_json(f, c));
    return AdditiveForm::make(f, j.at("d").get<int>(), std::move(coeffs));
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadInput, std::string("form: ") + ex.what());
  }
}

inline json valuation_to_json(const Valuation& v) {
  return v.is_finite() ? json(v.value()) : json("AtLeastPrecision");
}

inline json certificate_to_json(const ZeroCertificate& c, const Valuation& achieved) {
  return json{{"assignment", elements_to_json(c.assignment)},
              {"n_target", c.n_target},
              {"pivot", c.pivot},
              {"valuation_achieved", valuation_to_json(achieved)}};
}

inline ZeroCertificate certificate_from_json(const FieldPtr& f, const json& j) {
  try {
    ZeroCertificate c;
    for (const auto& x : j.at("assignment")) c.assignment.push_back(element_from_json(f, x));
    c.n_target = j.at("n_target").get<int>();
    c.pivot = j.at("pivot").get<std::size_t>();
    return c;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadInput, std::string("certificate: ") + ex.what());
  }
}

inline json log_to_json(const std::vector<LogStep>& log) {
  json out = json::array();
  for (const auto& s : log) {
    json steering = json::array();
    for (const auto& mv : s.steering) {
      steering.push_back(json{{"k", mv.k}, {"originals", mv.originals}, {"level_after", valuation_to_json(mv.level_after)}});
    }
    out.push_back(json{{"op", s.op}, {"inputs", s.inputs}, {"steering", steering}, {"result_level", valuation_to_json(s.result_level)}});
  }
  return out;
}

/// Report without timing, so equal inputs give byte-identical files.
inline json report_to_json(const AdditiveForm& form, const SolveReport& r, std::uint64_t seed) {
  json out{{"tool", "ramified-zero"},
           {"version", kToolVersion},
           {"field", field_to_json(form.field())},
           {"seed", seed},
           {"d", form.d()},
           {"s", form.size()},
           {"variables_bound", variables_bound(form.d())},
           {"at_or_above_bound", r.at_or_above_bound},
           {"normalizing_rotation", r.rotation},
           {"strategy", std::string(to_string(r.strategy.kind))},
           {"strategy_level", r.strategy.level},
           {"used_fallback", r.used_fallback},
           {"fallback_reason", r.fallback_reason},
           {"fallback_nodes", r.fallback_nodes},
           {"certificate_rotation", r.strategy_rotation},
           {"working_precision", r.working_precision},
           {"hensel_iterations", r.hensel_iterations}};
  json residuals = json::array();
  for (const auto& v : r.hensel_residuals) residuals.push_back(valuation_to_json(v));
  out["hensel_residuals"] = residuals;
  out["log"] = log_to_json(r.log);
  if (r.certificate) {
    out["status"] = "Solved";
    out["certificate"] = certificate_to_json(*r.certificate, r.achieved);
  } else {
    out["status"] = "Unsolved";
    out["certificate"] = nullptr;
  }
  out["note"] = r.note;
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadInput, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::BadInput, path + ": " + ex.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadInput, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ramified_zero::io
