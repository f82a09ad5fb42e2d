// ramified-zero: command-line front end.
//
// Exit codes: 0 success or verified, 2 unsolved or check failed, 1 usage or
// input error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ramified_zero/oracle.hpp"
#include "ramified_zero/ramified_zero.hpp"

namespace rz = ramified_zero;
using rz::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kUnsolved = 2;

unsigned thread_count() {
  if (const char* env = std::getenv("RAMIFIED_ZERO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

json header(std::uint64_t seed) {
  return json{{"tool", "ramified-zero"}, {"version", rz::io::kToolVersion}, {"seed", seed}};
}

void emit(const json& j, bool as_json, const std::string& summary) {
  if (as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << summary;
  }
}

std::string profile_str(const rz::LevelProfile& p) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < p.d(); ++i) os << (i ? "," : "") << p.counts[static_cast<std::size_t>(i)];
  os << ')';
  return os.str();
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw rz::Error(rz::ErrorKind::BadInput, "not an integer list: " + s);
    }
  }
  return out;
}

std::string default_certificate_path(const std::string& input) {
  std::string stem = input;
  const auto slash = stem.find_last_of('/');
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  if (stem.size() > 5 && stem.ends_with(".json")) stem.resize(stem.size() - 5);
  return stem + ".cert.json";
}

struct SolveArgs {
  std::string input;
  std::optional<int> precision;
  std::size_t budget = rz::kDefaultBudget;
  std::uint64_t seed = rz::kDefaultSeed;
  std::string report;
  std::string certificate;
};

int run_solve(const SolveArgs& a, bool as_json) {
  const rz::AdditiveForm form = rz::io::form_from_json(rz::io::read_json_file(a.input));
  rz::SolveOptions opt;
  opt.n_target = a.precision;
  opt.budget = a.budget;
  opt.seed = a.seed;
  const rz::SolveReport r = rz::solve(form, opt);
  const json report = rz::io::report_to_json(form, r, a.seed);
  if (!a.report.empty()) rz::io::write_json_file(a.report, report);
  std::ostringstream os;
  os << "field " << form.field().describe() << ", d=" << form.d() << ", s=" << form.size() << '\n'
     << "strategy " << rz::to_string(r.strategy.kind) << " at level " << r.strategy.level
     << (r.used_fallback ? " (fallback used)" : "") << '\n';
  if (!r.certificate) {
    os << "Unsolved" << (r.note.empty() ? "" : ": " + r.note) << '\n';
    emit(report, as_json, os.str());
    return kUnsolved;
  }
  const std::string cert_path = a.certificate.empty() ? default_certificate_path(a.input) : a.certificate;
  rz::io::write_json_file(cert_path, rz::io::certificate_to_json(*r.certificate, r.achieved));
  os << "certificate " << cert_path << ": valuation " << r.achieved.str() << " >= " << r.certificate->n_target
     << ", pivot x" << r.certificate->pivot << ", " << r.wall_ms << " ms\n";
  emit(report, as_json, os.str());
  return kOk;
}

int run_verify(const std::string& input, const std::string& cert_path, bool as_json) {
  const rz::AdditiveForm form = rz::io::form_from_json(rz::io::read_json_file(input));
  const rz::ZeroCertificate cert = rz::io::certificate_from_json(form.field_ptr(), rz::io::read_json_file(cert_path));
  const rz::Verification v = rz::verify_certificate(form, cert);
  json out = header(rz::kDefaultSeed);
  out["field"] = rz::io::field_to_json(form.field());
  out["valuation"] = rz::io::valuation_to_json(v.valuation);
  out["n_target"] = cert.n_target;
  out["pivot_is_unit"] = v.pivot_is_unit;
  out["verified"] = v.passed;
  std::ostringstream os;
  os << (v.passed ? "verified" : "check failed") << ": valuation " << v.valuation.str() << " (target " << cert.n_target
     << "), pivot " << (v.pivot_is_unit ? "is" : "is not") << " a unit\n";
  emit(out, as_json, os.str());
  return v.passed ? kOk : kUnsolved;
}

int run_normalize(const std::string& input, const std::string& out_path, bool as_json) {
  const rz::AdditiveForm form = rz::io::form_from_json(rz::io::read_json_file(input));
  const auto [r, rotated] = rz::normalize(form);
  json out = header(rz::kDefaultSeed);
  out["field"] = rz::io::field_to_json(form.field());
  out["rotation"] = r;
  out["profile"] = rz::profile(form).counts;
  out["normalized_profile"] = rz::profile(rotated.form).counts;
  out["shifts"] = rotated.rotation.shifts;
  out["form"] = rz::io::form_to_json(rotated.form);
  if (!out_path.empty()) rz::io::write_json_file(out_path, rz::io::form_to_json(rotated.form));
  std::ostringstream os;
  os << "rotation " << r << ": " << profile_str(rz::profile(form)) << " -> " << profile_str(rz::profile(rotated.form))
     << '\n';
  emit(out, as_json, os.str());
  return kOk;
}

int run_bins(int m, int n, bool exhaustive, std::uint64_t samples, std::uint64_t seed, bool as_json) {
  const rz::BinsCheck c = exhaustive ? rz::exhaustive_bins(m, n, thread_count()) : rz::sampled_bins(m, n, samples, seed);
  json out = header(seed);
  out["m"] = m;
  out["n"] = n;
  out["mode"] = exhaustive ? "exhaustive" : "sampled";
  out["checked"] = c.checked;
  out["failures"] = c.failures;
  std::ostringstream os;
  os << "{checked: " << c.checked << ", failures: " << c.failures << "}\n";
  emit(out, as_json, os.str());
  return c.failures == 0 ? kOk : kUnsolved;
}

struct DispatchArgs {
  int d = 6, s = 28, m = 3, e = 2;
  std::string out;
  int forms = 0;
  std::uint64_t seed = rz::kDefaultSeed;
};

int run_dispatch(const DispatchArgs& a, bool as_json) {
  if (a.d != 2 * a.m) throw rz::Error(rz::ErrorKind::BadInput, "d must equal 2m");
  const auto cov = rz::oracle::dispatch_coverage(a.d, a.s, a.m, a.e);
  json out = header(a.seed);
  out["d"] = a.d;
  out["s"] = a.s;
  out["m"] = a.m;
  out["e"] = a.e;
  out["feasible_profiles"] = cov.feasible;
  out["covered_by"] = cov.covered_by;
  json fallback = json::array();
  std::size_t sampled = 0, solved = 0, unsound = 0;
  std::vector<std::int64_t> eis(static_cast<std::size_t>(a.e), 0);
  eis[0] = -2;
  const rz::FieldPtr field = rz::Field::make(a.e, eis, rz::default_precision(a.e));
  out["field"] = rz::io::field_to_json(*field);
  for (std::size_t i = 0; i < cov.fallback_profiles.size(); ++i) {
    const auto& p = cov.fallback_profiles[i];
    json entry{{"profile", p.counts}};
    if (a.forms > 0) {
      std::size_t ok = 0;
      for (int t = 0; t < a.forms; ++t) {
        const auto form = rz::oracle::random_form(field, a.d, a.s, p, a.seed + 1000 * i + static_cast<std::uint64_t>(t));
        const auto r = rz::solve(form);
        ++sampled;
        if (!r.certificate) continue;
        if (rz::oracle::check_certificate(form, *r.certificate).passed) {
          ++ok;
        } else {
          ++unsound;
        }
      }
      solved += ok;
      entry["forms"] = a.forms;
      entry["solved"] = ok;
    }
    fallback.push_back(entry);
  }
  out["fallback_profiles"] = fallback;
  if (a.forms > 0) {
    out["sampled_forms"] = sampled;
    out["solved_forms"] = solved;
    out["unsound_certificates"] = unsound;
  }
  if (!a.out.empty()) rz::io::write_json_file(a.out, out);
  std::ostringstream os;
  os << cov.feasible << " feasible profiles for d=" << a.d << ", s=" << a.s << '\n';
  for (const auto& [k, v] : cov.covered_by) os << "  " << k << ": " << v << '\n';
  for (const auto& p : cov.fallback_profiles) os << "  fallback " << profile_str(p) << '\n';
  if (a.forms > 0) os << "concrete forms: " << solved << "/" << sampled << " solved, " << unsound << " unsound\n";
  emit(out, as_json, os.str());
  return unsound == 0 ? kOk : kUnsolved;
}

int run_brute(const std::string& input, int n_small, int support, bool as_json) {
  const rz::AdditiveForm form = rz::io::form_from_json(rz::io::read_json_file(input));
  const auto zeros = rz::oracle::brute_force_zero(form, n_small, support);
  json out = header(rz::kDefaultSeed);
  out["field"] = rz::io::field_to_json(form.field());
  out["n_small"] = n_small;
  out["support"] = support;
  out["count"] = zeros.size();
  json list = json::array();
  for (std::size_t i = 0; i < zeros.size() && i < 100; ++i) list.push_back(zeros[i]);
  out["first_zeros"] = list;
  std::ostringstream os;
  os << zeros.size() << " zeros mod pi^" << n_small << " with support <= " << support << '\n';
  emit(out, as_json, os.str());
  return zeros.empty() ? kUnsolved : kOk;
}

struct RandomArgs {
  int e = 1;
  std::string eisenstein;
  int precision = 0;
  int d = 6, s = 28;
  std::string profile;
  std::uint64_t seed = rz::kDefaultSeed;
  std::string out;
};

int run_random(const RandomArgs& a) {
  std::vector<std::int64_t> eis;
  if (a.eisenstein.empty()) {
    eis.assign(static_cast<std::size_t>(a.e), 0);
    eis[0] = -2;
  } else {
    for (int c : parse_int_list(a.eisenstein)) eis.push_back(c);
  }
  const rz::FieldPtr f = rz::Field::make(a.e, eis, a.precision > 0 ? a.precision : rz::default_precision(a.e));
  std::optional<rz::LevelProfile> p;
  if (!a.profile.empty()) p = rz::LevelProfile{parse_int_list(a.profile), a.s};
  const auto form = rz::oracle::random_form(f, a.d, a.s, p, a.seed);
  const json j = rz::io::form_to_json(form);
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    rz::io::write_json_file(a.out, j);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nontrivial zeros of additive forms over totally ramified extensions of Q_2"};
  app.set_version_flag("--version", rz::io::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output on stdout");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Find and certify a nontrivial zero");
  solve->add_option("--input", sa.input, "Form file")->required()->check(CLI::ExistingFile);
  solve->add_option("--precision", sa.precision, "Target valuation n_target (default: field precision)");
  solve->add_option("--budget", sa.budget, "Fallback search node budget");
  solve->add_option("--seed", sa.seed, "Seed recorded in the report");
  solve->add_option("--report", sa.report, "Write the solve report here");
  solve->add_option("--certificate", sa.certificate, "Certificate path (default: <input stem>.cert.json)");

  std::string v_input, v_cert;
  auto* verify = app.add_subcommand("verify", "Check a zero certificate");
  verify->add_option("--input", v_input, "Form file")->required()->check(CLI::ExistingFile);
  verify->add_option("--certificate", v_cert, "Certificate file")->required()->check(CLI::ExistingFile);

  std::string n_input, n_out;
  auto* norm = app.add_subcommand("normalize", "Rotate levels to meet the prefix bounds");
  norm->add_option("--input", n_input, "Form file")->required()->check(CLI::ExistingFile);
  norm->add_option("--out", n_out, "Write the normalized form here");

  int b_m = 0, b_n = 0;
  bool b_exhaustive = false;
  std::uint64_t b_samples = 100000, b_seed = rz::kDefaultSeed;
  auto* bins = app.add_subcommand("bins-check", "Check the two-disjoint-pairs lemma");
  bins->add_option("--m", b_m, "Bins")->required()->check(CLI::Range(1, 64));
  bins->add_option("--n", b_n, "Objects")->required()->check(CLI::Range(2, 64));
  auto* ex = bins->add_flag("--exhaustive", b_exhaustive, "Check every assignment");
  bins->add_option("--samples", b_samples, "Random assignments")->excludes(ex);
  bins->add_option("--seed", b_seed, "Sampling seed");

  DispatchArgs da;
  auto* disp = app.add_subcommand("dispatch-report", "Classify every normalized level profile");
  disp->add_option("--d", da.d, "Degree")->required();
  disp->add_option("--s", da.s, "Variables")->required();
  disp->add_option("--m", da.m, "d / 2")->required();
  disp->add_option("--e", da.e, "Ramification degree (field x^e - 2 for sampled forms)")->required();
  disp->add_option("--out", da.out, "Write the report here");
  disp->add_option("--forms", da.forms, "Random forms to solve per fallback profile");
  disp->add_option("--seed", da.seed, "Seed for sampled forms");

  std::string br_input;
  int br_n = 4, br_support = 8;
  auto* brute = app.add_subcommand("brute", "Enumerate small zeros modulo pi^n");
  brute->add_option("--input", br_input, "Form file")->required()->check(CLI::ExistingFile);
  brute->add_option("--n-small", br_n, "Digits");
  brute->add_option("--support", br_support, "Maximum support");

  RandomArgs ra;
  auto* rnd = app.add_subcommand("random", "Generate a reproducible random form");
  rnd->add_option("--e", ra.e, "Ramification degree");
  rnd->add_option("--eisenstein", ra.eisenstein, "c_0,...,c_{e-1} (default: x^e - 2)");
  rnd->add_option("--field-precision", ra.precision, "Field precision (default 8e+16)");
  rnd->add_option("--d", ra.d, "Degree");
  rnd->add_option("--s", ra.s, "Variables");
  rnd->add_option("--profile", ra.profile, "Level counts s_0,...,s_{d-1}");
  rnd->add_option("--seed", ra.seed, "Seed");
  rnd->add_option("--out", ra.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) return run_solve(sa, as_json);
    if (*verify) return run_verify(v_input, v_cert, as_json);
    if (*norm) return run_normalize(n_input, n_out, as_json);
    if (*bins) return run_bins(b_m, b_n, b_exhaustive, b_samples, b_seed, as_json);
    if (*disp) return run_dispatch(da, as_json);
    if (*brute) return run_brute(br_input, br_n, br_support, as_json);
    if (*rnd) return run_random(ra);
  } catch (const rz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
