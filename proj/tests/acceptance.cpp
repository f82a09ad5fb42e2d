// Acceptance driver: one PASS/FAIL line per criterion, exit 1 on any FAIL.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "ramified_zero/io.hpp"
#include "ramified_zero/oracle.hpp"
#include "ramified_zero/ramified_zero.hpp"

namespace rz = ramified_zero;
namespace oracle = ramified_zero::oracle;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kSolveSeconds = 5.0;
constexpr double kBinsSeconds = 60.0;
constexpr double kDispatchSeconds = 60.0;
constexpr int kHenselIterations = 8;

struct FieldCase {
  std::string name;
  int e;
  std::vector<std::int64_t> eisenstein;
};

const std::vector<FieldCase>& fields() {
  static const std::vector<FieldCase> all{{"x-2", 1, {-2}},
                                          {"x^2-2", 2, {-2, 0}},
                                          {"x^2+2", 2, {2, 0}},
                                          {"x^2-2x+2", 2, {2, -2}},
                                          {"x^3-2", 3, {-2, 0, 0}}};
  return all;
}

rz::FieldPtr make(const FieldCase& c) { return rz::Field::make(c.e, c.eisenstein, rz::default_precision(c.e)); }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

rz::RingElement random_element(const rz::FieldPtr& f, std::mt19937_64& rng) {
  std::vector<std::uint64_t> raw(static_cast<std::size_t>(f->e()));
  for (auto& c : raw) c = rng();
  return rz::RingElement(f, std::move(raw));
}

rz::RingElement random_unit(const rz::FieldPtr& f, std::mt19937_64& rng) {
  std::vector<std::uint64_t> raw(static_cast<std::size_t>(f->e()));
  for (auto& c : raw) c = rng();
  raw[0] |= 1U;
  return rz::RingElement(f, std::move(raw));
}

// Every certificate emitted anywhere in this run goes through here.
struct Soundness {
  std::size_t checked = 0;
  std::size_t unsound = 0;
  bool check(const rz::AdditiveForm& form, const rz::ZeroCertificate& cert) {
    ++checked;
    const bool ok = oracle::check_certificate(form, cert).passed;
    if (!ok) ++unsound;
    return ok;
  }
};

Soundness soundness;
int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
  if (!pass) ++failures;
}

void criterion_end_to_end() {
  std::size_t runs = 0, certified = 0, verified = 0, fallback = 0;
  double worst = 0;
  for (const auto& c : fields()) {
    auto f = make(c);
    for (int d : {6, 10}) {
      const int s = rz::variables_bound(d);
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto form = oracle::random_form(f, d, static_cast<std::size_t>(s), std::nullopt, 1000 * static_cast<std::uint64_t>(d) + seed);
        rz::SolveOptions opt;
        opt.n_target = 2 * c.e + 10;
        const auto t0 = Clock::now();
        auto report = rz::solve(form, opt);
        worst = std::max(worst, seconds_since(t0));
        ++runs;
        fallback += report.used_fallback;
        if (!report.certificate) continue;
        ++certified;
        if (report.certificate->n_target == *opt.n_target && soundness.check(form, *report.certificate)) ++verified;
      }
    }
  }
  std::ostringstream out;
  out << "certified " << certified << "/" << runs << ", verified " << verified << "/" << runs << " (n_target=2e+10), "
      << fallback << " via fallback, slowest solve " << worst << " s (limit " << kSolveSeconds << " s)";
  verdict(1, certified == runs && verified == runs && worst < kSolveSeconds, out.str());
}

void criterion_ring() {
  std::size_t triples = 0, mismatches = 0, additive_cases = 0, additive_failures = 0, identity_cases = 0,
              identity_failures = 0;
  std::mt19937_64 rng(20221006);
  for (const auto& c : fields()) {
    auto f = make(c);
    oracle::NaiveRing ring(*f);
    for (int t = 0; t < 10000; ++t) {
      auto a = random_element(f, rng), b = random_element(f, rng), x = random_element(f, rng);
      const auto na = ring.from_element(a), nb = ring.from_element(b), nx = ring.from_element(x);
      ++triples;
      const bool agree = ring.agree(ring.from_element(a * b + x), ring.add(ring.mul(na, nb), nx)) &&
                         ring.agree(ring.from_element((a - b) * x), ring.mul(ring.sub(na, nb), nx)) &&
                         ring.agree(ring.from_element(rz::pow(a, 6)), ring.power(na, 6)) &&
                         ring.valuation(nx) == (x.valuation().is_finite() ? std::optional<int>(x.valuation().value())
                                                                          : std::nullopt);
      if (!agree) ++mismatches;
      // scale by random powers of pi so that valuations spread out
      auto p = f->pi_power(static_cast<int>(rng() % 8)) * a;
      auto q = f->pi_power(static_cast<int>(rng() % 8)) * b;
      const auto vp = p.valuation(), vq = q.valuation();
      if (vp.is_finite() && vq.is_finite() && vp.value() + vq.value() < f->precision()) {
        ++additive_cases;
        if ((p * q).valuation() != rz::Valuation::of(vp.value() + vq.value())) ++additive_failures;
      }
    }
    for (int d : {6, 10}) {
      for (int k = 0; k < c.e; ++k) {
        ++identity_cases;
        const auto pk = f->pi_power(k);
        const auto lhs = rz::pow(f->one() + pk, static_cast<std::uint64_t>(d));
        const auto diff = lhs - f->one() - pk * pk;
        const auto ndiff = ring.sub(ring.power(ring.add(ring.constant(1), ring.pi_power(k)), d),
                                    ring.add(ring.constant(1), ring.pi_power(2 * k)));
        const auto nv = ring.valuation(ndiff);
        if (!diff.valuation().reaches(2 * k + 1) || (nv && *nv < 2 * k + 1)) ++identity_failures;
      }
    }
  }
  std::ostringstream out;
  out << "oracle mismatches " << mismatches << "/" << triples << " triples, additivity failures " << additive_failures
      << "/" << additive_cases << ", (1+pi^k)^d identity failures " << identity_failures << "/" << identity_cases;
  verdict(3, mismatches == 0 && additive_failures == 0 && identity_failures == 0, out.str());
}

void criterion_bins() {
  const int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  bool pass = true;
  std::ostringstream out;
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 4}, {2, 5}, {3, 6}}) {
    const auto t0 = Clock::now();
    auto c = rz::exhaustive_bins(m, n, threads);
    const double secs = seconds_since(t0);
    std::uint64_t expected = 1;
    for (int i = 0; i < n * (n - 1) / 2; ++i) expected *= static_cast<std::uint64_t>(m);
    pass = pass && c.failures == 0 && c.checked == expected && (m != 3 || secs <= kBinsSeconds);
    out << "exhaustive(" << m << "," << n << ") " << c.failures << "/" << c.checked << " failures in " << secs << " s; ";
  }
  std::uint64_t sampled_failures = 0, sampled = 0;
  for (int m = 4; m <= 8; ++m) {
    auto c = rz::sampled_bins(m, m + 3, 100000, rz::kDefaultSeed + static_cast<std::uint64_t>(m));
    sampled += c.checked;
    sampled_failures += c.failures;
  }
  int extremal_hits = 0;
  for (int m = 1; m <= 8; ++m) {
    if (rz::find_disjoint_same_bin(rz::extremal_assignment(m))) ++extremal_hits;
  }
  pass = pass && sampled == 500000 && sampled_failures == 0 && extremal_hits == 0;
  out << "sampled m=4..8 " << sampled_failures << "/" << sampled << " failures; extremal m<=8 with a disjoint pair: "
      << extremal_hits;
  verdict(4, pass, out.str());
}

void criterion_steering() {
  std::mt19937_64 rng(5);
  std::size_t pairs = 0, checks = 0, vacuous = 0, violations = 0, literal_failures = 0;
  for (int e : {2, 3}) {
    std::vector<std::int64_t> eis(static_cast<std::size_t>(e), 0);
    eis[0] = -2;
    auto f = rz::Field::make(e, eis, rz::default_precision(e));
    oracle::NaiveRing ring(*f);
    for (int t = 0; t < 1000; ++t) {
      const int level = static_cast<int>(rng() % 6);
      auto form = rz::AdditiveForm::make(f, 6, {f->pi_power(level) * random_unit(f, rng), f->pi_power(level) * random_unit(f, rng)});
      rz::Contractor ctx(form);
      auto x = ctx.lift_original(0), y = ctx.lift_original(1);
      ++pairs;
      bool literal = true;
      // direct evaluation through the oracle, not through the record
      auto level_of = [&](const rz::DerivedVariable& v) { return ring.valuation(oracle::evaluate(ring, form, v.expand(form))); };
      for (int k = 1; k < e; ++k) {
        const int target = level + 2 * k;
        auto stop = ctx.steer_to(x, y, target);
        auto past = ctx.steer_at_least(x, y, target + 1);
        const bool stop_ok = stop && level_of(*stop) == std::optional<int>(target);
        const bool past_ok = past && (!level_of(*past) || *level_of(*past) >= target + 1);
        if (!(stop_ok && past_ok)) literal = false;
        if (!ctx.steer_at_least(x, y, target)) {
          ++vacuous;
          continue;
        }
        ++checks;
        if (!(stop_ok && past_ok)) ++violations;
      }
      if (!literal) ++literal_failures;
    }
  }
  std::ostringstream out;
  out << "conditional reading (level l+2k reachable => stop exactly and pass it): " << violations << " violations over "
      << checks << " checks, " << vacuous << " vacuous (l+2k unreachable); literal reading holds for "
      << (pairs - literal_failures) << "/" << pairs << " pairs";
  verdict(5, violations == 0 && checks > 0, out.str());
}

void criterion_hensel() {
  std::mt19937_64 rng(6);
  std::size_t instances = 0, bad_residuals = 0, too_many = 0, unsound_before = soundness.unsound, overlap_checked = 0,
              overlap_missing = 0;
  int max_iterations = 0;
  const int n_small = 4;
  while (instances < 1000) {
    const auto& c = fields()[instances % fields().size()];
    auto f = make(c);
    const int d = (instances / fields().size()) % 2 == 0 ? 6 : 10;
    const std::size_t s = 3;
    std::vector<rz::RingElement> b(s, f->zero()), a(s, f->zero());
    b[0] = random_unit(f, rng);
    auto sum = f->zero();
    for (std::size_t i = 1; i < s; ++i) {
      b[i] = random_element(f, rng);
      a[i] = random_unit(f, rng);
      sum = sum + a[i] * rz::pow(b[i], static_cast<std::uint64_t>(d));
    }
    const int t = 2 * c.e + 1 + static_cast<int>(rng() % 3);
    auto a0 = (f->pi_power(t) * random_element(f, rng) - sum) * rz::inverse(rz::pow(b[0], static_cast<std::uint64_t>(d)));
    if (!a0.is_unit()) continue;  // pivot coefficient must sit at level 0
    a[0] = a0;
    auto form = rz::AdditiveForm::make(f, d, a);
    const int n_target = 2 * c.e + 10;
    auto h = rz::hensel_lift(form, b, 0, n_target);
    ++instances;
    max_iterations = std::max(max_iterations, h.iterations);
    if (h.iterations > kHenselIterations) ++too_many;
    bool increasing = !h.residuals.empty() && h.residuals.back().reaches(n_target);
    for (std::size_t i = 1; i < h.residuals.size(); ++i) increasing = increasing && h.residuals[i - 1] < h.residuals[i];
    if (!increasing) ++bad_residuals;
    soundness.check(form, {h.assignment, n_target, 0});
    if (instances % 4 == 0) {
      auto zeros = oracle::brute_force_zero(form, n_small, s);
      std::vector<std::uint32_t> code;
      for (const auto& x : h.assignment) code.push_back(oracle::code_of(x, n_small));
      ++overlap_checked;
      if (std::find(zeros.begin(), zeros.end(), code) == zeros.end()) ++overlap_missing;
    }
  }
  std::ostringstream out;
  out << instances << " instances: non-increasing residuals " << bad_residuals << ", over " << kHenselIterations
      << " iterations " << too_many << " (max " << max_iterations << "), unsound lifts "
      << soundness.unsound - unsound_before << "; truncated zeros missing from brute force " << overlap_missing << "/"
      << overlap_checked;
  verdict(6, bad_residuals == 0 && too_many == 0 && soundness.unsound == unsound_before && overlap_missing == 0,
          out.str());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + RZ_CLI_PATH + "' " + args + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_dispatch() {
  const auto out_path = (std::filesystem::temp_directory_path() / "rz_acceptance_dispatch.json").string();
  const auto t0 = Clock::now();
  const int code = run_cli("dispatch-report --d 6 --s 28 --m 3 --e 2 --out '" + out_path + "'");
  const double secs = seconds_since(t0);
  bool pass = code == 0 && secs < kDispatchSeconds;
  std::size_t feasible = 0, classified = 0;
  std::vector<rz::LevelProfile> fallback;
  if (pass) {
    auto j = rz::io::read_json_file(out_path);
    feasible = j["feasible_profiles"].get<std::size_t>();
    for (const auto& [k, v] : j["covered_by"].items()) classified += v.get<std::size_t>();
    for (const auto& p : j["fallback_profiles"]) fallback.push_back({p["profile"].get<std::vector<int>>(), 28});
  }
  std::filesystem::remove(out_path);
  const std::size_t independent = oracle::enumerate_profiles(6, 28).size();
  const bool has_interleaved =
      std::find(fallback.begin(), fallback.end(), rz::LevelProfile{{9, 1, 9, 1, 7, 1}, 28}) != fallback.end() ||
      rz::dispatch(rz::LevelProfile{{9, 1, 9, 1, 7, 1}, 28}, 3, 2).kind != rz::StrategyKind::Fallback;
  pass = pass && feasible == independent && classified == feasible && has_interleaved;

  std::size_t forms = 0, solved = 0, unsound_before = soundness.unsound;
  for (const auto& p : fallback) {
    for (const auto& c : fields()) {
      if (c.e != 2) continue;
      auto f = make(c);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto form = oracle::random_form(f, 6, 28, p, seed);
        auto report = rz::solve(form);
        ++forms;
        if (report.certificate) {
          ++solved;
          soundness.check(form, *report.certificate);
        }
      }
    }
  }
  pass = pass && soundness.unsound == unsound_before;
  std::ostringstream out;
  out << "report in " << secs << " s (limit " << kDispatchSeconds << " s), " << classified << "/" << feasible
      << " profiles classified (independent count " << independent << "), " << fallback.size()
      << " fallback profiles incl. (9,1,9,1,7,1): " << (has_interleaved ? "yes" : "no") << "; fallback forms solved "
      << solved << "/" << forms << " (rate " << (forms ? 100.0 * static_cast<double>(solved) / static_cast<double>(forms) : 0.0)
      << "%), unsound " << soundness.unsound - unsound_before;
  verdict(7, pass, out.str());
}

}  // namespace

int main() {
  std::cout.setf(std::ios::fixed);
  std::cout.precision(3);
  try {
    criterion_end_to_end();
    criterion_ring();
    criterion_bins();
    criterion_steering();
    criterion_hensel();
    criterion_dispatch();
  } catch (const std::exception& ex) {
    std::cout << "aborted: " << ex.what() << std::endl;
    return 1;
  }
  std::ostringstream out;
  out << soundness.unsound << " unsound of " << soundness.checked << " certificates checked by the oracle";
  verdict(2, soundness.unsound == 0 && soundness.checked > 0, out.str());
  std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
