// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Runs offline (bundled OEIS fixtures, empty temp cache).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/bound_optimizer.hpp"
#include "moddiv/divisor_systems.hpp"
#include "moddiv/error.hpp"
#include "moddiv/euler_products.hpp"
#include "moddiv/extremal_bounds.hpp"
#include "moddiv/multiplicative.hpp"
#include "moddiv/oeis_client.hpp"
#include "moddiv/perfect_numbers.hpp"
#include "moddiv/summatory.hpp"
#include "oracle_values.hpp"

namespace {

using namespace moddiv;
using u64 = std::uint64_t;
using CR = CertifiedReal;

// A criterion collects failed checks; an empty list means PASS.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 10) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return "{" + s.str() + "}";
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<void(Check&)> body;
};

// ---------------------------------------------------------------------------

void perfect_list(Check& c) {
  const auto r = search_e_inf_perfect(60'000'000'000ULL);
  std::vector<u64> found;
  for (const auto& f : r.found) found.push_back(f.n);
  c.expect(found == oracle::kPublishedPerfect, "found " + join(found));
  for (u64 n : found) {
    c.expect(verify_perfect(to_bigint(n), PerfectKind::e_inf).perfect, std::to_string(n) + " not e-inf-perfect");
    c.expect(verify_perfect(to_bigint(n), PerfectKind::e).perfect, std::to_string(n) + " not e-perfect");
  }
  c.note("candidates=" + std::to_string(r.candidates));
}

void big_verification(Check& c) {
  const BigInt n(oracle::kBigPerfect);
  for (PerfectKind k : {PerfectKind::e_inf, PerfectKind::e}) {
    const auto cert = verify_perfect(n, k);
    c.expect(cert.perfect && cert.sigma == 2 * n, to_string(k) + " sum differs from 2n");
  }
}

void exceptional_set(Check& c) {
  const auto cfg = ExplicitBoundConfig::standard();
  const auto exc = squarefull_exception_scan(cfg, 1'000'000, 4);
  std::vector<u64> ks;
  for (const auto& e : exc) ks.push_back(e.k);
  c.expect(ks == std::vector<u64>{4, 8, 9, 36, 900, 44100}, "exceptions " + join(ks));
  const auto s = suspicious_set_check(cfg, ks, 10'000'000);
  c.expect(s.max == 44100, "suspicious max " + std::to_string(s.max));
  c.expect(s.audit_to == 10'000'000 && s.audit_failures == 0,
           "audit failures " + std::to_string(s.audit_failures));
  c.note("audit min margin " + fmt(s.min_margin, 6) + " at n=" + std::to_string(s.min_margin_at));
}

void prefix_verification(Check& c) {
  const auto cfg = ExplicitBoundConfig::standard();
  const auto r = phie_prefix_verification(cfg, cfg.x0);
  c.expect(r.failures == std::vector<u64>{2, 3, 5, 7}, "failures " + join(r.failures));
  c.expect(r.primes_checked == oracle::kPrimeCountX0, "primes checked " + std::to_string(r.primes_checked));
  c.expect(r.min_margin_from_11 > 0, "nonpositive margin from 11");
  c.note("primes=" + std::to_string(r.primes_checked) + " min margin from 11 = " + fmt(r.min_margin_from_11, 6) +
         " at x=" + std::to_string(r.min_margin_at));
}

// The printed constants are truncated to six decimals, so "contains v" is
// read as: the interval meets [v - 1e-6, v + 1e-6].
void proof_constants(Check& c) {
  const auto pc = mertens_proof_constants(ExplicitBoundConfig::standard());
  auto check = [&](const char* name, const CR& x, const char* printed) {
    const CR v = CR::from_decimal(printed);
    const CR window = CR::from_bounds(v.lo() - 1e-6, v.hi() + 1e-6);
    c.expect(x.overlaps(window), std::string(name) + " = [" + x.lo_string(10) + ", " + x.hi_string(10) +
                                     "] misses " + printed);
    c.expect(x.width() < 1e-5, std::string(name) + " width " + fmt(x.width(), 3));
  };
  check("C1", pc.C1, "0.725132");
  check("C2", pc.C2, "0.769606");
  check("C1*C2/e^-gamma", pc.ratio, "0.993957");
}

void optimizer(Check& c) {
  const auto base = solve(ThresholdVariant::base);
  c.expect(base.counts == ClassCounts{70, 32, 31}, "base counts (" + std::to_string(base.counts.t2) + "," +
                                                      std::to_string(base.counts.t4) + "," +
                                                      std::to_string(base.counts.t8) + ")");
  c.expect(base.log10_bound.lo() >= 801.9 && base.log10_bound.hi() <= 802.1,
           "base log10 " + base.log10_bound.to_string(15));
  const auto fb = final_bound();
  c.expect(fb.refined.log10_bound.lo() >= 823.4, "refined log10 " + fb.refined.log10_bound.to_string(15));
  c.expect(fb.log10_bound.lo() >= 816.1, "final log10 " + fb.log10_bound.to_string(15));
  c.note("base " + base.log10_bound.to_string(12) + ", refined " + fb.refined.log10_bound.to_string(12) +
         ", final " + fb.log10_bound.to_string(12));
}

void b_table_exact(Check& c) {
  const auto& s = function_by_id("sigma_e_inf");
  c.expect(s.at_prime_power(BigInt(2), 3) == 10, "sigma(2^3)");
  c.expect(s.at_prime_power(BigInt(2), 6) == 78, "sigma(2^6)");
  c.expect(b_upper_exact(3) == ExactRatio(5, 4), "b_upper(3)");
  c.expect(b_upper_exact(6) == ExactRatio(39, 32), "b_upper(6)");
}

// Sieve estimate of a leading constant at x.
struct Estimate {
  const char* name;
  const char* target;
  std::function<double(u64)> at;
};

void mean_values(Check& c) {
  const std::vector<u64> xs = {100'000, 1'000'000, 10'000'000};
  auto ratio = [](const char* id, int power) {
    return [id, power](u64 x) {
      const auto r = summatory(function_by_id(id), {x});
      return r.sums[0].get_d() / std::pow(static_cast<double>(x), power);
    };
  };
  // tau_inf: A x log x + B x fitted over the decade below x.
  auto fitted = [](u64 x) {
    auto r = summatory(function_by_id("tau_inf"), geometric_checkpoints(x / 10, x, 12));
    MainTermSpec spec;
    spec.shape = MainTermSpec::Shape::x_log_x;
    r = residual_analysis(std::move(r), spec);
    return r.fitted.at(0).value;
  };
  const std::vector<Estimate> estimates = {
      {"E_sigma C1", "E_sigma", ratio("E_sigma", 1)},
      {"tau_inf D1", "tau_inf_log", fitted},
      {"frak_f_e C", "frak_f_e", ratio("frak_f_e", 2)},
      {"E_tau_inf A", "E_tau_inf", ratio("E_tau_inf", 1)},
  };
  for (const auto& e : estimates) {
    const double K = leading_constant(e.target).value.mid();
    std::vector<double> rel;
    for (u64 x : xs) rel.push_back(std::fabs(e.at(x) - K) / K);
    c.expect(rel.back() < 0.01, std::string(e.name) + " relative error " + fmt(rel.back(), 3) + " at 1e7");
    c.expect(rel.back() < rel.front(), std::string(e.name) + " discrepancy does not shrink (" +
                                           fmt(rel.front(), 3) + " -> " + fmt(rel.back(), 3) + ")");
    c.note(std::string(e.name) + " = " + fmt(K, 12) + ", rel err " + fmt(rel[0], 3) + " / " + fmt(rel[1], 3) +
           " / " + fmt(rel[2], 3));
  }
}

void oracle_equivalence(Check& c) {
  struct Pair {
    const char* tau;
    const char* sigma;
    DivisorRelation rel;
  };
  const std::vector<Pair> pairs = {
      {"tau", "sigma", DivisorRelation::ordinary()},
      {"tau_e", "sigma_e", DivisorRelation::exponential()},
      {"tau_inf", "sigma_inf", DivisorRelation::infinitary()},
      {"tau_e_inf", "sigma_e_inf", DivisorRelation::e_infinitary()},
  };
  u64 mismatches = 0;
  for (u64 n = 1; n <= 10'000; ++n) {
    const Factorization f = factorize_u64(n);
    for (const auto& p : pairs) {
      const auto set = divisor_set(f, p.rel);
      BigInt sum = 0;
      for (u64 d : set) sum += to_bigint(d);
      if (function_by_id(p.tau)(f) != static_cast<unsigned long>(set.size())) ++mismatches;
      if (function_by_id(p.sigma)(f) != sum) ++mismatches;
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
}

void kary_convergence(Check& c) {
  KaryDivisors kary;
  std::vector<std::string> late;
  for (u64 p : {2, 3}) {
    u64 n = 1;
    for (unsigned a = 1; a <= 16; ++a) {
      n *= p;
      const auto inf = divisor_set(n, DivisorRelation::infinitary());
      // First level from which every level up to 24 gives the infinitary set.
      unsigned first = 25;
      for (unsigned level = 24; level >= 1 && kary.of(n, level) == inf; --level) first = level;
      if (first > 8) late.push_back(std::to_string(p) + "^" + std::to_string(a) + " at level " + std::to_string(first));
    }
  }
  c.expect(late.empty(), "stabilises only after level 8: " + join(late));
}

void sigma_sup(Check& c) {
  const auto r = verify_sigma_sup();
  c.expect(r.argmax == 2 && r.max_is_log3_over_2, "max over n<=6 is not log3/2 at n=2");
  c.expect(r.g7_below_log3_over_2, "g(7) = " + r.g7.to_string(10));
  c.expect(r.decreasing, "majorant not decreasing");
  c.note("g(7) = " + r.g7.to_string(12) + ", grid to " + std::to_string(r.grid_last));
}

void oeis(Check& c) {
  const auto cache = std::filesystem::temp_directory_path() / ("moddiv-acceptance-" + std::to_string(::getpid()));
  std::filesystem::remove_all(cache);
  std::filesystem::create_directories(cache);
  FetchOptions o;
  o.mode = FetchMode::offline;
  o.cache_dir = cache;
  for (auto [seq, fn] : {std::pair{"A049419", "tau_e"}, std::pair{"A051377", "sigma_e"},
                         std::pair{"A037445", "tau_inf"}, std::pair{"A049417", "sigma_inf"}}) {
    const auto r = cross_check(seq, fn, 1000, o);
    c.expect(r.matched(), std::string(seq) + " mismatch at n=" +
                              (r.first_mismatch ? std::to_string(r.first_mismatch->index) : ""));
    c.expect(r.source == BFileSource::bundled, std::string(seq) + " not from the pinned fixture");
  }
  std::filesystem::remove_all(cache);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "perfect-number list to 6e10", 900, perfect_list},
      {2, "40-digit number verifies e-inf- and e-perfect", 10, big_verification},
      {3, "exceptional set and audit to 1e7", 120, exceptional_set},
      {4, "prefix verification to x0 = 10544111", 120, prefix_verification},
      {5, "proof constants 0.725132, 0.769606, 0.993957", 60, proof_constants},
      {6, "optimizer bounds 801.9-802.1, >= 823.4, >= 816.1", 60, optimizer},
      {7, "b-table exactness", 10, b_table_exact},
      {8, "mean-value leading constants within 1% at 1e7", 600, mean_values},
      {9, "formula equals set enumeration for n <= 1e4", 600, oracle_equivalence},
      {10, "k-ary sets stabilise to infinitary by level 8", 60, kary_convergence},
      {11, "sigma-sup verification", 60, sigma_sup},
      {12, "OEIS cross-check offline, 1000 terms", 60, oeis},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs <= cr.budget_seconds, "runtime " + fmt(secs, 3) + " s exceeds " + fmt(cr.budget_seconds) + " s");
    const bool ok = c.failures().empty();
    failed += !ok;
    std::printf("%s criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs);
    for (const auto& f : c.failures()) std::printf("    failed: %s\n", f.c_str());
    for (const auto& n : c.notes()) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
