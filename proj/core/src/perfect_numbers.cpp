#include "moddiv/perfect_numbers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "moddiv/divisor_systems.hpp"
#include "moddiv/error.hpp"
#include "moddiv/multiplicative.hpp"

namespace moddiv {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u64 kSearchLimit = 1'000'000'000'000;
constexpr u64 kParityLimit = 10'000'000'000;

std::string canonical(std::string_view id) {
  std::string s(id);
  for (char& c : s) {
    if (c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

// Exponent sets for a < 64 used by the machine-word fast path: c | a for
// kind e, c |inf a for kind e_inf.
const std::vector<std::vector<u64>>& exponent_sets(PerfectKind kind) {
  static const auto build = [](PerfectKind k) {
    std::vector<std::vector<u64>> t(64);
    for (u64 a = 1; a < 64; ++a) t[a] = k == PerfectKind::e ? divisors_of(a) : infinitary_divisors(a);
    return t;
  };
  static const std::vector<std::vector<u64>> e_sets = build(PerfectKind::e);
  static const std::vector<std::vector<u64>> e_inf_sets = build(PerfectKind::e_inf);
  return kind == PerfectKind::e ? e_sets : e_inf_sets;
}

const MultiplicativeFunction& sigma_for(PerfectKind kind) {
  return function_by_id(kind == PerfectKind::e ? "sigma_e" : "sigma_e_inf");
}

// sigma^(e) or sigma^(e)inf from machine-word factors; below 10^12 every
// value fits in 128 bits with room to spare (both are <= sigma(k) < 10 k).
u128 sigma_u128(PerfectKind kind, std::span<const std::pair<u64, unsigned>> factors) {
  const auto& table = exponent_sets(kind);
  u128 total = 1;
  for (const auto& [p, a] : factors) {
    u128 local = 0;
    for (u64 c : table[a]) {
      u128 pc = 1;
      for (u64 i = 0; i < c; ++i) pc *= p;
      local += pc;
    }
    total *= local;
  }
  return total;
}

bool abundancy_two(PerfectKind kind, const SquarefullVisit& v) {
  return sigma_u128(kind, v.factors) == static_cast<u128>(v.value) * 2;
}

Factorization factorization_of(const SquarefullVisit& v) {
  return Factorization::from_small(v.factors);
}

const WorkerPool& pool_or_serial(const WorkerPool* pool) {
  return pool ? *pool : WorkerPool::serial();
}

// Splits squarefree b in [1, max_b] into contiguous blocks carrying roughly
// equal enumeration work, the work for b being sqrt(limit / b^3).
std::vector<std::pair<u64, u64>> b_blocks(u64 limit, u64 max_b, std::size_t target) {
  std::vector<double> weight(max_b + 1, 0.0);
  double total = 0;
  for (u64 b = 1; b <= max_b; ++b) {
    weight[b] = std::sqrt(static_cast<double>(limit) / std::pow(static_cast<double>(b), 3));
    total += weight[b];
  }
  std::vector<std::pair<u64, u64>> blocks;
  const double share = total / static_cast<double>(std::max<std::size_t>(target, 1));
  u64 first = 1;
  double acc = 0;
  for (u64 b = 1; b <= max_b; ++b) {
    acc += weight[b];
    if (acc >= share || b == max_b) {
      blocks.emplace_back(first, b);
      first = b + 1;
      acc = 0;
    }
  }
  return blocks;
}

// Runs `accept` over every square-full number <= limit in parallel b-blocks
// and returns the accepted visits sorted by value.
std::vector<PerfectFind> scan_squarefull(u64 limit, const WorkerPool& pool,
                                         const std::function<bool(const SquarefullVisit&)>& accept,
                                         u64& examined) {
  const SquarefullEnumerator en(limit);
  const auto blocks = b_blocks(limit, en.max_b(), 64);
  std::vector<std::vector<PerfectFind>> per_block(blocks.size());
  std::vector<u64> counts(blocks.size(), 0);
  pool.run(blocks.size(), [&](std::size_t i) {
    en.visit_b_range(blocks[i].first, blocks[i].second, [&](const SquarefullVisit& v) {
      ++counts[i];
      if (accept(v)) per_block[i].push_back(PerfectFind{v.value, factorization_of(v)});
    });
  });
  std::vector<PerfectFind> out;
  examined = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    examined += counts[i];
    for (auto& f : per_block[i]) out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(),
            [](const PerfectFind& a, const PerfectFind& b) { return a.n < b.n; });
  return out;
}

nlohmann::json factorization_json(const Factorization& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& pp : f.pairs()) arr.push_back({to_u64(pp.prime), pp.exponent});
  return arr;
}

Factorization factorization_from_json(const nlohmann::json& j) {
  std::vector<std::pair<u64, unsigned>> pairs;
  for (const auto& e : j) pairs.emplace_back(e.at(0).get<u64>(), e.at(1).get<unsigned>());
  return Factorization::from_small(pairs);
}

struct LedgerState {
  u64 covered = 0;
  std::map<u64, Factorization> known;
  std::set<std::pair<u64, u64>> lines;  // (n, verified_at_limit)
};

LedgerState read_ledger(const std::filesystem::path& path, PerfectKind kind) {
  LedgerState st;
  std::ifstream in(path);
  if (!in) return st;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("kind").get<std::string>() != to_string(kind)) continue;
      const u64 n = j.at("n").get<u64>();
      const u64 at = j.at("verified_at_limit").get<u64>();
      Factorization f = factorization_from_json(j.at("factorization"));
      if (f.value() != to_bigint(n)) throw ParseError("factorization does not match n", number);
      st.covered = std::max(st.covered, at);
      st.known.emplace(n, std::move(f));
      st.lines.emplace(n, at);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("ledger " + path.string() + ": " + e.what(), number);
    }
  }
  return st;
}

}  // namespace

ExactRatio abundancy(std::string_view id, const Factorization& f) {
  const std::string key = canonical(id);
  if (key != "sigma_e" && key != "sigma_e_inf") {
    throw UsageError("abundancy: expected sigma_e or sigma_e_inf, got '" + std::string(id) + "'");
  }
  ExactRatio r(function_by_id(key)(f), f.value());
  r.canonicalize();
  return r;
}

std::string to_string(PerfectKind kind) { return kind == PerfectKind::e ? "e" : "e_inf"; }

PerfectKind parse_perfect_kind(std::string_view text) {
  const std::string key = canonical(text);
  if (key == "e") return PerfectKind::e;
  if (key == "e_inf") return PerfectKind::e_inf;
  throw UsageError("unknown perfect-number kind '" + std::string(text) + "' (expected e or e-inf)");
}

PerfectCertificate verify_perfect(const BigInt& n, PerfectKind kind) {
  if (n < 1) throw UsageError("verify_perfect: n must be positive");
  PerfectCertificate c;
  c.n = n;
  c.kind = kind;
  c.factorization = factorize(n, FactorEffort::full);
  c.sigma = sigma_for(kind)(c.factorization);
  c.two_n = 2 * n;
  c.perfect = c.sigma == c.two_n;
  return c;
}

SearchReport search_perfect(PerfectKind kind, std::uint64_t limit, const SearchOptions& options) {
  if (limit > kSearchLimit) throw CapacityError("perfect-number search: limit exceeds 10^12");
  SearchReport report;
  report.kind = kind;
  report.limit = limit;
  LedgerState ledger;
  if (options.ledger) ledger = read_ledger(*options.ledger, kind);
  report.resumed_from = std::min(ledger.covered, limit);

  std::vector<PerfectFind> found;
  for (const auto& [n, f] : ledger.known) {
    if (n <= report.resumed_from) found.push_back(PerfectFind{n, f});
  }
  if (limit >= 4 && ledger.covered < limit) {
    const u64 skip = ledger.covered;
    auto fresh = scan_squarefull(
        limit, pool_or_serial(options.pool),
        [skip, kind](const SquarefullVisit& v) { return v.value > skip && abundancy_two(kind, v); },
        report.candidates);
    // The driver still visits the covered range; those values are skipped, not examined.
    if (skip > 0) report.candidates -= squarefull_count(skip);
    for (auto& f : fresh) {
      // Independent exact confirmation on the arbitrary-precision path.
      if (sigma_for(kind)(f.factorization) != 2 * f.factorization.value()) {
        throw Error("perfect-number search: fast path disagrees with exact evaluation at " +
                    std::to_string(f.n));
      }
      found.push_back(std::move(f));
    }
  }
  std::sort(found.begin(), found.end(),
            [](const PerfectFind& a, const PerfectFind& b) { return a.n < b.n; });
  report.found = std::move(found);

  if (options.ledger && ledger.covered < limit) {
    std::ofstream out(*options.ledger, std::ios::app);
    if (!out) throw Error("cannot append to ledger " + options.ledger->string());
    for (const auto& f : report.found) {
      if (ledger.lines.count({f.n, limit})) continue;
      nlohmann::json j;
      j["n"] = f.n;
      j["factorization"] = factorization_json(f.factorization);
      j["kind"] = to_string(kind);
      j["verified_at_limit"] = limit;
      out << j.dump() << '\n';
    }
  }
  return report;
}

SearchReport search_e_inf_perfect(std::uint64_t limit, const SearchOptions& options) {
  return search_perfect(PerfectKind::e_inf, limit, options);
}

std::vector<std::uint64_t> search_perfect_sorted(PerfectKind kind, std::uint64_t limit) {
  if (limit > kSearchLimit) throw CapacityError("perfect-number search: limit exceeds 10^12");
  if (limit < 4) return {};
  std::vector<std::pair<u64, Factorization>> all;
  SquarefullEnumerator(limit).visit_all([&](const SquarefullVisit& v) {
    all.emplace_back(v.value, factorization_of(v));
  });
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto& sigma = sigma_for(kind);
  std::vector<u64> out;
  for (const auto& [n, f] : all) {
    if (sigma(f) == 2 * f.value()) out.push_back(n);
  }
  return out;
}

ParityReport parity_scan(std::uint64_t limit, const WorkerPool* pool) {
  if (limit > kParityLimit) throw CapacityError("parity_scan: limit exceeds 10^10");
  ParityReport r;
  r.limit = limit;
  if (limit >= 4) {
    u64 examined = 0;
    std::atomic<u64> odd{0};
    const auto hits = scan_squarefull(
        limit, pool_or_serial(pool),
        [&odd](const SquarefullVisit& v) {
          if (v.value % 2 == 0) return false;
          odd.fetch_add(1, std::memory_order_relaxed);
          return abundancy_two(PerfectKind::e_inf, v);
        },
        examined);
    r.odd_candidates = odd.load();
    for (const auto& h : hits) r.odd_perfect.push_back(h.n);
  }
  const auto& sigma = function_by_id("sigma_e_inf");
  r.first_power_odd = true;
  for (u64 p : sieve_primes(1000)) {
    if (p == 2) continue;
    const BigInt bp = to_bigint(p);
    if (mpz_even_p(sigma.at_prime_power(bp, 1).get_mpz_t())) r.first_power_odd = false;
    for (unsigned a = 2; a <= 64; ++a) {
      ++r.lemma_checks;
      if (mpz_odd_p(sigma.at_prime_power(bp, a).get_mpz_t())) ++r.lemma_failures;
    }
  }
  return r;
}

}  // namespace moddiv
