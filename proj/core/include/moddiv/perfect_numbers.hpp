#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv {

// sigma^(e)(n)/n or sigma^(e)inf(n)/n, exactly. id is sigma_e or sigma_e_inf
// (kebab-case accepted); anything else throws UsageError.
ExactRatio abundancy(std::string_view id, const Factorization& f);

enum class PerfectKind { e, e_inf };
std::string to_string(PerfectKind kind);
// Accepts "e", "e-inf", "e_inf".
PerfectKind parse_perfect_kind(std::string_view text);

struct PerfectCertificate {
  BigInt n;
  PerfectKind kind = PerfectKind::e_inf;
  Factorization factorization;
  BigInt sigma;   // sigma^(e)(n) or sigma^(e)inf(n)
  BigInt two_n;   // 2n
  bool perfect = false;
};

// Exact check sigma(n) = 2n after a full factorization of n. Factorization
// failures propagate.
PerfectCertificate verify_perfect(const BigInt& n, PerfectKind kind);

struct PerfectFind {
  std::uint64_t n = 0;
  Factorization factorization;
};

struct SearchOptions {
  const WorkerPool* pool = nullptr;
  // JSON lines ledger; when set, numbers already covered by earlier runs are
  // taken from it and new finds are appended.
  std::optional<std::filesystem::path> ledger;
};

struct SearchReport {
  PerfectKind kind = PerfectKind::e_inf;
  std::uint64_t limit = 0;
  std::vector<PerfectFind> found;  // ascending
  std::uint64_t candidates = 0;    // square-full numbers examined in this run
  std::uint64_t resumed_from = 0;  // values <= this came from the ledger
};

// Every square-full e-inf-perfect n <= limit, ascending. Writing n = k l
// with k square-full and l squarefree coprime to k, sigma^(e)inf(l) = l gives
// sigma^(e)inf(n)/n = sigma^(e)inf(k)/k, so the perfect numbers are exactly
// the products of a square-full perfect k with squarefree l coprime to k
// (36 * 5 = 180 is one). The search therefore enumerates square-full k only,
// through the a^2 b^3 driver partitioned by b, and reports k with abundancy
// exactly 2. limit <= 10^12. The same reasoning holds for sigma^(e), so
// search_perfect also serves kind e.
SearchReport search_perfect(PerfectKind kind, std::uint64_t limit,
                            const SearchOptions& options = {});
SearchReport search_e_inf_perfect(std::uint64_t limit, const SearchOptions& options = {});

// Same predicate as above via a plain sorted scan of square-full numbers;
// used to check that the result does not depend on the driver order.
std::vector<std::uint64_t> search_perfect_sorted(PerfectKind kind, std::uint64_t limit);

struct ParityReport {
  std::uint64_t limit = 0;
  std::uint64_t odd_candidates = 0;       // odd square-full k <= limit examined
  std::vector<std::uint64_t> odd_perfect;  // odd k with abundancy 2 (expected empty)
  // sigma^(e)inf(p^a) even for odd primes p <= 1000 and 2 <= a <= 64.
  std::uint64_t lemma_checks = 0;
  std::uint64_t lemma_failures = 0;
  // sigma^(e)inf(p) = p is odd for odd p: the a = 1 case is excluded from the
  // lemma and checked to be odd.
  bool first_power_odd = false;

  bool passed() const { return odd_perfect.empty() && lemma_failures == 0 && first_power_odd; }
};
// limit <= 10^10.
ParityReport parity_scan(std::uint64_t limit, const WorkerPool* pool = nullptr);

}  // namespace moddiv
