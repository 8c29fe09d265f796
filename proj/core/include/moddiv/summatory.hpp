#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/certified_real.hpp"
#include "moddiv/multiplicative.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv {

struct BulkOptions {
  // Largest x accepted by the sieve.
  std::uint64_t max_x = 1'000'000'000;
  // Numbers handled per work unit. The result never depends on it.
  std::uint64_t chunk_size = std::uint64_t{1} << 18;
  const WorkerPool* pool = nullptr;
};

// Receives f(first), f(first+1), ... for one chunk. Chunks arrive in
// ascending order.
using BulkConsumer = std::function<void(std::uint64_t first, std::span<const std::int64_t> values)>;

// f(n) for n = 1..x, via a segmented sieve that strips every prime up to
// sqrt(x) from each n and multiplies tabulated prime-power values. Values
// are 64-bit; a value outside that range throws CapacityError.
void bulk_evaluate(const MultiplicativeFunction& f, std::uint64_t x, const BulkConsumer& consumer,
                   const BulkOptions& options = {});
// Convenience: element i holds f(i + 1).
std::vector<std::int64_t> bulk_values(const MultiplicativeFunction& f, std::uint64_t x,
                                      const BulkOptions& options = {});

struct FittedConstant {
  std::string name;
  double value = 0;
  double standard_error = 0;
};

struct SummatoryReport {
  std::string function_id;
  std::vector<std::uint64_t> checkpoints;
  std::vector<BigInt> sums;
  // Filled by residual_analysis.
  std::string main_term;
  std::vector<double> main;
  std::vector<double> residual;
  std::vector<FittedConstant> fitted;
  // Slope of log|residual| against log x over the largest decade.
  std::optional<double> fitted_exponent;
};

// Exact sums S(x) = f(1) + ... + f(x) at each checkpoint (strictly increasing,
// all >= 1).
SummatoryReport summatory(const MultiplicativeFunction& f, std::vector<std::uint64_t> checkpoints,
                          const BulkOptions& options = {});
// Same for n -> f(n)^2.
SummatoryReport second_moment(const MultiplicativeFunction& f,
                              std::vector<std::uint64_t> checkpoints,
                              const BulkOptions& options = {});

// A main-term coefficient: either a known interval or estimated by least
// squares.
struct Coefficient {
  std::optional<CertifiedReal> value;

  static Coefficient fit() { return {}; }
  static Coefficient given(CertifiedReal v) { return {std::move(v)}; }
  bool is_fit() const { return !value.has_value(); }
};

struct MainTermSpec {
  enum class Shape {
    linear,              // A x
    linear_plus_fitted,  // A x + c1 x^(1/2) log x + c2 x^(1/2), c1 and c2 always fitted
    x_log_x,             // A x log x + B x
    quadratic,           // A x^2
  };
  Shape shape = Shape::linear;
  Coefficient A = Coefficient::fit();
  Coefficient B = Coefficient::fit();

  std::string describe() const;
};

// Fills main, residual, fitted and fitted_exponent. Throws UsageError when
// a coefficient must be fitted from fewer than 3 checkpoints.
SummatoryReport residual_analysis(SummatoryReport report, const MainTermSpec& spec);

// Checkpoint lists: "10,100,1e6", "pow10:5..9", or "geom:A..B:k" (k points
// spaced geometrically from A to B inclusive). The result is strictly
// increasing.
std::vector<std::uint64_t> parse_checkpoints(std::string_view text);
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t first, std::uint64_t last,
                                                 std::size_t count);

// CSV with header "x,S,main,residual"; the last two columns are empty
// before residual analysis.
std::string report_csv(const SummatoryReport& report);

}  // namespace moddiv
