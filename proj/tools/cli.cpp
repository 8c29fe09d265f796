#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/bound_optimizer.hpp"
#include "moddiv/certified_real.hpp"
#include "moddiv/divisor_systems.hpp"
#include "moddiv/error.hpp"
#include "moddiv/euler_products.hpp"
#include "moddiv/extremal_bounds.hpp"
#include "moddiv/multiplicative.hpp"
#include "moddiv/oeis_client.hpp"
#include "moddiv/perfect_numbers.hpp"
#include "moddiv/summatory.hpp"
#include "moddiv/worker_pool.hpp"

namespace moddiv::cli {

namespace {

using Json = nlohmann::ordered_json;
using u64 = std::uint64_t;

// Published e-inf-perfect numbers checked by `verify perfect-list`.
const std::vector<u64> kPublishedPerfect = {36, 1800, 2700, 4769856, 238492800, 357739200,
                                            54531590400};
const char* const kPublishedBig = "1307484087615221689700651798824550400000";

// Sequence/function pairs checked by `verify oeis`.
const std::vector<std::pair<std::string, std::string>> kOeisPairs = {
    {"A049419", "tau_e"}, {"A051377", "sigma_e"}, {"A037445", "tau_inf"}, {"A049417", "sigma_inf"}};

// Integers that fit in 64 bits are JSON numbers, larger ones decimal strings.
Json num(const BigInt& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) return v.get_si();
  if (v > 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64) return to_u64(v);
  return v.get_str();
}

Json interval(const CertifiedReal& x, int digits = 20) {
  Json j;
  j["lo"] = x.lo_string(digits);
  j["hi"] = x.hi_string(digits);
  j["width"] = x.width();
  return j;
}

std::string ratio_string(const ExactRatio& r) { return r.get_str(); }

enum class Format { json, csv, text };

struct Global {
  unsigned threads = 0;
  std::string format = "json";
  long precision_bits = kDefaultPrecisionBits;
  std::string cache_dir;
  bool offline = false;
};

// Flattens nested JSON into (path, scalar) rows for text and CSV output.
void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Result of one subcommand: the JSON document, an optional table for CSV
// output, an optional one-line text rendering, and the exit code.
struct Outcome {
  Json doc;
  std::optional<std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>> table;
  std::optional<std::string> text;
  int code = kOk;
};

void emit(const Outcome& o, Format f, std::ostream& out) {
  switch (f) {
    case Format::json:
      out << o.doc.dump(2) << '\n';
      break;
    case Format::text:
      if (o.text) {
        out << *o.text << '\n';
      } else {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(o.doc, "", rows);
        for (const auto& [k, v] : rows) out << k << ": " << v << '\n';
      }
      break;
    case Format::csv:
      if (o.table) {
        const auto& [header, body] = *o.table;
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
        out << '\n';
        for (const auto& row : body) {
          for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
          out << '\n';
        }
      } else {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(o.doc, "", rows);
        out << "key,value\n";
        for (const auto& [k, v] : rows) out << csv_escape(k) << ',' << csv_escape(v) << '\n';
      }
      break;
  }
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw UsageError("unknown format '" + s + "'");
}

std::vector<u64> parse_u64_list(const std::string& text) {
  std::vector<u64> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_u64(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

Json factorization_json(const Factorization& f) {
  Json arr = Json::array();
  for (const auto& pp : f.pairs()) arr.push_back(Json::array({num(pp.prime), pp.exponent}));
  return arr;
}

FetchOptions fetch_options(const Global& g, bool offline) {
  FetchOptions o;
  o.mode = offline ? FetchMode::offline : FetchMode::online;
  if (!g.cache_dir.empty()) o.cache_dir = g.cache_dir;
  return o;
}

Json cross_check_json(const CrossCheckReport& r) {
  Json j;
  j["sequence"] = r.sequence_id;
  j["function"] = r.function_id;
  j["count"] = r.count;
  j["source"] = to_string(r.source);
  j["matched"] = r.matched();
  if (r.first_mismatch) {
    j["first_mismatch"] = {{"index", r.first_mismatch->index},
                           {"expected", num(r.first_mismatch->expected)},
                           {"actual", num(r.first_mismatch->actual)}};
  } else {
    j["first_mismatch"] = nullptr;
  }
  return j;
}

Json optimizer_json(const OptimizerResult& r) {
  Json j;
  j["variant"] = to_string(r.variant);
  j["counts"] = {{"t2", r.counts.t2}, {"t4", r.counts.t4}, {"t8", r.counts.t8}};
  j["log10_lo"] = r.log10_bound.lo_string(15);
  j["log10_hi"] = r.log10_bound.hi_string(15);
  j["feasible_frontier_size"] = r.frontier_size;
  j["feasible_count"] = r.feasible_count;
  j["box"] = {{"t2", r.box.t2}, {"t4", r.box.t4}, {"t8", r.box.t8}};
  j["box_sufficient"] = r.box_sufficient;
  j["pruned_search_agrees"] = r.pruned_search_agrees;
  return j;
}

// Registers every subcommand on `app`; each handler fills `outcome`.
class Commands {
 public:
  Commands(CLI::App& app, Global& g, Outcome& outcome) : g_(g), out_(outcome) {
    add_eval(app);
    add_divisors(app);
    add_sum(app);
    add_constants(app);
    add_verify(app);
    add_search(app);
    add_optimize(app);
    add_oeis(app);
  }

  // The handler selected by the parse, run after all flags are validated.
  std::function<void()> selected;

 private:
  const WorkerPool& pool() {
    if (!pool_) pool_ = std::make_unique<WorkerPool>(g_.threads);
    return *pool_;
  }

  void select(CLI::App* sub, std::function<void()> fn) {
    sub->callback([this, fn = std::move(fn)] { selected = fn; });
  }

  // --- eval ---------------------------------------------------------------
  void add_eval(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "Evaluate a multiplicative function at n");
    sub->add_option("--function,-f", eval_function_, "Function id (e.g. sigma-e-inf)")->required();
    sub->add_option("--n", eval_n_, "Argument (integer, scientific notation allowed)")->required();
    select(sub, [this] {
      const auto& f = function_by_id(eval_function_);
      const BigInt n = parse_integer(eval_n_);
      if (n < 1) throw UsageError("--n must be >= 1");
      const Factorization fac = factorize(n, FactorEffort::full);
      const BigInt v = f(fac);
      out_.doc["function"] = f.id();
      out_.doc["n"] = num(n);
      out_.doc["factorization"] = fac.to_string();
      out_.doc["value"] = num(v);
      out_.text = v.get_str();
      out_.table = {{"function", "n", "value"}, {{f.id(), n.get_str(), v.get_str()}}};
    });
  }
  std::string eval_function_, eval_n_;

  // --- divisors -----------------------------------------------------------
  void add_divisors(CLI::App& app) {
    auto* sub = app.add_subcommand("divisors", "List the divisor set of n under a relation");
    sub->add_option("--relation,-r", div_relation_,
                    "ordinary, unitary, bi-unitary, k-ary:L, infinitary, exponential, e-infinitary")
        ->required();
    sub->add_option("--n", div_n_, "Argument")->required();
    select(sub, [this] {
      const DivisorRelation rel = DivisorRelation::parse(div_relation_);
      const u64 n = parse_u64(div_n_);
      if (n < 1) throw UsageError("--n must be >= 1");
      const auto ds = divisor_set(n, rel);
      BigInt sum = 0;
      for (u64 d : ds) sum += to_bigint(d);
      out_.doc["relation"] = rel.name();
      out_.doc["n"] = n;
      out_.doc["count"] = ds.size();
      out_.doc["sum"] = num(sum);
      out_.doc["divisors"] = ds;
      std::vector<std::vector<std::string>> rows;
      std::string line;
      for (u64 d : ds) {
        rows.push_back({std::to_string(d)});
        line += (line.empty() ? "" : " ") + std::to_string(d);
      }
      out_.table = {{"divisor"}, rows};
      out_.text = line;
    });
  }
  std::string div_relation_, div_n_;

  // --- sum ----------------------------------------------------------------
  void add_sum(CLI::App& app) {
    auto* sub = app.add_subcommand("sum", "Exact summatory function S(x) at checkpoints");
    sub->add_option("--function,-f", sum_function_, "Function id")->required();
    sub->add_option("--limit", sum_limit_, "Largest x (checkpoints must not exceed it)")->required();
    sub->add_option("--checkpoints", sum_checkpoints_,
                    "Comma list, pow10:A..B or geom:A..B:k (default: the limit only)");
    sub->add_flag("--second-moment", sum_second_, "Sum f(n)^2 instead of f(n)");
    sub->add_option("--main-term", sum_shape_,
                    "none, linear, linear-plus-fitted, x-log-x, quadratic")
        ->default_val("none");
    sub->add_option("--constant", sum_constant_,
                    "Leading-constant target supplying the main-term coefficient A "
                    "(fitted when omitted)");
    select(sub, [this] {
      const auto& f = function_by_id(sum_function_);
      const u64 limit = parse_u64(sum_limit_);
      if (limit < 1) throw UsageError("--limit must be >= 1");
      std::vector<u64> cps =
          sum_checkpoints_.empty() ? std::vector<u64>{limit} : parse_checkpoints(sum_checkpoints_);
      if (cps.back() > limit) throw UsageError("checkpoints exceed --limit");
      if (cps.back() != limit) cps.push_back(limit);
      std::optional<MainTermSpec> spec;
      if (sum_shape_ != "none") {
        MainTermSpec s;
        if (sum_shape_ == "linear") s.shape = MainTermSpec::Shape::linear;
        else if (sum_shape_ == "linear-plus-fitted") s.shape = MainTermSpec::Shape::linear_plus_fitted;
        else if (sum_shape_ == "x-log-x") s.shape = MainTermSpec::Shape::x_log_x;
        else if (sum_shape_ == "quadratic") s.shape = MainTermSpec::Shape::quadratic;
        else throw UsageError("unknown --main-term '" + sum_shape_ + "'");
        if (!sum_constant_.empty()) {
          LeadingConstantOptions lo;
          lo.precision_bits = g_.precision_bits;
          lo.pool = &pool();
          s.A = Coefficient::given(leading_constant(sum_constant_, lo).value);
        }
        spec = s;
      } else if (!sum_constant_.empty()) {
        throw UsageError("--constant needs --main-term");
      }
      BulkOptions bo;
      bo.pool = &pool();
      SummatoryReport r = sum_second_ ? second_moment(f, cps, bo) : summatory(f, cps, bo);
      if (spec) r = residual_analysis(std::move(r), *spec);
      out_.doc["function"] = r.function_id;
      out_.doc["second_moment"] = sum_second_;
      out_.doc["main_term"] = spec ? Json(r.main_term) : Json(nullptr);
      Json rows = Json::array();
      std::vector<std::vector<std::string>> table;
      for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        Json row;
        row["x"] = r.checkpoints[i];
        row["S"] = num(r.sums[i]);
        std::vector<std::string> trow{std::to_string(r.checkpoints[i]), r.sums[i].get_str(), "", ""};
        if (spec) {
          row["main"] = r.main[i];
          row["residual"] = r.residual[i];
          std::ostringstream a, b;
          a.precision(17);
          b.precision(17);
          a << r.main[i];
          b << r.residual[i];
          trow[2] = a.str();
          trow[3] = b.str();
        }
        rows.push_back(row);
        table.push_back(trow);
      }
      out_.doc["checkpoints"] = rows;
      Json fitted = Json::array();
      for (const auto& c : r.fitted) {
        fitted.push_back({{"name", c.name}, {"value", c.value}, {"standard_error", c.standard_error}});
      }
      out_.doc["fitted"] = fitted;
      out_.doc["fitted_exponent"] = r.fitted_exponent ? Json(*r.fitted_exponent) : Json(nullptr);
      out_.table = {{"x", "S", "main", "residual"}, table};
    });
  }
  std::string sum_function_, sum_limit_, sum_checkpoints_, sum_shape_, sum_constant_;
  bool sum_second_ = false;

  // --- constants ----------------------------------------------------------
  void add_constants(CLI::App& app) {
    auto* sub = app.add_subcommand("constants", "Certified Euler-product leading constants");
    sub->add_option("--target,-t", const_target_, "Target (see --list)");
    sub->add_flag("--list", const_list_, "List targets");
    sub->add_option("--prime-limit", const_prime_limit_, "Primes multiplied individually")
        ->default_val("100000");
    sub->add_option("--terms", const_terms_, "Local-factor terms and tail series degree")
        ->default_val(64)
        ->check(CLI::Range(4, 4096));
    sub->add_flag("--unit-correction", const_unit_, "Replace the correction factor by 1");
    select(sub, [this] {
      if (const_list_) {
        out_.doc["targets"] = leading_constant_targets();
        return;
      }
      if (const_target_.empty()) throw UsageError("constants: --target is required");
      LeadingConstantOptions o;
      o.prime_limit = parse_u64(const_prime_limit_);
      o.terms = const_terms_;
      o.precision_bits = g_.precision_bits;
      o.force_unit_correction = const_unit_;
      o.pool = &pool();
      const LeadingConstant c = leading_constant(const_target_, o);
      out_.doc["target"] = c.target;
      out_.doc["formula"] = c.formula;
      out_.doc["value"] = interval(c.value);
      out_.doc["prime_limit"] = c.prime_limit;
      out_.doc["terms"] = c.terms;
      out_.doc["precision_bits"] = c.precision_bits;
      out_.text = c.value.to_string(20);
    });
  }
  std::string const_target_, const_prime_limit_;
  unsigned const_terms_ = 64;
  bool const_list_ = false, const_unit_ = false;

  // --- verify -------------------------------------------------------------
  void add_verify(CLI::App& app) {
    auto* verify = app.add_subcommand("verify", "Reproduce and check a published claim");
    verify->require_subcommand(1);

    auto* sup = verify->add_subcommand("sigma-sup", "log sigma(n)/n maximum and the majorant");
    sup->add_option("--grid-last", v_grid_last_, "Last n of the monotonicity grid")->default_val("1e6");
    select(sup, [this] { verify_sigma_sup_cmd(); });

    auto* phie = verify->add_subcommand("phie-explicit", "Explicit lower bound for f^(e)");
    phie->add_option("--part", v_part_, "all, exceptions, suspicious, prefix, constants")
        ->default_val("all");
    phie->add_option("--exception-limit", v_exc_limit_, "Square-full scan limit")->default_val("1e6");
    phie->add_option("--audit-limit", v_audit_limit_, "Brute-force audit limit")->default_val("1e7");
    phie->add_option("--prefix-limit", v_prefix_limit_, "Largest prime in the prefix check")
        ->default_val("10544111");
    select(phie, [this] { verify_phie_cmd(); });

    auto* dus = verify->add_subcommand("dusart", "Explicit prime-sum inequalities at sample points");
    dus->add_option("--points", v_points_, "Comma list in [10544111, 1e8]")
        ->default_val("10544111,20000000,100000000");
    select(dus, [this] { verify_dusart_cmd(); });

    auto* bt = verify->add_subcommand("b-table", "Exact b(t) table and prime-power lemma");
    select(bt, [this] { verify_btable_cmd(); });

    auto* pl = verify->add_subcommand("perfect-list", "Search and certify e-inf-perfect numbers");
    pl->add_option("--limit", v_perfect_limit_, "Search limit")->default_val("6e10");
    pl->add_flag("!--no-big", v_big_, "Skip the 40-digit example");
    select(pl, [this] { verify_perfect_cmd(); });

    auto* par = verify->add_subcommand("parity", "No odd e-inf-perfect numbers below the limit");
    par->add_option("--limit", v_parity_limit_, "Scan limit")->default_val("1e8");
    select(par, [this] { verify_parity_cmd(); });

    auto* oe = verify->add_subcommand("oeis", "Cross-check the four sequences against b-files");
    oe->add_option("--count", v_oeis_count_, "Terms per sequence")->default_val(1000);
    oe->add_flag("--online", v_oeis_online_, "Fetch from the network instead of fixtures/cache");
    select(oe, [this] { verify_oeis_cmd(); });
  }
  std::string v_grid_last_, v_part_, v_exc_limit_, v_audit_limit_, v_prefix_limit_, v_points_,
      v_perfect_limit_, v_parity_limit_;
  bool v_big_ = true, v_oeis_online_ = false;
  u64 v_oeis_count_ = 1000;

  void verify_sigma_sup_cmd() {
    const u64 grid_last = parse_u64(v_grid_last_);
    const SigmaSupReport r = verify_sigma_sup(grid_last, &pool());
    const long prec = kDefaultPrecisionBits;
    const CertifiedReal log3_2 = log(CertifiedReal::from_int(3, prec)) / CertifiedReal::from_int(2, prec);
    Json small = Json::array();
    for (std::size_t i = 0; i < r.small_values.size(); ++i) {
      small.push_back({{"n", i + 1}, {"value", interval(r.small_values[i])}});
    }
    out_.doc["small_values"] = small;
    out_.doc["argmax"] = r.argmax;
    out_.doc["max_is_log3_over_2"] = r.max_is_log3_over_2;
    out_.doc["log3_over_2"] = interval(log3_2);
    out_.doc["g7"] = interval(r.g7);
    out_.doc["margin_g7"] = interval(log3_2 - r.g7);
    out_.doc["grid_last"] = r.grid_last;
    out_.doc["decreasing"] = r.decreasing;
    out_.doc["first_non_decrease"] = r.first_non_decrease ? Json(*r.first_non_decrease) : Json(nullptr);
    out_.doc["passed"] = r.passed();
    out_.code = r.passed() ? kOk : kVerificationFailed;
  }

  void verify_phie_cmd() {
    static const std::vector<std::string> parts = {"all", "exceptions", "suspicious", "prefix",
                                                   "constants"};
    if (std::find(parts.begin(), parts.end(), v_part_) == parts.end()) {
      throw UsageError("unknown --part '" + v_part_ + "'");
    }
    const u64 exc_limit = parse_u64(v_exc_limit_);
    const u64 audit_limit = parse_u64(v_audit_limit_);
    const u64 prefix_limit = parse_u64(v_prefix_limit_);
    const bool all = v_part_ == "all";
    const ExplicitBoundConfig cfg = ExplicitBoundConfig::standard(g_.precision_bits);
    const CertifiedReal thr = cfg.threshold();
    bool passed = true;
    out_.doc["C"] = ratio_string(cfg.C);
    out_.doc["threshold"] = interval(thr);

    if (all || v_part_ == "exceptions" || v_part_ == "suspicious") {
      const auto exc = squarefull_exception_scan(cfg, exc_limit, 4);
      std::vector<u64> ks;
      Json ej = Json::array();
      for (const auto& e : exc) {
        ks.push_back(e.k);
        ej.push_back({{"k", e.k}, {"s", e.s}, {"f", e.f}, {"margin", e.f - thr.mid()}});
      }
      const std::vector<u64> expected = {4, 8, 9, 36, 900, 44100};
      const bool exc_ok = exc_limit < 44100 || ks == expected;
      out_.doc["exceptions"] = {{"limit", exc_limit}, {"set", ej}, {"matches_published", exc_ok}};
      passed = passed && exc_ok;
      if (all || v_part_ == "suspicious") {
        const SuspiciousReport s = suspicious_set_check(cfg, ks, audit_limit, &pool());
        Json sj = Json::array();
        for (const auto& n : s.set) {
          sj.push_back({{"n", n.n}, {"k", n.k}, {"l", n.l}, {"f", n.f},
                        {"below_threshold", n.below_threshold}});
        }
        out_.doc["suspicious"] = {{"set", sj},
                                  {"max", s.max},
                                  {"max_within_44100", s.max_within_44100},
                                  {"audit_from", s.audit_from},
                                  {"audit_to", s.audit_to},
                                  {"audit_failures", s.audit_failures},
                                  {"first_failure", s.first_failure ? Json(*s.first_failure) : Json(nullptr)},
                                  {"min_margin", s.min_margin},
                                  {"min_margin_at", s.min_margin_at},
                                  {"passed", s.passed()}};
        passed = passed && s.passed();
      }
    }
    if (all || v_part_ == "prefix") {
      const PrefixReport p = phie_prefix_verification(cfg, prefix_limit, 1 << 14, &pool());
      const std::vector<u64> expected = {2, 3, 5, 7};
      const bool ok = p.failures == expected;
      out_.doc["prefix"] = {{"limit", prefix_limit},
                            {"primes_checked", p.primes_checked},
                            {"last_prime", p.last_prime},
                            {"failures", p.failures},
                            {"f_last", interval(p.f_last)},
                            {"margin_last", interval(p.margin_last)},
                            {"min_margin_from_11", p.min_margin_from_11},
                            {"min_margin_at", p.min_margin_at},
                            {"fails_exactly_below_11", ok}};
      passed = passed && ok;
    }
    if (all || v_part_ == "constants") {
      const ProofConstants pc = mertens_proof_constants(cfg);
      const CertifiedReal C = CertifiedReal::from_rational(cfg.C, g_.precision_bits);
      const bool ratio_ok = certainly_less_equal(C, pc.ratio);
      out_.doc["constants"] = {{"C1", interval(pc.C1)},
                               {"C2", interval(pc.C2)},
                               {"ratio", interval(pc.ratio)},
                               {"ratio_minus_C", interval(pc.ratio - C)},
                               {"ratio_at_least_C", ratio_ok},
                               {"identity_holds", pc.identity_holds},
                               {"grid_points", pc.grid_points}};
      passed = passed && ratio_ok && pc.identity_holds;
    }
    out_.doc["passed"] = passed;
    out_.code = passed ? kOk : kVerificationFailed;
  }

  void verify_dusart_cmd() {
    const auto points = parse_u64_list(v_points_);
    const ExplicitBoundConfig cfg = ExplicitBoundConfig::standard(g_.precision_bits);
    const auto res = dusart_check(cfg, points, &pool());
    bool passed = true;
    Json arr = Json::array();
    std::vector<std::vector<std::string>> table;
    for (const auto& p : res) {
      arr.push_back({{"x", p.x},
                     {"reciprocal_sum", interval(p.reciprocal_sum)},
                     {"reciprocal_bound", interval(p.reciprocal_bound)},
                     {"reciprocal_margin", interval(p.reciprocal_bound - p.reciprocal_sum)},
                     {"reciprocal_holds", p.reciprocal_holds},
                     {"theta", interval(p.theta)},
                     {"theta_bound", interval(p.theta_bound)},
                     {"theta_margin", interval(p.theta - p.theta_bound)},
                     {"theta_holds", p.theta_holds}});
      table.push_back({std::to_string(p.x), (p.reciprocal_bound - p.reciprocal_sum).lo_string(12),
                       (p.theta - p.theta_bound).lo_string(12),
                       p.reciprocal_holds && p.theta_holds ? "true" : "false"});
      passed = passed && p.reciprocal_holds && p.theta_holds;
    }
    out_.doc["points"] = arr;
    out_.doc["passed"] = passed;
    out_.table = {{"x", "reciprocal_margin_lo", "theta_margin_lo", "holds"}, table};
    out_.code = passed ? kOk : kVerificationFailed;
  }

  void verify_btable_cmd() {
    const BTable t = b_table();
    const auto& sigma = function_by_id("sigma_e_inf");
    Json exact = Json::array();
    for (unsigned tau = 1; tau <= 6; ++tau) {
      exact.push_back({{"tau", tau},
                       {"sigma", num(sigma.at_prime_power(BigInt(2), tau))},
                       {"ratio", ratio_string(t.exact(tau))}});
    }
    Json bu = Json::array();
    for (unsigned tt = 1; tt <= 12; ++tt) {
      Json row{{"t", tt}, {"value", interval(b_upper(tt, g_.precision_bits))}};
      if (tt <= 6) row["exact"] = ratio_string(b_upper_exact(tt));
      bu.push_back(row);
    }
    const BigInt s3 = sigma.at_prime_power(BigInt(2), 3);
    const BigInt s6 = sigma.at_prime_power(BigInt(2), 6);
    const ExactRatio b3 = b_upper_exact(3), b6 = b_upper_exact(6);
    const LemmaAudit audit = lemma_audit();
    const bool ok = s3 == 10 && s6 == 78 && b3 == ExactRatio(5, 4) && b6 == ExactRatio(39, 32) &&
                    audit.passed();
    out_.doc["exact"] = exact;
    out_.doc["b_upper"] = bu;
    out_.doc["sigma_2_3"] = num(s3);
    out_.doc["sigma_2_6"] = num(s6);
    out_.doc["b_upper_3"] = ratio_string(b3);
    out_.doc["b_upper_6"] = ratio_string(b6);
    out_.doc["lemma_audit"] = {{"checks", audit.checks},
                               {"failures", audit.failures},
                               {"b_monotone", audit.b_monotone}};
    out_.doc["passed"] = ok;
    out_.code = ok ? kOk : kVerificationFailed;
  }

  Json certificate_json(const PerfectCertificate& c) {
    return {{"kind", to_string(c.kind)},
            {"sigma", num(c.sigma)},
            {"two_n", num(c.two_n)},
            {"sigma_minus_two_n", num(c.sigma - c.two_n)},
            {"perfect", c.perfect}};
  }

  void verify_perfect_cmd() {
    const u64 limit = parse_u64(v_perfect_limit_);
    SearchOptions so;
    so.pool = &pool();
    const SearchReport r = search_e_inf_perfect(limit, so);
    bool passed = true;
    Json found = Json::array();
    std::vector<u64> values;
    for (const auto& f : r.found) {
      values.push_back(f.n);
      const auto ce = verify_perfect(to_bigint(f.n), PerfectKind::e_inf);
      const auto ee = verify_perfect(to_bigint(f.n), PerfectKind::e);
      passed = passed && ce.perfect && ee.perfect;
      found.push_back({{"n", f.n},
                       {"factorization", factorization_json(f.factorization)},
                       {"e_inf", certificate_json(ce)},
                       {"e", certificate_json(ee)}});
    }
    std::vector<u64> expected;
    for (u64 v : kPublishedPerfect) {
      if (v <= limit) expected.push_back(v);
    }
    const bool list_ok = values == expected;
    passed = passed && list_ok;
    out_.doc["limit"] = limit;
    out_.doc["candidates"] = r.candidates;
    out_.doc["found"] = found;
    out_.doc["matches_published"] = list_ok;
    if (v_big_) {
      const BigInt big(kPublishedBig);
      const auto ce = verify_perfect(big, PerfectKind::e_inf);
      const auto ee = verify_perfect(big, PerfectKind::e);
      out_.doc["big"] = {{"n", num(big)},
                         {"factorization", factorization_json(ce.factorization)},
                         {"e_inf", certificate_json(ce)},
                         {"e", certificate_json(ee)}};
      passed = passed && ce.perfect && ee.perfect;
    }
    out_.doc["passed"] = passed;
    std::vector<std::vector<std::string>> table;
    for (u64 v : values) table.push_back({std::to_string(v)});
    out_.table = {{"n"}, table};
    out_.code = passed ? kOk : kVerificationFailed;
  }

  void verify_parity_cmd() {
    const u64 limit = parse_u64(v_parity_limit_);
    const ParityReport r = parity_scan(limit, &pool());
    out_.doc["limit"] = r.limit;
    out_.doc["odd_candidates"] = r.odd_candidates;
    out_.doc["odd_perfect"] = r.odd_perfect;
    out_.doc["lemma_checks"] = r.lemma_checks;
    out_.doc["lemma_failures"] = r.lemma_failures;
    out_.doc["first_power_odd"] = r.first_power_odd;
    out_.doc["passed"] = r.passed();
    out_.code = r.passed() ? kOk : kVerificationFailed;
  }

  void verify_oeis_cmd() {
    if (v_oeis_count_ < 1) throw UsageError("--count must be >= 1");
    const FetchOptions fo = fetch_options(g_, !v_oeis_online_);
    Json arr = Json::array();
    bool passed = true;
    for (const auto& [seq, fn] : kOeisPairs) {
      const auto r = cross_check(seq, fn, v_oeis_count_, fo);
      arr.push_back(cross_check_json(r));
      passed = passed && r.matched();
    }
    out_.doc["checks"] = arr;
    out_.doc["passed"] = passed;
    out_.code = passed ? kOk : kVerificationFailed;
  }

  // --- search-perfect -----------------------------------------------------
  void add_search(CLI::App& app) {
    auto* sub = app.add_subcommand("search-perfect", "Square-full e- or e-inf-perfect numbers");
    sub->add_option("--kind", search_kind_, "e or e-inf")->default_val("e-inf");
    sub->add_option("--limit", search_limit_, "Search limit (<= 1e12)")->required();
    sub->add_option("--ledger", search_ledger_, "JSON lines ledger for resumable runs");
    select(sub, [this] {
      const PerfectKind kind = parse_perfect_kind(search_kind_);
      const u64 limit = parse_u64(search_limit_);
      SearchOptions so;
      so.pool = &pool();
      if (!search_ledger_.empty()) so.ledger = search_ledger_;
      const SearchReport r = search_perfect(kind, limit, so);
      out_.doc["kind"] = to_string(kind);
      out_.doc["limit"] = limit;
      out_.doc["candidates"] = r.candidates;
      out_.doc["resumed_from"] = r.resumed_from;
      Json found = Json::array();
      std::vector<std::vector<std::string>> table;
      std::string line;
      for (const auto& f : r.found) {
        found.push_back({{"n", f.n}, {"factorization", factorization_json(f.factorization)}});
        table.push_back({std::to_string(f.n), f.factorization.to_string()});
        line += (line.empty() ? "" : " ") + std::to_string(f.n);
      }
      out_.doc["found"] = found;
      out_.table = {{"n", "factorization"}, table};
      out_.text = line;
    });
  }
  std::string search_kind_, search_limit_, search_ledger_;

  // --- optimize-bound -----------------------------------------------------
  void add_optimize(CLI::App& app) {
    auto* sub = app.add_subcommand("optimize-bound", "Lower bound for e-inf-perfect n with 3 not dividing n");
    sub->add_option("--variant", opt_variant_, "base, refined or final")->default_val("final");
    sub->add_option("--box", opt_box_, "Initial search box t2,t4,t8")->default_val("300,150,150");
    select(sub, [this] {
      const auto box = parse_u64_list(opt_box_);
      if (box.size() != 3) throw UsageError("--box needs three comma-separated counts");
      for (u64 b : box) {
        if (b > 100000) throw UsageError("--box counts must be <= 100000");
      }
      if (opt_variant_ != "final") parse_threshold_variant(opt_variant_);
      OptimizerOptions o;
      o.precision_bits = g_.precision_bits;
      o.box = ClassCounts{static_cast<unsigned>(box[0]), static_cast<unsigned>(box[1]),
                          static_cast<unsigned>(box[2])};
      o.pool = &pool();
      if (opt_variant_ == "final") {
        const FinalBound fb = final_bound(o);
        const OptimizerResult& chosen = fb.case_b_is_min ? fb.base : fb.refined;
        out_.doc["variant"] = "final";
        out_.doc["counts"] = {{"t2", chosen.counts.t2}, {"t4", chosen.counts.t4}, {"t8", chosen.counts.t8}};
        out_.doc["log10_lo"] = fb.log10_bound.lo_string(15);
        out_.doc["log10_hi"] = fb.log10_bound.hi_string(15);
        out_.doc["feasible_frontier_size"] = chosen.frontier_size;
        out_.doc["case"] = fb.case_b_is_min ? "5,11,17,23 in Q" : "refined threshold";
        out_.doc["case_b_increment"] = interval(fb.case_b_increment);
        out_.doc["base"] = optimizer_json(fb.base);
        out_.doc["refined"] = optimizer_json(fb.refined);
        out_.text = fb.log10_bound.to_string(15);
      } else {
        const OptimizerResult r = solve(parse_threshold_variant(opt_variant_), o);
        out_.doc = optimizer_json(r);
        out_.text = r.log10_bound.to_string(15);
      }
    });
  }
  std::string opt_variant_, opt_box_;

  // --- oeis ---------------------------------------------------------------
  void add_oeis(CLI::App& app) {
    auto* oeis = app.add_subcommand("oeis", "OEIS b-file utilities");
    oeis->require_subcommand(1);
    auto* check = oeis->add_subcommand("check", "Compare a b-file with an evaluator");
    check->add_option("sequence", oeis_seq_, "A-number, e.g. A049419")->required();
    check->add_option("--function,-f", oeis_fn_, "Function id")->required();
    check->add_option("--count", oeis_count_, "Terms to compare")->default_val(1000);
    check->add_flag("--offline", oeis_offline_, "Use cache or bundled fixtures only");
    select(check, [this] {
      validate_sequence_id(oeis_seq_);
      function_by_id(oeis_fn_);
      if (oeis_count_ < 1) throw UsageError("--count must be >= 1");
      const auto r = cross_check(oeis_seq_, oeis_fn_, oeis_count_,
                                 fetch_options(g_, oeis_offline_ || g_.offline));
      out_.doc = cross_check_json(r);
      out_.code = r.matched() ? kOk : kVerificationFailed;
    });
    auto* fetch = oeis->add_subcommand("fetch", "Fetch a b-file into the cache");
    fetch->add_option("sequence", oeis_seq_, "A-number")->required();
    fetch->add_flag("--offline", oeis_offline_, "Use cache or bundled fixtures only");
    select(fetch, [this] {
      const BFile b = fetch_bfile(oeis_seq_, fetch_options(g_, oeis_offline_ || g_.offline));
      out_.doc["sequence"] = b.sequence_id;
      out_.doc["source"] = to_string(b.source);
      out_.doc["entries"] = b.entries.size();
      out_.doc["first_index"] = b.entries.empty() ? Json(nullptr) : Json(b.entries.front().first);
      out_.doc["last_index"] = b.entries.empty() ? Json(nullptr) : Json(b.entries.back().first);
    });
  }
  std::string oeis_seq_, oeis_fn_;
  u64 oeis_count_ = 1000;
  bool oeis_offline_ = false;

  Global& g_;
  Outcome& out_;
  std::unique_ptr<WorkerPool> pool_;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  if (dynamic_cast<const CapacityError*>(&e) || dynamic_cast<const PrecisionError*>(&e) ||
      dynamic_cast<const IncompleteFactorization*>(&e)) {
    return kCapacity;
  }
  if (dynamic_cast<const FetchError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kNetwork;
  return kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"moddiv: modified divisor functions, sieves and certified bounds"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "Worker threads (0 = machine parallelism)")
      ->default_val(0)
      ->check(CLI::Range(0u, 1024u));
  app.add_option("--format", g.format, "json, csv or text")
      ->default_val("json")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--precision-bits", g.precision_bits, "Interval precision in bits")
      ->default_val(kDefaultPrecisionBits)
      ->check(CLI::Range(53L, 1L << 16));
  app.add_option("--cache-dir", g.cache_dir, "b-file cache (default $MODDIV_CACHE)");
  app.add_flag("--offline", g.offline, "Never touch the network");
  Outcome outcome;
  Commands commands(app, g, outcome);

  std::vector<std::string> argv_storage{"moddiv"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "moddiv: " << e.what() << '\n';
    return kUsage;
  }
  if (!commands.selected) {
    err << "moddiv: no subcommand selected\n";
    return kUsage;
  }
  try {
    const Format format = parse_format(g.format);
    const auto start = std::chrono::steady_clock::now();
    commands.selected();
    emit(outcome, format, out);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "moddiv: done in " << secs << " s\n";
    return outcome.code;
  } catch (const std::exception& e) {
    err << "moddiv: error: " << e.what() << '\n';
    if (const auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->line()) {
      err << "moddiv: at line " << pe->line() << '\n';
    }
    return exit_code_for(e);
  }
}

}  // namespace moddiv::cli
