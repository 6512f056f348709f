#include "thresholdlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "thresholdlab/construction.hpp"
#include "thresholdlab/errors.hpp"
#include "thresholdlab/exact_eval.hpp"
#include "thresholdlab/expr_text.hpp"
#include "thresholdlab/kernels.hpp"
#include "thresholdlab/montecarlo.hpp"
#include "thresholdlab/threshold.hpp"

namespace thresholdlab::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDefaultEps = 0.25;
constexpr double kDefaultTol = 1e-12;
constexpr int kDefaultGrid = 101;
constexpr std::uint64_t kDefaultSamples = 100'000;

constexpr double kRoundTripTol = 1e-10;
constexpr double kRussoTol = 1e-10;
constexpr double kFiniteDiffStep = 1e-6;
constexpr double kFiniteDiffTol = 1e-6;
constexpr double kProductIdentityTol = 1e-12;
constexpr double kProductLocateTol = 1e-9;
constexpr int kSpotCheckSamples = 20000;

const double kRoundTripLevels[] = {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99};

class Options {
 public:
  explicit Options(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.contains(key); }

  std::string text(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) throw InputError("missing required option --" + key);
    return it->second;
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  double real(const std::string& key) const {
    const std::string s = text(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw InputError("option --" + key + " expects a real number, got '" + s + "'");
    }
    return v;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::int64_t integer(const std::string& key) const {
    return parse_int(text(key), key);
  }

  std::uint64_t unsigned_integer(const std::string& key,
                                 std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw InputError("option --" + key + " expects a non-negative integer, got '" +
                       s + "'");
    }
    return v;
  }

  std::vector<std::int64_t> integer_list(const std::string& key) const {
    const std::string s = text(key);
    std::vector<std::int64_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t comma = std::min(s.find(',', start), s.size());
      out.push_back(parse_int(s.substr(start, comma - start), key));
      start = comma + 1;
    }
    return out;
  }

  static std::int64_t parse_int(std::string s, const std::string& key) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw InputError("option --" + key + " expects integers, got '" + s + "'");
    }
    return v;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

// Output sink: either key=value lines or one JSON object.
class Report {
 public:
  explicit Report(bool json) : json_(json) {}

  void put(const std::string& key, double v) {
    if (json_) {
      obj_[key] = std::isfinite(v) ? Json(v) : Json(nullptr);
    } else {
      text_ << key << '=' << format_number(v) << '\n';
    }
  }
  void put(const std::string& key, std::int64_t v) {
    if (json_) {
      obj_[key] = v;
    } else {
      text_ << key << '=' << v << '\n';
    }
  }
  void put(const std::string& key, std::uint64_t v) {
    if (json_) {
      obj_[key] = v;
    } else {
      text_ << key << '=' << v << '\n';
    }
  }
  void put(const std::string& key, bool v) {
    if (json_) {
      obj_[key] = v;
    } else {
      text_ << key << '=' << (v ? "true" : "false") << '\n';
    }
  }
  void put(const std::string& key, const std::string& v) {
    if (json_) {
      obj_[key] = v;
    } else {
      text_ << key << '=' << v << '\n';
    }
  }

  std::string str() const { return json_ ? obj_.dump(2) + "\n" : text_.str(); }

 private:
  bool json_;
  Json obj_ = Json::object();
  std::ostringstream text_;
};

struct Check {
  std::string name;
  enum class Status { pass, fail, skip } status;
  double slack;
  std::string detail;
};

Check::Status status_of(double slack, double allowance = kBoundSlackTolerance) {
  return slack >= -allowance ? Check::Status::pass : Check::Status::fail;
}

std::vector<double> check_grid() {
  std::vector<double> ps;
  for (int i = 1; i <= 19; ++i) ps.push_back(0.05 * i);
  return ps;
}

std::vector<double> coarse_grid() {
  std::vector<double> ps;
  for (int i = 1; i <= 9; ++i) ps.push_back(0.1 * i);
  return ps;
}

Check check_monotone(const StructureExpr& expr) {
  if (expr.ground_size() <= kExhaustiveCap) {
    const bool ok = verify_monotone(expr);
    return {"monotone", ok ? Check::Status::pass : Check::Status::fail,
            ok ? 0.0 : -1.0, "exhaustive"};
  }
  const bool ok = spot_check_monotone(expr, kSpotCheckSamples, 0);
  return {"monotone", ok ? Check::Status::pass : Check::Status::fail,
          ok ? 0.0 : -1.0, "sampled"};
}

Check check_product_identity(const StructureExpr& expr) {
  const auto* prod = std::get_if<Product>(&expr.node().v);
  if (prod == nullptr) return {"product_identity", Check::Status::skip, 0.0, "not a product"};
  const std::int64_t n = expr.ground_size();
  double worst = 0.0;
  if (n <= kExhaustiveCap) {
    // Composed evaluation against the flat member count.
    const auto counts = kernels::count_by_weight_parallel(expr);
    for (double p : coarse_grid()) {
      double flat = 0.0;
      for (std::int64_t i = 0; i <= n; ++i) {
        flat += static_cast<double>(counts[i]) * std::pow(p, i) *
                std::pow(1.0 - p, n - i);
      }
      worst = std::max(worst, std::abs(flat - availability(expr, p).value));
    }
    return {"product_identity", status_of(kProductIdentityTol - worst, 0.0),
            kProductIdentityTol - worst, "brute force"};
  }
  for (double eps : {0.1, 0.25, 0.5}) {
    const double direct = locate(expr, eps, 1e-13);
    const double nested = locate(prod->inner, locate(prod->outer, eps, 1e-13), 1e-13);
    worst = std::max(worst, std::abs(direct - nested));
  }
  return {"product_identity", status_of(kProductLocateTol - worst, 0.0),
          kProductLocateTol - worst, "nested inversion"};
}

std::vector<Check> check_russo(const StructureExpr& expr) {
  std::vector<Check> out;
  if (expr.ground_size() <= kExhaustiveCap) {
    double worst = 0.0;
    for (double p : coarse_grid()) {
      const auto inf = influences(expr, p);
      double total = 0.0;
      for (double v : inf) total += v;
      worst = std::max(worst, std::abs(total - derivative(expr, p)));
    }
    out.push_back({"russo", status_of(kRussoTol - worst, 0.0), kRussoTol - worst,
                   "sum of influences"});
  } else {
    out.push_back({"russo", Check::Status::skip, 0.0, "ground size above cap"});
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (double p : coarse_grid()) {
    const double h = kFiniteDiffStep;
    const double fd =
        (availability(expr, p + h).value - availability(expr, p - h).value) / (2 * h);
    const double d = derivative(expr, p);
    const double allowed = kFiniteDiffTol * std::max(1.0, std::abs(d));
    worst = std::max(worst, std::abs(fd - d) - allowed);
  }
  out.push_back({"finite_difference", status_of(-worst, 0.0), -worst,
                 "central difference h=1e-6"});
  return out;
}

std::vector<Check> check_bounds(const StructureExpr& expr) {
  double lower = std::numeric_limits<double>::infinity();
  double upper = lower;
  double cs = lower;
  for (double p : check_grid()) {
    const auto e = check_entropy_inequalities(expr, p);
    lower = std::min(lower, e.lower.slack);
    upper = std::min(upper, e.upper.slack);
    cs = std::min(cs, check_cauchy_schwarz_bound(expr, p).slack);
  }
  return {
      {"entropy_lower", status_of(lower), lower, "p ln(1/p) mu' >= mu ln(1/mu)"},
      {"entropy_upper", status_of(upper), upper,
       "(1-p) ln(1/(1-p)) mu' >= (1-mu) ln(1/(1-mu))"},
      {"cauchy_schwarz", status_of(cs), cs, "mu' <= sqrt(mu(1-mu) n/(p(1-p)))"},
  };
}

Check check_inversion(const StructureExpr& expr, double tol) {
  double worst = 0.0;
  for (double alpha : kRoundTripLevels) {
    const double p = locate(expr, alpha, tol);
    worst = std::max(worst, std::abs(availability(expr, p).value - alpha));
  }
  return {"inversion_round_trip", status_of(kRoundTripTol - worst, 0.0),
          kRoundTripTol - worst, "|mu(p(alpha)) - alpha|"};
}

Check check_text_round_trip(const StructureExpr& expr) {
  const StructureExpr again = parse_expr(format_expr(expr));
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    worst = std::max(worst, std::abs(availability(expr, p).value -
                                     availability(again, p).value));
  }
  const bool same_size = again.ground_size() == expr.ground_size();
  const double slack = same_size ? 0.0 - worst : -1.0;
  return {"text_round_trip", status_of(slack, 0.0), slack, format_expr(again)};
}

std::string_view status_name(Check::Status s) {
  switch (s) {
    case Check::Status::pass: return "PASS";
    case Check::Status::fail: return "FAIL";
    case Check::Status::skip: return "SKIP";
  }
  return "?";
}

CommandResult cmd_verify(const StructureExpr& expr, const Options& opt, bool json) {
  const double tol = opt.real("tol", kDefaultTol);
  std::vector<Check> checks;
  checks.push_back(check_monotone(expr));
  checks.push_back(check_product_identity(expr));
  for (auto& c : check_russo(expr)) checks.push_back(std::move(c));
  for (auto& c : check_bounds(expr)) checks.push_back(std::move(c));
  checks.push_back(check_inversion(expr, tol));
  checks.push_back(check_text_round_trip(expr));

  bool all_pass = true;
  for (const auto& c : checks) all_pass &= c.status != Check::Status::fail;

  std::string out;
  if (json) {
    Json doc = Json::object();
    doc["expr"] = format_expr(expr);
    doc["checks"] = Json::array();
    for (const auto& c : checks) {
      doc["checks"].push_back({{"name", c.name},
                               {"status", status_name(c.status)},
                               {"slack", c.slack},
                               {"detail", c.detail}});
    }
    doc["all_pass"] = all_pass;
    out = doc.dump(2) + "\n";
  } else {
    for (const auto& c : checks) {
      out += std::string(status_name(c.status)) + " " + c.name +
             " slack=" + format_number(c.slack) + " (" + c.detail + ")\n";
    }
    out += all_pass ? "all checks passed\n" : "some checks FAILED\n";
  }
  return {all_pass ? kExitOk : kExitCheckFailed, out, ""};
}

void put_threshold_report(Report& rep, const ThresholdReport& r) {
  rep.put("epsilon", r.epsilon);
  rep.put("p_lo", r.p_lo);
  rep.put("p_hi", r.p_hi);
  rep.put("width", r.width);
  rep.put("p_half", r.p_half);
  rep.put("sharpness_ratio", r.sharpness_ratio);
  rep.put("tol", r.tol);
  rep.put("mu_at_lo", r.mu_at_lo);
  rep.put("mu_at_hi", r.mu_at_hi);
  rep.put("mu_tol_lo", r.mu_tol_lo);
  rep.put("mu_tol_hi", r.mu_tol_hi);
}

CommandResult cmd_eval(const StructureExpr& expr, const Options& opt, bool json) {
  const double p = opt.real("p");
  const auto e = availability(expr, p);
  const auto s = evaluate_with_slope(expr, Level::of(p));
  const bool interior = p > 0.0 && p < 1.0;
  Report rep(json);
  rep.put("p", p);
  rep.put("mu", e.value);
  rep.put("dmu_dp", interior ? s.slope : std::numeric_limits<double>::quiet_NaN());
  rep.put("complement", e.complement);
  rep.put("method", std::string(to_string(e.method)));
  rep.put("abs_error_bound", e.abs_error_bound);
  return {kExitOk, rep.str(), ""};
}

CommandResult cmd_curve(const StructureExpr& expr, const Options& opt, bool json) {
  const std::int64_t grid = opt.integer("grid", kDefaultGrid);
  if (grid < 2 || grid > 10'000'000) {
    throw InputError("--grid must lie in [2, 1e7]");
  }
  const auto points = kernels::curve_parallel(expr, static_cast<int>(grid));
  if (json) {
    Json doc = Json::object();
    doc["points"] = Json::array();
    for (const auto& pt : points) {
      doc["points"].push_back(
          {{"p", pt.p},
           {"mu", pt.mu},
           {"dmu_dp", std::isfinite(pt.dmu_dp) ? Json(pt.dmu_dp) : Json(nullptr)}});
    }
    return {kExitOk, doc.dump(2) + "\n", ""};
  }
  std::string out = "p,mu,dmu_dp\n";
  for (const auto& pt : points) {
    out += format_number(pt.p) + "," + format_number(pt.mu) + "," +
           format_number(pt.dmu_dp) + "\n";
  }
  return {kExitOk, out, ""};
}

CommandResult cmd_width(const StructureExpr& expr, const Options& opt, bool json,
                        bool with_alpha) {
  const double eps = opt.real("eps", kDefaultEps);
  const double tol = opt.real("tol", kDefaultTol);
  const auto r = width(expr, eps, tol);
  Report rep(json);
  put_threshold_report(rep, r);
  if (with_alpha && opt.has("alpha")) {
    const double alpha = opt.real("alpha");
    rep.put("alpha", alpha);
    rep.put("p_alpha", locate(expr, alpha, tol));
  }
  return {kExitOk, rep.str(), ""};
}

CommandResult cmd_construct(const Options& opt, bool json) {
  const auto target = WidthTarget::parse(opt.text("target"));
  const auto rec = build_arbitrary_width(target, opt.integer("n"));
  Report rep(json);
  rep.put("target", target.name());
  rep.put("n", rec.n);
  rep.put("c_n", rec.c_n);
  rep.put("c_tilde", rec.c_tilde);
  rep.put("a_real", rec.a_real);
  rep.put("a", rec.a);
  rep.put("k", rec.k);
  rep.put("m", rec.m);
  rep.put("r", rec.r);
  rep.put("paper_N", rec.paper_N);
  rep.put("N", rec.N);
  rep.put("expr", format_expr(rec.expr));
  return {kExitOk, rep.str(), ""};
}

Family family_by_name(const std::string& name) {
  if (name == "majority") return majority_family();
  if (name == "series") return series_family();
  if (name == "parallel") return parallel_family();
  if (name == "parallel_series") return parallel_series_family();
  if (name == "singleton") return singleton_family();
  throw InputError("unknown family '" + name +
                   "' (majority, series, parallel, parallel_series, singleton)");
}

// Natural width scale per family: sqrt(N) for majority, ln N for B_k,
// N for series/parallel, 1 for the singleton.
Scale scale_for(const std::string& family) {
  if (family == "majority") {
    return [](std::int64_t n) { return std::sqrt(static_cast<double>(n)); };
  }
  if (family == "parallel_series") {
    return [](std::int64_t n) { return std::log(static_cast<double>(n)); };
  }
  if (family == "singleton") return [](std::int64_t) { return 1.0; };
  return [](std::int64_t n) { return static_cast<double>(n); };
}

template <class Row>
std::string emit_table(const std::vector<std::string>& header,
                       const std::vector<Row>& rows,
                       const std::function<std::vector<Json>(const Row&)>& cells,
                       bool json) {
  if (json) {
    Json doc = Json::object();
    doc["rows"] = Json::array();
    for (const auto& row : rows) {
      const auto values = cells(row);
      Json obj = Json::object();
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = values[i];
      doc["rows"].push_back(obj);
    }
    return doc.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += (i ? "," : "") + header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    const auto values = cells(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ",";
      const Json& v = values[i];
      if (v.is_number_float()) {
        out += format_number(v.get<double>());
      } else if (v.is_null()) {
        out += "nan";
      } else {
        out += v.dump();
      }
    }
    out += "\n";
  }
  return out;
}

Json real_cell(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

CommandResult cmd_scaling(const Options& opt, bool json) {
  const auto sizes = opt.integer_list("sizes");
  const double tol = opt.real("tol", kDefaultTol);
  if (opt.has("target") == opt.has("family")) {
    throw InputError("scaling needs exactly one of --target or --family");
  }
  if (opt.has("target")) {
    const auto target = WidthTarget::parse(opt.text("target"));
    const auto rows =
        scaling_experiment(target, sizes, opt.real("eps", kDefaultEps), tol);
    return {kExitOk,
            emit_table<ScalingRow>(
                {"n", "N", "c_N", "width", "width_times_c", "p_half"}, rows,
                [](const ScalingRow& r) {
                  return std::vector<Json>{r.n, r.N, r.c_N, real_cell(r.width),
                                           real_cell(r.width_times_c),
                                           real_cell(r.p_half)};
                },
                json),
            ""};
  }
  const std::string name = opt.text("family");
  const Family family = family_by_name(name);
  if (opt.has("beta") || opt.has("gamma")) {
    const auto rows = homogeneity_scan(family, sizes, opt.real("beta"),
                                       opt.real("gamma"), scale_for(name), tol);
    return {kExitOk,
            emit_table<HomogeneityRow>(
                {"n", "ground_size", "p_beta", "p_gamma", "normalized_gap"}, rows,
                [](const HomogeneityRow& r) {
                  return std::vector<Json>{r.n, r.ground_size, real_cell(r.p_beta),
                                           real_cell(r.p_gamma),
                                           real_cell(r.normalized_gap)};
                },
                json),
            ""};
  }
  const auto rows = sharpness_trend(family, sizes, opt.real("eps", kDefaultEps), tol);
  return {kExitOk,
          emit_table<SharpnessRow>(
              {"n", "ground_size", "p_half", "width", "sharpness_ratio", "slope_term"},
              rows,
              [](const SharpnessRow& r) {
                return std::vector<Json>{r.n,
                                         r.ground_size,
                                         real_cell(r.p_half),
                                         real_cell(r.width),
                                         real_cell(r.sharpness_ratio),
                                         real_cell(r.slope_term)};
              },
              json),
          ""};
}

CommandResult cmd_mc(const StructureExpr& expr, const Options& opt, bool json) {
  const double p = opt.real("p");
  const std::uint64_t seed = opt.unsigned_integer("seed", 0);
  if (opt.has("samples") && opt.has("halfwidth")) {
    throw InputError("mc takes --samples or --halfwidth, not both");
  }
  const McEstimate est =
      opt.has("halfwidth")
          ? estimate_to_halfwidth(expr, p, opt.real("halfwidth"), seed)
          : estimate_availability(expr, p,
                                  opt.unsigned_integer("samples", kDefaultSamples),
                                  seed);
  Report rep(json);
  rep.put("p", p);
  rep.put("p_hat", est.p_hat);
  rep.put("ci_lo", est.ci_lo);
  rep.put("ci_hi", est.ci_hi);
  rep.put("samples", est.samples);
  rep.put("successes", est.successes);
  rep.put("seed", est.seed);
  rep.put("cap_hit", est.cap_hit);
  return {kExitOk, rep.str(), ""};
}

bool needs_expr(const std::string& command) {
  return command != "construct" && command != "scaling";
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& command_flags() {
  static const std::map<std::string, std::vector<std::string>> flags = {
      {"eval", {"p", "json"}},
      {"curve", {"grid", "json"}},
      {"threshold", {"eps", "tol", "alpha", "json"}},
      {"width", {"eps", "tol", "json"}},
      {"verify", {"tol", "json"}},
      {"construct", {"target", "n", "json"}},
      {"scaling",
       {"target", "family", "sizes", "eps", "tol", "beta", "gamma", "json"}},
      {"mc", {"p", "samples", "halfwidth", "seed", "json"}},
  };
  return flags;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

CommandResult run(const CommandSpec& spec) {
  try {
    const auto& flags = command_flags();
    const auto it = flags.find(spec.command);
    if (it == flags.end()) {
      throw InputError("unknown command '" + spec.command + "'");
    }
    for (const auto& [key, value] : spec.options) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw InputError("option --" + key + " is not valid for '" + spec.command + "'");
      }
    }
    const Options opt(spec.options);
    const bool json = opt.has("json");

    if (!needs_expr(spec.command)) {
      if (!spec.expr_text.empty()) {
        throw InputError("'" + spec.command + "' takes no expression");
      }
      return spec.command == "construct" ? cmd_construct(opt, json)
                                         : cmd_scaling(opt, json);
    }
    if (spec.expr_text.empty()) {
      throw InputError("'" + spec.command + "' needs an expression");
    }
    const StructureExpr expr = parse_expr(spec.expr_text);
    if (spec.command == "eval") return cmd_eval(expr, opt, json);
    if (spec.command == "curve") return cmd_curve(expr, opt, json);
    if (spec.command == "threshold") return cmd_width(expr, opt, json, true);
    if (spec.command == "width") return cmd_width(expr, opt, json, false);
    if (spec.command == "verify") return cmd_verify(expr, opt, json);
    return cmd_mc(expr, opt, json);
  } catch (const InputError& e) {
    return {kExitInputError, "", std::string("error: ") + e.what() + "\n"};
  } catch (const ConvergenceError& e) {
    return {kExitCheckFailed, "",
            std::string("error: ") + e.what() + " [bracket " +
                format_number(e.bracket_lo()) + ", " +
                format_number(e.bracket_hi()) + "]\n"};
  } catch (const std::exception& e) {
    return {kExitCheckFailed, "", std::string("internal error: ") + e.what() + "\n"};
  }
}

}  // namespace thresholdlab::cli
