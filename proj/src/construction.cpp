#include "thresholdlab/construction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/parallel.hpp"
#include "thresholdlab/threshold.hpp"

namespace thresholdlab {

namespace {

constexpr double kPhiRelTol = 1e-9;
constexpr int kPhiMaxIterations = 200;
constexpr double kE2 = std::numbers::e * std::numbers::e;

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::int64_t builtin_value(WidthTarget::Kind kind, std::int64_t n) {
  switch (kind) {
    case WidthTarget::Kind::ceil_log: return ceil_ln(n);
    case WidthTarget::Kind::ceil_cuberoot: return ceil_cbrt(n);
    case WidthTarget::Kind::ceil_sqrt: return ceil_sqrt(n);
    case WidthTarget::Kind::table: break;
  }
  return 0;
}

void check_envelope(std::int64_t n, std::int64_t c, const std::string& who) {
  if (n < 2) {
    throw InputError(who + ": width targets need n >= 2, got " +
                     std::to_string(n));
  }
  const double lower = std::log(static_cast<double>(n));
  if (static_cast<double>(c) < lower * (1.0 - 1e-12)) {
    throw InputError(who + ": c(" + std::to_string(n) + ") = " +
                     std::to_string(c) + " is below ln n = " + num(lower));
  }
  if (c > ceil_sqrt(n)) {
    throw InputError(who + ": c(" + std::to_string(n) + ") = " +
                     std::to_string(c) + " exceeds sqrt n = " +
                     num(std::sqrt(static_cast<double>(n))));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

double phi(std::int64_t n, double x) {
  if (n < 1 || !(x >= 1.0 && x <= static_cast<double>(n))) {
    throw InputError("phi requires 1 <= x <= n, got n=" + std::to_string(n) +
                     ", x=" + num(x));
  }
  const double l = std::log(static_cast<double>(n) / x);
  return x * l * l;
}

double invert_phi(std::int64_t n, double y) {
  const double nd = static_cast<double>(n);
  const double lo_y = std::pow(std::log(nd), 2);
  const double hi_y = 4.0 * nd / kE2;
  if (n < 8 || !(y >= lo_y * (1.0 - 1e-15) && y <= hi_y * (1.0 + 1e-15))) {
    throw InputError("invert_phi: y must lie in [(ln n)^2, 4n/e^2] = [" +
                     num(lo_y) + ", " + num(hi_y) + "] for n=" +
                     std::to_string(n) + " (n >= 8), got " + num(y));
  }
  double lo = 1.0;
  double hi = nd / kE2;
  const double tol = kPhiRelTol * y;
  if (std::abs(phi(n, lo) - y) <= tol) return lo;
  if (std::abs(phi(n, hi) - y) <= tol) return hi;
  for (int iter = 0; iter < kPhiMaxIterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double v = phi(n, mid);
    if (std::abs(v - y) <= tol) return mid;
    if (v < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("invert_phi did not converge", lo, hi);
}

std::int64_t ceil_sqrt(std::int64_t n) {
  if (n < 0) throw InputError("ceil_sqrt of a negative number");
  auto c = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (static_cast<__int128>(c) * c < n) ++c;
  while (c > 0 && static_cast<__int128>(c - 1) * (c - 1) >= n) --c;
  return c;
}

std::int64_t ceil_cbrt(std::int64_t n) {
  if (n < 0) throw InputError("ceil_cbrt of a negative number");
  auto c = static_cast<std::int64_t>(std::cbrt(static_cast<double>(n)));
  auto cube = [](std::int64_t v) { return static_cast<__int128>(v) * v * v; };
  while (cube(c) < n) ++c;
  while (c > 0 && cube(c - 1) >= n) --c;
  return c;
}

std::int64_t ceil_ln(std::int64_t n) {
  if (n < 1) throw InputError("ceil_ln requires n >= 1");
  return static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(n))));
}

WidthTarget WidthTarget::builtin(Kind kind) {
  switch (kind) {
    case Kind::ceil_log: return {kind, "ceil_log", {}};
    case Kind::ceil_cuberoot: return {kind, "ceil_cuberoot", {}};
    case Kind::ceil_sqrt: return {kind, "ceil_sqrt", {}};
    case Kind::table: break;
  }
  throw InputError("builtin width target requires a named kind");
}

WidthTarget WidthTarget::parse(const std::string& spec) {
  if (spec == "ceil_log") return builtin(Kind::ceil_log);
  if (spec == "ceil_cuberoot") return builtin(Kind::ceil_cuberoot);
  if (spec == "ceil_sqrt") return builtin(Kind::ceil_sqrt);
  if (spec.starts_with("file:")) return from_csv_file(spec.substr(5));
  throw InputError("unknown width target '" + spec +
                   "' (expected ceil_log, ceil_cuberoot, ceil_sqrt or file:PATH)");
}

WidthTarget WidthTarget::from_table(std::map<std::int64_t, std::int64_t> rows,
                                    std::string label) {
  if (rows.empty()) throw InputError(label + ": width table has no rows");
  std::int64_t prev = 0;
  for (const auto& [n, c] : rows) {
    if (c < 1) {
      throw InputError(label + ": c(" + std::to_string(n) + ") must be positive");
    }
    check_envelope(n, c, label);
    if (c < prev) {
      throw InputError(label + ": c decreases at n=" + std::to_string(n));
    }
    prev = c;
  }
  return {Kind::table, std::move(label), std::move(rows)};
}

WidthTarget WidthTarget::from_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open width table " + path.string());
  std::map<std::int64_t, std::int64_t> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    std::int64_t n = 0;
    std::int64_t c = 0;
    if (comma == std::string_view::npos || !parse_int(view.substr(0, comma), n) ||
        !parse_int(view.substr(comma + 1), c)) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'n,c' with integer columns");
    }
    if (!rows.emplace(n, c).second) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": duplicate n=" + std::to_string(n));
    }
  }
  return from_table(std::move(rows), "file:" + path.string());
}

std::int64_t WidthTarget::operator()(std::int64_t n) const {
  if (kind_ != Kind::table) return builtin_value(kind_, n);
  auto it = rows_.upper_bound(n);
  if (it == rows_.begin()) {
    throw InputError(name_ + ": no row at or below n=" + std::to_string(n) +
                     " (first row is n=" + std::to_string(rows_.begin()->first) +
                     ")");
  }
  return std::prev(it)->second;
}

void WidthTarget::validate(std::span<const std::int64_t> sizes) const {
  std::int64_t prev_n = 0;
  std::int64_t prev_c = 0;
  for (const std::int64_t n : sizes) {
    const std::int64_t c = (*this)(n);
    check_envelope(n, c, name_);
    if (n >= prev_n && c < prev_c) {
      throw InputError(name_ + ": c decreases at n=" + std::to_string(n));
    }
    prev_n = n;
    prev_c = c;
  }
}

ConstructionRecord build_arbitrary_width(const WidthTarget& target,
                                         std::int64_t n) {
  const std::int64_t one[] = {n};
  target.validate(one);
  const std::int64_t c_n = target(n);
  const double nd = static_cast<double>(n);
  const double c_tilde =
      std::min(static_cast<double>(c_n), 2.0 * std::sqrt(nd) / std::numbers::e);
  // The range check in invert_phi tolerates rounding at either endpoint.
  const double y = std::clamp(c_tilde * c_tilde, std::pow(std::log(nd), 2),
                              4.0 * nd / kE2);
  const double a_real = invert_phi(n, y);
  const std::int64_t a = std::max<std::int64_t>(2, std::llround(a_real));
  const std::int64_t k = n / a;
  if (k < kMinOuterSize) {
    throw InputError("construction: n=" + std::to_string(n) +
                     " leaves only k=" + std::to_string(k) +
                     " outer components for a=" + std::to_string(a) +
                     "; increase n so that floor(n/a) >= " +
                     std::to_string(kMinOuterSize));
  }
  const double lg = std::log2(static_cast<double>(k));
  const auto m = static_cast<std::int64_t>(std::floor(lg));
  const auto r = static_cast<std::int64_t>(std::floor(static_cast<double>(k) / lg));
  if (m < 1 || r < 1) {
    throw InputError("construction: degenerate parallel-series factor for n=" +
                     std::to_string(n) + "; use a larger n");
  }
  return {n,
          c_n,
          c_tilde,
          a_real,
          a,
          k,
          m,
          r,
          k * a,
          a * m * r,
          product(StructureExpr::k_out_of_n(a / 2, a), parallel_series(k))};
}

std::vector<ScalingRow> scaling_experiment(const WidthTarget& target,
                                           std::span<const std::int64_t> sizes,
                                           double epsilon, double tol) {
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw InputError("scaling sizes must be strictly increasing");
    }
  }
  target.validate(sizes);
  std::vector<ScalingRow> rows(sizes.size());
  parallel_rows(sizes.size(), [&](std::size_t i) {
    const auto rec = build_arbitrary_width(target, sizes[i]);
    const auto report = width(rec.expr, epsilon, tol);
    const std::int64_t c_N = target(rec.N);
    rows[i] = {rec.n,
               rec.N,
               c_N,
               report.width,
               report.width * static_cast<double>(c_N),
               report.p_half};
  });
  return rows;
}

}  // namespace thresholdlab
