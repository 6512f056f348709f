#include "thresholdlab/exact_eval.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/kernels.hpp"

namespace thresholdlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Forward-mode dual number: value and derivative with respect to p.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual& operator+=(Dual& a, Dual b) { return a = a + b; }

struct NodeEval {
  double value;
  double complement;
  double slope;
  EvalMethod method;
  double error;
};

NodeEval eval_k_out_of_n(const KOutOfN& a, Level p) {
  const Level tail = binomial_upper_tail(a.n, a.k, p);
  const double slope =
      a.n == 1 ? 1.0
               : static_cast<double>(a.n) * binomial_pmf(a.k - 1, a.n - 1, p);
  const bool closed = a.k == 1 || a.k == a.n;
  return {tail.p, tail.q, slope,
          closed ? EvalMethod::closed_form : EvalMethod::binomial_tail,
          closed ? 4 * kEps : 1e-13};
}

// Run-length automaton over a line of components. State t < k is the
// length of the current trailing failure run; `failed` is absorbing.
class RunChain {
 public:
  RunChain(std::int64_t k, Dual p, Dual q)
      : p_(p), q_(q), survive_(static_cast<std::size_t>(k)) {
    survive_[0] = {1.0, 0.0};
  }

  void step() {
    const std::size_t k = survive_.size();
    Dual total;
    for (const auto& s : survive_) total += s;
    failed_ += p_ * survive_[k - 1];
    for (std::size_t j = k - 1; j > 0; --j) survive_[j] = p_ * survive_[j - 1];
    survive_[0] = q_ * total;
  }

  Dual failed() const { return failed_; }
  const std::vector<Dual>& survive() const { return survive_; }

 private:
  Dual p_;
  Dual q_;
  Dual failed_;
  std::vector<Dual> survive_;
};

NodeEval eval_consecutive(const Consecutive& c, Level level) {
  const Dual p{level.p, 1.0};
  const Dual q{level.q, -1.0};
  const std::int64_t n = c.n;
  const std::int64_t k = c.k;
  const double error = 4.0 * static_cast<double>(n) * kEps;

  if (c.topology == Topology::linear) {
    RunChain chain(k, p, q);
    for (std::int64_t i = 0; i < n; ++i) chain.step();
    Dual works;
    for (const auto& s : chain.survive()) works += s;
    return {chain.failed().v, works.v, chain.failed().d, EvalMethod::dp, error};
  }

  // Circular: condition on the leading failure run s. Either s >= k, or
  // component s works and the remaining line of length n - s - 1 fails on
  // its own or through a trailing run t with t + s >= k.
  std::vector<Dual> p_pow(static_cast<std::size_t>(k) + 1);
  p_pow[0] = {1.0, 0.0};
  for (std::int64_t s = 1; s <= k; ++s) p_pow[s] = p_pow[s - 1] * p;

  Dual failed = p_pow[k];
  Dual works;
  RunChain chain(k, p, q);
  for (std::int64_t len = 0; len < n; ++len) {
    const std::int64_t s = n - 1 - len;
    if (s < k) {
      const auto& surv = chain.survive();
      Dual wrap_fail = chain.failed();
      Dual wrap_ok;
      for (std::int64_t t = 0; t < k; ++t) {
        if (t + s >= k) {
          wrap_fail += surv[t];
        } else {
          wrap_ok += surv[t];
        }
      }
      const Dual weight = p_pow[s] * q;
      failed += weight * wrap_fail;
      works += weight * wrap_ok;
    }
    chain.step();
  }
  return {failed.v, works.v, failed.d, EvalMethod::dp, error};
}

NodeEval eval_explicit(const Explicit& e, Level level) {
  const int n = e.n;
  const auto& counts = *e.counts_by_weight;
  double value = 0.0;
  double complement = 0.0;
  double slope = 0.0;
  double choose = 1.0;  // C(n, i)
  for (int i = 0; i <= n; ++i) {
    const double weight = std::pow(level.p, i) * std::pow(level.q, n - i);
    const auto members = static_cast<double>(counts[i]);
    value += members * weight;
    complement += (choose - members) * weight;
    double dw = 0.0;
    if (i > 0) dw += i * std::pow(level.p, i - 1) * std::pow(level.q, n - i);
    if (i < n) dw -= (n - i) * std::pow(level.p, i) * std::pow(level.q, n - i - 1);
    slope += members * dw;
    choose = choose * (n - i) / (i + 1);
  }
  return {value, complement, slope, EvalMethod::brute_force,
          4.0 * (n + 1) * kEps};
}

NodeEval eval_node(const StructureExpr& expr, Level p) {
  return std::visit(
      Overloaded{
          [&](const KOutOfN& a) { return eval_k_out_of_n(a, p); },
          [&](const Consecutive& c) { return eval_consecutive(c, p); },
          [&](const Product& prod) {
            const NodeEval inner = eval_node(prod.inner, p);
            const NodeEval outer =
                eval_node(prod.outer, Level{inner.value, inner.complement});
            return NodeEval{outer.value, outer.complement,
                            outer.slope * inner.slope, EvalMethod::composed,
                            outer.error + std::abs(outer.slope) * inner.error};
          },
          [&](const Explicit& e) { return eval_explicit(e, p); },
      },
      expr.node().v);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InputError("probability must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace

std::string_view to_string(EvalMethod method) {
  switch (method) {
    case EvalMethod::closed_form: return "closed_form";
    case EvalMethod::binomial_tail: return "binomial_tail";
    case EvalMethod::dp: return "dp";
    case EvalMethod::brute_force: return "brute_force";
    case EvalMethod::composed: return "composed";
  }
  return "unknown";
}

double ReliabilityPolynomial::evaluate(double p) const {
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    total += static_cast<double>(counts[i]) * std::pow(p, i) *
             std::pow(1.0 - p, n - i);
  }
  return total;
}

EvalResult availability(const StructureExpr& expr, Level p) {
  check_probability(p.p);
  check_probability(p.q);
  const NodeEval e = eval_node(expr, p);
  return {e.value, e.complement, e.method, e.error};
}

EvalResult availability(const StructureExpr& expr, double p) {
  check_probability(p);
  return availability(expr, Level::of(p));
}

CurveSample evaluate_with_slope(const StructureExpr& expr, Level p) {
  check_probability(p.p);
  check_probability(p.q);
  const NodeEval e = eval_node(expr, p);
  return {e.value, e.complement, e.slope};
}

double derivative(const StructureExpr& expr, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError("derivative requires 0 < p < 1, got " + std::to_string(p));
  }
  return eval_node(expr, Level::of(p)).slope;
}

std::vector<double> influences(const StructureExpr& expr, double p) {
  const std::int64_t n = expr.ground_size();
  if (n > kExhaustiveCap) {
    throw InputError("influences: ground size " + std::to_string(n) +
                     " exceeds the exhaustive cap " +
                     std::to_string(kExhaustiveCap));
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError("influences require 0 < p < 1, got " + std::to_string(p));
  }
  const auto members = kernels::enumerate_members_parallel(expr);
  // weight[j]: probability of a fixed pattern with j ones on n - 1 coordinates.
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) {
    weight[j] = std::pow(p, static_cast<double>(j)) *
                std::pow(1.0 - p, static_cast<double>(n - 1 - j));
  }
  std::vector<double> result(static_cast<std::size_t>(n), 0.0);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double total = 0.0;
    for (std::uint64_t x = 0; x < count; ++x) {
      if (x & bit) continue;
      if (members[x | bit] && !members[x]) {
        total += weight[std::popcount(x)];
      }
    }
    result[i] = total;
  }
  return result;
}

ReliabilityPolynomial reliability_polynomial(const StructureExpr& expr) {
  const std::int64_t n = expr.ground_size();
  if (const auto* a = std::get_if<KOutOfN>(&expr.node().v)) {
    if (n > 67) {
      throw InputError("reliability polynomial counts overflow 64 bits for n=" +
                       std::to_string(n));
    }
    ReliabilityPolynomial poly{static_cast<int>(n), {}};
    poly.counts.assign(static_cast<std::size_t>(n) + 1, 0);
    std::uint64_t choose = 1;  // C(n, i), exact: the product is divisible.
    for (std::int64_t i = 0; i <= n; ++i) {
      if (i >= a->k) poly.counts[i] = choose;
      if (i < n) {
        const auto num = static_cast<unsigned __int128>(choose) *
                         static_cast<std::uint64_t>(n - i);
        choose = static_cast<std::uint64_t>(num / static_cast<std::uint64_t>(i + 1));
      }
    }
    return poly;
  }
  if (n > kExhaustiveCap) {
    throw InputError("reliability polynomial: ground size " + std::to_string(n) +
                     " exceeds the exhaustive cap " +
                     std::to_string(kExhaustiveCap));
  }
  return {static_cast<int>(n), kernels::count_by_weight_parallel(expr)};
}

}  // namespace thresholdlab
