#include "thresholdlab/binomial.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "thresholdlab/errors.hpp"

namespace thresholdlab {

namespace {

// log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15.
constexpr std::array<double, 16> kStirlingErrorTable = {
    0.0,
    0.08106146679532725821967026,
    0.04134069595540929409382208,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.01041126526197209649747857,
    0.009255462182712732917728637,
    0.008330563433362871256469319,
    0.007573675487951840794972024,
    0.006942840107209529865664153,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.00555473355196280137103869,
};

constexpr int kReanchorEvery = 64;

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Sum of pmf(i) for i = from, from + step, ... while inside [0, n], moving
// away from the mode so the terms decrease.
double sum_tail_terms(std::int64_t n, std::int64_t from, int step, Level p) {
  const double odds = p.p / p.q;
  double term = binomial_pmf(from, n, p);
  CompensatedSum acc;
  std::int64_t i = from;
  int since_anchor = 0;
  while (true) {
    acc.add(term);
    std::int64_t next = i + step;
    if (next < 0 || next > n) break;
    if (++since_anchor == kReanchorEvery) {
      term = binomial_pmf(next, n, p);
      since_anchor = 0;
    } else if (step > 0) {
      term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
    } else {
      term *= static_cast<double>(i) / static_cast<double>(n - i + 1) / odds;
    }
    i = next;
    if (term == 0.0 || term < acc.value() * 1e-17) {
      acc.add(term);
      break;
    }
  }
  return acc.value();
}

// x^n and 1 - x^n with x given as a Level.
Level power_level(Level x, std::int64_t n) {
  const double dn = static_cast<double>(n);
  const double log_x = x.p <= 0.5 ? std::log(x.p) : std::log1p(-x.q);
  return {std::exp(dn * log_x), -std::expm1(dn * log_x)};
}

}  // namespace

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    double whole = std::floor(n);
    if (whole == n && n >= 0.0) {
      return kStirlingErrorTable[static_cast<std::size_t>(n)];
    }
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

double binomial_deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double binomial_pmf(std::int64_t x, std::int64_t n, Level p) {
  if (x < 0 || x > n) return 0.0;
  if (p.p == 0.0) return x == 0 ? 1.0 : 0.0;
  if (p.q == 0.0) return x == n ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  if (x == 0) {
    double lc = p.p < 0.1 ? -binomial_deviance(dn, dn * p.q) - dn * p.p
                          : dn * std::log(p.q);
    return std::exp(lc);
  }
  if (x == n) {
    double lc = p.q < 0.1 ? -binomial_deviance(dn, dn * p.p) - dn * p.q
                          : dn * std::log(p.p);
    return std::exp(lc);
  }
  const double dx = static_cast<double>(x);
  const double lc = stirling_error(dn) - stirling_error(dx) -
                    stirling_error(dn - dx) -
                    binomial_deviance(dx, dn * p.p) -
                    binomial_deviance(dn - dx, dn * p.q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(dx) +
                    std::log1p(-dx / dn);
  return std::exp(lc - 0.5 * lf);
}

Level binomial_upper_tail(std::int64_t n, std::int64_t k, Level p) {
  if (n < 0) throw InputError("binomial tail: negative n");
  if (k <= 0) return {1.0, 0.0};
  if (k > n) return {0.0, 1.0};
  if (p.p == 0.0) return {0.0, 1.0};
  if (p.q == 0.0) return {1.0, 0.0};
  if (n == 1) return p;
  if (k == n) return power_level(p, n);
  if (k == 1) return power_level(p.flipped(), n).flipped();

  const double mode_real = std::floor(static_cast<double>(n + 1) * p.p);
  const auto mode = static_cast<std::int64_t>(
      std::min(mode_real, static_cast<double>(n)));
  if (k > mode) {
    const double upper = sum_tail_terms(n, k, +1, p);
    return {upper, 1.0 - upper};
  }
  const double lower = sum_tail_terms(n, k - 1, -1, p);
  return {1.0 - lower, lower};
}

double entropy_term(double x) {
  if (x <= 0.0) return 0.0;
  return -x * std::log(x);
}

double one_minus_root_complement(double a, double r) {
  return -std::expm1(std::log1p(-a) / r);
}

}  // namespace thresholdlab
