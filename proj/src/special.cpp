#include "varx/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "varx/errors.hpp"

namespace varx {
namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;

// Series  P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n)), x < a+1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a,x), x >= a+1.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be non-negative");
}

void check_chi2_args(double x, int k) {
  if (k < 1) throw DomainError("chi2: degrees of freedom must be >= 1, got " + std::to_string(k));
  if (!(x >= 0.0)) throw DomainError("chi2: x must be non-negative");
}

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi2_cdf(double x, int k) {
  check_chi2_args(x, k);
  return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_sf(double x, int k) {
  check_chi2_args(x, k);
  return gamma_q(0.5 * k, 0.5 * x);
}

}  // namespace varx
