#pragma once
// Brute-force reference computations used as independent checks. None of these
// call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "varx/filters.hpp"
#include "varx/matrix.hpp"
#include "varx/timeseries.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const varx::Matrix& m) {
  Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline varx::Matrix to_matrix(const Dense& d) {
  varx::Matrix m(d.size(), d.empty() ? 0 : d[0].size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = d[i][j];
  return m;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Gaussian elimination with partial pivoting, solving A·X = B.
inline Dense gauss_solve(Dense a, Dense b) {
  const std::size_t n = a.size();
  const std::size_t m = b[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    if (a[k][k] == 0.0) throw std::runtime_error("singular");
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < m; ++j) b[i][j] -= f * b[k][j];
    }
  }
  Dense x(n, std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii][j];
      for (std::size_t k = ii + 1; k < n; ++k) s -= a[ii][k] * x[k][j];
      x[ii][j] = s / a[ii][ii];
    }
  return x;
}

// Least squares min ‖X·h − Y‖ by Householder QR on the explicit design.
inline Dense least_squares(Dense x, Dense y) {
  const std::size_t rows = x.size(), n = x[0].size(), d = y[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += x[i][k] * x[i][k];
    norm = std::sqrt(norm);
    const double alpha = x[k][k] > 0 ? -norm : norm;
    std::vector<double> v(rows, 0.0);
    for (std::size_t i = k; i < rows; ++i) v[i] = x[i][k];
    v[k] -= alpha;
    double vv = 0.0;
    for (std::size_t i = k; i < rows; ++i) vv += v[i] * v[i];
    if (vv == 0.0) continue;
    auto reflect = [&](auto& mat, std::size_t cols, std::size_t from) {
      for (std::size_t j = from; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < rows; ++i) s += v[i] * mat[i][j];
        s = 2.0 * s / vv;
        for (std::size_t i = k; i < rows; ++i) mat[i][j] -= s * v[i];
      }
    };
    reflect(x, n, k);
    reflect(y, d, 0);
  }
  Dense h(n, std::vector<double>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii][j];
      for (std::size_t k = ii + 1; k < n; ++k) s -= x[ii][k] * h[k][j];
      h[ii][j] = s / x[ii][ii];
    }
  return h;
}

// Adaptive Simpson quadrature of the chi-square density after substituting
// t = u², which removes the singularity at the origin for k = 1.
inline double chi2_cdf_quadrature(double x, int k) {
  if (x <= 0.0) return 0.0;
  const double half = 0.5 * k;
  const double log_norm = -half * std::log(2.0) - std::lgamma(half);
  auto f = [&](double u) {
    if (u == 0.0) return k == 1 ? 2.0 * std::exp(log_norm) : 0.0;
    return 2.0 * std::exp(log_norm + (k - 1) * std::log(u) - 0.5 * u * u);
  };
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 1e-15 * 15.0) return left + right + delta / 15.0;
        return rec(a, m, fa, flm, fm, left, depth - 1) + rec(m, b, fm, frm, fb, right, depth - 1);
      };
  const double top = std::sqrt(x);
  // Split into unit pieces so the peak is never skipped.
  double total = 0.0;
  const int pieces = std::max(1, static_cast<int>(std::ceil(top * 4)));
  for (int p = 0; p < pieces; ++p) {
    const double a = top * p / pieces, b = top * (p + 1) / pieces;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    total += rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 40);
  }
  return total;
}

struct Design {
  Dense x, y;
  std::vector<std::size_t> times;
};

inline bool present(const varx::TimeSeriesMatrix& s, std::ptrdiff_t t, std::size_t c) {
  return t >= 0 && !s.missing(static_cast<std::size_t>(t), c);
}

// Row t is usable when the target and every value the row refers to exist.
inline std::vector<bool> valid_rows(const varx::TimeSeriesMatrix& y, const varx::TimeSeriesMatrix* x,
                                    std::size_t n_a, std::size_t n_b) {
  std::vector<bool> ok(y.length(), false);
  for (std::size_t t = 0; t < y.length(); ++t) {
    bool good = true;
    const auto tt = static_cast<std::ptrdiff_t>(t);
    for (std::size_t i = 0; i < y.channels(); ++i) {
      good = good && present(y, tt, i);
      for (std::size_t l = 1; l <= n_a; ++l) good = good && present(y, tt - static_cast<std::ptrdiff_t>(l), i);
    }
    if (x)
      for (std::size_t k = 0; k < x->channels(); ++k)
        for (std::size_t l = 0; l < n_b; ++l) good = good && present(*x, tt - static_cast<std::ptrdiff_t>(l), k);
    ok[t] = good;
  }
  return ok;
}

// Explicit T_valid × N lagged design. Columns: y channel-major with lags
// 1..n_a, then x channel-major with lags 0..n_b-1.
inline Design explicit_design(const varx::TimeSeriesMatrix& y, const varx::TimeSeriesMatrix* x,
                              std::size_t n_a, std::size_t n_b) {
  Design d;
  const auto ok = valid_rows(y, x, n_a, n_b);
  for (std::size_t t = 0; t < y.length(); ++t) {
    if (!ok[t]) continue;
    std::vector<double> row;
    for (std::size_t i = 0; i < y.channels(); ++i)
      for (std::size_t l = 1; l <= n_a; ++l) row.push_back(y.value(t - l, i));
    if (x)
      for (std::size_t k = 0; k < x->channels(); ++k)
        for (std::size_t l = 0; l < n_b; ++l) row.push_back(x->value(t - l, k));
    std::vector<double> target;
    for (std::size_t i = 0; i < y.channels(); ++i) target.push_back(y.value(t, i));
    d.x.push_back(row);
    d.y.push_back(target);
    d.times.push_back(t);
  }
  return d;
}

// Drops a column set from an explicit design.
inline Dense drop_columns(const Dense& x, std::size_t first, std::size_t count) {
  Dense out;
  for (const auto& row : x) {
    std::vector<double> r;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (j < first || j >= first + count) r.push_back(row[j]);
    out.push_back(r);
  }
  return out;
}

inline std::vector<double> residual_power(const Dense& x, const Dense& y, const Dense& h) {
  std::vector<double> ss(y[0].size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t i = 0; i < y[0].size(); ++i) {
      double pred = 0.0;
      for (std::size_t j = 0; j < x[0].size(); ++j) pred += x[t][j] * h[j][i];
      ss[i] += (y[t][i] - pred) * (y[t][i] - pred);
    }
  return ss;
}

using Complex = std::complex<double>;
using CDense = std::vector<std::vector<Complex>>;

inline CDense complex_solve(CDense a, CDense b) {
  const std::size_t n = a.size(), m = b[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < m; ++j) b[i][j] -= f * b[k][j];
    }
  }
  CDense x(n, std::vector<Complex>(m));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = b[ii][j];
      for (std::size_t k = ii + 1; k < n; ++k) s -= a[ii][k] * x[k][j];
      x[ii][j] = s / a[ii][ii];
    }
  return x;
}

// Impulse response from the transfer function (I − A(z))⁻¹·B(z) sampled on
// `points` frequencies and inverted by a plain DFT.
inline varx::FilterTensor frequency_impulse(const varx::FilterTensor& a, const varx::FilterTensor& b,
                                            std::size_t horizon, std::size_t points) {
  const std::size_t dy = b.rows(), dx = b.cols();
  std::vector<CDense> spectrum(points);
  for (std::size_t f = 0; f < points; ++f) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(f) / static_cast<double>(points);
    CDense lhs(dy, std::vector<Complex>(dy, 0.0));
    CDense rhs(dy, std::vector<Complex>(dx, 0.0));
    for (std::size_t i = 0; i < dy; ++i) lhs[i][i] = 1.0;
    for (std::size_t l = 0; l < a.lags(); ++l) {
      const Complex z = std::polar(1.0, -w * static_cast<double>(l + 1));
      for (std::size_t i = 0; i < dy; ++i)
        for (std::size_t j = 0; j < dy; ++j) lhs[i][j] -= a(l, i, j) * z;
    }
    for (std::size_t l = 0; l < b.lags(); ++l) {
      const Complex z = std::polar(1.0, -w * static_cast<double>(l));
      for (std::size_t i = 0; i < dy; ++i)
        for (std::size_t k = 0; k < dx; ++k) rhs[i][k] += b(l, i, k) * z;
    }
    spectrum[f] = complex_solve(lhs, rhs);
  }
  varx::FilterTensor h(horizon, dy, dx);
  for (std::size_t t = 0; t < horizon; ++t)
    for (std::size_t i = 0; i < dy; ++i)
      for (std::size_t k = 0; k < dx; ++k) {
        Complex s = 0.0;
        for (std::size_t f = 0; f < points; ++f) {
          const double w = 2.0 * std::numbers::pi * static_cast<double>(f * t) / static_cast<double>(points);
          s += spectrum[f][i][k] * std::polar(1.0, w);
        }
        h(t, i, k) = s.real() / static_cast<double>(points);
      }
  return h;
}

// Characteristic polynomial of the companion matrix by Faddeev–LeVerrier,
// then all roots by Durand–Kerner. Returns the largest root modulus.
inline double companion_radius(const varx::FilterTensor& a) {
  const std::size_t d = a.rows(), p = a.lags(), n = d * p;
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t l = 0; l < p; ++l)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) c[i][l * d + j] = a(l, i, j);
  for (std::size_t i = d; i < n; ++i) c[i][i - d] = 1.0;
  // coeffs[k] multiplies z^(n-k); coeffs[0] = 1.
  std::vector<double> coeffs(n + 1, 0.0);
  coeffs[0] = 1.0;
  Dense m(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 1; k <= n; ++k) {
    Dense am = matmul(c, m);
    for (std::size_t i = 0; i < n; ++i) am[i][i] += coeffs[k - 1];
    m = am;
    Dense cm = matmul(c, m);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += cm[i][i];
    coeffs[k] = -tr / static_cast<double>(k);
  }
  std::vector<Complex> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = std::pow(Complex(0.4, 0.9), static_cast<double>(i));
  auto poly = [&](Complex z) {
    Complex v = 0.0;
    for (double co : coeffs) v = v * z + co;
    return v;
  };
  for (int iter = 0; iter < 5000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      const Complex step = poly(roots[i]) / denom;
      roots[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  double r = 0.0;
  for (const auto& z : roots) r = std::max(r, std::abs(z));
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
