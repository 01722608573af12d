#include "varx/dynamics.hpp"

#include <cmath>
#include <string>

#include "varx/errors.hpp"
#include "varx/kernels.hpp"
#include "varx/random.hpp"

namespace varx {
namespace {

void check_generator(const GeneratorSpec& spec, const TimeSeriesMatrix* x) {
  const std::size_t dy = spec.d_y();
  if (dy == 0) throw DomainError("generator has no outputs");
  if (!spec.a.empty() && spec.a.cols() != dy) throw ShapeMismatch("A must be n_a × d_y × d_y");
  if (!spec.b.empty() && spec.b.rows() != dy) throw ShapeMismatch("B must be n_b × d_y × d_x");
  if (spec.noise_std.size() != dy)
    throw ShapeMismatch("noise_std has " + std::to_string(spec.noise_std.size()) +
                        " entries, expected " + std::to_string(dy));
  for (double s : spec.noise_std)
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("noise_std must be finite and >= 0");
  for (double v : spec.a.values())
    if (!std::isfinite(v)) throw DomainError("A contains non-finite values");
  for (double v : spec.b.values())
    if (!std::isfinite(v)) throw DomainError("B contains non-finite values");
  if (spec.length == 0) throw DomainError("simulation length must be positive");
  const std::size_t total = spec.length + spec.burn_in;
  if (spec.d_x() > 0) {
    if (!x) throw DomainError("generator has inputs but no x was supplied");
    if (x->channels() != spec.d_x())
      throw ShapeMismatch("x has " + std::to_string(x->channels()) + " channels, B expects " +
                          std::to_string(spec.d_x()));
    if (x->length() < total)
      throw ShapeMismatch("x has " + std::to_string(x->length()) + " samples, need " +
                          std::to_string(total));
    if (x->missing_count() > 0) throw DomainError("simulation input must not have missing values");
  } else if (x && x->channels() > 0 && !spec.b.empty()) {
    throw DomainError("x supplied for a generator without inputs");
  }
}

}  // namespace

TimeSeriesMatrix simulate(const GeneratorSpec& spec, const TimeSeriesMatrix* x) {
  check_generator(spec, x);
  const std::size_t dy = spec.d_y();
  const std::size_t dx = spec.d_x();
  const std::size_t na = spec.a.lags();
  const std::size_t nb = spec.b.lags();
  const std::size_t total = spec.length + spec.burn_in;
  Rng rng(spec.seed);

  // state(t) is the recursed signal: y for equation-error, the hidden z for
  // output-error.
  Matrix state(total, dy);
  Matrix out(total, dy);
  std::vector<double> e(dy);
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t i = 0; i < dy; ++i) e[i] = spec.noise_std[i] * rng.normal();
    for (std::size_t i = 0; i < dy; ++i) {
      double acc = 0.0;
      for (std::size_t l = 1; l <= na && l <= t; ++l)
        for (std::size_t j = 0; j < dy; ++j) acc += spec.a(l - 1, i, j) * state(t - l, j);
      for (std::size_t l = 0; l < nb && l <= t; ++l)
        for (std::size_t k = 0; k < dx; ++k) acc += spec.b(l, i, k) * x->value(t - l, k);
      if (spec.kind == ModelKind::equation_error) {
        state(t, i) = acc + e[i];
        out(t, i) = state(t, i);
      } else {
        state(t, i) = acc;
        out(t, i) = acc + e[i];
      }
      if (!(std::abs(out(t, i)) <= kDivergenceLimit) || !(std::abs(state(t, i)) <= kDivergenceLimit))
        throw Diverged("simulation diverged at t=" + std::to_string(t) + " (|y| > 1e12)", t);
    }
  }
  if (spec.burn_in == 0) return TimeSeriesMatrix(std::move(out));
  std::vector<double> kept(out.values().begin() + static_cast<std::ptrdiff_t>(spec.burn_in * dy),
                           out.values().end());
  return TimeSeriesMatrix(Matrix(spec.length, dy, std::move(kept)));
}

ImpulseResponse impulse_response(const FilterTensor& a, const FilterTensor& b, std::size_t horizon) {
  if (horizon < b.lags())
    throw DomainError("impulse_response: horizon " + std::to_string(horizon) + " is shorter than n_b=" +
                      std::to_string(b.lags()));
  const std::size_t dy = b.rows();
  const std::size_t dx = b.cols();
  if (!a.empty() && (a.rows() != dy || a.cols() != dy))
    throw ShapeMismatch("impulse_response: A and B disagree on d_y");
  const std::size_t na = a.lags();
  ImpulseResponse ir{FilterTensor(horizon, dy, dx)};
  FilterTensor& h = ir.h;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < dy; ++i)
      for (std::size_t k = 0; k < dx; ++k) {
        double acc = t < b.lags() ? b(t, i, k) : 0.0;
        for (std::size_t l = 1; l <= na && l <= t; ++l)
          for (std::size_t j = 0; j < dy; ++j) acc += a(l - 1, i, j) * h(t - l, j, k);
        if (!(std::abs(acc) <= kDivergenceLimit))
          throw Diverged("impulse response diverged at t=" + std::to_string(t), t);
        h(t, i, k) = acc;
      }
  }
  return ir;
}

std::vector<double> companion_matrix(const FilterTensor& a) {
  const std::size_t dy = a.rows();
  const std::size_t n = a.lags() * dy;
  std::vector<double> m(n * n, 0.0);
  for (std::size_t l = 0; l < a.lags(); ++l)
    for (std::size_t i = 0; i < dy; ++i)
      for (std::size_t j = 0; j < dy; ++j) m[i * n + l * dy + j] = a(l, i, j);
  for (std::size_t r = dy; r < n; ++r) m[r * n + (r - dy)] = 1.0;
  return m;
}

double spectral_radius(const FilterTensor& a) {
  for (double v : a.values())
    if (!std::isfinite(v)) throw DomainError("spectral_radius: A contains non-finite values");
  if (a.empty()) return 0.0;
  const std::size_t n = a.lags() * a.rows();
  // Power iteration on the matrix itself by repeated squaring:
  // M^(2^k) = exp(log_scale) * S with ||S||_F = 1, and ||M^m||^(1/m) -> rho.
  std::vector<double> s = companion_matrix(a);
  const auto& kern = kernels::active();
  auto normalize = [&](std::vector<double>& m) {
    const double nrm = std::sqrt(kern.dot(m.data(), m.data(), m.size()));
    if (nrm > 0.0)
      for (double& v : m) v /= nrm;
    return nrm;
  };
  const double norm0 = normalize(s);
  if (norm0 == 0.0) return 0.0;
  // mean_log tracks log(||M^(2^k)||) / 2^k.
  double mean_log = std::log(norm0);
  double estimate = norm0;
  std::vector<double> sq(n * n);
  constexpr std::size_t kMaxIterations = 100000;
  constexpr double kTolerance = 1e-10;
  double weight = 1.0;
  for (std::size_t k = 1; k <= kMaxIterations; ++k) {
    std::fill(sq.begin(), sq.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = 0; p < n; ++p) {
        const double sip = s[i * n + p];
        if (sip != 0.0) kern.axpy(sip, s.data() + p * n, sq.data() + i * n, n);
      }
    const double nrm = normalize(sq);
    if (nrm == 0.0) return 0.0;  // nilpotent
    s.swap(sq);
    weight *= 0.5;
    mean_log += weight * std::log(nrm);
    const double next = std::exp(mean_log);
    if (k >= 4 && std::abs(next - estimate) <= kTolerance * std::max(1.0, next)) return next;
    estimate = next;
  }
  throw NoConvergence("spectral_radius did not converge", estimate);
}

}  // namespace varx
