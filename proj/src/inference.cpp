#include "varx/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "varx/errors.hpp"
#include "varx/linalg.hpp"
#include "varx/random.hpp"
#include "varx/special.hpp"

namespace varx {

double RegularizationSpec::gamma(std::size_t t_valid) const {
  if (rule == GammaRule::fixed) {
    if (!fixed_gamma) throw DomainError("fixed gamma rule without a gamma value");
    if (!(*fixed_gamma >= 0.0)) throw DomainError("gamma must be non-negative");
    return *fixed_gamma;
  }
  if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
  if (lambda == 0.0) return 0.0;
  if (t_valid == 0) throw DomainError("scaled gamma needs a positive sample count");
  return lambda / std::sqrt(static_cast<double>(t_valid));
}

Matrix ridge_solve_gamma(const Matrix& rxx, const Matrix& rxy, double gamma) {
  if (gamma == 0.0) return spd_solve(rxx, rxy).solution;
  Matrix lhs = rxx;
  for (std::size_t i = 0; i < lhs.rows(); ++i) lhs(i, i) += gamma * rxx(i, i);
  return spd_solve(lhs, rxy).solution;
}

Matrix ridge_solve(const CorrelationBundle& bundle, const RegularizationSpec& reg) {
  if (bundle.t_valid == 0) throw NoValidSamples("bundle has no valid samples");
  return ridge_solve_gamma(bundle.rxx, bundle.rxy, reg.gamma(bundle.t_valid));
}

ResidualStats residual_stats(const Matrix& h, const Matrix& rxx, const Matrix& rxy,
                             const Matrix& ryy, std::size_t t_valid) {
  if (h.rows() != rxx.rows() || h.cols() != rxy.cols() || rxy.rows() != rxx.rows() ||
      ryy.rows() != h.cols() || ryy.cols() != h.cols())
    throw ShapeMismatch("residual_stats: inconsistent shapes");
  ResidualStats s;
  s.rxe = rxy - rxx * h;
  // Ree = Ryy - HᵀRxy - RxyᵀH + HᵀRxxH = Ryy - HᵀRxy - RxyᵀH + Hᵀ(Rxy - Rxe)
  const Matrix htrxy = transpose_times(h, rxy);
  const Matrix htrxxh = transpose_times(h, rxx * h);
  s.ree = ryy;
  for (std::size_t i = 0; i < ryy.rows(); ++i)
    for (std::size_t j = 0; j < ryy.cols(); ++j)
      s.ree(i, j) += htrxxh(i, j) - htrxy(i, j) - htrxy(j, i);
  s.sigma2.resize(ryy.rows());
  for (std::size_t i = 0; i < ryy.rows(); ++i)
    s.sigma2[i] = std::max(s.ree(i, i), 0.0) / static_cast<double>(t_valid);
  return s;
}

ResidualStats residual_stats(const Matrix& h, const CorrelationBundle& bundle) {
  return residual_stats(h, bundle.rxx, bundle.rxy, bundle.ryy, bundle.t_valid);
}

std::vector<double> debias_term(const Matrix& rxe, const Matrix& rxx, const Matrix& ree) {
  if (rxe.rows() != rxx.rows() || ree.rows() != rxe.cols())
    throw ShapeMismatch("debias_term: inconsistent shapes");
  std::vector<double> b(rxe.cols(), 0.0);
  if (rxx.rows() == 0) return b;
  const Matrix z = spd_solve(rxx, rxe).solution;
  for (std::size_t j = 0; j < rxe.cols(); ++j) {
    double q = 0.0;
    for (std::size_t i = 0; i < rxe.rows(); ++i) q += rxe(i, j) * z(i, j);
    b[j] = 0.5 * q / ree(j, j);
  }
  return b;
}

EffectSize effect_size_matrix(const Matrix& deviance, std::size_t t_valid) {
  EffectSize e{Matrix(deviance.rows(), deviance.cols()), Matrix(deviance.rows(), deviance.cols())};
  const double t = static_cast<double>(t_valid);
  for (std::size_t k = 0; k < deviance.size(); ++k) {
    const double d = std::max(deviance.data()[k], 0.0);
    const double r2 = -std::expm1(-d / t);
    e.r2.data()[k] = r2;
    e.r.data()[k] = std::sqrt(r2);
  }
  return e;
}

namespace {

struct SubmodelFit {
  Matrix h;
  ResidualStats stats;
  std::vector<double> bias;
  bool debiased = false;
};

SubmodelFit fit_submodel(const Matrix& rxx, const Matrix& rxy, const Matrix& ryy,
                         std::size_t t_valid, double gamma) {
  SubmodelFit f;
  f.h = rxx.rows() == 0 ? Matrix(0, rxy.cols()) : ridge_solve_gamma(rxx, rxy, gamma);
  f.stats = residual_stats(f.h, rxx, rxy, ryy, t_valid);
  f.bias.assign(rxy.cols(), 0.0);
  if (gamma > 0.0) {
    try {
      f.bias = debias_term(f.stats.rxe, rxx, (1.0 / static_cast<double>(t_valid)) * f.stats.ree);
      f.debiased = true;
    } catch (const NotPositiveDefinite&) {
      f.debiased = false;
    }
  }
  return f;
}

double log_ratio(double reduced, double full) {
  if (reduced <= 0.0 && full <= 0.0) return 0.0;
  if (full <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(reduced / full);
}

}  // namespace

VarxFit granger_test(const CorrelationBundle& bundle, const RegularizationSpec& reg,
                     const BasisMatrix& basis) {
  const LagSpec& lags = bundle.lags;
  const std::size_t n = bundle.predictors();
  const std::size_t t = bundle.t_valid;
  if (t == 0) throw NoValidSamples("no sample has a complete history");
  if (basis.active() && bundle.ma_params != basis.weights.cols())
    throw ShapeMismatch("bundle was not built with the supplied basis");

  VarxFit fit;
  fit.lags = lags;
  fit.reg = reg;
  fit.basis = basis;
  fit.t_valid = t;
  fit.predictors = n;
  fit.dof_a = lags.n_a;
  fit.dof_b = bundle.ma_params;
  fit.gamma = reg.gamma(t);
  if (t <= n) {
    if (fit.gamma == 0.0)
      throw InsufficientData("T_valid=" + std::to_string(t) + " does not exceed N=" +
                             std::to_string(n) + "; add regularization or shorten the lags");
    fit.warnings.push_back("T_valid=" + std::to_string(t) + " <= N=" + std::to_string(n) +
                           "; p-values are unreliable");
  }

  const SubmodelFit full = fit_submodel(bundle.rxx, bundle.rxy, bundle.ryy, t, fit.gamma);
  fit.h = full.h;
  fit.sigma2 = full.stats.sigma2;
  const bool use_bias = fit.gamma > 0.0 && full.debiased;
  bool debias_ok = fit.gamma == 0.0 || full.debiased;

  const std::size_t dy = lags.d_y, dx = lags.d_x;
  fit.a = FilterTensor(lags.n_a, dy, dy);
  fit.b = FilterTensor(lags.n_b, dy, dx);
  if (basis.active()) fit.b_compressed = FilterTensor(bundle.ma_params, dy, dx);
  for (std::size_t c = 0; c < n; ++c) {
    const ColumnInfo& info = bundle.columns[c];
    for (std::size_t i = 0; i < dy; ++i) {
      if (info.kind == PredictorKind::ar)
        fit.a(info.lag - 1, i, info.channel) = full.h(c, i);
      else if (basis.active())
        (*fit.b_compressed)(info.lag, i, info.channel) = full.h(c, i);
      else
        fit.b(info.lag, i, info.channel) = full.h(c, i);
    }
  }
  if (basis.active()) {
    for (std::size_t l = 0; l < lags.n_b; ++l)
      for (std::size_t i = 0; i < dy; ++i)
        for (std::size_t k = 0; k < dx; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < basis.weights.cols(); ++j)
            s += basis.weights(l, j) * (*fit.b_compressed)(j, i, k);
          fit.b(l, i, k) = s;
        }
  }

  fit.deviance_a = Matrix(dy, dy);
  fit.deviance_b = Matrix(dy, dx);
  fit.raw_deviance_a = Matrix(dy, dy);
  fit.raw_deviance_b = Matrix(dy, dx);
  fit.pvalue_a = Matrix(dy, dy, 1.0);
  fit.pvalue_b = Matrix(dy, dx, 1.0);
  const double t_eff = fit.effective_samples();
  if (t_eff <= 0.0)
    fit.warnings.push_back("T_valid - N is not positive; deviances collapse to the bias terms");

  for (std::size_t s = 0; s < bundle.sources(); ++s) {
    const bool ar = s < dy;
    const std::size_t col = ar ? s : s - dy;
    const int dof = static_cast<int>(ar ? fit.dof_a : fit.dof_b);
    if (dof == 0) continue;  // no columns to delete: D = 0, p = 1
    const auto keep = bundle.columns_without(s);
    const Matrix rxx_r = bundle.rxx.select(keep, keep);
    const std::vector<std::size_t> all_out = [&] {
      std::vector<std::size_t> v(dy);
      for (std::size_t i = 0; i < dy; ++i) v[i] = i;
      return v;
    }();
    const Matrix rxy_r = bundle.rxy.select(keep, all_out);
    const SubmodelFit reduced = fit_submodel(rxx_r, rxy_r, bundle.ryy, t, fit.gamma);
    debias_ok = debias_ok && (fit.gamma == 0.0 || reduced.debiased || keep.empty());
    for (std::size_t i = 0; i < dy; ++i) {
      const double raw = t_eff * log_ratio(reduced.stats.sigma2[i], full.stats.sigma2[i]);
      const double dev = use_bias ? raw - reduced.bias[i] + full.bias[i] : raw;
      const double p = chi2_sf(std::isnan(dev) ? 0.0 : std::max(dev, 0.0), dof);
      (ar ? fit.raw_deviance_a : fit.raw_deviance_b)(i, col) = raw;
      (ar ? fit.deviance_a : fit.deviance_b)(i, col) = dev;
      (ar ? fit.pvalue_a : fit.pvalue_b)(i, col) = p;
    }
  }
  fit.debias_applied = fit.gamma > 0.0 && debias_ok;
  if (fit.gamma > 0.0 && !debias_ok)
    fit.warnings.push_back(
        "DebiasUnavailable: unregularized Rxx is singular; bias terms set to zero");

  fit.r2_a = effect_size_matrix(fit.deviance_a, t).r2;
  fit.r2_b = effect_size_matrix(fit.deviance_b, t).r2;
  return fit;
}

VarxFit granger_test(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x, const LagSpec& lags,
                     const RegularizationSpec& reg, const BasisMatrix& basis,
                     const FitOptions& options) {
  if (x && x->length() != y.length())
    throw ShapeMismatch("x has " + std::to_string(x->length()) + " samples, y has " +
                        std::to_string(y.length()));
  std::vector<double> ymeans(y.channels(), 0.0), xmeans(x ? x->channels() : 0, 0.0);
  CorrelationBundle bundle;
  if (options.demean) {
    auto [yc, ym] = demean(y);
    ymeans = std::move(ym);
    if (x) {
      auto [xc, xm] = demean(*x);
      xmeans = std::move(xm);
      bundle = build_correlations(yc, &xc, lags, basis);
    } else {
      bundle = build_correlations(yc, nullptr, lags, basis);
    }
  } else {
    bundle = build_correlations(y, x, lags, basis);
  }
  VarxFit fit = granger_test(bundle, reg, basis);
  fit.y_means = std::move(ymeans);
  fit.x_means = std::move(xmeans);
  return fit;
}

Matrix prediction_residuals(const VarxFit& fit, const TimeSeriesMatrix& y,
                            const TimeSeriesMatrix* x) {
  const LagSpec& lags = fit.lags;
  const auto valid = valid_rows(y, x, lags);
  const std::size_t dy = lags.d_y, dx = lags.d_x;
  auto ym = [&](std::size_t c) { return fit.y_means.empty() ? 0.0 : fit.y_means[c]; };
  auto xm = [&](std::size_t c) { return fit.x_means.empty() ? 0.0 : fit.x_means[c]; };
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < valid.size(); ++t)
    if (valid[t]) rows.push_back(t);
  Matrix res(rows.size(), dy);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t t = rows[r];
    for (std::size_t i = 0; i < dy; ++i) {
      double pred = 0.0;
      for (std::size_t l = 1; l <= lags.n_a; ++l)
        for (std::size_t j = 0; j < dy; ++j) pred += fit.a(l - 1, i, j) * (y.value(t - l, j) - ym(j));
      for (std::size_t l = 0; l < (dx ? lags.n_b : 0); ++l)
        for (std::size_t k = 0; k < dx; ++k) pred += fit.b(l, i, k) * (x->value(t - l, k) - xm(k));
      res(r, i) = (y.value(t, i) - ym(i)) - pred;
    }
  }
  return res;
}

double relative_error(const VarxFit& fit, const TimeSeriesMatrix& y, const TimeSeriesMatrix* x) {
  const Matrix res = prediction_residuals(fit, y, x);
  const auto valid = valid_rows(y, x, fit.lags);
  const std::size_t dy = fit.lags.d_y;
  if (res.rows() == 0) throw NoValidSamples("no valid rows for prediction");
  double total = 0.0;
  for (std::size_t i = 0; i < dy; ++i) {
    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < valid.size(); ++t)
      if (valid[t]) {
        mean += y.value(t, i);
        ++n;
      }
    mean /= static_cast<double>(n);
    double var = 0.0, mse = 0.0;
    for (std::size_t t = 0; t < valid.size(); ++t)
      if (valid[t]) var += (y.value(t, i) - mean) * (y.value(t, i) - mean);
    for (std::size_t r = 0; r < res.rows(); ++r) mse += res(r, i) * res(r, i);
    total += mse / var;
  }
  return total / static_cast<double>(dy);
}

PermutationResult permutation_null(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                   const LagSpec& lags, const RegularizationSpec& reg,
                                   const BasisMatrix& basis, std::size_t n_perms,
                                   std::uint64_t seed) {
  if (n_perms < 1) throw DomainError("permutation_null needs at least one permutation");
  const std::size_t T = y.length();
  if (T < 2) throw DomainError("permutation_null needs at least two samples");
  PermutationResult out;
  out.observed = granger_test(y, x, lags, reg, basis);
  out.permutations = n_perms;
  const std::size_t dy = lags.d_y, dx = lags.d_x;
  Matrix exceed_a(dy, dy), exceed_b(dy, dx);
  Rng rng(seed);
  for (std::size_t p = 0; p < n_perms; ++p) {
    TimeSeriesMatrix ys = y;
    for (std::size_t c = 0; c < ys.channels(); ++c) ys.circular_shift(c, rng.uniform_int(1, T - 1));
    std::optional<TimeSeriesMatrix> xs;
    if (x) {
      xs = *x;
      for (std::size_t c = 0; c < xs->channels(); ++c)
        xs->circular_shift(c, rng.uniform_int(1, T - 1));
    }
    const VarxFit perm = granger_test(ys, xs ? &*xs : nullptr, lags, reg, basis);
    for (std::size_t k = 0; k < exceed_a.size(); ++k)
      if (perm.deviance_a.data()[k] >= out.observed.deviance_a.data()[k]) exceed_a.data()[k] += 1;
    for (std::size_t k = 0; k < exceed_b.size(); ++k)
      if (perm.deviance_b.data()[k] >= out.observed.deviance_b.data()[k]) exceed_b.data()[k] += 1;
  }
  const double denom = static_cast<double>(n_perms + 1);
  out.pvalue_a = Matrix(dy, dy);
  out.pvalue_b = Matrix(dy, dx);
  for (std::size_t k = 0; k < exceed_a.size(); ++k)
    out.pvalue_a.data()[k] = (1.0 + exceed_a.data()[k]) / denom;
  for (std::size_t k = 0; k < exceed_b.size(); ++k)
    out.pvalue_b.data()[k] = (1.0 + exceed_b.data()[k]) / denom;
  return out;
}

}  // namespace varx
