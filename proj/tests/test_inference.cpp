#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "varx/design.hpp"
#include "varx/dynamics.hpp"
#include "varx/errors.hpp"
#include "varx/inference.hpp"
#include "varx/special.hpp"

using namespace varx;

namespace {

struct Problem {
  TimeSeriesMatrix y, x;
  LagSpec lags;
};

// A small stable VARX process.
Problem simulated(std::size_t t, std::uint64_t seed, double noise = 1.0) {
  Rng rng(seed);
  Problem p;
  p.lags = LagSpec{2, 3, 2, 1};
  GeneratorSpec g;
  g.a = FilterTensor(2, 2, 2);
  g.a(0, 0, 0) = 0.4, g.a(0, 1, 1) = 0.3, g.a(0, 0, 1) = 0.2, g.a(1, 1, 0) = -0.2;
  g.b = testutil::random_filter(3, 2, 1, 0.5, rng);
  g.noise_std = {noise, noise};
  g.length = t;
  g.seed = seed + 1;
  p.x = testutil::white(t, 1, rng);
  p.y = simulate(g, &p.x);
  return p;
}

FitOptions raw() { return FitOptions{false}; }

}  // namespace

TEST_CASE("ridge_solve closed forms") {
  CorrelationBundle b;
  b.rxx = Matrix::identity(3);
  b.rxy = Matrix{{1.0}, {-2.0}, {3.0}};
  b.t_valid = 100;
  CHECK(ridge_solve(b, RegularizationSpec::none()) == b.rxy);
  const Matrix half = ridge_solve(b, RegularizationSpec::fixed(1.0));
  CHECK(max_abs_diff(half, 0.5 * b.rxy) <= 1e-15);
  CHECK(RegularizationSpec::scaled(2.0).gamma(400) == doctest::Approx(0.1));
  CHECK_THROWS_AS(RegularizationSpec::scaled(-1.0).gamma(10), DomainError);
}

TEST_CASE("full-model filters equal explicit least squares") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = simulated(300, 100 + s);
    const auto fit = granger_test(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), raw());
    const auto d = oracle::explicit_design(p.y, &p.x, 2, 3);
    const auto h = oracle::to_matrix(oracle::least_squares(d.x, d.y));
    CHECK(max_abs_diff(fit.h, h) <= 1e-8);
    CHECK(fit.a(0, 0, 1) == doctest::Approx(h(2, 0)).epsilon(1e-9));
    CHECK(fit.b(2, 1, 0) == doctest::Approx(h(4 + 2, 1)).epsilon(1e-9));
    CHECK(!fit.debias_applied);
    CHECK(max_abs_diff(fit.deviance_a, fit.raw_deviance_a) <= 1e-9);
    CHECK(max_abs_diff(fit.deviance_b, fit.raw_deviance_b) <= 1e-9);
  }
}

TEST_CASE("residual statistics") {
  const auto p = simulated(400, 7);
  const auto bundle = build_correlations(p.y, &p.x, p.lags);
  const auto zero = residual_stats(Matrix(bundle.predictors(), 2), bundle);
  CHECK(max_abs_diff(zero.ree, bundle.ryy) <= 1e-12);
  CHECK(max_abs_diff(zero.rxe, bundle.rxy) <= 1e-12);

  const auto h = ridge_solve(bundle, RegularizationSpec::none());
  const auto st = residual_stats(h, bundle);
  CHECK(max_abs(st.rxe) <= 1e-8 * max_abs(bundle.rxy));
  CHECK(st.sigma2[0] == doctest::Approx(st.ree(0, 0) / static_cast<double>(bundle.t_valid)));

  const auto d = oracle::explicit_design(p.y, &p.x, 2, 3);
  const auto ss = oracle::residual_power(d.x, d.y, oracle::to_dense(h));
  CHECK(st.ree(0, 0) == doctest::Approx(ss[0]).epsilon(1e-9));
  CHECK(st.ree(1, 1) == doctest::Approx(ss[1]).epsilon(1e-9));
}

TEST_CASE("noiseless data is fitted exactly") {
  const auto p = simulated(300, 3, 0.0);
  const auto fit = granger_test(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), raw());
  double power = 0;
  for (std::size_t t = 0; t < p.y.length(); ++t) power += p.y.value(t, 0) * p.y.value(t, 0);
  power /= static_cast<double>(p.y.length());
  CHECK(fit.sigma2[0] <= 1e-16 * power);
  CHECK(fit.sigma2[1] <= 1e-16 * power);
  CHECK(fit.a(0, 0, 1) == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("debias term") {
  const Matrix rxx{{2.0}}, rxe{{0.4}}, ree{{1.0}};
  CHECK(debias_term(rxe, rxx, ree)[0] == doctest::Approx(0.04).epsilon(1e-15));
  const auto zero = debias_term(Matrix(1, 1), rxx, ree);
  CHECK(zero[0] == 0.0);
  CHECK_THROWS_AS(debias_term(Matrix(2, 1), Matrix(2, 2, 1.0), ree), NotPositiveDefinite);
}

TEST_CASE("debias term matches the explicit residual form for a ridge fit") {
  Rng rng(19);
  const auto y = testutil::white(250, 1, rng);
  const auto x = testutil::white(250, 1, rng);
  const LagSpec lags{2, 2, 1, 1};
  const auto bundle = build_correlations(y, &x, lags);
  REQUIRE(bundle.predictors() == 4);
  const double gamma = RegularizationSpec::scaled(0.5).gamma(bundle.t_valid);
  const auto h = ridge_solve(bundle, RegularizationSpec::scaled(0.5));
  const auto st = residual_stats(h, bundle);
  const auto b = debias_term(st.rxe, bundle.rxx, (1.0 / static_cast<double>(bundle.t_valid)) * st.ree);

  const auto d = oracle::explicit_design(y, &x, 2, 2);
  const auto xt = oracle::transpose(d.x);
  auto lhs = oracle::matmul(xt, d.x);
  for (std::size_t i = 0; i < 4; ++i) lhs[i][i] *= 1.0 + gamma;
  const auto href = oracle::gauss_solve(lhs, oracle::matmul(xt, d.y));
  CHECK(max_abs_diff(h, oracle::to_matrix(href)) <= 1e-10);
  oracle::Dense e(d.x.size(), std::vector<double>(1));
  double ee = 0;
  for (std::size_t t = 0; t < d.x.size(); ++t) {
    double pred = 0;
    for (std::size_t j = 0; j < 4; ++j) pred += d.x[t][j] * href[j][0];
    e[t][0] = d.y[t][0] - pred;
    ee += e[t][0] * e[t][0];
  }
  const auto xe = oracle::matmul(xt, e);
  const auto proj = oracle::gauss_solve(oracle::matmul(xt, d.x), xe);
  double quad = 0;
  for (std::size_t j = 0; j < 4; ++j) quad += xe[j][0] * proj[j][0];
  CHECK(b[0] > 0.0);
  CHECK(b[0] == doctest::Approx(0.5 * quad / (ee / static_cast<double>(d.x.size()))).epsilon(1e-9));
}

TEST_CASE("deviance equals the Gaussian log-likelihood ratio") {
  // Single output, single predictor: y(t) = 0.3 y(t-1) + e.
  Rng rng(44);
  GeneratorSpec g;
  g.a = FilterTensor(1, 1, 1, 0.3);
  g.noise_std = {1.0};
  g.length = 500;
  g.seed = 45;
  const auto y = simulate(g, nullptr);
  const auto fit = granger_test(y, nullptr, LagSpec{1, 0, 1, 0}, RegularizationSpec::none(),
                                BasisMatrix::none(), raw());
  const auto d = oracle::explicit_design(y, nullptr, 1, 0);
  const double n = static_cast<double>(d.x.size());
  auto loglik = [&](double ss) { return -0.5 * n * std::log(2 * M_PI * ss / n) - 0.5 * n; };
  const auto hf = oracle::least_squares(d.x, d.y);
  const double ssf = oracle::residual_power(d.x, d.y, hf)[0];
  double ssr = 0;
  for (const auto& r : d.y) ssr += r[0] * r[0];
  const double lr = 2 * (loglik(ssf) - loglik(ssr));
  const double t_prime = n - 1.0;
  CHECK(fit.raw_deviance_a(0, 0) == doctest::Approx(t_prime / n * lr).epsilon(1e-10));
  CHECK(fit.pvalue_a(0, 0) == doctest::Approx(chi2_sf(fit.deviance_a(0, 0), 1)).epsilon(1e-12));
}

TEST_CASE("reduced models from column deletion equal refits of the reduced design") {
  auto p = simulated(400, 21);
  Rng rng(22);
  testutil::punch_holes(p.y, 0.02, rng);
  const auto fit = granger_test(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), raw());
  const auto d = oracle::explicit_design(p.y, &p.x, 2, 3);
  const auto full = oracle::residual_power(d.x, d.y, oracle::least_squares(d.x, d.y));
  const double n = static_cast<double>(d.x.size());
  const double t_prime = n - 7.0;
  const std::size_t first[] = {0, 2, 4}, count[] = {2, 2, 3};
  for (std::size_t s = 0; s < 3; ++s) {
    const auto xr = oracle::drop_columns(d.x, first[s], count[s]);
    const auto red = oracle::residual_power(xr, d.y, oracle::least_squares(xr, d.y));
    for (std::size_t i = 0; i < 2; ++i) {
      const double want = t_prime * std::log(red[i] / full[i]);
      const double got = s < 2 ? fit.raw_deviance_a(i, s) : fit.raw_deviance_b(i, 0);
      CHECK(got == doctest::Approx(want).epsilon(1e-8));
      CHECK(got >= 0.0);
    }
  }
  CHECK(fit.t_valid == d.x.size());
  CHECK(fit.predictors == 7);
  CHECK(fit.dof_a == 2);
  CHECK(fit.dof_b == 3);
}

TEST_CASE("rescaling y leaves the tests unchanged") {
  const auto p = simulated(500, 9);
  Matrix scaled = p.y.samples();
  scaled *= 3.0;
  const TimeSeriesMatrix ys(scaled);
  for (double lambda : {0.0, 1.0}) {
    const auto reg = RegularizationSpec::scaled(lambda);
    const auto f1 = granger_test(p.y, &p.x, p.lags, reg);
    const auto f2 = granger_test(ys, &p.x, p.lags, reg);
    CHECK(max_abs_diff(f1.deviance_a, f2.deviance_a) <= 1e-8);
    CHECK(max_abs_diff(f1.deviance_b, f2.deviance_b) <= 1e-8);
    CHECK(max_abs_diff(f1.pvalue_a, f2.pvalue_a) <= 1e-10);
    CHECK(max_abs_diff(f1.r2_b, f2.r2_b) <= 1e-10);
    for (std::size_t k = 0; k < f1.a.size(); ++k)
      CHECK(f2.a.values()[k] == doctest::Approx(f1.a.values()[k]).epsilon(1e-9));
    for (std::size_t k = 0; k < f1.b.size(); ++k)
      CHECK(f2.b.values()[k] == doctest::Approx(3.0 * f1.b.values()[k]).epsilon(1e-9));
  }
}

TEST_CASE("a source unrelated to everything has zero deviance") {
  CorrelationBundle b;
  b.lags = LagSpec{1, 1, 1, 1};
  b.rxx = Matrix{{4.0, 0.0}, {0.0, 2.0}};
  b.rxy = Matrix{{1.0}, {0.0}};
  b.ryy = Matrix{{3.0}};
  b.t_valid = 50;
  b.columns = {ColumnInfo{0, 1, PredictorKind::ar}, ColumnInfo{0, 0, PredictorKind::ma}};
  b.ma_params = 1;
  const auto fit = granger_test(b, RegularizationSpec::none());
  CHECK(fit.deviance_b(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(fit.pvalue_b(0, 0) == doctest::Approx(1.0));
  CHECK(fit.r2_b(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("effect size law") {
  const Matrix dev{{0.0, 100.0 * std::log(2.0)}, {-1.0, 5.0}};
  const auto es = effect_size_matrix(dev, 100);
  CHECK(es.r2(0, 0) == 0.0);
  CHECK(es.r2(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(es.r2(1, 0) == 0.0);
  CHECK(es.r(0, 1) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("too few samples") {
  Rng rng(1);
  const auto y = testutil::white(12, 2, rng);
  const auto x = testutil::white(12, 1, rng);
  const LagSpec lags{3, 3, 2, 1};
  CHECK_THROWS_AS(granger_test(y, &x, lags), InsufficientData);
  const auto fit = granger_test(y, &x, lags, RegularizationSpec::scaled(1.0));
  CHECK(!fit.warnings.empty());
  for (double p : fit.pvalue_a.values()) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("de-biasing is skipped when the raw correlations are singular") {
  Rng rng(6);
  auto y = testutil::white(200, 1, rng);
  Matrix dup(200, 2);
  for (std::size_t t = 0; t < 200; ++t) dup(t, 0) = dup(t, 1) = y.value(t, 0);
  const TimeSeriesMatrix yy(dup);
  CHECK_THROWS_AS(granger_test(yy, nullptr, LagSpec{1, 0, 2, 0}), NotPositiveDefinite);
  const auto fit = granger_test(yy, nullptr, LagSpec{1, 0, 2, 0}, RegularizationSpec::scaled(1.0));
  CHECK(!fit.debias_applied);
  CHECK(!fit.warnings.empty());
  CHECK(max_abs_diff(fit.deviance_a, fit.raw_deviance_a) == 0.0);
}

TEST_CASE("ridge de-biasing lowers the deviance") {
  const auto p = simulated(300, 13);
  const auto fit = granger_test(p.y, &p.x, p.lags, RegularizationSpec::scaled(2.0));
  CHECK(fit.debias_applied);
  CHECK(fit.gamma == doctest::Approx(2.0 / std::sqrt(static_cast<double>(fit.t_valid))));
  bool differs = false;
  for (std::size_t k = 0; k < fit.deviance_a.size(); ++k)
    differs = differs || fit.deviance_a.values()[k] != fit.raw_deviance_a.values()[k];
  CHECK(differs);
}

TEST_CASE("basis fits report compressed filters and reduced degrees of freedom") {
  Rng rng(50);
  const std::size_t n_b = 20;
  const auto basis = gaussian_basis(n_b, 5);
  GeneratorSpec g;
  g.a = FilterTensor(1, 1, 1, 0.5);
  g.b = FilterTensor(n_b, 1, 1);
  for (std::size_t l = 0; l < n_b; ++l) g.b(l, 0, 0) = basis.weights(l, 1) - 0.5 * basis.weights(l, 3);
  g.noise_std = {1.0};
  g.length = 2000;
  g.seed = 51;
  const auto x = testutil::white(2000, 1, rng);
  const auto y = simulate(g, &x);
  const auto fit = granger_test(y, &x, LagSpec{1, n_b, 1, 1}, RegularizationSpec::none(), basis);
  CHECK(fit.dof_b == 5);
  CHECK(fit.predictors == 6);
  REQUIRE(fit.b_compressed);
  for (std::size_t l = 0; l < n_b; ++l) {
    double s = 0;
    for (std::size_t j = 0; j < 5; ++j) s += basis.weights(l, j) * (*fit.b_compressed)(j, 0, 0);
    CHECK(fit.b(l, 0, 0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(fit.b(l, 0, 0) - g.b(l, 0, 0)) < 0.15);
  }
  CHECK(fit.pvalue_b(0, 0) < 1e-10);
}

TEST_CASE("null-link deviance follows the chi-square law") {
  std::vector<double> dev;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(mix_seed(900, s));
    GeneratorSpec g;
    g.a = FilterTensor(2, 2, 2);
    g.a(0, 0, 0) = 0.3, g.a(0, 1, 1) = -0.2, g.a(1, 1, 0) = 0.25;
    g.noise_std = {1.0, 1.0};
    g.length = 1000;
    g.seed = rng.next_u64();
    const auto y = simulate(g, nullptr);
    const auto fit = granger_test(y, nullptr, LagSpec{2, 0, 2, 0});
    dev.push_back(std::max(0.0, fit.deviance_a(0, 1)));
  }
  std::sort(dev.begin(), dev.end());
  double ks = 0;
  const double n = static_cast<double>(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const double f = chi2_cdf(dev[i], 2);
    ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  CHECK(ks <= 0.05);
}

TEST_CASE("permutation null") {
  SUBCASE("strong link reaches the minimum attainable p") {
    const auto p = simulated(400, 61);
    const auto res = permutation_null(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), 99, 5);
    CHECK(res.permutations == 99);
    CHECK(res.pvalue_b(0, 0) == doctest::Approx(0.01));
  }
  SUBCASE("independent channels give roughly uniform p-values") {
    std::vector<double> ps;
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(mix_seed(7000, s));
      const auto y = testutil::white(150, 2, rng);
      const auto res = permutation_null(y, nullptr, LagSpec{1, 0, 2, 0}, RegularizationSpec::none(),
                                        BasisMatrix::none(), 199, s);
      ps.push_back(res.pvalue_a(0, 1));
      CHECK(res.pvalue_a(0, 1) >= 1.0 / 200.0);
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
      ks = std::max({ks, std::abs(ps[i] - i / 100.0), std::abs(ps[i] - (i + 1) / 100.0)});
    CHECK(ks <= 0.136);
  }
  SUBCASE("reproducible from the seed") {
    const auto p = simulated(200, 62);
    const auto r1 = permutation_null(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), 20, 3);
    const auto r2 = permutation_null(p.y, &p.x, p.lags, RegularizationSpec::none(), BasisMatrix::none(), 20, 3);
    CHECK(r1.pvalue_a == r2.pvalue_a);
    CHECK(r1.pvalue_b == r2.pvalue_b);
  }
}

TEST_CASE("prediction error on training and fresh data") {
  const auto train = simulated(2000, 71);
  const auto test = simulated(2000, 72);
  const auto fit = granger_test(train.y, &train.x, train.lags);
  const double e_train = relative_error(fit, train.y, &train.x);
  const double e_test = relative_error(fit, test.y, &test.x);
  CHECK(e_train > 0.0);
  CHECK(e_train < 1.0);
  CHECK(e_test > e_train * 0.9);
  const auto res = prediction_residuals(fit, train.y, &train.x);
  CHECK(res.rows() == fit.t_valid);
  double ss = 0;
  for (std::size_t t = 0; t < res.rows(); ++t) ss += res(t, 0) * res(t, 0);
  CHECK(ss / static_cast<double>(res.rows()) == doctest::Approx(fit.sigma2[0]).epsilon(1e-6));
}

TEST_CASE("a pure moving-average fit reports no AR links") {
  const auto p = simulated(400, 21);
  const auto fit = granger_test(p.y, &p.x, LagSpec{0, 6, 2, 1});
  CHECK(fit.a.lags() == 0);
  CHECK(fit.dof_a == 0);
  CHECK(max_abs(fit.deviance_a) == 0.0);
  CHECK(fit.pvalue_a(0, 1) == 1.0);
  CHECK(fit.pvalue_b(0, 0) < 1e-6);
}
