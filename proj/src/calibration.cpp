#include "varx/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <regex>
#include <thread>

#include "varx/errors.hpp"
#include "varx/random.hpp"

namespace varx {

std::string LinkRef::label() const {
  const char src = kind == PredictorKind::ar ? 'y' : 'x';
  return src + std::to_string(source + 1) + "->y" + std::to_string(target + 1);
}

LinkRef LinkRef::parse(const std::string& text) {
  static const std::regex re(R"(\s*([xy])(\d+)\s*->\s*y(\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    throw ParseError("link '" + text + "' is not of the form y2->y1 or x1->y2");
  const std::size_t s = std::stoul(m[2].str());
  const std::size_t t = std::stoul(m[3].str());
  if (s == 0 || t == 0) throw ParseError("link '" + text + "': channels are numbered from 1");
  return {m[1].str() == "y" ? PredictorKind::ar : PredictorKind::ma, s - 1, t - 1};
}

std::vector<LinkRate> CalibrationReport::null_links() const {
  std::vector<LinkRate> out;
  std::copy_if(links.begin(), links.end(), std::back_inserter(out),
               [](const LinkRate& r) { return r.null_link; });
  return out;
}

std::vector<LinkRate> CalibrationReport::true_links() const {
  std::vector<LinkRate> out;
  std::copy_if(links.begin(), links.end(), std::back_inserter(out),
               [](const LinkRate& r) { return !r.null_link; });
  return out;
}

const LinkRate& CalibrationReport::rate(const LinkRef& link) const {
  for (const auto& r : links)
    if (r.link == link) return r;
  throw DomainError("link " + link.label() + " was not tested in scenario '" + name + "'");
}

namespace {

// Seed streams derived from one repetition seed.
enum Stream : std::uint64_t { kFilters = 0, kInput = 1, kNoise = 2, kCollider = 3, kTestBase = 4 };

void validate(const ScenarioSpec& spec) {
  const auto& g = spec.generator;
  if (spec.n_reps < 1) throw DomainError("scenario needs n_reps >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (g.d_y < 1) throw DomainError("generator needs d_y >= 1");
  if (g.noise_std.size() != 1 && g.noise_std.size() != g.d_y)
    throw DomainError("noise_std must have 1 or d_y entries");
  for (const auto& l : spec.null_links) {
    if (l.target >= g.d_y) throw DomainError("null link " + l.label() + " targets a missing channel");
    if (l.kind == PredictorKind::ar && l.source >= g.d_y)
      throw DomainError("null link " + l.label() + " has a missing source");
    if (l.kind == PredictorKind::ma && l.source >= g.d_x)
      throw DomainError("null link " + l.label() + " has a missing input");
  }
  if (spec.graph != Graph::custom && g.d_x < 1)
    throw DomainError("common-cause, collider and independent graphs need an exogenous input");
  if (spec.graph == Graph::collider && spec.collider_coupling.size() != g.d_y)
    throw DomainError("collider coupling needs one coefficient per output");
  if (g.a_fixed && (g.a_fixed->lags() != g.n_a || g.a_fixed->rows() != g.d_y || g.a_fixed->cols() != g.d_y))
    throw DomainError("fixed A does not match n_a × d_y × d_y");
  if (g.b_fixed && (g.b_fixed->lags() != g.n_b || g.b_fixed->rows() != g.d_y || g.b_fixed->cols() != g.d_x))
    throw DomainError("fixed B does not match n_b × d_y × d_x");
  if (spec.fit.basis > spec.fit.n_b) throw DomainError("fit basis count exceeds fit n_b");
}

struct Dataset {
  TimeSeriesMatrix y;
  std::optional<TimeSeriesMatrix> x;
};

Dataset simulate_dataset(const ScenarioSpec& spec, GeneratorSpec gen, std::uint64_t seed,
                         std::size_t stream_offset) {
  const auto& g = spec.generator;
  const std::size_t total = g.length + g.burn_in;
  std::optional<TimeSeriesMatrix> x;
  if (g.d_x > 0) {
    Rng rng(mix_seed(seed, kInput + stream_offset));
    Matrix xs(total, g.d_x);
    for (double& v : std::span(xs.data(), xs.size())) v = g.input_std * rng.normal();
    x = TimeSeriesMatrix(std::move(xs));
  }
  gen.seed = mix_seed(seed, kNoise + stream_offset);
  TimeSeriesMatrix y = simulate(gen, x ? &*x : nullptr);
  if (x && g.burn_in > 0) x = x->slice(g.burn_in, g.length);
  if (spec.graph == Graph::collider) {
    Rng rng(mix_seed(seed, kCollider + stream_offset));
    for (std::size_t t = 0; t < g.length; ++t)
      for (std::size_t k = 0; k < g.d_x; ++k) {
        double v = spec.collider_noise_std * rng.normal();
        for (std::size_t i = 0; i < g.d_y; ++i) v += spec.collider_coupling[i] * y.value(t, i);
        x->set(t, k, v);
      }
  }
  return {std::move(y), std::move(x)};
}

struct RepOutcome {
  bool ok = false;
  std::string error;
  Matrix p_a, p_b, d_a, d_b, r2_a, r2_b;
  double train = 0.0, test = 0.0;
  std::size_t t_valid = 0;
  std::size_t params = 0;
};

RepOutcome run_repetition(const ScenarioSpec& spec, std::uint64_t seed) {
  RepOutcome out;
  try {
    const GeneratorSpec gen = draw_generator(spec, seed);
    const Dataset data = simulate_dataset(spec, gen, seed, 0);
    const auto& g = spec.generator;
    const bool use_x = spec.include_x && g.d_x > 0;
    const LagSpec lags{spec.fit.n_a, spec.fit.n_b, g.d_y, use_x ? g.d_x : 0};
    const BasisMatrix basis =
        spec.fit.basis > 0 && use_x ? gaussian_basis(spec.fit.n_b, spec.fit.basis) : BasisMatrix::none();
    const TimeSeriesMatrix* xin = use_x ? &*data.x : nullptr;
    const VarxFit fit = granger_test(data.y, xin, lags, spec.fit.reg, basis);
    out.p_a = fit.pvalue_a;
    out.p_b = fit.pvalue_b;
    out.d_a = fit.deviance_a;
    out.d_b = fit.deviance_b;
    out.r2_a = fit.r2_a;
    out.r2_b = fit.r2_b;
    out.t_valid = fit.t_valid;
    out.params = fit.predictors * g.d_y;
    out.train = relative_error(fit, data.y, xin);
    if (spec.test_error) {
      const Dataset fresh = simulate_dataset(spec, gen, seed, kTestBase);
      out.test = relative_error(fit, fresh.y, use_x ? &*fresh.x : nullptr);
    }
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

bool generator_link_is_zero(const GeneratorSpec& gen, const LinkRef& link) {
  const FilterTensor& f = link.kind == PredictorKind::ar ? gen.a : gen.b;
  for (std::size_t l = 0; l < f.lags(); ++l)
    if (f(l, link.target, link.source) != 0.0) return false;
  return true;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sem(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

GeneratorSpec draw_generator(const ScenarioSpec& spec, std::uint64_t rep_seed) {
  validate(spec);
  const auto& g = spec.generator;
  Rng rng(mix_seed(rep_seed, kFilters));
  GeneratorSpec gen;
  gen.kind = g.kind;
  gen.length = g.length;
  gen.burn_in = g.burn_in;
  gen.noise_std = g.noise_std.size() == 1 ? std::vector<double>(g.d_y, g.noise_std[0]) : g.noise_std;

  if (g.a_fixed) {
    gen.a = *g.a_fixed;
  } else {
    gen.a = FilterTensor(g.n_a, g.d_y, g.d_y);
    for (double& v : gen.a.values()) v = g.a_amplitude * rng.sign();
  }
  if (g.b_fixed) {
    gen.b = *g.b_fixed;
  } else if (g.b_basis > 0) {
    const BasisMatrix w = gaussian_basis(g.n_b, g.b_basis);
    FilterTensor small(g.b_basis, g.d_y, g.d_x);
    for (double& v : small.values()) v = g.b_scale * rng.normal();
    gen.b = FilterTensor(g.n_b, g.d_y, g.d_x);
    for (std::size_t l = 0; l < g.n_b; ++l)
      for (std::size_t i = 0; i < g.d_y; ++i)
        for (std::size_t k = 0; k < g.d_x; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < g.b_basis; ++j) s += w.weights(l, j) * small(j, i, k);
          gen.b(l, i, k) = s;
        }
  } else {
    gen.b = FilterTensor(g.n_b, g.d_y, g.d_x);
    for (double& v : gen.b.values()) v = g.b_scale * rng.normal();
  }
  if (spec.graph == Graph::independent || spec.graph == Graph::collider)
    gen.b = FilterTensor(g.n_b, g.d_y, g.d_x);
  for (const auto& l : spec.null_links) {
    if (l.kind == PredictorKind::ar)
      gen.a.clear_link(l.target, l.source);
    else
      gen.b.clear_link(l.target, l.source);
  }
  return gen;
}

CalibrationReport run_scenario(const ScenarioSpec& spec) {
  validate(spec);
  const auto& g = spec.generator;
  CalibrationReport rep;
  rep.name = spec.name;
  rep.alpha = spec.alpha;
  rep.lambda = spec.fit.reg.lambda;
  rep.length = g.length;
  rep.reps_requested = spec.n_reps;
  rep.seeds.resize(spec.n_reps);
  for (std::size_t r = 0; r < spec.n_reps; ++r) rep.seeds[r] = mix_seed(spec.seed, r);

  std::vector<RepOutcome> outcomes(spec.n_reps);
  std::size_t workers = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, spec.n_reps);
  if (workers == 1) {
    for (std::size_t r = 0; r < spec.n_reps; ++r) outcomes[r] = run_repetition(spec, rep.seeds[r]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < spec.n_reps; r = next++)
          outcomes[r] = run_repetition(spec, rep.seeds[r]);
      });
    for (auto& th : pool) th.join();
  }

  const bool use_x = spec.include_x && g.d_x > 0;
  const GeneratorSpec reference = draw_generator(spec, rep.seeds[0]);
  std::vector<LinkRef> links;
  for (std::size_t i = 0; i < g.d_y; ++i)
    for (std::size_t j = 0; j < g.d_y; ++j) links.push_back({PredictorKind::ar, j, i});
  if (use_x)
    for (std::size_t i = 0; i < g.d_y; ++i)
      for (std::size_t k = 0; k < g.d_x; ++k) links.push_back({PredictorKind::ma, k, i});
  for (const auto& l : links) {
    LinkRate lr;
    lr.link = l;
    lr.null_link = generator_link_is_zero(reference, l);
    rep.links.push_back(lr);
  }

  std::vector<double> train, test;
  std::size_t tv_sum = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++rep.reps_failed;
      if (rep.failures.size() < 20) rep.failures.push_back(o.error);
      continue;
    }
    ++rep.reps_completed;
    rep.parameter_count = o.params;
    tv_sum += o.t_valid;
    train.push_back(o.train);
    if (spec.test_error) test.push_back(o.test);
    for (auto& lr : rep.links) {
      const bool ar = lr.link.kind == PredictorKind::ar;
      const std::size_t i = lr.link.target, j = lr.link.source;
      const double p = ar ? o.p_a(i, j) : o.p_b(i, j);
      lr.hits += p < spec.alpha ? 1 : 0;
      lr.trials += 1;
      lr.mean_deviance += ar ? o.d_a(i, j) : o.d_b(i, j);
      lr.mean_r2 += ar ? o.r2_a(i, j) : o.r2_b(i, j);
    }
  }
  for (auto& lr : rep.links) {
    if (lr.trials == 0) continue;
    const double n = static_cast<double>(lr.trials);
    lr.rate = static_cast<double>(lr.hits) / n;
    lr.std_error = std::sqrt(lr.rate * (1.0 - lr.rate) / n);
    lr.mean_deviance /= n;
    lr.mean_r2 /= n;
  }
  rep.train_error = mean(train);
  rep.train_error_se = sem(train);
  if (spec.test_error) {
    rep.test_error = mean(test);
    rep.test_error_se = sem(test);
  }
  if (rep.reps_completed > 0) rep.mean_t_valid = tv_sum / rep.reps_completed;
  return rep;
}

std::vector<SweepCell> regularization_sweep(const ScenarioSpec& base,
                                            const std::vector<double>& lambdas,
                                            const std::vector<std::size_t>& lengths) {
  if (lambdas.empty() || lengths.empty()) throw DomainError("regularization_sweep needs non-empty grids");
  std::vector<SweepCell> cells;
  for (std::size_t len : lengths)
    for (double lam : lambdas) {
      ScenarioSpec s = base;
      s.generator.length = len;
      s.fit.reg.lambda = lam;
      s.fit.reg.rule = GammaRule::scaled;
      s.name = base.name + "/T=" + std::to_string(len) + "/lambda=" + std::to_string(lam);
      cells.push_back({lam, len, run_scenario(s)});
    }
  return cells;
}

BasisComparison basis_comparison(const ScenarioSpec& spec) {
  if (spec.generator.b_basis == 0 && !spec.generator.b_fixed)
    throw DomainError("basis_comparison expects generator filters built from the basis");
  if (spec.fit.basis == 0) throw DomainError("basis_comparison needs fit.basis > 0");
  ScenarioSpec free_spec = spec;
  free_spec.fit.basis = 0;
  free_spec.name = spec.name + "/free";
  ScenarioSpec basis_spec = spec;
  basis_spec.name = spec.name + "/basis";
  return {run_scenario(free_spec), run_scenario(basis_spec)};
}

}  // namespace varx
