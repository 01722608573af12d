#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varx/design.hpp"
#include "varx/dynamics.hpp"
#include "varx/inference.hpp"

namespace varx {

/// A directed link source -> target. AR links have an endogenous source, MA
/// links an exogenous one. Channels are 0-based here and 1-based in text
/// ("y2->y1").
struct LinkRef {
  PredictorKind kind = PredictorKind::ar;
  std::size_t source = 0;
  std::size_t target = 0;

  std::string label() const;
  /// Parses "y2->y1" / "x1->y3". Throws ParseError.
  static LinkRef parse(const std::string& text);
  friend bool operator==(const LinkRef&, const LinkRef&) = default;
};

/// How a fresh generator is drawn for each repetition.
struct GeneratorTemplate {
  std::size_t d_y = 2;
  std::size_t d_x = 1;
  std::size_t n_a = 2;
  std::size_t n_b = 2;
  std::size_t length = 1000;
  std::size_t burn_in = 0;
  std::vector<double> noise_std{1.0};  // one value per output, or one shared
  double input_std = 1.0;
  ModelKind kind = ModelKind::equation_error;
  /// A entries are ±a_amplitude with random sign unless `a_fixed` is given.
  double a_amplitude = 0.05;
  /// B entries are b_scale·N(0,1) unless `b_fixed` is given.
  double b_scale = 1.0;
  /// When > 0, B = W·B̲ with W the Gaussian basis of this many windows and B̲
  /// drawn as above.
  std::size_t b_basis = 0;
  std::optional<FilterTensor> a_fixed;
  std::optional<FilterTensor> b_fixed;
};

enum class Graph { custom, common_cause, collider, independent };

struct FitSpec {
  std::size_t n_a = 2;
  std::size_t n_b = 2;
  RegularizationSpec reg;
  std::size_t basis = 0;  // 0 = free filters
};

struct ScenarioSpec {
  std::string name = "scenario";
  GeneratorTemplate generator;
  /// common-cause: x drives y through B. independent: x is generated but has no
  /// effect (B = 0). collider: B = 0 and x(t) = Σ c_i·y_i(t) + noise, so x
  /// depends on y. custom: B as drawn.
  Graph graph = Graph::custom;
  std::vector<LinkRef> null_links;
  std::size_t n_reps = 100;
  double alpha = 0.05;
  FitSpec fit;
  bool include_x = true;
  /// Also simulate a fresh dataset per repetition to measure test error.
  bool test_error = false;
  std::uint64_t seed = 1;
  std::vector<double> collider_coupling{0.5, 0.5};
  double collider_noise_std = 1.0;
  /// Worker threads; 0 = hardware concurrency. Tallies do not depend on it.
  std::size_t threads = 0;
};

struct LinkRate {
  LinkRef link;
  bool null_link = false;  // generator filter is identically zero
  std::size_t hits = 0;    // repetitions with p < alpha
  std::size_t trials = 0;
  double rate = 0.0;
  double std_error = 0.0;  // binomial standard error
  double mean_deviance = 0.0;
  double mean_r2 = 0.0;
};

struct CalibrationReport {
  std::string name;
  double alpha = 0.05;
  double lambda = 0.0;
  std::size_t length = 0;
  std::size_t reps_requested = 0;
  std::size_t reps_completed = 0;
  std::size_t reps_failed = 0;
  std::vector<std::string> failures;
  std::vector<std::uint64_t> seeds;
  std::vector<LinkRate> links;
  double train_error = 0.0, train_error_se = 0.0;
  std::optional<double> test_error, test_error_se;
  std::size_t parameter_count = 0;  // d_y·N of the fitted model
  std::size_t mean_t_valid = 0;

  std::vector<LinkRate> null_links() const;
  std::vector<LinkRate> true_links() const;
  /// Throws DomainError when the link was not tested.
  const LinkRate& rate(const LinkRef& link) const;
};

/// Simulates n_reps datasets from per-repetition seeds derived from spec.seed,
/// fits each and tallies p < alpha per link. Repetitions that throw (for
/// example an unstable draw) are excluded and counted.
CalibrationReport run_scenario(const ScenarioSpec& spec);

/// Draws the generator filters for one repetition (exposed for tests and the CLI).
GeneratorSpec draw_generator(const ScenarioSpec& spec, std::uint64_t rep_seed);

struct SweepCell {
  double lambda = 0.0;
  std::size_t length = 0;
  CalibrationReport report;
};

/// λ × T grid of run_scenario; every cell uses the same master seed.
std::vector<SweepCell> regularization_sweep(const ScenarioSpec& base,
                                            const std::vector<double>& lambdas,
                                            const std::vector<std::size_t>& lengths);

struct BasisComparison {
  CalibrationReport free_fit;
  CalibrationReport basis_fit;
};

/// Fits the same simulated datasets with free MA filters and with the basis
/// given by spec.fit.basis. Requires a generator built from a basis.
BasisComparison basis_comparison(const ScenarioSpec& spec);

}  // namespace varx
