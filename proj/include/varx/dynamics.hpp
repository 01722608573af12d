#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "varx/filters.hpp"
#include "varx/timeseries.hpp"

namespace varx {

enum class ModelKind { equation_error, output_error };

/// Parameters of a simulated VARX (or output-error) process.
struct GeneratorSpec {
  FilterTensor a;  // n_a × d_y × d_y
  FilterTensor b;  // n_b × d_y × d_x (empty when there is no input)
  std::vector<double> noise_std;  // per output
  ModelKind kind = ModelKind::equation_error;
  std::uint64_t seed = 0;
  std::size_t length = 0;
  /// Leading samples simulated and then dropped.
  std::size_t burn_in = 0;

  std::size_t d_y() const noexcept { return a.rows() ? a.rows() : b.rows(); }
  std::size_t d_x() const noexcept { return b.cols(); }
};

inline constexpr double kDivergenceLimit = 1e12;

/// Runs the recursion from zero initial conditions with Gaussian innovations
/// drawn from Rng(seed). For output-error models the recursion runs on a hidden
/// noiseless state and noise is added only to the observation.
/// `x` must be given iff d_x > 0 and cover length + burn_in samples.
/// Throws Diverged when any |y(t)| exceeds 1e12.
TimeSeriesMatrix simulate(const GeneratorSpec& spec, const TimeSeriesMatrix* x);

/// Total system response H[t] for t < horizon: filters driven by a unit impulse
/// on each input with the innovation off.
struct ImpulseResponse {
  FilterTensor h;  // horizon × d_y × d_x
  std::size_t horizon() const noexcept { return h.lags(); }
};

ImpulseResponse impulse_response(const FilterTensor& a, const FilterTensor& b, std::size_t horizon);

/// Largest eigenvalue magnitude of the (n_a·d_y)-square companion matrix.
/// Throws NoConvergence if the iteration does not settle to 1e-8.
double spectral_radius(const FilterTensor& a);

/// Companion matrix of the AR recursion, block row 0 = [A(1) .. A(n_a)].
std::vector<double> companion_matrix(const FilterTensor& a);

}  // namespace varx
