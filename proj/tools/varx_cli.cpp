#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "varx/calibration.hpp"
#include "varx/design.hpp"
#include "varx/dynamics.hpp"
#include "varx/errors.hpp"
#include "varx/inference.hpp"
#include "varx/io.hpp"

namespace fs = std::filesystem;
using namespace varx;

namespace {

enum Exit { kOk = 0, kIo = 2, kInsufficient = 3, kDiverged = 4, kConfig = 5 };

struct Config {
  std::string input, out = ".", generator, scenario, model;
  std::vector<std::string> exogenous, endogenous;
  std::size_t n_a = 2, n_b = 2, basis = 0, horizon = 0, permutations = 1000;
  double lambda = 0.0, alpha = 0.05;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t reps = 0, threads = 0;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const fs::path& dir, const char* name) { return (dir / name).string(); }

io::Json load_json(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return io::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

struct Dataset {
  TimeSeriesMatrix y;
  std::optional<TimeSeriesMatrix> x;
};

Dataset load_dataset(const Config& c) {
  if (c.input.empty()) throw ConfigError("--input is required");
  auto split = io::split_channels(io::read_csv(c.input), c.exogenous, c.endogenous);
  return {std::move(split.y), std::move(split.x)};
}

LagSpec lags_for(const Config& c, const Dataset& d) {
  return LagSpec{c.n_a, d.x ? c.n_b : 0, d.y.channels(), d.x ? d.x->channels() : 0};
}

BasisMatrix basis_for(const Config& c, const Dataset& d) {
  if (!c.basis || !d.x) return BasisMatrix::none();
  if (c.basis > c.n_b) throw ConfigError("--basis must not exceed --nb");
  return gaussian_basis(c.n_b, c.basis);
}

int cmd_fit(const Config& c) {
  const Dataset d = load_dataset(c);
  const LagSpec lags = lags_for(c, d);
  const VarxFit fit = granger_test(d.y, d.x ? &*d.x : nullptr, lags, RegularizationSpec::scaled(c.lambda),
                                   basis_for(c, d));
  const auto y_names = d.y.names();
  const auto x_names = d.x ? d.x->names() : std::vector<std::string>{};
  const fs::path out(c.out);
  io::write_file_atomic(join(out, "model.json"), io::model_to_json(fit, y_names, x_names).dump(2) + "\n");
  io::write_file_atomic(join(out, "links.csv"), io::links_csv(fit, y_names, x_names));
  if (c.horizon > 0 && d.x) {
    const auto ir = impulse_response(fit.a, fit.b, std::max(c.horizon, fit.b.lags()));
    io::write_file_atomic(join(out, "impulse.csv"), io::impulse_csv(ir, y_names, x_names));
  }
  std::size_t significant = 0;
  for (double p : std::span(fit.pvalue_a.data(), fit.pvalue_a.size())) significant += p < c.alpha;
  for (double p : std::span(fit.pvalue_b.data(), fit.pvalue_b.size())) significant += p < c.alpha;
  std::cout << "T_valid " << fit.t_valid << ", N " << fit.predictors << ", " << significant
            << " links with p < " << c.alpha << "\n";
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

int cmd_simulate(const Config& c) {
  if (c.generator.empty()) throw ConfigError("--generator is required");
  io::GeneratorFile g = io::generator_from_json(load_json(c.generator));
  if (c.seed_given) g.spec.seed = c.seed;
  const TimeSeriesMatrix table = io::simulate_table(g);
  const fs::path out(c.out);
  io::write_file_atomic(join(out, "data.csv"), io::format_csv(table));
  std::cout << "wrote " << table.length() << " rows to " << join(out, "data.csv") << "\n";
  return kOk;
}

int cmd_impulse(const Config& c) {
  FilterTensor a, b;
  std::vector<std::string> y_names, x_names;
  if (!c.model.empty()) {
    const io::Json j = load_json(c.model);
    a = io::filter_from_json(j.at("A"), "A");
    b = io::filter_from_json(j.at("B"), "B");
    y_names = j.at("y_names").get<std::vector<std::string>>();
    x_names = j.at("x_names").get<std::vector<std::string>>();
  } else if (!c.generator.empty()) {
    const io::GeneratorFile g = io::generator_from_json(load_json(c.generator));
    a = g.spec.a;
    b = g.spec.b;
    for (std::size_t i = 0; i < g.spec.d_y(); ++i) y_names.push_back("y" + std::to_string(i + 1));
    for (std::size_t k = 0; k < g.spec.d_x(); ++k) x_names.push_back("x" + std::to_string(k + 1));
  } else {
    throw ConfigError("impulse needs --model or --generator");
  }
  if (b.empty()) throw ConfigError("the model has no exogenous input");
  const std::size_t horizon = c.horizon ? c.horizon : std::max<std::size_t>(b.lags(), 50);
  const auto ir = impulse_response(a, b, horizon);
  io::write_file_atomic(join(fs::path(c.out), "impulse.csv"), io::impulse_csv(ir, y_names, x_names));
  if (!a.empty()) std::cout << "spectral radius " << spectral_radius(a) << "\n";
  return kOk;
}

void write_report(const fs::path& out, const io::Json& j, const std::string& summary) {
  io::write_file_atomic(join(out, "report.json"), j.dump(2) + "\n");
  io::write_file_atomic(join(out, "summary.txt"), summary);
  std::cout << summary;
}

int cmd_calibrate(const Config& c) {
  if (c.scenario.empty()) throw ConfigError("--scenario is required");
  const io::Json j = load_json(c.scenario);
  ScenarioSpec spec = io::scenario_from_json(j);
  if (c.seed_given) spec.seed = c.seed;
  if (c.reps) spec.n_reps = c.reps;
  if (c.threads) spec.threads = c.threads;
  const fs::path out(c.out);
  if (j.contains("sweep")) {
    const auto lambdas = j.at("sweep").at("lambdas").get<std::vector<double>>();
    const auto lengths = j.at("sweep").at("lengths").get<std::vector<std::size_t>>();
    if (lambdas.empty() || lengths.empty()) throw ConfigError("sweep grids must be non-empty");
    const auto cells = regularization_sweep(spec, lambdas, lengths);
    io::Json arr = io::Json::array();
    std::string summary;
    for (const auto& cell : cells) {
      arr.push_back(io::report_to_json(cell.report));
      summary += io::summary_table(cell.report);
    }
    write_report(out, io::Json{{"scenario", io::scenario_to_json(spec)}, {"sweep", arr}}, summary);
  } else if (j.value("compare_basis", false)) {
    const auto cmp = basis_comparison(spec);
    write_report(out,
                 io::Json{{"scenario", io::scenario_to_json(spec)},
                          {"free", io::report_to_json(cmp.free_fit)},
                          {"basis", io::report_to_json(cmp.basis_fit)}},
                 io::summary_table(cmp.free_fit) + io::summary_table(cmp.basis_fit));
  } else {
    const auto report = run_scenario(spec);
    write_report(out, io::Json{{"scenario", io::scenario_to_json(spec)}, {"report", io::report_to_json(report)}},
                 io::summary_table(report));
  }
  return kOk;
}

int cmd_permtest(const Config& c) {
  const Dataset d = load_dataset(c);
  const LagSpec lags = lags_for(c, d);
  const auto res = permutation_null(d.y, d.x ? &*d.x : nullptr, lags, RegularizationSpec::scaled(c.lambda),
                                    basis_for(c, d), c.permutations, c.seed);
  const auto& y_names = d.y.names();
  std::string csv = "source,target,kind,deviance,p,p_permutation\n";
  for (std::size_t i = 0; i < lags.d_y; ++i)
    for (std::size_t j = 0; j < lags.d_y; ++j)
      csv += y_names[j] + ',' + y_names[i] + ",AR," + io::format_number(res.observed.deviance_a(i, j)) + ',' +
             io::format_number(res.observed.pvalue_a(i, j)) + ',' + io::format_number(res.pvalue_a(i, j)) + '\n';
  for (std::size_t i = 0; i < lags.d_y; ++i)
    for (std::size_t k = 0; k < lags.d_x; ++k)
      csv += d.x->name(k) + ',' + y_names[i] + ",MA," + io::format_number(res.observed.deviance_b(i, k)) + ',' +
             io::format_number(res.observed.pvalue_b(i, k)) + ',' + io::format_number(res.pvalue_b(i, k)) + '\n';
  io::write_file_atomic(join(fs::path(c.out), "permtest.csv"), csv);
  std::cout << res.permutations << " circular-shift permutations\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VARX estimation and Granger causality testing"};
  app.require_subcommand(1);
  Config c;

  auto data_flags = [&c](CLI::App* s) {
    s->add_option("--input", c.input, "CSV file with a header row");
    s->add_option("--exogenous", c.exogenous, "Names of exogenous input columns")->delimiter(',');
    s->add_option("--endogenous", c.endogenous, "Names of endogenous columns (default: all others)")
        ->delimiter(',');
    s->add_option("--na", c.n_a, "Autoregressive lags");
    s->add_option("--nb", c.n_b, "Input filter length");
    s->add_option("--basis", c.basis, "Gaussian basis functions for the input filters (0 = none)");
    s->add_option("--lambda", c.lambda, "Ridge regularization")->check(CLI::NonNegativeNumber);
    s->add_option("--alpha", c.alpha, "Significance threshold")->check(CLI::Range(0.0, 1.0));
  };
  auto seed_flag = [&c](CLI::App* s) {
    s->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t v) { c.seed = v, c.seed_given = true; }, "Random seed");
  };

  auto* fit = app.add_subcommand("fit", "Fit a VARX model and test every link");
  data_flags(fit);
  fit->add_option("--horizon", c.horizon, "Also write impulse.csv with this many lags");
  fit->add_option("--out", c.out, "Output directory");

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from a generator JSON");
  sim->add_option("--generator", c.generator, "Generator JSON");
  sim->add_option("--out", c.out, "Output directory");
  seed_flag(sim);

  auto* imp = app.add_subcommand("impulse", "Impulse response of a fitted model or generator");
  imp->add_option("--model", c.model, "model.json from fit");
  imp->add_option("--generator", c.generator, "Generator JSON");
  imp->add_option("--horizon", c.horizon, "Number of lags");
  imp->add_option("--out", c.out, "Output directory");

  auto* cal = app.add_subcommand("calibrate", "Run a Monte Carlo calibration scenario");
  cal->add_option("--scenario", c.scenario, "Scenario JSON");
  cal->add_option("--reps", c.reps, "Override the number of repetitions");
  cal->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  cal->add_option("--out", c.out, "Output directory");
  seed_flag(cal);

  auto* perm = app.add_subcommand("permtest", "Circular-shift permutation null for every link");
  data_flags(perm);
  perm->add_option("--permutations", c.permutations, "Number of shifted surrogates")->check(CLI::PositiveNumber);
  perm->add_option("--out", c.out, "Output directory");
  seed_flag(perm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*fit) return cmd_fit(c);
    if (*sim) return cmd_simulate(c);
    if (*imp) return cmd_impulse(c);
    if (*cal) return cmd_calibrate(c);
    if (*perm) return cmd_permtest(c);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficient;
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
