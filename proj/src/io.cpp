#include "varx/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "varx/errors.hpp"
#include "varx/random.hpp"

namespace varx::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NaN" || s == "nan" || s == "NAN"; }


std::string kind_name(ModelKind k) { return k == ModelKind::equation_error ? "equation-error" : "output-error"; }

ModelKind parse_model_kind(const std::string& s) {
  if (s == "equation-error") return ModelKind::equation_error;
  if (s == "output-error") return ModelKind::output_error;
  throw ParseError("model_kind must be 'equation-error' or 'output-error', got '" + s + "'");
}

std::string graph_name(Graph g) {
  switch (g) {
    case Graph::custom:
      return "custom";
    case Graph::common_cause:
      return "common-cause";
    case Graph::collider:
      return "collider";
    case Graph::independent:
      return "independent";
  }
  return "custom";
}

Graph parse_graph(const std::string& s) {
  for (Graph g : {Graph::custom, Graph::common_cause, Graph::collider, Graph::independent})
    if (graph_name(g) == s) return g;
  throw ParseError("graph must be custom, common-cause, collider or independent; got '" + s + "'");
}

std::vector<double> number_or_list(const Json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& e : j) {
      if (!e.is_number()) throw ParseError(what + " must contain numbers");
      v.push_back(e.get<double>());
    }
    return v;
  }
  throw ParseError(what + " must be a number or a list of numbers");
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

Json link_rate_json(const LinkRate& r) {
  return Json{{"link", r.link.label()},        {"kind", r.link.kind == PredictorKind::ar ? "AR" : "MA"},
              {"null", r.null_link},           {"rate", r.rate},
              {"stderr", r.std_error},         {"hits", r.hits},
              {"trials", r.trials},            {"mean_deviance", r.mean_deviance},
              {"mean_R2", r.mean_r2}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

TimeSeriesMatrix parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
      line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw ParseError(source + ": missing header row");
  for (const auto& h : header)
    if (h.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty column name");
  const std::size_t d = header.size();
  std::vector<double> values;
  std::vector<unsigned char> mask;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != d)
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                       " fields, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < d; ++c) {
      const std::string& cell = cells[c];
      if (is_missing_token(cell)) {
        values.push_back(0.0);
        mask.push_back(1);
        continue;
      }
      double v = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ParseError(source + ":" + std::to_string(lineno) + ": column '" + header[c] +
                         "': cannot parse '" + cell + "' as a number");
      values.push_back(v);
      mask.push_back(0);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source + ": no data rows");
  return TimeSeriesMatrix(Matrix(rows, d, std::move(values)), std::move(mask), std::move(header));
}

TimeSeriesMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_csv(in, path);
}

std::string format_csv(const TimeSeriesMatrix& s) {
  std::string out;
  for (std::size_t c = 0; c < s.channels(); ++c) {
    if (c) out += ',';
    out += s.name(c);
  }
  out += '\n';
  for (std::size_t t = 0; t < s.length(); ++t) {
    for (std::size_t c = 0; c < s.channels(); ++c) {
      if (c) out += ',';
      if (!s.missing(t, c)) out += format_number(s.value(t, c));
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << content;
    if (!out) throw ParseError(path + ": write failed");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ChannelSplit split_channels(const TimeSeriesMatrix& table, const std::vector<std::string>& exogenous,
                            const std::vector<std::string>& endogenous) {
  auto index_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.channels(); ++c)
      if (table.name(c) == name) return c;
    throw ParseError("column '" + name + "' not found in input");
  };
  std::vector<std::size_t> xi, yi;
  for (const auto& n : exogenous) xi.push_back(index_of(n));
  if (endogenous.empty()) {
    for (std::size_t c = 0; c < table.channels(); ++c)
      if (std::find(xi.begin(), xi.end(), c) == xi.end()) yi.push_back(c);
  } else {
    for (const auto& n : endogenous) {
      const std::size_t c = index_of(n);
      if (std::find(xi.begin(), xi.end(), c) != xi.end())
        throw ParseError("column '" + n + "' is listed as both endogenous and exogenous");
      yi.push_back(c);
    }
  }
  if (yi.empty()) throw ParseError("no endogenous columns left after removing exogenous ones");
  ChannelSplit out{table.select_channels(yi), {}};
  if (!xi.empty()) out.x = table.select_channels(xi);
  return out;
}

Json filter_to_json(const FilterTensor& f) {
  Json out = Json::array();
  for (std::size_t l = 0; l < f.lags(); ++l) {
    Json m = Json::array();
    for (std::size_t i = 0; i < f.rows(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < f.cols(); ++j) row.push_back(f(l, i, j));
      m.push_back(row);
    }
    out.push_back(m);
  }
  return out;
}

FilterTensor filter_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be a [lag][output][input] nested array");
  const std::size_t lags = j.size();
  if (lags == 0) return {};
  const std::size_t rows = j[0].is_array() ? j[0].size() : 0;
  const std::size_t cols = rows && j[0][0].is_array() ? j[0][0].size() : 0;
  FilterTensor f(lags, rows, cols);
  for (std::size_t l = 0; l < lags; ++l) {
    if (!j[l].is_array() || j[l].size() != rows) throw ParseError(what + ": ragged lag " + std::to_string(l));
    for (std::size_t i = 0; i < rows; ++i) {
      if (!j[l][i].is_array() || j[l][i].size() != cols)
        throw ParseError(what + ": ragged row at lag " + std::to_string(l));
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[l][i][c].is_number()) throw ParseError(what + ": non-numeric entry");
        f(l, i, c) = j[l][i][c].get<double>();
      }
    }
  }
  return f;
}

Json model_to_json(const VarxFit& fit, const std::vector<std::string>& y_names,
                   const std::vector<std::string>& x_names) {
  Json basis = Json{{"kind", fit.basis.active() ? "gaussian" : "none"},
                    {"count", fit.basis.active() ? fit.basis.weights.cols() : 0}};
  if (fit.basis.active()) basis["weights"] = matrix_to_json(fit.basis.weights);
  Json j{{"lags", {{"n_a", fit.lags.n_a}, {"n_b", fit.lags.n_b}, {"d_y", fit.lags.d_y}, {"d_x", fit.lags.d_x}}},
         {"regularization",
          {{"lambda", fit.reg.lambda},
           {"rule", fit.reg.rule == GammaRule::scaled ? "scaled" : "fixed"},
           {"gamma", fit.gamma}}},
         {"basis", basis},
         {"y_names", y_names},
         {"x_names", x_names},
         {"T_valid", fit.t_valid},
         {"N", fit.predictors},
         {"debias_applied", fit.debias_applied},
         {"sigma2", fit.sigma2},
         {"y_means", fit.y_means},
         {"x_means", fit.x_means},
         {"A", filter_to_json(fit.a)},
         {"B", filter_to_json(fit.b)}};
  if (fit.b_compressed) j["B_compressed"] = filter_to_json(*fit.b_compressed);
  j["deviance_A"] = matrix_to_json(fit.deviance_a);
  j["deviance_B"] = matrix_to_json(fit.deviance_b);
  j["pvalue_A"] = matrix_to_json(fit.pvalue_a);
  j["pvalue_B"] = matrix_to_json(fit.pvalue_b);
  j["R2_A"] = matrix_to_json(fit.r2_a);
  j["R2_B"] = matrix_to_json(fit.r2_b);
  j["warnings"] = fit.warnings;
  return j;
}

std::string links_csv(const VarxFit& fit, const std::vector<std::string>& y_names,
                      const std::vector<std::string>& x_names) {
  std::string out = "source,target,kind,n,deviance,raw_deviance,p,R2,R\n";
  auto row = [&](const std::string& src, const std::string& tgt, const char* kind, std::size_t n,
                 double dev, double raw, double p, double r2) {
    out += src + ',' + tgt + ',' + kind + ',' + std::to_string(n) + ',' + format_number(dev) + ',' +
           format_number(raw) + ',' + format_number(p) + ',' + format_number(r2) + ',' +
           format_number(std::sqrt(r2)) + '\n';
  };
  const std::size_t dy = fit.lags.d_y, dx = fit.lags.d_x;
  for (std::size_t i = 0; i < dy; ++i)
    for (std::size_t j = 0; j < dy; ++j)
      row(y_names.at(j), y_names.at(i), "AR", fit.dof_a, fit.deviance_a(i, j), fit.raw_deviance_a(i, j),
          fit.pvalue_a(i, j), fit.r2_a(i, j));
  for (std::size_t i = 0; i < dy; ++i)
    for (std::size_t k = 0; k < dx; ++k)
      row(x_names.at(k), y_names.at(i), "MA", fit.dof_b, fit.deviance_b(i, k), fit.raw_deviance_b(i, k),
          fit.pvalue_b(i, k), fit.r2_b(i, k));
  return out;
}

std::string impulse_csv(const ImpulseResponse& ir, const std::vector<std::string>& y_names,
                        const std::vector<std::string>& x_names) {
  std::string out = "lag";
  for (std::size_t i = 0; i < ir.h.rows(); ++i)
    for (std::size_t k = 0; k < ir.h.cols(); ++k) out += ',' + x_names.at(k) + "->" + y_names.at(i);
  out += '\n';
  for (std::size_t t = 0; t < ir.horizon(); ++t) {
    out += std::to_string(t);
    for (std::size_t i = 0; i < ir.h.rows(); ++i)
      for (std::size_t k = 0; k < ir.h.cols(); ++k) out += ',' + format_number(ir.h(t, i, k));
    out += '\n';
  }
  return out;
}

GeneratorFile generator_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("generator must be a JSON object");
  GeneratorFile g;
  if (!j.contains("A") && !j.contains("B")) throw ParseError("generator needs A and/or B filters");
  if (j.contains("A")) g.spec.a = filter_from_json(j.at("A"), "A");
  if (j.contains("B")) g.spec.b = filter_from_json(j.at("B"), "B");
  const std::size_t dy = g.spec.d_y();
  if (!g.spec.a.empty() && g.spec.a.rows() != g.spec.a.cols())
    throw ParseError("A must be square in its output/input dimensions");
  if (!g.spec.b.empty() && g.spec.b.rows() != dy) throw ParseError("A and B disagree on d_y");
  if (!j.contains("T")) throw ParseError("generator needs T");
  g.spec.length = j.at("T").get<std::size_t>();
  auto noise = number_or_list(j.contains("noise_std") ? j.at("noise_std") : Json(1.0), "noise_std");
  if (noise.size() == 1) noise.assign(dy, noise[0]);
  if (noise.size() != dy) throw ParseError("noise_std must have 1 or d_y entries");
  g.spec.noise_std = noise;
  g.spec.kind = parse_model_kind(get_or<std::string>(j, "model_kind", "equation-error"));
  g.spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  g.spec.burn_in = get_or<std::size_t>(j, "burn_in", 0);
  g.input_std = get_or<double>(j, "input_std", 1.0);
  return g;
}

Json generator_to_json(const GeneratorFile& g) {
  return Json{{"A", filter_to_json(g.spec.a)},
              {"B", filter_to_json(g.spec.b)},
              {"noise_std", g.spec.noise_std},
              {"model_kind", kind_name(g.spec.kind)},
              {"seed", g.spec.seed},
              {"T", g.spec.length},
              {"burn_in", g.spec.burn_in},
              {"input_std", g.input_std}};
}

TimeSeriesMatrix simulate_table(const GeneratorFile& g) {
  const std::size_t dx = g.spec.d_x();
  const std::size_t dy = g.spec.d_y();
  const std::size_t total = g.spec.length + g.spec.burn_in;
  std::optional<TimeSeriesMatrix> x;
  if (dx > 0) {
    Rng rng(mix_seed(g.spec.seed, 1));
    Matrix xs(total, dx);
    for (double& v : std::span(xs.data(), xs.size())) v = g.input_std * rng.normal();
    x = TimeSeriesMatrix(std::move(xs));
  }
  GeneratorSpec spec = g.spec;
  spec.seed = mix_seed(g.spec.seed, 2);
  const TimeSeriesMatrix y = simulate(spec, x ? &*x : nullptr);
  Matrix table(g.spec.length, dy + dx);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dy; ++i) names.push_back("y" + std::to_string(i + 1));
  for (std::size_t k = 0; k < dx; ++k) names.push_back("x" + std::to_string(k + 1));
  for (std::size_t t = 0; t < g.spec.length; ++t) {
    for (std::size_t i = 0; i < dy; ++i) table(t, i) = y.value(t, i);
    for (std::size_t k = 0; k < dx; ++k) table(t, dy + k) = x->value(t + g.spec.burn_in, k);
  }
  return TimeSeriesMatrix(std::move(table), std::move(names));
}

ScenarioSpec scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  ScenarioSpec s;
  s.name = get_or<std::string>(j, "name", "scenario");
  s.graph = parse_graph(get_or<std::string>(j, "graph", "custom"));
  s.n_reps = get_or<std::size_t>(j, "n_reps", 100);
  s.alpha = get_or<double>(j, "alpha", 0.05);
  s.seed = get_or<std::uint64_t>(j, "seed", 1);
  s.include_x = get_or<bool>(j, "include_x", true);
  s.test_error = get_or<bool>(j, "test_error", false);
  s.threads = get_or<std::size_t>(j, "threads", 0);
  if (!j.contains("generator")) throw ParseError("scenario needs a generator block");
  const Json& g = j.at("generator");
  auto& gt = s.generator;
  gt.d_y = get_or<std::size_t>(g, "d_y", 2);
  gt.d_x = get_or<std::size_t>(g, "d_x", 1);
  gt.n_a = get_or<std::size_t>(g, "n_a", 2);
  gt.n_b = get_or<std::size_t>(g, "n_b", 2);
  gt.length = get_or<std::size_t>(g, "T", 1000);
  gt.burn_in = get_or<std::size_t>(g, "burn_in", 0);
  gt.noise_std = number_or_list(g.contains("noise_std") ? g.at("noise_std") : Json(1.0), "noise_std");
  gt.input_std = get_or<double>(g, "input_std", 1.0);
  gt.kind = parse_model_kind(get_or<std::string>(g, "model_kind", "equation-error"));
  gt.a_amplitude = get_or<double>(g, "a_amplitude", 0.05);
  gt.b_scale = get_or<double>(g, "b_scale", 1.0);
  gt.b_basis = get_or<std::size_t>(g, "b_basis", 0);
  if (g.contains("A")) gt.a_fixed = filter_from_json(g.at("A"), "generator.A");
  if (g.contains("B")) gt.b_fixed = filter_from_json(g.at("B"), "generator.B");
  if (j.contains("null_links")) {
    for (const auto& l : j.at("null_links")) {
      if (l.is_string()) {
        s.null_links.push_back(LinkRef::parse(l.get<std::string>()));
      } else if (l.is_object()) {
        s.null_links.push_back(LinkRef::parse(l.at("source").get<std::string>() + "->" +
                                              l.at("target").get<std::string>()));
      } else {
        throw ParseError("null_links entries must be strings like \"y2->y1\"");
      }
    }
  }
  const Json fit = j.contains("fit") ? j.at("fit") : Json::object();
  s.fit.n_a = get_or<std::size_t>(fit, "n_a", gt.n_a);
  s.fit.n_b = get_or<std::size_t>(fit, "n_b", gt.n_b);
  s.fit.basis = get_or<std::size_t>(fit, "basis", 0);
  s.fit.reg.lambda = get_or<double>(fit, "lambda", 0.0);
  if (fit.contains("gamma") && !fit.at("gamma").is_null()) {
    s.fit.reg.rule = GammaRule::fixed;
    s.fit.reg.fixed_gamma = fit.at("gamma").get<double>();
  }
  if (j.contains("collider")) {
    const Json& c = j.at("collider");
    if (c.contains("coupling")) s.collider_coupling = number_or_list(c.at("coupling"), "collider.coupling");
    s.collider_noise_std = get_or<double>(c, "noise_std", 1.0);
  }
  if (s.n_reps < 1) throw ParseError("n_reps must be at least 1");
  for (const auto& l : s.null_links) {
    const std::size_t src_dim = l.kind == PredictorKind::ar ? gt.d_y : gt.d_x;
    if (l.source >= src_dim || l.target >= gt.d_y)
      throw ParseError("null link " + l.label() + " references a channel outside the generator");
  }
  if (s.graph == Graph::collider && s.collider_coupling.size() == 1)
    s.collider_coupling.assign(gt.d_y, s.collider_coupling[0]);
  return s;
}

Json scenario_to_json(const ScenarioSpec& s) {
  const auto& g = s.generator;
  Json gen{{"d_y", g.d_y},
           {"d_x", g.d_x},
           {"n_a", g.n_a},
           {"n_b", g.n_b},
           {"T", g.length},
           {"burn_in", g.burn_in},
           {"noise_std", g.noise_std},
           {"input_std", g.input_std},
           {"model_kind", kind_name(g.kind)},
           {"a_amplitude", g.a_amplitude},
           {"b_scale", g.b_scale},
           {"b_basis", g.b_basis}};
  if (g.a_fixed) gen["A"] = filter_to_json(*g.a_fixed);
  if (g.b_fixed) gen["B"] = filter_to_json(*g.b_fixed);
  Json nulls = Json::array();
  for (const auto& l : s.null_links) nulls.push_back(l.label());
  Json fit{{"n_a", s.fit.n_a}, {"n_b", s.fit.n_b}, {"basis", s.fit.basis}, {"lambda", s.fit.reg.lambda}};
  if (s.fit.reg.rule == GammaRule::fixed && s.fit.reg.fixed_gamma) fit["gamma"] = *s.fit.reg.fixed_gamma;
  return Json{{"name", s.name},
              {"graph", graph_name(s.graph)},
              {"n_reps", s.n_reps},
              {"alpha", s.alpha},
              {"seed", s.seed},
              {"include_x", s.include_x},
              {"test_error", s.test_error},
              {"generator", gen},
              {"null_links", nulls},
              {"fit", fit},
              {"collider", {{"coupling", s.collider_coupling}, {"noise_std", s.collider_noise_std}}}};
}

Json report_to_json(const CalibrationReport& r) {
  Json fdr = Json::array(), power = Json::array(), links = Json::array();
  for (const auto& l : r.links) {
    links.push_back(link_rate_json(l));
    (l.null_link ? fdr : power).push_back(link_rate_json(l));
  }
  Json j{{"name", r.name},
         {"alpha", r.alpha},
         {"lambda", r.lambda},
         {"T", r.length},
         {"reps_requested", r.reps_requested},
         {"reps_completed", r.reps_completed},
         {"reps_failed", r.reps_failed},
         {"failures", r.failures},
         {"parameter_count", r.parameter_count},
         {"mean_T_valid", r.mean_t_valid},
         {"train_error", r.train_error},
         {"train_error_se", r.train_error_se}};
  j["test_error"] = r.test_error ? Json(*r.test_error) : Json(nullptr);
  j["test_error_se"] = r.test_error_se ? Json(*r.test_error_se) : Json(nullptr);
  j["fdr"] = fdr;
  j["power"] = power;
  j["links"] = links;
  j["seeds"] = r.seeds;
  return j;
}

std::string summary_table(const CalibrationReport& r) {
  std::ostringstream os;
  os << r.name << "  (T=" << r.length << ", lambda=" << r.lambda << ", reps " << r.reps_completed << "/"
     << r.reps_requested << ", parameters " << r.parameter_count << ")\n";
  os << "  link        kind  role   rate    stderr\n";
  for (const auto& l : r.links) {
    os << "  " << std::left << std::setw(12) << l.link.label() << std::setw(6)
       << (l.link.kind == PredictorKind::ar ? "AR" : "MA") << std::setw(7) << (l.null_link ? "FDR" : "power")
       << std::fixed << std::setprecision(4) << l.rate << "  " << l.std_error << "\n";
    os.unsetf(std::ios::fixed);
  }
  os << "  train error " << r.train_error << " +- " << r.train_error_se;
  if (r.test_error) os << "   test error " << *r.test_error << " +- " << *r.test_error_se;
  os << "\n";
  if (r.reps_failed) os << "  " << r.reps_failed << " repetitions failed (excluded)\n";
  return os.str();
}

}  // namespace varx::io
