#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "whitney/app.hpp"
#include "whitney/checks.hpp"
#include "whitney/eval.hpp"
#include "whitney/gamma.hpp"
#include "whitney/locator_tree.hpp"
#include "whitney/model_io.hpp"
#include "whitney/wells.hpp"
#include "whitney/wspd.hpp"

namespace whitney::app {

using json = nlohmann::ordered_json;

void validate_config(const JobConfig& c) {
  if (!(c.epsilon > 0.0)) throw ValidationError(ValidationCode::BadParameter, "--epsilon must be positive");
  if (!(c.eps_sep > 0.0 && c.eps_sep < 1.0)) throw ValidationError(ValidationCode::BadParameter, "--eps-sep must lie in (0, 1)");
  if (c.M_override && !(*c.M_override > 0.0)) throw ValidationError(ValidationCode::BadParameter, "--M must be positive");
  if (c.num_queries < 1) throw ValidationError(ValidationCode::BadParameter, "--queries-per-size must be positive");
  for (int d : c.dims) {
    if (d < 1) throw ValidationError(ValidationCode::BadParameter, "--dims entries must be positive");
  }
  for (int n : c.sizes) {
    if (n < 1) throw ValidationError(ValidationCode::BadParameter, "--sizes entries must be positive");
  }
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_output(const JobConfig& config, const std::string& text, std::ostream& out) {
  if (config.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(config.output_path, std::ios::binary);
  if (!f) throw ValidationError(ValidationCode::BadParameter, config.output_path + ": cannot open for writing");
  f << text;
}

namespace {

Instance require_input(const JobConfig& config) {
  if (config.input_path.empty()) throw ValidationError(ValidationCode::BadParameter, "--input is required");
  Instance inst = ingest(config.input_path);
  return config.jitter ? jittered(inst, config.seed) : inst;
}

const OneField& require_field(const Instance& inst, const char* command) {
  if (const auto* f = std::get_if<OneField>(&inst)) return *f;
  throw ValidationError(ValidationCode::BadParameter,
                        std::string(command) + " needs gradients; run fit on function-only data");
}

json solver_json(const SolverReport& r) {
  json j;
  j["constraints"] = r.m;
  j["mu"] = r.mu;
  j["outer_iterations"] = r.outer_iterations;
  j["newton_steps"] = r.newton_steps;
  j["step_bound"] = r.step_bound;
  j["barrier_degree"] = r.barrier_degree;
  j["final_gap"] = r.final_gap;
  j["max_constraint"] = r.max_constraint;
  j["seconds"] = r.seconds;
  return j;
}

FunctionFit fit_data(const JobConfig& config, const FunctionData& data) {
  return solve_function_problem(data, config.epsilon, config.pairs, config.eps_sep,
                                config.sparse ? Factorization::Sparse : Factorization::Dense);
}

struct Built {
  WellsModel model;
  std::optional<FunctionFit> fit;
  std::string source;
};

// The fit bound M recorded in a report written by `fit`, if the input is one.
std::optional<double> recorded_fit_M(const JobConfig& config) {
  json doc = json::parse(read_file(config.input_path), nullptr, false);
  if (!doc.is_object() || !doc.contains("fit")) return std::nullopt;
  const json& fit = doc["fit"];
  if (!fit.is_object() || !fit.contains("M") || !fit["M"].is_number()) return std::nullopt;
  return fit["M"].get<double>();
}

// The M used for a jet problem, or the fitted field and the larger of its two bounds for function data.
// A fitted field read back from a fit report gets the same larger bound.
Built build_from(const JobConfig& config, const Instance& inst) {
  Built out;
  if (const auto* data = std::get_if<FunctionData>(&inst)) {
    FunctionFit fit = fit_data(config, *data);
    double M = std::max(fit.M, fit.gamma1_of_field);
    std::optional<OneField> affine;
    if (!config.M_override && fit.M_tilde <= config.epsilon) affine = affine_fit(*data);
    if (affine) {
      out.source = "affine";
      out.model = build_model(*affine, 0.0);
      out.fit = std::move(fit);
      return out;
    }
    if (config.M_override) {
      M = select_M(fit.field, MSource::User, config.eps_sep, config.M_override);
      out.source = "user";
    } else {
      out.source = fit.M >= fit.gamma1_of_field ? "fit" : "gamma1_of_fit";
    }
    out.model = build_model(fit.field, M);
    out.fit = std::move(fit);
    return out;
  }
  const OneField& field = std::get<OneField>(inst);
  double M;
  if (config.M_override) {
    M = select_M(field, MSource::User, config.eps_sep, config.M_override);
    out.source = "user";
  } else if (config.approx) {
    M = select_M(field, MSource::Approx, config.eps_sep);
    out.source = "approx";
  } else if (auto fit_M = config.input_path.empty() ? std::nullopt : recorded_fit_M(config)) {
    double g = select_M(field, MSource::Exact);
    M = std::max(*fit_M, g);
    out.source = *fit_M >= g ? "fit" : "gamma1_of_fit";
  } else {
    M = select_M(field, MSource::Exact);
    out.source = "exact";
  }
  out.model = build_model(field, M);
  return out;
}

}  // namespace

std::string run_gamma1(const JobConfig& config) {
  Instance inst = require_input(config);
  const OneField& field = require_field(inst, "gamma1");
  GammaBreakdown g = gamma1_exact(field);
  json j;
  j["command"] = "gamma1";
  j["N"] = field.size();
  j["dim"] = field.dim();
  j["gamma1"] = g.value;
  j["argmax_pair"] = {g.argmax_pair.first, g.argmax_pair.second};
  j["A"] = g.A_at_max;
  j["B"] = g.B_at_max;
  j["gamma1_tilde"] = gamma1_tilde(field);
  if (config.approx) {
    GammaApprox a = gamma1_approx(field, config.eps_sep);
    j["approx"] = {{"eps_sep", config.eps_sep}, {"M", a.M}, {"restricted_tilde", a.restricted_tilde}, {"C0", a.C0}};
  }
  return j.dump(2) + "\n";
}

std::string run_fit(const JobConfig& config) {
  Instance inst = require_input(config);
  const auto* data = std::get_if<FunctionData>(&inst);
  if (!data) throw ValidationError(ValidationCode::BadParameter, "fit expects data without gradients");
  FunctionFit fit = fit_data(config, *data);
  // The report doubles as an input file: dim, sites, values and the fitted gradients.
  json j = json::parse(field_to_json(fit.field));
  j["fit"] = {{"pairs", config.pairs == PairMode::Full ? "full" : "wspd"},
              {"epsilon", config.epsilon},
              {"eps_sep", config.eps_sep},
              {"M_tilde", fit.M_tilde},
              {"C", fit.C},
              {"M", fit.M},
              {"gamma1_of_field", fit.gamma1_of_field},
              {"solver", solver_json(fit.report)}};
  return j.dump(2) + "\n";
}

std::string run_build(const JobConfig& config) {
  Built b = build_from(config, require_input(config));
  return model_to_json(b.model) + "\n";
}

std::string run_query(const JobConfig& config) {
  if (config.model_path.empty()) throw ValidationError(ValidationCode::BadParameter, "--model is required");
  if (config.queries_path.empty()) throw ValidationError(ValidationCode::BadParameter, "--queries is required");
  WellsModel model = model_from_json(read_file(config.model_path));
  std::vector<Point> queries = read_queries(read_file(config.queries_path), model.dim(), config.queries_path);
  std::optional<LocatorTree> tree;
  if (config.tree) tree = LocatorTree::build(model);
  std::string out;
  for (const Point& x : queries) {
    QueryResult q = tree ? tree->evaluate(model, x) : evaluate(model, x);
    out += format_real(q.value);
    for (Eigen::Index i = 0; i < q.gradient.size(); ++i) out += "," + format_real(q.gradient[i]);
    out += "," + std::to_string(q.cell_id) + "\n";
  }
  return out;
}

CheckOutcome run_check(const JobConfig& config) {
  CheckOptions options;
  options.seed = config.seed;
  options.tree = config.tree;
  std::vector<CheckResult> results;
  std::string header;
  if (!config.model_path.empty()) {
    std::string text = read_file(config.model_path);
    results.push_back(check_model_text(text));
    if (results.back().passed) {
      WellsModel model = model_from_json(text);
      header = "model " + config.model_path + ", M " + format_real(model.M) + "\n";
      for (auto& r : run_model_suites(model, options)) results.push_back(std::move(r));
    }
  } else {
    Instance inst = require_input(config);
    const std::vector<Point>& sites =
        std::visit([](const auto& v) -> const std::vector<Point>& { return v.sites(); }, inst);
    if (sites.size() >= 2) results.push_back(check_wspd(sites, config.eps_sep));
    if (const auto* field = std::get_if<OneField>(&inst)) {
      std::mt19937_64 rng(config.seed);
      results.push_back(check_gamma(*field, sample_box(*field, rng, 200), config.eps_sep));
    }
    Built b = build_from(config, inst);
    if (b.fit) {
      const auto& data = std::get<FunctionData>(inst);
      QcqpProblem problem = config.pairs == PairMode::Full ? full_problem(data) : wspd_problem(data, config.eps_sep);
      results.push_back(check_fit(problem, *b.fit, config.epsilon));
    }
    header = "M " + format_real(b.model.M) + " (" + b.source + "), " + std::to_string(b.model.cells.size()) + " cells\n";
    for (auto& r : run_model_suites(b.model, options)) results.push_back(std::move(r));
  }
  CheckOutcome outcome;
  outcome.report = header;
  long failed = 0;
  for (const CheckResult& r : results) {
    outcome.report += format_result(r) + "\n";
    failed += !r.passed;
  }
  outcome.passed = failed == 0;
  outcome.report += outcome.passed ? "all checks passed\n" : std::to_string(failed) + " checks failed\n";
  return outcome;
}

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return 1;
  switch (err->category()) {
    case ErrorCategory::Validation:
      return 2;
    case ErrorCategory::Degenerate:
      return 3;
    case ErrorCategory::Solver:
      return 4;
    case ErrorCategory::Internal:
      return 1;
  }
  return 1;
}

int run_job(const JobConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config);
    switch (config.command) {
      case Command::Gamma1:
        write_output(config, run_gamma1(config), out);
        return 0;
      case Command::Fit:
        write_output(config, run_fit(config), out);
        return 0;
      case Command::Build:
        write_output(config, run_build(config), out);
        return 0;
      case Command::Query:
        write_output(config, run_query(config), out);
        return 0;
      case Command::Check: {
        CheckOutcome c = run_check(config);
        write_output(config, c.report, out);
        return c.passed ? 0 : 1;
      }
      case Command::Bench:
        write_output(config, run_bench(config), out);
        return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}

}  // namespace whitney::app
