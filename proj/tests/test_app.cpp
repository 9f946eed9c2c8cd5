#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "whitney/app.hpp"
#include "whitney/errors.hpp"
#include "whitney/eval.hpp"
#include "whitney/gamma.hpp"
#include "whitney/model_io.hpp"
#include "whitney/wells.hpp"

using namespace whitney;
using namespace whitney::app;

namespace {

const std::string kData = WHITNEY_TEST_DATA;

std::string data(const std::string& name) { return kData + "/" + name; }

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "whitney_app_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

JobConfig config_for(Command c, const std::string& input) {
  JobConfig cfg;
  cfg.command = c;
  cfg.input_path = input;
  return cfg;
}

// Drops every key whose name mentions seconds, recursively.
nlohmann::json without_timing(nlohmann::json j) {
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto& [k, v] : j.items())
      if (k.find("seconds") == std::string::npos) out[k] = without_timing(v);
    return out;
  }
  if (j.is_array())
    for (auto& v : j) v = without_timing(v);
  return j;
}

}  // namespace

TEST_CASE("ingest examples") {
  auto one = ingest_text(R"({"dim": 2, "sites": [[0.5, 1]], "values": [3], "gradients": [[1, -1]]})");
  REQUIRE(std::holds_alternative<OneField>(one));
  CHECK(std::get<OneField>(one).size() == 1);

  auto fd = ingest(data("three_point.json"));
  REQUIRE(std::holds_alternative<FunctionData>(fd));
  CHECK(std::get<FunctionData>(fd).size() == 3);

  CHECK_THROWS_AS(ingest(data("ragged.json")), ParseError);
  try {
    ingest(data("ragged.json"));
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("sites[1]") != std::string::npos);
  }
}

TEST_CASE("ingest reports malformed input") {
  try {
    ingest_text("{\"dim\": 1,\n \"sites\": [[0], [1]],\n \"values\": [0, }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_text(R"({"sites": [[0]], "values": [0]})"), ParseError);
  CHECK_THROWS_AS(ingest_text(R"({"dim": 1, "sites": [[0], [1]], "values": [0]})"), ParseError);
  CHECK_THROWS_AS(ingest_text(R"({"dim": 1, "sites": [[0]], "values": ["x"]})"), ParseError);
  CHECK_THROWS_AS(ingest(data("does_not_exist.json")), std::exception);
  CHECK_THROWS_AS(ingest(data("duplicate.json")), ValidationError);
}

TEST_CASE("read_queries") {
  auto q = read_queries("# header\n0.25, 1\n\n-3,4e-2\n", 2);
  REQUIRE(q.size() == 2);
  CHECK(q[0][0] == 0.25);
  CHECK(q[1][1] == 0.04);
  CHECK_THROWS_AS(read_queries("1,2,3\n", 2), ParseError);
  CHECK_THROWS_AS(read_queries("1,abc\n", 2), ParseError);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 4.0, 123456789.125}) CHECK(std::stod(format_real(v)) == v);
  CHECK(format_real(4.0) == "4");
}

TEST_CASE("validate_config") {
  JobConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.epsilon = 0.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = JobConfig{};
  c.eps_sep = 1.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = JobConfig{};
  c.M_override = -1.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ValidationError(ValidationCode::BadParameter, "x")) == 2);
  CHECK(exit_code_for(ParseError("x")) == 2);
  CHECK(exit_code_for(DegenerateError(DegenerateCode::DegenerateConfiguration, "x")) == 3);
  CHECK(exit_code_for(SolverError(SolverCode::MaxIterations, "x")) == 4);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);

  std::ostringstream out, err;
  CHECK(run_job(config_for(Command::Gamma1, data("two_point.json")), out, err) == 0);
  CHECK(run_job(config_for(Command::Gamma1, data("ragged.json")), out, err) == 2);
  CHECK(run_job(config_for(Command::Build, data("square_jets.json")), out, err) == 3);
  auto bad = config_for(Command::Build, data("two_point.json"));
  bad.M_override = 3.0;
  CHECK(run_job(bad, out, err) == 2);
}

TEST_CASE("gamma1 report") {
  auto rep = nlohmann::json::parse(run_gamma1(config_for(Command::Gamma1, data("two_point.json"))));
  CHECK(rep["gamma1"] == 4.0);
  auto approx = config_for(Command::Gamma1, data("two_point.json"));
  approx.approx = true;
  auto a = nlohmann::json::parse(run_gamma1(approx));
  CHECK(a.dump() != rep.dump());
}

TEST_CASE("run_check examples") {
  auto affine = run_check(config_for(Command::Check, data("affine.json")));
  INFO(affine.report);
  CHECK(affine.passed);
  CHECK(affine.report.find("FAIL") == std::string::npos);

  auto two = run_check(config_for(Command::Check, data("two_point.json")));
  INFO(two.report);
  CHECK(two.passed);
  CHECK(two.report.find("M 4 ") != std::string::npos);

  JobConfig corrupted;
  corrupted.command = Command::Check;
  corrupted.model_path = data("corrupted_model.json");
  auto bad = run_check(corrupted);
  CHECK_FALSE(bad.passed);
  CHECK(bad.report.find("FAIL") != std::string::npos);
}

TEST_CASE("property: identical jobs give identical reports") {
  for (Command c : {Command::Gamma1, Command::Check, Command::Fit}) {
    auto cfg = config_for(c, data(c == Command::Fit ? "three_point.json" : "two_point.json"));
    auto run = [&] {
      if (c == Command::Gamma1) return run_gamma1(cfg);
      if (c == Command::Fit) return without_timing(nlohmann::json::parse(run_fit(cfg))).dump();
      return run_check(cfg).report;
    };
    CHECK(run() == run());
  }
}

TEST_CASE("fit, build and query reproduce the data") {
  auto fit_cfg = config_for(Command::Fit, data("three_point.json"));
  fit_cfg.output_path = scratch("fit.json");
  std::ostringstream out, err;
  REQUIRE(run_job(fit_cfg, out, err) == 0);
  auto fitted = ingest(fit_cfg.output_path);
  REQUIRE(std::holds_alternative<OneField>(fitted));

  auto build_cfg = config_for(Command::Build, fit_cfg.output_path);
  build_cfg.output_path = scratch("fit_model.json");
  REQUIRE(run_job(build_cfg, out, err) == 0);

  std::ofstream(scratch("sites.txt")) << "0\n1\n2\n";
  JobConfig q;
  q.command = Command::Query;
  q.model_path = build_cfg.output_path;
  q.queries_path = scratch("sites.txt");
  std::istringstream lines(run_query(q));
  const double f[] = {0, 1, 0};
  std::string line;
  for (int k = 0; k < 3; ++k) {
    REQUIRE(std::getline(lines, line));
    CHECK(std::abs(std::stod(line.substr(0, line.find(','))) - f[k]) <= 1e-10);
  }

  auto model = model_from_json(read_file(build_cfg.output_path));
  CHECK(wells_condition_check(model.field, model.M).holds);
}

TEST_CASE("bench determinism and error counts") {
  JobConfig c;
  c.command = Command::Bench;
  c.dims = {2};
  c.sizes = {16};
  c.num_queries = 64;
  auto a = bench_rows(c), b = bench_rows(c);
  REQUIRE(a.size() == 1);
  CHECK(a[0].num_cells == b[0].num_cells);
  CHECK(a[0].seed == b[0].seed);
  CHECK(a[0].value_errors == 0);
  CHECK(a[0].gradient_errors == 0);
  auto csv = bench_csv(a);
  CHECK(csv.find("log2_gamma_seconds") != std::string::npos);
  CHECK(csv.find("mt19937_64") != std::string::npos);
}

TEST_CASE("bench one-time work grows with N") {
  JobConfig c;
  c.command = Command::Bench;
  c.dims = {1, 2, 3};
  c.sizes = {16, 64, 256};
  c.num_queries = 32;
  std::map<std::pair<int, int>, double> best;
  std::map<std::pair<int, int>, long> cells;
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& r : bench_rows(c)) {
      double total = r.gamma_seconds + r.geometry_seconds + r.cells_seconds;
      auto key = std::make_pair(r.d, r.n);
      best[key] = best.count(key) ? std::min(best[key], total) : total;
      cells[key] = r.num_cells;
      CHECK(r.value_errors == 0);
      CHECK(r.gradient_errors == 0);
    }
  }
  for (int d : c.dims) {
    for (std::size_t i = 1; i < c.sizes.size(); ++i) {
      auto prev = std::make_pair(d, c.sizes[i - 1]), cur = std::make_pair(d, c.sizes[i]);
      CHECK(best[cur] > best[prev]);
      CHECK(cells[cur] > cells[prev]);
    }
  }
}

TEST_CASE("fit_loglog_slope") {
  CHECK(fit_loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  CHECK(fit_loglog_slope({16, 32, 64}, {5, 5, 5}) == doctest::Approx(0.0));
}
