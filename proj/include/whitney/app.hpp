#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "whitney/core.hpp"
#include "whitney/optim.hpp"

namespace whitney::app {

enum class Command { Gamma1, Fit, Build, Query, Check, Bench };

struct JobConfig {
  Command command = Command::Gamma1;
  std::string input_path;
  std::string output_path;  // empty: standard output
  std::string model_path;
  std::string queries_path;
  bool approx = false;  // --mode approx
  PairMode pairs = PairMode::Full;
  double epsilon = 1e-6;
  double eps_sep = 0.5;
  std::optional<double> M_override;
  std::uint64_t seed = 1;
  bool tree = false;
  bool sparse = false;
  bool jitter = false;  // perturb sites by 1e-9 diameter (seeded) before any geometry
  // bench
  std::vector<int> dims{2};
  std::vector<int> sizes{16, 32, 64, 128, 256, 512};
  int num_queries = 1024;
};

// Throws ValidationError(BadParameter) when a field is out of range.
void validate_config(const JobConfig& config);

using Instance = std::variant<OneField, FunctionData>;

// JSON with `dim`, `sites`, `values` and optionally `gradients`. Throws ParseError naming the line or field.
Instance ingest_text(const std::string& text, const std::string& source = "<input>");
Instance ingest(const std::string& path);
// The same data at jittered sites.
Instance jittered(const Instance& inst, std::uint64_t seed);

// One point per line, comma separated. Blank lines and lines starting with '#' are skipped.
std::vector<Point> read_queries(const std::string& text, int dim, const std::string& source = "<queries>");

std::string read_file(const std::string& path);
void write_output(const JobConfig& config, const std::string& text, std::ostream& out);

// Shortest text that reads back to the same double.
std::string format_real(double v);

std::string run_gamma1(const JobConfig& config);
std::string run_fit(const JobConfig& config);
std::string run_build(const JobConfig& config);
std::string run_query(const JobConfig& config);

struct CheckOutcome {
  std::string report;
  bool passed = true;
};
CheckOutcome run_check(const JobConfig& config);

struct BenchRow {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  double gamma_seconds = 0.0;
  double geometry_seconds = 0.0;
  double cells_seconds = 0.0;
  long num_cells = 0;
  double query_mean_seconds = 0.0;
  long value_errors = 0;
  long gradient_errors = 0;
};

std::vector<BenchRow> bench_rows(const JobConfig& config);
std::string bench_csv(const std::vector<BenchRow>& rows);
// Least-squares slope of log2(y) against log2(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
std::string run_bench(const JobConfig& config);

// 0 ok, 1 check failure or internal error, 2 validation, 3 degenerate geometry, 4 solver failure.
int exit_code_for(const std::exception& e);

// Runs one job, writing results to the configured output and errors to err.
int run_job(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace whitney::app
