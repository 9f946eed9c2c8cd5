#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "whitney/app.hpp"
#include "whitney/datagen.hpp"
#include "whitney/eval.hpp"
#include "whitney/gamma.hpp"
#include "whitney/locator_tree.hpp"
#include "whitney/wells.hpp"

namespace whitney::app {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

std::vector<BenchRow> bench_rows(const JobConfig& config) {
  validate_config(config);
  std::vector<BenchRow> rows;
  for (int d : config.dims) {
    for (int n : config.sizes) {
      BenchRow row;
      row.n = n;
      row.d = d;
      row.seed = derive_seed(config.seed, n, d);
      RandomInstance inst = random_instance(n, d, row.seed, config.num_queries);

      // Repeat the pair scan until the total is long enough to time reliably.
      double M = 0.0;
      long reps = 0;
      auto t0 = clock_type::now();
      do {
        M = gamma1_exact(inst.field).value;
        ++reps;
      } while (seconds_since(t0) < 0.05);
      row.gamma_seconds = seconds_since(t0) / static_cast<double>(reps);

      BuildStats stats;
      WellsModel model = build_model(inst.field, M, &stats);
      row.geometry_seconds = stats.geometry_seconds;
      row.cells_seconds = stats.cells_seconds;
      row.num_cells = static_cast<long>(model.cells.size());

      std::optional<LocatorTree> tree;
      if (config.tree) tree = LocatorTree::build(model);
      double sink = 0.0;
      t0 = clock_type::now();
      for (const Point& x : inst.queries) sink += (tree ? tree->evaluate(model, x) : evaluate(model, x)).value;
      row.query_mean_seconds = seconds_since(t0) / static_cast<double>(inst.queries.size());
      (void)sink;

      for (int a = 0; a < n; ++a) {
        QueryResult q = evaluate(model, inst.field.site(a));
        if (std::abs(q.value - inst.field.value(a)) > 1e-10) ++row.value_errors;
        for (int i = 0; i < d; ++i) {
          if (std::abs(q.gradient[i] - inst.field.gradient(a)[i]) > 1e-10) ++row.gradient_errors;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "N,d,log2_N,gamma_seconds,log2_gamma_seconds,geometry_seconds,log2_geometry_seconds,cells_seconds,"
        "log2_cells_seconds,num_cells,log2_num_cells,query_mean_seconds,log2_query_mean_seconds,value_errors,"
        "gradient_errors,seed,generator\n";
  os << std::setprecision(6);
  for (const BenchRow& r : rows) {
    os << r.n << "," << r.d << "," << std::log2(r.n) << "," << r.gamma_seconds << "," << std::log2(r.gamma_seconds)
       << "," << r.geometry_seconds << "," << std::log2(r.geometry_seconds) << "," << r.cells_seconds << ","
       << std::log2(r.cells_seconds) << "," << r.num_cells << "," << std::log2(static_cast<double>(r.num_cells))
       << "," << r.query_mean_seconds << "," << std::log2(r.query_mean_seconds) << "," << r.value_errors << ","
       << r.gradient_errors << "," << r.seed << "," << kGeneratorName << "\n";
  }
  return os.str();
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError(ValidationCode::BadParameter, "fit_loglog_slope: need two or more matching samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log2(x[i]), ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string run_bench(const JobConfig& config) { return bench_csv(bench_rows(config)); }

}  // namespace whitney::app
