#include "whitney/datagen.hpp"

#include <cmath>

#include "whitney/predicates.hpp"

namespace whitney {

double cube_side(int n, int d) { return std::pow(static_cast<double>(n), 2.0 / d); }

double signed_magnitude(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  double v = mag(rng);
  return sign(rng) ? v : -v;
}

namespace {

std::vector<Point> uniform_points(std::mt19937_64& rng, int n, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> out(n, Point(d));
  for (auto& p : out) {
    for (int i = 0; i < d; ++i) p[i] = u(rng);
  }
  return out;
}

}  // namespace

RandomInstance random_instance(int n, int d, std::uint64_t seed, int num_queries) {
  if (n < 1 || d < 1) throw ValidationError(ValidationCode::BadParameter, "random_instance: need n, d >= 1");
  std::mt19937_64 rng(seed);
  const double s = cube_side(n, d);
  RandomInstance inst;
  inst.seed = seed;
  std::vector<Point> sites = uniform_points(rng, n, d, 0.0, s);
  std::vector<Jet> jets(n);
  for (auto& j : jets) {
    j.value = signed_magnitude(rng);
    j.gradient.resize(d);
    for (int i = 0; i < d; ++i) j.gradient[i] = signed_magnitude(rng);
  }
  inst.field = OneField(d, std::move(sites), std::move(jets));
  inst.queries = uniform_points(rng, num_queries, d, -1.0, s + 1.0);
  return inst;
}

FunctionData random_function_data(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw ValidationError(ValidationCode::BadParameter, "random_function_data: need n, d >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Point> sites = uniform_points(rng, n, d, 0.0, cube_side(n, d));
  std::vector<double> values(n);
  for (auto& v : values) v = signed_magnitude(rng);
  return FunctionData(d, std::move(sites), std::move(values));
}

std::vector<Point> jitter_sites(const std::vector<Point>& sites, std::uint64_t seed, double rel_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double step = rel_scale * diameter(sites);
  std::vector<Point> out = sites;
  for (Point& p : out) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += step * u(rng);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, int n, int d) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(n) << 20) ^ (static_cast<std::uint64_t>(d) << 52);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace whitney
