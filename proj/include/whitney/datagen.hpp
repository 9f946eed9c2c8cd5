#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "whitney/core.hpp"

namespace whitney {

inline constexpr const char* kGeneratorName = "mt19937_64";

struct RandomInstance {
  OneField field;
  std::vector<Point> queries;
  std::uint64_t seed = 0;
};

// Side length N^(2/d) of the site cube.
double cube_side(int n, int d);

// Uniform in [-hi, -lo] or [lo, hi] with equal probability.
double signed_magnitude(std::mt19937_64& rng, double lo = 0.9, double hi = 1.1);

// Sites uniform in [0, s]^d, values and gradient entries per signed_magnitude, queries uniform in [-1, s+1]^d.
RandomInstance random_instance(int n, int d, std::uint64_t seed, int num_queries = 1024);

FunctionData random_function_data(int n, int d, std::uint64_t seed);

// Sites moved by independent uniform offsets in [-1, 1] * rel_scale * diameter, per coordinate.
std::vector<Point> jitter_sites(const std::vector<Point>& sites, std::uint64_t seed, double rel_scale = 1e-9);

// Stable per-(seed, n, d) stream so that sweeps are reproducible entry by entry.
std::uint64_t derive_seed(std::uint64_t seed, int n, int d);

}  // namespace whitney
