#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whitney/core.hpp"
#include "whitney/lattice.hpp"

namespace whitney {

// One piece T_S = (S^ + S_*)/2 in halfspace form, with the data of its quadratic.
struct WellsCell {
  int face = -1;  // lattice face id; -1 for the affine model
  int dim = 0;    // j = dim S^
  Matrix A;       // unit rows; x is in the cell iff A x <= b
  Vector b;
  Point centroid;
  Point anchor;          // S_C
  double offset = 0.0;   // d_S(S_C)
  Matrix basis_H;        // d x j, orthonormal
  Matrix basis_E;        // d x (d-j), orthonormal
};

struct WellsModel {
  OneField field;
  double M = 0.0;
  bool affine = false;          // M = 0: the interpolant is the jet of site 0 everywhere
  std::vector<Point> shifted;   // a - D_a / M
  FaceLattice lattice;          // dual vertex positions in R^d
  std::vector<WellsCell> cells; // cells[i].face == i unless affine
  std::vector<std::string> warnings;

  int dim() const { return field.dim(); }
};

// f_a - |D_a|^2/(2M) + (M/4)|x - a~|^2
double distance_fn(const OneField& field, double M, int a, const Point& x);

// a - D_a / M and w = 2|D_a|^2/M^2 - 4 f_a/M, so that pow(x, a~) = (4/M) d_a(x).
std::vector<WeightedSite> shifted_sites(const OneField& field, double M);

struct Anchor {
  Point point;
  double offset = 0.0;
};

// S_C and d_S(S_C) for one face. Coordinates are those of the lattice.
Anchor compute_SC(const LatticeFace& face, const std::vector<Point>& shifted, const FaceLattice& lattice,
                  const OneField& field, double M);

// Halfspace form and bases of one cell, in lattice coordinates.
WellsCell build_cell(int face_id, const std::vector<Point>& shifted, const FaceLattice& lattice,
                     const OneField& field, double M);

struct BuildStats {
  double geometry_seconds = 0.0;  // triangulation and power diagram
  double cells_seconds = 0.0;
};

// Throws ValidationError(WellsConditionViolated) if M fails the Wells condition, and
// ValidationError(BadParameter) for M < 0 or for M = 0 with jets that fail is_affine.
WellsModel build_model(const OneField& field, double M, BuildStats* stats = nullptr);

enum class MSource { Exact, Approx, User };

// M for the jet problem: gamma1_exact, gamma1_approx, or a checked user value. Affine jets get M = 0.
double select_M(const OneField& field, MSource source, double eps_sep = 0.5,
                std::optional<double> user = std::nullopt);

}  // namespace whitney
