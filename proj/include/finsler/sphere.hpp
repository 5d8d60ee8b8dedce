#pragma once

#include <functional>
#include <vector>

#include "finsler/types.hpp"

namespace finsler {

// Deterministic direction grids on the euclidean unit sphere S^{dim-1}.
// dim 1: {+1, -1}; dim 2: `count` equally spaced angles; dim 3: Fibonacci
// lattice with `count` points. Other dimensions are rejected.
std::vector<Vec> sphere_grid(int dim, int count);

// 1024 angles in dim 2, 4096 Fibonacci points in dim 3.
int default_sphere_grid_count(int dim);

struct SphereMax {
  double value = 0.0;
  Vec direction;
};

// Maximizes a smooth function over unit directions: coarse grid scan, then
// local refinement around the best grid point (golden section on the angle in
// dim 2, Newton steps in a tangent chart in dim 3) until the step falls below
// `tol` or `max_iter` refinements were made. The returned value is always an
// actual evaluation, hence a lower bound of the true supremum.
SphereMax maximize_on_sphere(const std::function<double(const Vec&)>& f, int dim,
                             int grid_count, double tol = 1e-12, int max_iter = 50);

}  // namespace finsler
