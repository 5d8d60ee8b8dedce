#include "finsler/sphere.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "finsler/error.hpp"

namespace finsler {

namespace {

Vec angle_dir(double theta) {
  Vec d(2);
  d << std::cos(theta), std::sin(theta);
  return d;
}

// Orthonormal pair spanning the tangent plane of S^2 at d.
std::pair<Vec, Vec> tangent_basis(const Vec& d) {
  Vec seed = Vec::Zero(3);
  Eigen::Index imin = 0;
  d.cwiseAbs().minCoeff(&imin);
  seed(imin) = 1.0;
  Vec e1 = seed - seed.dot(d) * d;
  e1.normalize();
  Vec e2(3);
  e2 << d(1) * e1(2) - d(2) * e1(1), d(2) * e1(0) - d(0) * e1(2), d(0) * e1(1) - d(1) * e1(0);
  return {e1, e2};
}

SphereMax refine_circle(const std::function<double(const Vec&)>& f, double theta0,
                        double value0, double half_width, double tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double lo = theta0 - half_width;
  double hi = theta0 + half_width;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(angle_dir(c));
  double fd = f(angle_dir(d));
  SphereMax best{value0, angle_dir(theta0)};
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(angle_dir(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(angle_dir(d));
    }
    if (fc > best.value) best = {fc, angle_dir(c)};
    if (fd > best.value) best = {fd, angle_dir(d)};
  }
  return best;
}

SphereMax refine_sphere(const std::function<double(const Vec&)>& f, SphereMax best,
                        double initial_step, double tol, int max_iter) {
  constexpr double h = 1e-4;
  for (int it = 0; it < max_iter; ++it) {
    const Vec center = best.direction;
    auto [e1, e2] = tangent_basis(center);
    auto chart = [&](double a, double b) {
      Vec v = center + a * e1 + b * e2;
      return Vec(v.normalized());
    };
    auto g = [&](double a, double b) { return f(chart(a, b)); };
    const double g0 = best.value;
    const double gpa = g(h, 0), gma = g(-h, 0), gpb = g(0, h), gmb = g(0, -h);
    Eigen::Vector2d grad((gpa - gma) / (2 * h), (gpb - gmb) / (2 * h));
    Eigen::Matrix2d hess;
    hess(0, 0) = (gpa - 2 * g0 + gma) / (h * h);
    hess(1, 1) = (gpb - 2 * g0 + gmb) / (h * h);
    hess(0, 1) = hess(1, 0) = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h);

    Eigen::Vector2d step;
    const bool concave = hess(0, 0) < 0 && hess.determinant() > 0;
    if (concave) {
      step = -hess.ldlt().solve(grad);
    } else {
      const double gn = grad.norm();
      if (gn == 0.0) break;
      step = grad * (initial_step / gn);
    }
    if (step.norm() > initial_step) step *= initial_step / step.norm();

    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      const double val = g(step(0), step(1));
      if (val > best.value) {
        best = {val, chart(step(0), step(1))};
        improved = true;
        break;
      }
      step *= 0.5;
      if (step.norm() < tol) break;
    }
    if (!improved || step.norm() < tol) break;
  }
  return best;
}

}  // namespace

int default_sphere_grid_count(int dim) {
  switch (dim) {
    case 1: return 2;
    case 2: return 1024;
    case 3: return 4096;
    default:
      throw Error(ErrorKind::InvalidParams, "sphere grids support dimensions 1..3");
  }
}

std::vector<Vec> sphere_grid(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (count < 4) throw Error(ErrorKind::InvalidParams, "sphere grid needs at least 4 points");
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int i = 0; i < count; ++i) dirs.push_back(angle_dir(2 * std::numbers::pi * i / count));
    return dirs;
  }
  if (dim == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double rho = std::sqrt(1.0 - z * z);
      const double phi = golden_angle * i;
      Vec d(3);
      d << rho * std::cos(phi), rho * std::sin(phi), z;
      dirs.push_back(d);
    }
    return dirs;
  }
  throw Error(ErrorKind::InvalidParams, "sphere grids support dimensions 1..3");
}

SphereMax maximize_on_sphere(const std::function<double(const Vec&)>& f, int dim,
                             int grid_count, double tol, int max_iter) {
  const auto dirs = sphere_grid(dim, grid_count);
  SphereMax best{-std::numeric_limits<double>::infinity(), dirs.front()};
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double v = f(dirs[i]);
    if (v > best.value) {
      best = {v, dirs[i]};
      best_index = i;
    }
  }
  if (dim == 1) return best;
  if (dim == 2) {
    const double spacing = 2 * std::numbers::pi / grid_count;
    const double theta0 = spacing * static_cast<double>(best_index);
    return refine_circle(f, theta0, best.value, spacing, tol, max_iter);
  }
  const double spacing = std::sqrt(4 * std::numbers::pi / grid_count);
  return refine_sphere(f, best, spacing, tol, max_iter);
}

}  // namespace finsler
