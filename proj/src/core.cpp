#include "finsler/core.hpp"

#include <cmath>

#include "finsler/error.hpp"
#include "finsler/sphere.hpp"

namespace finsler {

namespace {

double scale_of(const Vec& y) { return std::max(1.0, y.norm()); }

void require_nonzero(const Vec& y, const char* what) {
  if (y.norm() == 0.0) throw Error(ErrorKind::ZeroVector, std::string(what) + " at y = 0");
}

double half_square(const FinslerSpace& s, const Vec& x, const Vec& y) {
  const double f = s.metric(x, y);
  return 0.5 * f * f;
}

// Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3.
template <typename F>
auto richardson(F&& diff, double h) {
  auto coarse = diff(h);
  auto fine = diff(0.5 * h);
  return decltype(coarse)((4.0 * fine - coarse) / 3.0);
}

// d/ds of a vector-valued map at s = 0.
template <typename Map>
Vec derivative_along(Map&& map, double h) {
  return richardson([&](double step) -> Vec { return (map(step) - map(-step)) / (2 * step); }, h);
}

// J(i, j) = dG^i/dy^j.
Mat spray_y_jacobian(const FinslerSpace& s, const Vec& x, const Vec& y) {
  const int n = static_cast<int>(y.size());
  const double h = 1e-4 * scale_of(y);
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    J.col(j) = derivative_along(
        [&](double t) {
          Vec yy = y;
          yy(j) += t;
          return geodesic_coeffs(s, x, yy);
        },
        h);
  }
  return J;
}

}  // namespace

void FinslerSpace::require_inside(const Vec& x) const {
  if (x.size() != dim())
    throw Error(ErrorKind::InvalidParams, "point dimension does not match the space");
  if (!contains(x)) throw Error(ErrorKind::OutsideDomain, "point outside the domain of " + name());
}

std::optional<Mat> MinkowskiSpace::fundamental_tensor_hook(const Vec&, const Vec& y) const {
  return norm_.half_square_hessian(y);
}

std::optional<Vec> MinkowskiSpace::legendre_hook(const Vec&, const Vec& y) const {
  if (y.norm() == 0.0) return Vec(Vec::Zero(y.size()));
  return Vec(norm_.eval(y) * norm_.gradient(y));
}

std::optional<Vec> MinkowskiSpace::geodesic_coeffs_hook(const Vec&, const Vec& y) const {
  return Vec(Vec::Zero(y.size()));
}

std::optional<double> MinkowskiSpace::cometric_hook(const Vec&, const Vec& xi) const {
  return norm_.dual(xi);
}

Mat fundamental_tensor_numeric(const FinslerSpace& space, const Vec& x, const Vec& y) {
  const int n = static_cast<int>(y.size());
  const double h = 1e-4 * scale_of(y);
  Mat g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      auto E = [&](double si, double sj) {
        Vec yy = y;
        yy(i) += si * h;
        yy(j) += sj * h;
        return half_square(space, x, yy);
      };
      g(i, j) = g(j, i) = (E(1, 1) - E(1, -1) - E(-1, 1) + E(-1, -1)) / (4 * h * h);
    }
  }
  return g;
}

Mat fundamental_tensor(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  require_nonzero(y, "fundamental tensor");
  if (auto g = space.fundamental_tensor_hook(x, y)) return *g;
  if (space.legendre_hook(x, y)) {
    const int n = static_cast<int>(y.size());
    const double h = 1e-6 * scale_of(y);
    Mat g(n, n);
    for (int j = 0; j < n; ++j) {
      Vec yp = y, ym = y;
      yp(j) += h;
      ym(j) -= h;
      g.col(j) = (*space.legendre_hook(x, yp) - *space.legendre_hook(x, ym)) / (2 * h);
    }
    return 0.5 * (g + g.transpose());
  }
  return fundamental_tensor_numeric(space, x, y);
}

Vec legendre_numeric(const FinslerSpace& space, const Vec& x, const Vec& y) {
  const int n = static_cast<int>(y.size());
  const double h = 1e-6 * scale_of(y);
  Vec p(n);
  for (int i = 0; i < n; ++i) {
    Vec yp = y, ym = y;
    yp(i) += h;
    ym(i) -= h;
    p(i) = (half_square(space, x, yp) - half_square(space, x, ym)) / (2 * h);
  }
  return p;
}

Vec legendre(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  if (y.norm() == 0.0) return Vec::Zero(y.size());
  if (auto p = space.legendre_hook(x, y)) return *p;
  return legendre_numeric(space, x, y);
}

CometricSup cometric_sup(const FinslerSpace& space, const Vec& x, const Vec& xi, int grid_count,
                         double tol) {
  space.require_inside(x);
  if (xi.norm() == 0.0) return {0.0, Vec::Unit(xi.size(), 0)};
  auto ratio = [&](const Vec& y) { return xi.dot(y) / space.metric(x, y); };
  const SphereMax m = maximize_on_sphere(ratio, space.dim(), grid_count, tol);
  return {m.value, m.direction};
}

double cometric_oracle(const FinslerSpace& space, const Vec& x, const Vec& xi, double tol) {
  return cometric_sup(space, x, xi, default_sphere_grid_count(space.dim()), tol).value;
}

double cometric(const FinslerSpace& space, const Vec& x, const Vec& xi) {
  space.require_inside(x);
  if (auto v = space.cometric_hook(x, xi)) return *v;
  return cometric_oracle(space, x, xi);
}

Vec legendre_inverse(const FinslerSpace& space, const Vec& x, const Vec& xi, double tol,
                     int max_iter) {
  space.require_inside(x);
  require_nonzero(xi, "inverse Legendre transform");
  const CometricSup sup = cometric_sup(space, x, xi, default_sphere_grid_count(space.dim()));
  Vec y = sup.direction * (sup.value / space.metric(x, sup.direction));

  const double target = tol * std::max(1.0, xi.norm());
  Vec res = legendre(space, x, y) - xi;
  double res_norm = res.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (res_norm <= target) return y;
    const Mat g = fundamental_tensor(space, x, y);
    const Vec dy = g.ldlt().solve(-res);
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-10) {
      const Vec trial = y + step * dy;
      if (trial.norm() > 0.0) {
        const Vec trial_res = legendre(space, x, trial) - xi;
        if (trial_res.norm() < (1.0 - 1e-4 * step) * res_norm) {
          y = trial;
          res = trial_res;
          res_norm = res.norm();
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Residual is at the noise floor of a finite-difference Legendre map.
      if (res_norm <= 1e-8 * std::max(1.0, xi.norm())) return y;
      break;
    }
  }
  if (res_norm <= target) return y;
  throw Error(ErrorKind::NoConvergence,
              "inverse Legendre transform did not converge, residual " + std::to_string(res_norm));
}

Vec geodesic_coeffs_numeric(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  require_nonzero(y, "geodesic coefficients");
  const int n = static_cast<int>(y.size());
  const double ny = y.norm();
  const Vec u = y / ny;

  // mixed(l) = [F^2]_{x^k y^l} y^k = 2 d/ds L_l(x + s y, y)
  Vec mixed(n);
  if (space.legendre_hook(x, y)) {
    mixed = 2.0 * ny * derivative_along([&](double s) { return *space.legendre_hook(x + s * u, y); },
                                        1e-5);
  } else {
    const double hx = 1e-4;
    const double hy = 1e-4 * scale_of(y);
    for (int l = 0; l < n; ++l) {
      auto E = [&](double sx, double sy) {
        Vec yy = y;
        yy(l) += sy * hy;
        const double f = space.metric(x + sx * hx * u, yy);
        return f * f;
      };
      mixed(l) = ny * (E(1, 1) - E(1, -1) - E(-1, 1) + E(-1, -1)) / (4 * hx * hy);
    }
  }

  Vec grad_x(n);
  for (int l = 0; l < n; ++l) {
    Vec e = Vec::Unit(n, l);
    grad_x(l) = richardson(
        [&](double h) {
          const double fp = space.metric(x + h * e, y), fm = space.metric(x - h * e, y);
          return (fp * fp - fm * fm) / (2 * h);
        },
        1e-5);
  }
  const Mat g = fundamental_tensor(space, x, y);
  return 0.25 * g.ldlt().solve(mixed - grad_x);
}

Vec geodesic_coeffs(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  require_nonzero(y, "geodesic coefficients");
  if (auto G = space.geodesic_coeffs_hook(x, y)) return *G;
  return geodesic_coeffs_numeric(space, x, y);
}

std::vector<TangentVec> geodesic_integrate(const FinslerSpace& space, const Vec& x0,
                                           const Vec& y0, double T, int steps) {
  space.require_inside(x0);
  if (steps < 1 || !(T >= 0))
    throw Error(ErrorKind::InvalidParams, "geodesic integration needs steps >= 1 and T >= 0");
  auto accel = [&](const Vec& x, const Vec& v) -> Vec {
    if (!space.contains(x))
      throw Error(ErrorKind::LeftDomain, "geodesic left the domain of " + space.name());
    if (v.norm() == 0.0) return Vec::Zero(v.size());
    return -2.0 * geodesic_coeffs(space, x, v);
  };
  const double h = T / steps;
  std::vector<TangentVec> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Vec x = x0, v = y0;
  out.push_back({x, v});
  for (int i = 0; i < steps; ++i) {
    const Vec k1x = v;
    const Vec k1v = accel(x, v);
    const Vec k2x = v + 0.5 * h * k1v;
    const Vec k2v = accel(x + 0.5 * h * k1x, k2x);
    const Vec k3x = v + 0.5 * h * k2v;
    const Vec k3v = accel(x + 0.5 * h * k2x, k3x);
    const Vec k4x = v + h * k3v;
    const Vec k4v = accel(x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!space.contains(x))
      throw Error(ErrorKind::LeftDomain, "geodesic left the domain of " + space.name());
    out.push_back({x, v});
  }
  return out;
}

Mat riemann_transform(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  require_nonzero(y, "Riemann curvature");
  const int n = static_cast<int>(y.size());
  const double ny = y.norm();
  const Vec u = y / ny;
  const Vec G = geodesic_coeffs(space, x, y);
  const Mat Jy = spray_y_jacobian(space, x, y);

  Mat dGdx(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec e = Vec::Unit(n, k);
    dGdx.col(k) = derivative_along([&](double s) { return geodesic_coeffs(space, x + s * e, y); },
                                   1e-4);
  }

  auto jacobian_derivative = [&](auto&& shifted, double h) -> Mat {
    return richardson([&](double step) -> Mat { return (shifted(step) - shifted(-step)) / (2 * step); },
                      h);
  };

  // y^j d/dx^j (dG/dy)
  const Mat t2 =
      ny * jacobian_derivative([&](double s) { return spray_y_jacobian(space, x + s * u, y); }, 1e-3);

  // G^j d/dy^j (dG/dy)
  Mat t3 = Mat::Zero(n, n);
  const double nG = G.norm();
  if (nG > 0.0) {
    const Vec w = G / nG;
    t3 = nG * jacobian_derivative([&](double s) { return spray_y_jacobian(space, x, y + s * w); },
                                  1e-3 * scale_of(y));
  }
  return 2.0 * dGdx - t2 + 2.0 * t3 - Jy * Jy;
}

double flag_curvature(const FinslerSpace& space, const Vec& x, const Vec& y, const Vec& v) {
  const Mat g = fundamental_tensor(space, x, y);
  const double gyy = y.dot(g * y), gvv = v.dot(g * v), gyv = y.dot(g * v);
  const double den = gyy * gvv - gyv * gyv;
  if (!(den > 1e-12 * std::max(1.0, gyy * gvv)))
    throw Error(ErrorKind::DegenerateFlag, "flagpole and transverse edge are (nearly) parallel");
  const Mat R = riemann_transform(space, x, y);
  return v.dot(g * (R * v)) / den;
}

double ricci(const FinslerSpace& space, const Vec& x, const Vec& y) {
  const Mat g = fundamental_tensor(space, x, y);
  const Mat R = riemann_transform(space, x, y);
  const int n = static_cast<int>(y.size());
  std::vector<Vec> basis;
  basis.push_back(y / std::sqrt(y.dot(g * y)));
  for (int i = 0; i < n && static_cast<int>(basis.size()) < n; ++i) {
    Vec e = Vec::Unit(n, i);
    for (const Vec& b : basis) e -= b.dot(g * e) * b;
    const double len2 = e.dot(g * e);
    if (len2 < 1e-20) continue;
    basis.push_back(e / std::sqrt(len2));
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < basis.size(); ++i) sum += basis[i].dot(g * (R * basis[i]));
  return sum;
}

double s_curvature(const FinslerSpace& space, const Vec& x, const Vec& y) {
  space.require_inside(x);
  require_nonzero(y, "S-curvature");
  if (!space.measure_density(x))
    throw Error(ErrorKind::MissingDensity, space.name() + " has no reference measure density");
  const double div_G = spray_y_jacobian(space, x, y).trace();
  const double ny = y.norm();
  const Vec u = y / ny;
  const double dlog_sigma = richardson(
      [&](double h) {
        const double sp = *space.measure_density(x + h * u);
        const double sm = *space.measure_density(x - h * u);
        return (std::log(sp) - std::log(sm)) / (2 * h);
      },
      1e-5);
  return div_G - ny * dlog_sigma;
}

double reversibility_at(const FinslerSpace& space, const Vec& x) {
  space.require_inside(x);
  auto ratio = [&](const Vec& y) { return space.metric(x, -y) / space.metric(x, y); };
  return maximize_on_sphere(ratio, space.dim(), default_sphere_grid_count(space.dim())).value;
}

}  // namespace finsler
