#include "finsler/berwald.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "finsler/error.hpp"

namespace finsler {

namespace {

void check_ball(const Vec& x) {
  if (!(x.norm() < 1.0 - BerwaldSpace::kBoundaryGuard))
    throw Error(ErrorKind::OutsideBall, "Berwald point needs |x| < 1 - 1e-12");
}

void check_not_origin(const Vec& x) {
  if (x.norm() == 0.0) throw Error(ErrorKind::AtOrigin, "distance function is singular at 0");
}

double horner(const std::vector<double>& c, double z) {
  double v = 0.0;
  for (double ci : c) v = v * z + ci;
  return v;
}

double horner_abs(const std::vector<double>& c, double z) {
  double v = 0.0;
  const double az = std::abs(z);
  for (double ci : c) v = v * az + std::abs(ci);
  return v;
}

double horner_derivative(const std::vector<double>& c, double z) {
  const int deg = static_cast<int>(c.size()) - 1;
  double v = 0.0;
  for (int i = 0; i < deg; ++i) v = v * z + c[i] * (deg - i);
  return v;
}

// Real roots of c[0] z^d + ... + c[d] via the companion matrix.
std::vector<double> real_roots(std::vector<double> c) {
  double cmax = 0.0;
  for (double ci : c) cmax = std::max(cmax, std::abs(ci));
  while (c.size() > 1 && std::abs(c.front()) <= 1e-14 * cmax) c.erase(c.begin());
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<double> roots;
  if (deg < 1) return roots;
  Mat companion = Mat::Zero(deg, deg);
  for (int j = 0; j < deg; ++j) companion(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Mat> es(companion, false);
  for (int i = 0; i < deg; ++i) {
    const auto lambda = es.eigenvalues()(i);
    if (std::abs(lambda.imag()) > 1e-6 * std::max(1.0, std::abs(lambda))) continue;
    double z = lambda.real();
    for (int it = 0; it < 6; ++it) {
      const double d = horner_derivative(c, z);
      if (d == 0.0) break;
      const double next = z - horner(c, z) / d;
      if (!(std::abs(horner(c, next)) < std::abs(horner(c, z)))) break;
      z = next;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace

BerwaldSpace::BerwaldSpace(int dim) : dim_(dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidParams, "Berwald space needs dimension >= 2");
}

bool BerwaldSpace::contains(const Vec& x) const {
  return x.size() == dim_ && x.norm() < 1.0 - kBoundaryGuard;
}

void BerwaldSpace::require_inside(const Vec& x) const {
  if (x.size() != dim_) throw Error(ErrorKind::InvalidParams, "point dimension does not match");
  check_ball(x);
}

double BerwaldSpace::metric(const Vec& x, const Vec& y) const { return berwald::b_eval(x, y); }

std::optional<Vec> BerwaldSpace::legendre_hook(const Vec& x, const Vec& y) const {
  if (y.norm() == 0.0) return Vec(Vec::Zero(y.size()));
  const double X = x.squaredNorm();
  const double q = 1.0 - X;
  const double a = berwald::alpha(x, y);
  const double b = berwald::beta(x, y);
  const Vec ay = (q * y + x * x.dot(y)) / std::pow(q, 4);
  const Vec bvec = x / (q * q);
  const double s = a + b;
  return Vec(s * s * s * (a - b) / std::pow(a, 4) * ay + 2.0 * s * s * s / (a * a) * bvec);
}

std::optional<Vec> BerwaldSpace::geodesic_coeffs_hook(const Vec& x, const Vec& y) const {
  return Vec(berwald::P(x, y) * y);
}

std::optional<double> BerwaldSpace::cometric_hook(const Vec& x, const Vec& xi) const {
  return berwald::cometric_quartic(x, xi);
}

namespace berwald {

double b_eval(const Vec& x, const Vec& y) {
  check_ball(x);
  const double X = x.squaredNorm();
  const double xy = x.dot(y);
  const double root = std::sqrt((1.0 - X) * y.squaredNorm() + xy * xy);
  if (root == 0.0) return 0.0;
  const double num = root + xy;
  return num * num / ((1.0 - X) * (1.0 - X) * root);
}

double alpha(const Vec& x, const Vec& y) {
  check_ball(x);
  const double X = x.squaredNorm();
  const double xy = x.dot(y);
  return std::sqrt((1.0 - X) * y.squaredNorm() + xy * xy) / ((1.0 - X) * (1.0 - X));
}

double beta(const Vec& x, const Vec& y) {
  check_ball(x);
  const double X = x.squaredNorm();
  return x.dot(y) / ((1.0 - X) * (1.0 - X));
}

double P(const Vec& x, const Vec& y) {
  check_ball(x);
  const double X = x.squaredNorm();
  const double xy = x.dot(y);
  return (std::sqrt((1.0 - X) * y.squaredNorm() + xy * xy) + xy) / (1.0 - X);
}

double dist_from_origin(const Vec& x) {
  check_ball(x);
  const double b = x.norm();
  return b / (1.0 - b);
}

double dist_to_origin(const Vec& x) {
  check_ball(x);
  const double b = x.norm();
  return b / (1.0 + b);
}

double radius_of(double r) { return r / (1.0 + r); }

Vec grad_r(const Vec& x) {
  check_ball(x);
  check_not_origin(x);
  const double b = x.norm();
  return (1.0 - b) * (1.0 - b) / b * x;
}

Vec dr_covector(const Vec& x) {
  check_ball(x);
  check_not_origin(x);
  const double b = x.norm();
  return x / ((1.0 - b) * (1.0 - b) * b);
}

double laplacian_r(const Vec& x) {
  check_ball(x);
  check_not_origin(x);
  const double n = static_cast<double>(x.size());
  const double b = x.norm();
  return (n - 1) / b + (n + 1) * b - 2 * n;
}

double laplacian_r_radial(int n, double r) {
  if (!(r > 0)) throw Error(ErrorKind::AtOrigin, "distance function is singular at 0");
  return (n - 1) / r - (n + 1) / (1.0 + r);
}

double alpha_star_sq(const Vec& x, const Vec& xi) {
  check_ball(x);
  const double q = 1.0 - x.squaredNorm();
  const double xxi = x.dot(xi);
  return q * q * q * (xi.squaredNorm() - xxi * xxi);
}

double beta_star(const Vec& x, const Vec& xi) {
  check_ball(x);
  const double q = 1.0 - x.squaredNorm();
  return q * q * x.dot(xi);
}

std::vector<double> quartic_coefficients(const Vec& x, const Vec& xi) {
  const double X = x.squaredNorm();
  const double q = 1.0 - X;
  const double A = alpha_star_sq(x, xi);
  const double b = beta_star(x, xi);
  const double b2 = b * b;
  return {16 * X * q * q * (q * A + b2), 8 * ((10 * X - 1) * q * A * b + (9 * X - 1) * b2 * b),
          (1 - 20 * X - 8 * X * X) * A * A + 6 * (6 * X - 5) * A * b2 - 27 * b2 * b2,
          12 * A * A * b, -A * A * A};
}

QuarticRoot cometric_quartic_detailed(const Vec& x, const Vec& xi) {
  check_ball(x);
  if (xi.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "co-metric of the zero covector");
  const double X = x.squaredNorm();
  const double q = 1.0 - X;
  const double a_star = std::sqrt(alpha_star_sq(x, xi));
  const double sigma = beta_star(x, xi) / a_star;
  const double s2 = sigma * sigma;
  // Quartic in z = B*/alpha*, i.e. the original one divided by alpha*^6.
  const std::vector<double> c = {16 * X * q * q * (q + s2),
                                 8 * ((10 * X - 1) * q * sigma + (9 * X - 1) * s2 * sigma),
                                 (1 - 20 * X - 8 * X * X) + 6 * (6 * X - 5) * s2 - 27 * s2 * s2,
                                 12 * sigma, -1.0};

  const BerwaldSpace space(static_cast<int>(x.size()));
  const double oracle = cometric_sup(space, x, xi, 64).value;
  const double z_oracle = oracle / a_star;

  QuarticRoot out;
  out.oracle = oracle;
  std::vector<double> positive;
  for (double z : real_roots(c)) {
    if (!(z > 0)) continue;
    bool duplicate = false;
    for (double p : positive) duplicate = duplicate || std::abs(p - z) <= 1e-7 * z;
    if (!duplicate) positive.push_back(z);
  }
  out.positive_roots = static_cast<int>(positive.size());

  constexpr double kWindow = 1e-4;
  constexpr double kResidualFloor = 1e-12;
  double best_key_res = std::numeric_limits<double>::infinity();
  double best_key_dist = std::numeric_limits<double>::infinity();
  bool found = false;
  for (double z : positive) {
    const double rel = std::abs(z - z_oracle) / z_oracle;
    if (rel > kWindow) continue;
    ++out.admissible_roots;
    const double residual = std::abs(horner(c, z)) / horner_abs(c, z);
    const double key_res = residual > kResidualFloor ? residual : 0.0;
    if (!found || key_res < best_key_res || (key_res == best_key_res && rel < best_key_dist)) {
      found = true;
      best_key_res = key_res;
      best_key_dist = rel;
      out.value = z * a_star;
      out.residual = residual;
    }
  }
  if (!found)
    throw Error(ErrorKind::NoAdmissibleRoot,
                "no positive quartic root within 1e-4 of the sup-oracle value " +
                    std::to_string(oracle));
  return out;
}

double cometric_quartic(const Vec& x, const Vec& xi) {
  return cometric_quartic_detailed(x, xi).value;
}

double cometric_neg_radial(double r) {
  if (!(r >= 0)) throw Error(ErrorKind::InvalidParams, "radius must be >= 0");
  return (1 + 2 * r) * (1 + 2 * r);
}

}  // namespace berwald

}  // namespace finsler
