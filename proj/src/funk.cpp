#include "finsler/funk.hpp"

#include <cmath>
#include <numbers>

#include "finsler/error.hpp"

namespace finsler {

FunkSpace::FunkSpace(MinkowskiNorm norm)
    : norm_(std::move(norm)), bh_sigma_(unit_ball_volume(norm_.dim()) / funk::bh_volume(norm_)) {}

bool FunkSpace::contains(const Vec& x) const {
  return x.size() == norm_.dim() && norm_.eval(x) < 1.0;
}

double FunkSpace::metric(const Vec& x, const Vec& y) const {
  require_inside(x);
  const double phi_y = norm_.eval(y);
  if (phi_y == 0.0) return 0.0;

  // Fixed point F <- phi(y + x F); the map contracts whenever <grad phi, x> is
  // in (-1, 1), which holds near every symmetric body.
  double F = phi_y;
  double last_change = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    const double next = norm_.eval(y + x * F);
    const double change = std::abs(next - F);
    F = next;
    if (change <= 1e-13 * F) {
      converged = true;
      break;
    }
    if (change >= last_change) break;
    last_change = change;
  }

  // g(F) = phi(y + xF) - F is convex and strictly decreasing, so Newton
  // started where g > 0 (e.g. F = 0) climbs monotonically to the root. It
  // polishes the fixed point and rescues non-contracting cases.
  auto g = [&](double f) { return norm_.eval(y + x * f) - f; };
  if (!converged) F = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Vec z = y + x * F;
    const double gv = norm_.eval(z) - F;
    const double slope = norm_.gradient(z).dot(x) - 1.0;
    const double next = F - gv / slope;
    if (!(std::abs(g(next)) < std::abs(gv))) break;
    F = next;
  }
  if (std::abs(g(F)) > 1e-10 * F)
    throw Error(ErrorKind::NoConvergence, "Funk metric equation not solved");
  return F;
}

std::optional<Vec> FunkSpace::legendre_hook(const Vec& x, const Vec& y) const {
  if (y.norm() == 0.0) return Vec(Vec::Zero(y.size()));
  const double F = metric(x, y);
  const Vec grad = norm_.gradient(y + x * F);
  return Vec(F * grad / (1.0 - grad.dot(x)));
}

std::optional<Vec> FunkSpace::geodesic_coeffs_hook(const Vec& x, const Vec& y) const {
  return Vec(0.5 * metric(x, y) * y);
}

std::optional<double> FunkSpace::cometric_hook(const Vec& x, const Vec& eta) const {
  return cometric_closed(x, eta);
}

double FunkSpace::cometric_closed(const Vec& x, const Vec& eta) const {
  require_inside(x);
  if (eta.norm() == 0.0) return 0.0;
  return norm_.dual(eta) - eta.dot(x);
}

double FunkSpace::dist_from_origin(const Vec& x) const {
  require_inside(x);
  return -std::log1p(-norm_.eval(x));
}

std::pair<double, double> FunkSpace::reversibility_bounds(const Vec& x) const {
  require_inside(x);
  const double phi = norm_.eval(x);
  return {(1.0 + phi) / (1.0 - phi), (norm_.reversibility() + phi) / (1.0 - phi)};
}

namespace funk {

double euclidean_ball_metric(const Vec& x, const Vec& y) {
  const double X = x.squaredNorm();
  if (!(X < 1.0)) throw Error(ErrorKind::OutsideDomain, "point outside the unit ball");
  const double xy = x.dot(y);
  return (std::sqrt((1.0 - X) * y.squaredNorm() + xy * xy) + xy) / (1.0 - X);
}

double bh_volume(const MinkowskiNorm& norm) {
  const int n = norm.dim();
  if (n == 1) return 1.0 / norm.eval(Vec::Constant(1, 1.0)) + 1.0 / norm.eval(Vec::Constant(1, -1.0));
  constexpr double two_pi = 2 * std::numbers::pi;
  if (n == 2) {
    // Periodic trapezoid: spectrally accurate for the smooth bodies supported here.
    constexpr int N = 4096;
    double sum = 0.0;
    Vec d(2);
    for (int i = 0; i < N; ++i) {
      const double t = two_pi * i / N;
      d << std::cos(t), std::sin(t);
      sum += std::pow(norm.eval(d), -2);
    }
    return 0.5 * sum * two_pi / N;
  }
  if (n == 3) {
    constexpr int N = 512;
    auto ring = [&](double theta) {
      const double st = std::sin(theta), ct = std::cos(theta);
      double sum = 0.0;
      Vec d(3);
      for (int i = 0; i < N; ++i) {
        const double ph = two_pi * i / N;
        d << st * std::cos(ph), st * std::sin(ph), ct;
        sum += std::pow(norm.eval(d), -3);
      }
      return st * sum * two_pi / N;
    };
    return integrate(ring, 0.0, std::numbers::pi, {1e-12, 1e-14, 2000}) / 3.0;
  }
  throw Error(ErrorKind::InvalidParams, "bh_volume supports dimensions 1..3");
}

double radial_integral(const ScalarFn& f, RadialVariant variant, int n, const QuadratureSpec& spec) {
  const double mass = n * unit_ball_volume(n);
  if (variant == RadialVariant::t)
    return mass * integrate([&](double t) { return f(t) * std::pow(t, n - 1); }, 0.0, 1.0, spec);
  return mass * integrate_radial(
                    [&](double r) {
                      const double t = -std::expm1(-r);
                      return f(t) * std::exp(-r) * std::pow(t, n - 1);
                    },
                    [](double) { return 1.0; }, std::numeric_limits<double>::infinity(), spec);
}

double sobolev_lp_exact(int n, double p, double iota) {
  double v = std::tgamma(n + 1.0) * unit_ball_volume(n);
  for (int k = 1; k <= n; ++k) v /= iota * p + k;
  return v;
}

double sobolev_gradient_exact(int n, double p, double iota) {
  return std::pow(iota, p) * sobolev_lp_exact(n, p, iota);
}

}  // namespace funk

}  // namespace finsler
