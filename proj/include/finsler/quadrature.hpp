#pragma once

#include <functional>
#include <limits>

namespace finsler {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using ScalarFn = std::function<double(double)>;

// Globally adaptive 15-point Gauss-Kronrod on a finite interval. Throws
// QuadratureFailure when max(abs_tol, rel_tol*|I|) is not reached within
// the subdivision budget or the integrand turns non-finite.
QuadratureResult integrate_detailed(const ScalarFn& f, double a, double b,
                                    const QuadratureSpec& spec = {});
double integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec = {});

// \int_0^upper f(r) w(r) dr. An infinite `upper` is handled by the
// substitution r = t/(1-t) on [0,1); Kronrod nodes never touch t = 1.
double integrate_radial(const ScalarFn& f, const ScalarFn& weight,
                        double upper = std::numeric_limits<double>::infinity(),
                        const QuadratureSpec& spec = {});

// s_k(t): sin(sqrt(k) t)/sqrt(k), t, sinh(sqrt(-k) t)/sqrt(-k).
double sk(double t, double k);

double gamma_fn(double z);
double beta_fn(double a, double b);

// Lebesgue volume of the euclidean unit ball in R^n.
double unit_ball_volume(int n);

// Polar densities of Lebesgue measure on the Berwald ball and of the
// Busemann-Hausdorff measure on a Funk space, integrated over directions.
double polar_density_berwald(int n, double r);
double polar_density_funk(int n, double r);

// Synthetic radial density
//   h(r) = I e^{-(n-1)kr} s_{-k^2}(r)^{n-1} (1+r)^{-C},
// the extremal profile allowed by Ric >= -(n-1)k^2 and S(grad r) >= (n-1)k + C/(1+r).
struct RadialMeasureModel {
  int n = 3;
  double k = 0.0;
  double C = 3.0;
  double angular_mass = 0.0;  // <= 0 selects n * omega_n

  static RadialMeasureModel make(int n, double k, double C);
  double mass() const;
  double density(double r) const;
  // Distortion along a ray, tau(r) = (n-1)kr + C ln(1+r), and the curvature
  // -k^2 it is compared against.
  double distortion(double r) const;
  double comparison_curvature() const { return -k * k; }
};

// h(r) / (e^{-tau(r)} s_kappa(r)^{n-1}).
double comparison_ratio(const ScalarFn& density, const ScalarFn& tau, double kappa, int n,
                        double r);
double comparison_ratio(const RadialMeasureModel& model, double r);

}  // namespace finsler
