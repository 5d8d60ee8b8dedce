#pragma once

#include "finsler/core.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

// Funk metric of the convex body Omega = {phi < 1}: F(x, y) is the unique
// solution of F = phi(y + x F). Carries the Busemann-Hausdorff measure, a
// constant multiple sigma of Lebesgue measure.
class FunkSpace : public FinslerSpace {
 public:
  explicit FunkSpace(MinkowskiNorm norm);

  int dim() const override { return norm_.dim(); }
  bool contains(const Vec& x) const override;
  double metric(const Vec& x, const Vec& y) const override;
  std::string name() const override { return "funk:" + norm_.describe(); }

  std::optional<Vec> legendre_hook(const Vec& x, const Vec& y) const override;
  std::optional<Vec> geodesic_coeffs_hook(const Vec& x, const Vec& y) const override;
  std::optional<double> cometric_hook(const Vec& x, const Vec& eta) const override;
  std::optional<double> measure_density(const Vec&) const override { return bh_sigma_; }

  const MinkowskiNorm& norm() const { return norm_; }
  double bh_sigma() const { return bh_sigma_; }

  // phi*(eta) - <eta, x>.
  double cometric_closed(const Vec& x, const Vec& eta) const;
  // -ln(1 - phi(x)).
  double dist_from_origin(const Vec& x) const;
  // [(1 + phi(x))/(1 - phi(x)), (lambda_phi + phi(x))/(1 - phi(x))].
  std::pair<double, double> reversibility_bounds(const Vec& x) const;

 private:
  MinkowskiNorm norm_;
  double bh_sigma_;
};

namespace funk {

// (sqrt((1-|x|^2)|y|^2 + <x,y>^2) + <x,y>) / (1 - |x|^2).
double euclidean_ball_metric(const Vec& x, const Vec& y);

// vol(Omega) = (1/n) \int_{S^{n-1}} phi(theta)^{-n} dtheta.
double bh_volume(const MinkowskiNorm& norm);

enum class RadialVariant { t, r };

// \int_Omega f(phi) dm_BH = n omega_n \int_0^1 f(t) t^{n-1} dt
//                         = n omega_n \int_0^inf f(1-e^{-r}) e^{-r}(1-e^{-r})^{n-1} dr.
double radial_integral(const ScalarFn& f, RadialVariant variant, int n,
                       const QuadratureSpec& spec = {});

// Exact integrals for u = -(1 - phi)^iota over Omega with the BH measure:
// \int |u|^p = n! omega_n / prod_{k=1}^n (iota p + k), and iota^p times that for F*^p(du).
double sobolev_lp_exact(int n, double p, double iota);
double sobolev_gradient_exact(int n, double p, double iota);

}  // namespace funk

}  // namespace finsler
