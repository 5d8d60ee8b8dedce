#pragma once

#include <vector>

#include "finsler/core.hpp"

namespace finsler {

// Berwald's metric on the open unit ball, with Lebesgue measure:
//   B(x, y) = (sqrt((1-|x|^2)|y|^2 + <x,y>^2) + <x,y>)^2
//             / ((1-|x|^2)^2 sqrt((1-|x|^2)|y|^2 + <x,y>^2)).
// Projectively flat with G = P y and flat flag curvature.
class BerwaldSpace : public FinslerSpace {
 public:
  static constexpr double kBoundaryGuard = 1e-12;

  explicit BerwaldSpace(int dim);

  int dim() const override { return dim_; }
  bool contains(const Vec& x) const override;
  double metric(const Vec& x, const Vec& y) const override;
  std::string name() const override { return "berwald"; }
  void require_inside(const Vec& x) const override;

  std::optional<Vec> legendre_hook(const Vec& x, const Vec& y) const override;
  std::optional<Vec> geodesic_coeffs_hook(const Vec& x, const Vec& y) const override;
  std::optional<double> cometric_hook(const Vec& x, const Vec& xi) const override;
  std::optional<double> measure_density(const Vec&) const override { return 1.0; }

 private:
  int dim_;
};

namespace berwald {

double b_eval(const Vec& x, const Vec& y);
// (alpha, beta) form: B = (alpha + beta)^2 / alpha.
double alpha(const Vec& x, const Vec& y);
double beta(const Vec& x, const Vec& y);
// Projective factor, G^i = P y^i.
double P(const Vec& x, const Vec& y);

double dist_from_origin(const Vec& x);  // |x|/(1-|x|)
double dist_to_origin(const Vec& x);    // |x|/(1+|x|)
double radius_of(double r);             // |x| at forward distance r: r/(1+r)

Vec grad_r(const Vec& x);
Vec dr_covector(const Vec& x);
double laplacian_r(const Vec& x);          // (n-1)/|x| + (n+1)|x| - 2n
double laplacian_r_radial(int n, double r);  // (n-1)/r - (n+1)/(1+r)

// alpha*^2 = a^{ij} xi_i xi_j and beta* = b^i xi_i.
double alpha_star_sq(const Vec& x, const Vec& xi);
double beta_star(const Vec& x, const Vec& xi);

// Coefficients (degree 4 down to 0) of the quartic satisfied by B*(x, xi).
std::vector<double> quartic_coefficients(const Vec& x, const Vec& xi);

struct QuarticRoot {
  double value = 0.0;        // B*(x, xi)
  double residual = 0.0;     // coefficient-scaled residual of the normalized quartic
  double oracle = 0.0;       // sup-oracle lower bound used for the selection
  int positive_roots = 0;    // real positive roots of the quartic
  int admissible_roots = 0;  // of those, within the selection window of the oracle
};

// Solves the quartic for B* after substituting B* = alpha* z (coefficients then
// depend only on |x|^2 and beta*/alpha*), polishes every real root by Newton and
// keeps the positive root closest to a 64-direction sup-oracle bound.
QuarticRoot cometric_quartic_detailed(const Vec& x, const Vec& xi);
double cometric_quartic(const Vec& x, const Vec& xi);

// B*(x, -dr) = (1 + 2r)^2.
double cometric_neg_radial(double r);

}  // namespace berwald

}  // namespace finsler
