#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finsler/minkowski.hpp"
#include "finsler/types.hpp"

namespace finsler {

// A Finsler metric on an open domain of R^n. Concrete spaces provide the
// metric and may override the closed-form hooks; every free function below
// falls back to finite differences when a hook returns nullopt.
class FinslerSpace {
 public:
  virtual ~FinslerSpace() = default;

  virtual int dim() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  // F(x, y); must return 0 for y = 0.
  virtual double metric(const Vec& x, const Vec& y) const = 0;
  virtual std::string name() const = 0;

  // Throws the space's own domain error (OutsideDomain by default).
  virtual void require_inside(const Vec& x) const;

  virtual std::optional<Mat> fundamental_tensor_hook(const Vec&, const Vec&) const {
    return std::nullopt;
  }
  virtual std::optional<Vec> legendre_hook(const Vec&, const Vec&) const { return std::nullopt; }
  virtual std::optional<Vec> geodesic_coeffs_hook(const Vec&, const Vec&) const {
    return std::nullopt;
  }
  virtual std::optional<double> cometric_hook(const Vec&, const Vec&) const {
    return std::nullopt;
  }
  // Lebesgue density sigma of the reference measure.
  virtual std::optional<double> measure_density(const Vec&) const { return std::nullopt; }
};

// (R^n, phi) with Lebesgue measure.
class MinkowskiSpace : public FinslerSpace {
 public:
  explicit MinkowskiSpace(MinkowskiNorm norm) : norm_(std::move(norm)) {}

  int dim() const override { return norm_.dim(); }
  bool contains(const Vec& x) const override { return x.size() == norm_.dim(); }
  double metric(const Vec&, const Vec& y) const override { return norm_.eval(y); }
  std::string name() const override { return "minkowski:" + norm_.describe(); }

  std::optional<Mat> fundamental_tensor_hook(const Vec& x, const Vec& y) const override;
  std::optional<Vec> legendre_hook(const Vec& x, const Vec& y) const override;
  std::optional<Vec> geodesic_coeffs_hook(const Vec& x, const Vec& y) const override;
  std::optional<double> cometric_hook(const Vec& x, const Vec& xi) const override;
  std::optional<double> measure_density(const Vec&) const override { return 1.0; }

  const MinkowskiNorm& norm() const { return norm_; }

 private:
  MinkowskiNorm norm_;
};

// g_ij = (1/2) [F^2]_{y^i y^j}. Hook, else Jacobian of the Legendre hook, else
// central second differences of F^2/2.
Mat fundamental_tensor(const FinslerSpace& space, const Vec& x, const Vec& y);
Mat fundamental_tensor_numeric(const FinslerSpace& space, const Vec& x, const Vec& y);

// L(x, y)_i = (1/2) [F^2]_{y^i}; zero covector at y = 0.
Vec legendre(const FinslerSpace& space, const Vec& x, const Vec& y);
Vec legendre_numeric(const FinslerSpace& space, const Vec& x, const Vec& y);

// Damped Newton on y -> L(x, y) started from the co-metric maximizer.
Vec legendre_inverse(const FinslerSpace& space, const Vec& x, const Vec& xi, double tol = 1e-13,
                     int max_iter = 100);

struct CometricSup {
  double value = 0.0;
  Vec direction;  // unit euclidean maximizer of <xi, y>/F(x, y)
};

// sup_{|y|=1} <xi, y>/F(x, y) by sphere grid and local ascent. Always an
// attained value, so a lower bound of F*(x, xi). Dimensions 1..3.
CometricSup cometric_sup(const FinslerSpace& space, const Vec& x, const Vec& xi, int grid_count,
                         double tol = 1e-12);
double cometric_oracle(const FinslerSpace& space, const Vec& x, const Vec& xi, double tol = 1e-12);

// F*(x, xi): closed-form hook when present, else the oracle.
double cometric(const FinslerSpace& space, const Vec& x, const Vec& xi);

// Spray coefficients G^i. The numeric version evaluates
//   G^i = (1/4) g^{il} { [F^2]_{x^k y^l} y^k - [F^2]_{x^l} }
// by differencing the Legendre map and F^2 in x.
Vec geodesic_coeffs(const FinslerSpace& space, const Vec& x, const Vec& y);
Vec geodesic_coeffs_numeric(const FinslerSpace& space, const Vec& x, const Vec& y);

// RK4 on x'' + 2G(x, x') = 0 with `steps` equal steps over [0, T]. Returns
// steps + 1 samples; throws LeftDomain if the path leaves the domain.
std::vector<TangentVec> geodesic_integrate(const FinslerSpace& space, const Vec& x0,
                                           const Vec& y0, double T, int steps);

// R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
//         - dG^i/dy^j dG^j/dy^k
// with nested central differences and one Richardson level.
Mat riemann_transform(const FinslerSpace& space, const Vec& x, const Vec& y);

// K(y, v) = g_y(R_y v, v) / (g_y(y,y) g_y(v,v) - g_y(y,v)^2).
double flag_curvature(const FinslerSpace& space, const Vec& x, const Vec& y, const Vec& v);

// Sum of g_y(R_y e_i, e_i) over a g_y-orthonormal basis e_1 = y/F, e_2, ...
// (Gram-Schmidt on the canonical basis). Equals F^2 times the sum of the
// flag curvatures K(y, e_i), i >= 2.
double ricci(const FinslerSpace& space, const Vec& x, const Vec& y);

// S = dG^i/dy^i - y^i d(ln sigma)/dx^i.
double s_curvature(const FinslerSpace& space, const Vec& x, const Vec& y);

// sup_{y != 0} F(x, -y)/F(x, y).
double reversibility_at(const FinslerSpace& space, const Vec& x);

}  // namespace finsler
