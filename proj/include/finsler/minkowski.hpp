#pragma once

#include "json.hpp"
#include <string>

#include "finsler/types.hpp"

namespace finsler {

enum class NormKind { euclidean, ellipsoid, randers };

// A strongly convex, positively 1-homogeneous norm phi on R^n from one of
// three built-in families:
//   euclidean  phi(y) = |y|
//   ellipsoid  phi(y) = sqrt(y^T A y), A symmetric positive definite
//   randers    phi(y) = |y| + <b, y>, |b| < 1
// Instances are immutable.
class MinkowskiNorm {
 public:
  static MinkowskiNorm euclidean(int dim);
  static MinkowskiNorm ellipsoid(Mat shape);
  static MinkowskiNorm randers(Vec drift);

  // {"kind":"randers","b":[0.5,0]} / {"kind":"ellipsoid","shape":[[4,0],[0,1]]} /
  // {"kind":"euclidean","dim":2}. `default_dim` is used when a euclidean norm
  // omits "dim".
  static MinkowskiNorm from_json(const nlohmann::json& j, int default_dim = 2);
  nlohmann::json to_json() const;
  std::string describe() const;

  int dim() const { return dim_; }
  NormKind kind() const { return kind_; }
  const Mat& shape() const { return shape_; }
  const Vec& drift() const { return drift_; }
  bool is_symmetric() const { return kind_ != NormKind::randers; }

  double eval(const Vec& y) const;
  double operator()(const Vec& y) const { return eval(y); }

  // Analytic gradient; throws ZeroVector at y = 0.
  Vec gradient(const Vec& y) const;

  // Hessian of phi^2/2 (the fundamental tensor of the norm); y != 0.
  Mat half_square_hessian(const Vec& y) const;

  // phi*(eta) = sup_{y != 0} <eta, y> / phi(y). Closed form for the symmetric
  // families, sphere-grid oracle with local refinement for randers.
  double dual(const Vec& eta) const;

  // lambda_phi = sup phi(-y)/phi(y); exactly 1 for the symmetric families.
  double reversibility() const;

 private:
  MinkowskiNorm(NormKind kind, int dim, Mat shape, Vec drift);

  NormKind kind_;
  int dim_;
  Mat shape_;          // ellipsoid only
  Mat shape_inverse_;  // ellipsoid only
  Vec drift_;          // randers only
};

}  // namespace finsler
