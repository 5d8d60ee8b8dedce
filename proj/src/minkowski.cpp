#include "finsler/minkowski.hpp"

#include <cmath>
#include <sstream>

#include "finsler/error.hpp"
#include "finsler/sphere.hpp"

namespace finsler {

MinkowskiNorm::MinkowskiNorm(NormKind kind, int dim, Mat shape, Vec drift)
    : kind_(kind), dim_(dim), shape_(std::move(shape)), drift_(std::move(drift)) {
  if (kind_ == NormKind::ellipsoid) shape_inverse_ = shape_.inverse();
}

MinkowskiNorm MinkowskiNorm::euclidean(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidParams, "dimension must be positive");
  return MinkowskiNorm(NormKind::euclidean, dim, Mat(), Vec());
}

MinkowskiNorm MinkowskiNorm::ellipsoid(Mat shape) {
  if (shape.rows() < 1 || shape.rows() != shape.cols())
    throw Error(ErrorKind::InvalidParams, "ellipsoid shape must be a square matrix");
  if ((shape - shape.transpose()).norm() > 1e-12 * shape.norm())
    throw Error(ErrorKind::InvalidParams, "ellipsoid shape must be symmetric");
  Eigen::LLT<Mat> llt(shape);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::InvalidParams, "ellipsoid shape must be positive definite");
  const int dim = static_cast<int>(shape.rows());
  return MinkowskiNorm(NormKind::ellipsoid, dim, std::move(shape), Vec());
}

MinkowskiNorm MinkowskiNorm::randers(Vec drift) {
  if (drift.size() < 1) throw Error(ErrorKind::InvalidParams, "randers drift must be nonempty");
  if (!(drift.norm() < 1.0))
    throw Error(ErrorKind::InvalidParams, "randers drift must satisfy |b| < 1");
  const int dim = static_cast<int>(drift.size());
  return MinkowskiNorm(NormKind::randers, dim, Mat(), std::move(drift));
}

MinkowskiNorm MinkowskiNorm::from_json(const nlohmann::json& j, int default_dim) {
  if (!j.is_object() || !j.contains("kind"))
    throw Error(ErrorKind::InvalidParams, "norm object needs a \"kind\" field");
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "euclidean") return euclidean(j.value("dim", default_dim));
    if (kind == "randers") {
      const auto b = j.at("b").get<std::vector<double>>();
      return randers(Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size())));
    }
    if (kind == "ellipsoid") {
      const auto rows = j.at("shape").get<std::vector<std::vector<double>>>();
      const auto n = static_cast<Eigen::Index>(rows.size());
      Mat a(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n)
          throw Error(ErrorKind::InvalidParams, "ellipsoid shape must be square");
        for (Eigen::Index k = 0; k < n; ++k) a(i, k) = rows[i][k];
      }
      return ellipsoid(a);
    }
    throw Error(ErrorKind::InvalidParams, "unknown norm kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParams, std::string("bad norm object: ") + e.what());
  }
}

nlohmann::json MinkowskiNorm::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case NormKind::euclidean:
      j["kind"] = "euclidean";
      j["dim"] = dim_;
      break;
    case NormKind::randers:
      j["kind"] = "randers";
      j["b"] = std::vector<double>(drift_.data(), drift_.data() + drift_.size());
      break;
    case NormKind::ellipsoid: {
      j["kind"] = "ellipsoid";
      std::vector<std::vector<double>> rows(dim_, std::vector<double>(dim_));
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) rows[i][k] = shape_(i, k);
      j["shape"] = rows;
      break;
    }
  }
  return j;
}

std::string MinkowskiNorm::describe() const { return to_json().dump(); }

double MinkowskiNorm::eval(const Vec& y) const {
  switch (kind_) {
    case NormKind::euclidean: return y.norm();
    case NormKind::ellipsoid: return std::sqrt(std::max(0.0, y.dot(shape_ * y)));
    case NormKind::randers: return y.norm() + drift_.dot(y);
  }
  return 0.0;
}

Vec MinkowskiNorm::gradient(const Vec& y) const {
  const double ny = y.norm();
  if (ny == 0.0) throw Error(ErrorKind::ZeroVector, "norm gradient at y = 0");
  switch (kind_) {
    case NormKind::euclidean: return y / ny;
    case NormKind::ellipsoid: return shape_ * y / eval(y);
    case NormKind::randers: return y / ny + drift_;
  }
  return Vec();
}

Mat MinkowskiNorm::half_square_hessian(const Vec& y) const {
  const double ny = y.norm();
  if (ny == 0.0) throw Error(ErrorKind::ZeroVector, "norm Hessian at y = 0");
  switch (kind_) {
    case NormKind::euclidean: return Mat::Identity(dim_, dim_);
    case NormKind::ellipsoid: return shape_;
    case NormKind::randers: {
      // (phi^2/2)'' = grad grad^T + phi * Hess(phi), Hess|y| = (I - u u^T)/|y|.
      const Vec u = y / ny;
      const Vec g = u + drift_;
      const Mat hess_phi = (Mat::Identity(dim_, dim_) - u * u.transpose()) / ny;
      return g * g.transpose() + eval(y) * hess_phi;
    }
  }
  return Mat();
}

double MinkowskiNorm::dual(const Vec& eta) const {
  if (eta.norm() == 0.0) return 0.0;
  switch (kind_) {
    case NormKind::euclidean: return eta.norm();
    case NormKind::ellipsoid: return std::sqrt(eta.dot(shape_inverse_ * eta));
    case NormKind::randers: {
      auto ratio = [&](const Vec& y) { return eta.dot(y) / eval(y); };
      return maximize_on_sphere(ratio, dim_, default_sphere_grid_count(dim_)).value;
    }
  }
  return 0.0;
}

double MinkowskiNorm::reversibility() const {
  if (is_symmetric()) return 1.0;
  auto ratio = [&](const Vec& y) { return eval(-y) / eval(y); };
  return maximize_on_sphere(ratio, dim_, default_sphere_grid_count(dim_)).value;
}

}  // namespace finsler
