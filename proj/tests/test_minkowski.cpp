#include <random>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/minkowski.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

MinkowskiNorm randers_half() { return MinkowskiNorm::randers(v2(0.5, 0)); }
MinkowskiNorm ellipse41() { return MinkowskiNorm::ellipsoid(v2(4, 1).asDiagonal()); }

std::vector<MinkowskiNorm> sample_norms() {
  Mat a(3, 3);
  a << 2, 0.3, 0, 0.3, 1, 0.2, 0, 0.2, 0.5;
  Vec b(3);
  b << 0.2, -0.4, 0.3;
  return {MinkowskiNorm::euclidean(2), MinkowskiNorm::euclidean(3), ellipse41(),
          MinkowskiNorm::ellipsoid(a), randers_half(), MinkowskiNorm::randers(b)};
}

}  // namespace

TEST_CASE("norm values") {
  CHECK(MinkowskiNorm::euclidean(2).eval(v2(3, 4)) == doctest::Approx(5).epsilon(1e-15));
  CHECK(randers_half().eval(v2(1, 0)) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(randers_half().eval(v2(-1, 0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ellipse41().eval(v2(1, 0)) == doctest::Approx(2).epsilon(1e-15));
  CHECK(randers_half().eval(v2(0, 0)) == 0.0);
}

TEST_CASE("gradients") {
  CHECK((MinkowskiNorm::euclidean(2).gradient(v2(0, 2)) - v2(0, 1)).norm() < 1e-15);
  CHECK((randers_half().gradient(v2(1, 0)) - v2(1.5, 0)).norm() < 1e-15);
  CHECK((ellipse41().gradient(v2(1, 0)) - v2(2, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(randers_half().gradient(v2(0, 0)), Error);
}

TEST_CASE("dual norms") {
  CHECK(MinkowskiNorm::euclidean(2).dual(v2(3, 4)) == doctest::Approx(5).epsilon(1e-14));
  CHECK(ellipse41().dual(v2(1, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  const auto r = randers_half();
  for (const Vec& eta : {v2(1, 0), v2(-1, 0.3), v2(0.2, 2)}) {
    const double ref = oracle::sup_ratio_2d([&](const Vec& y) { return r.eval(y); }, eta);
    CHECK(r.dual(eta) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("reversibility") {
  CHECK(MinkowskiNorm::euclidean(2).reversibility() == doctest::Approx(1).epsilon(1e-12));
  CHECK(ellipse41().reversibility() == doctest::Approx(1).epsilon(1e-12));
  CHECK(randers_half().reversibility() == doctest::Approx(3).epsilon(1e-9));
}

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(MinkowskiNorm::randers(v2(1.0, 0)), Error);
  CHECK_THROWS_AS(MinkowskiNorm::randers(v2(0.8, 0.7)), Error);
  CHECK_THROWS_AS(MinkowskiNorm::ellipsoid(v2(1, -1).asDiagonal()), Error);
  Mat asym(2, 2);
  asym << 2, 1, 0, 2;
  CHECK_THROWS_AS(MinkowskiNorm::ellipsoid(asym), Error);
}

TEST_CASE("json round trip") {
  const auto j = nlohmann::json::parse(R"({"kind":"randers","b":[0.5,0]})");
  const auto n = MinkowskiNorm::from_json(j);
  CHECK(n.eval(v2(1, 0)) == doctest::Approx(1.5));
  const auto e = MinkowskiNorm::from_json(ellipse41().to_json());
  CHECK(e.eval(v2(1, 0)) == doctest::Approx(2));
  CHECK(MinkowskiNorm::from_json(nlohmann::json::parse(R"({"kind":"euclidean"})"), 3).dim() == 3);
  CHECK_THROWS_AS(MinkowskiNorm::from_json(nlohmann::json::parse(R"({"kind":"l1"})")), Error);
}

TEST_CASE("homogeneity, Euler identity and duality on random samples") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.01, 50);
  const auto norms = sample_norms();
  double worst_h = 0, worst_e = 0, worst_cs = -1;
  for (int i = 0; i < 1000; ++i) {
    const auto& norm = norms[i % norms.size()];
    Vec y(norm.dim()), eta(norm.dim());
    for (int k = 0; k < norm.dim(); ++k) y[k] = nd(rng), eta[k] = nd(rng);
    const double lam = ud(rng);
    const double f = norm.eval(y);
    worst_h = std::max(worst_h, std::abs(norm.eval(lam * y) / (lam * f) - 1));
    worst_e = std::max(worst_e, std::abs(norm.gradient(y).dot(y) / f - 1));
    worst_cs = std::max(worst_cs, eta.dot(y) - norm.dual(eta) * f);
  }
  CHECK(worst_h <= 1e-12);
  CHECK(worst_e <= 1e-10);
  CHECK(worst_cs <= 1e-10);
}

TEST_CASE("half-square Hessian is SPD and matches differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (const auto& norm : sample_norms()) {
    for (int i = 0; i < 20; ++i) {
      Vec y(norm.dim());
      for (int k = 0; k < norm.dim(); ++k) y[k] = nd(rng);
      const Mat h = norm.half_square_hessian(y);
      CHECK((h - h.transpose()).norm() < 1e-12);
      CHECK(Eigen::SelfAdjointEigenSolver<Mat>(h).eigenvalues().minCoeff() > 0);
      const double scale = std::max(1.0, y.norm());
      const Mat fd = oracle::fd_hessian(
          [&](const Vec& z) { return 0.5 * norm.eval(z) * norm.eval(z); }, y, 1e-5 * scale);
      CHECK((h - fd).norm() <= 1e-5 * std::max(1.0, h.norm()));
    }
  }
}

TEST_CASE("bidual returns the norm") {
  for (const auto& norm : {MinkowskiNorm::euclidean(2), ellipse41()}) {
    for (const Vec& y : {v2(1, 0), v2(0.3, -2), v2(-1, 1)}) {
      const double bidual =
          oracle::sup_ratio_2d([&](const Vec& eta) { return norm.dual(eta); }, y);
      CHECK(bidual == doctest::Approx(norm.eval(y)).epsilon(1e-6));
    }
  }
}
