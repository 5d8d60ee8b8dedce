#include <random>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/funk.hpp"
#include "finsler/functionals.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

struct Samples {
  std::mt19937_64 rng{5};
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud{0, 1};
  Vec gauss(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
  }
  Vec ball(int n, double r) {
    Vec v = gauss(n);
    return v / v.norm() * r * ud(rng);
  }
};

const FunkSpace kBall(MinkowskiNorm::euclidean(2));
const FunkSpace kRanders(MinkowskiNorm::randers(v2(0.5, 0)));
const FunkSpace kEllipse(MinkowskiNorm::ellipsoid(v2(4, 1).asDiagonal()));

}  // namespace

TEST_CASE("metric values") {
  CHECK(kBall.metric(v2(0, 0), v2(3, 4)) == doctest::Approx(5).epsilon(1e-14));
  CHECK(kRanders.metric(v2(0, 0), v2(1, 0)) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(kBall.metric(v2(0.5, 0), v2(1, 0)) == doctest::Approx(2).epsilon(1e-13));
  CHECK(kBall.metric(v2(0.5, 0), v2(-1, 0)) == doctest::Approx(2.0 / 3).epsilon(1e-13));
  CHECK(kBall.metric(v2(0.5, 0), v2(0, 0)) == 0.0);
  const Vec x = v2(0.3, 0), y = v2(1, 0);
  const double F = kRanders.metric(x, y);
  CHECK(std::abs(kRanders.norm().eval(y + x * F) - F) <= 1e-10);
  CHECK_THROWS_AS(kBall.metric(v2(1, 0), v2(1, 0)), Error);
}

TEST_CASE("implicit equation on 1000 samples per body") {
  Samples s;
  for (const FunkSpace* sp : {&kBall, &kRanders, &kEllipse}) {
    double worst = 0;
    int done = 0;
    while (done < 1000) {
      const Vec x = s.ball(2, 1.0), y = s.gauss(2);
      if (!sp->contains(x) || sp->norm().eval(x) > 0.98) continue;
      const double F = sp->metric(x, y);
      worst = std::max(worst, std::abs(sp->norm().eval(y + x * F) - F) / F);
      ++done;
    }
    CHECK(worst <= 1e-10);
  }
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec x = s.ball(2, 0.99), y = s.gauss(2);
    const double ref = funk::euclidean_ball_metric(x, y);
    worst = std::max(worst, std::abs(kBall.metric(x, y) - ref) / ref);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("dual metric") {
  CHECK(kBall.cometric_closed(v2(0, 0), v2(3, 4)) == doctest::Approx(5));
  CHECK(kBall.cometric_closed(v2(0.5, 0), v2(1, 0)) == doctest::Approx(0.5));
  Samples s;
  for (const FunkSpace* sp : {&kBall, &kRanders, &kEllipse}) {
    for (int i = 0; i < 40; ++i) {
      const Vec x = s.ball(2, 0.45), eta = s.gauss(2);
      const double ref = oracle::sup_ratio_2d([&](const Vec& y) { return sp->metric(x, y); }, eta);
      CHECK(sp->cometric_closed(x, eta) == doctest::Approx(ref).epsilon(1e-5));
      // dr = d phi / (1 - phi) has unit length.
      if (sp->norm().eval(x) < 1e-3) continue;
      const Vec dr = sp->norm().gradient(x) / (1 - sp->norm().eval(x));
      CHECK(sp->cometric_closed(x, dr) == doctest::Approx(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("distance from the origin") {
  CHECK(kBall.dist_from_origin(v2(0, 0)) == 0.0);
  CHECK(kBall.dist_from_origin(v2(1 - std::exp(-1.0), 0)) == doctest::Approx(1).epsilon(1e-14));
  CHECK(kBall.dist_from_origin(v2(0, 0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  for (const FunkSpace* sp : {&kBall, &kRanders, &kEllipse}) {
    for (double t : {0.2, 0.5, 0.9}) {
      const Vec u = v2(0.6, -0.8);
      const Vec x = u * (t / sp->norm().eval(u));
      const double len = integrate([&](double s) { return sp->metric(s * x, x); }, 0, 1, {1e-13, 1e-15, 2000});
      CHECK(std::abs(len - sp->dist_from_origin(x)) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(kBall.dist_from_origin(v2(1, 1)), Error);
}

TEST_CASE("Busemann-Hausdorff volume") {
  CHECK(funk::bh_volume(MinkowskiNorm::euclidean(2)) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(funk::bh_volume(MinkowskiNorm::ellipsoid(v2(4, 1).asDiagonal())) == doctest::Approx(M_PI / 2).epsilon(1e-10));
  CHECK(funk::bh_volume(MinkowskiNorm::euclidean(3)) == doctest::Approx(4 * M_PI / 3).epsilon(1e-8));
  Vec d3(3);
  d3 << 4, 1, 9;
  CHECK(funk::bh_volume(MinkowskiNorm::ellipsoid(d3.asDiagonal())) ==
        doctest::Approx(4 * M_PI / 3 / 6).epsilon(1e-8));
  const auto r = MinkowskiNorm::randers(v2(0.5, 0));
  const double mc = oracle::monte_carlo_area([&](const Vec& x) { return r.eval(x) < 1; }, 2.5, 4000000, 17);
  CHECK(funk::bh_volume(r) == doctest::Approx(M_PI / std::pow(0.75, 1.5)).epsilon(1e-10));
  CHECK(funk::bh_volume(r) == doctest::Approx(mc).epsilon(5e-3));
  CHECK(kEllipse.bh_sigma() == doctest::Approx(2).epsilon(1e-10));
}

TEST_CASE("radial integral") {
  auto one = [](double) { return 1.0; };
  CHECK(funk::radial_integral(one, funk::RadialVariant::t, 2) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(funk::radial_integral(one, funk::RadialVariant::r, 2) == doctest::Approx(M_PI).epsilon(1e-10));
  auto u = [](double t) { return std::pow(1 - t, 1.0); };
  CHECK(funk::radial_integral(u, funk::RadialVariant::t, 2) == doctest::Approx(M_PI / 3).epsilon(1e-12));
  CHECK(0.25 * funk::radial_integral(u, funk::RadialVariant::r, 2) == doctest::Approx(M_PI / 12).epsilon(1e-10));
  for (int n : {1, 2, 3}) {
    auto f = [](double t) { return std::cos(3 * t) + t * t; };
    const double a = funk::radial_integral(f, funk::RadialVariant::t, n);
    const double b = funk::radial_integral(f, funk::RadialVariant::r, n);
    CHECK(std::abs(a / b - 1) <= 1e-9);
  }
}

TEST_CASE("exact Sobolev integrals on a 3x3x3 grid") {
  double worst = 0;
  for (int n : {2, 3, 4})
    for (double p : {1.5, 2.0, 3.0})
      for (double iota : {0.25, 0.5, 1.0}) {
        const double lp = funk::sobolev_lp_exact(n, p, iota);
        const double t = funk::radial_integral([&](double s) { return std::pow(1 - s, iota * p); },
                                               funk::RadialVariant::t, n);
        const auto view = funk_view(n);
        const auto uf = RadialTestFunction::exp_decay(iota);
        const double gr = gradient_moment(view, uf, p);
        worst = std::max({worst, std::abs(t / lp - 1),
                          std::abs(gr / funk::sobolev_gradient_exact(n, p, iota) - 1)});
      }
  CHECK(worst <= 1e-10);
  CHECK(funk::sobolev_lp_exact(2, 2, 0.5) == doctest::Approx(M_PI / 3).epsilon(1e-14));
  CHECK(funk::sobolev_gradient_exact(2, 2, 0.5) == doctest::Approx(M_PI / 12).epsilon(1e-14));
}

TEST_CASE("backward seminorm diverges on shrinking truncations") {
  // p(iota - 1) + 1 < 0 with p = 2, iota = 0.1: growth 2^{0.8} per halving of delta.
  const double p = 2, iota = 0.1;
  const auto view = funk_view(3);
  const auto back = RadialTestFunction::exp_decay(iota).negated();
  auto value = [&](double delta) {
    return integrate([&](double r) { return std::pow(fstar_of_radial(view, back, r), p) * view.polar_density(r); },
                     0, -std::log(delta), {1e-10, 1e-14, 4000});
  };
  for (double delta = 1e-3; delta > 1e-6; delta /= 2) CHECK(value(delta / 2) >= 1.5 * value(delta));
  CHECK(sobolev_seminorms(view, RadialTestFunction::exp_decay(iota), p).backward_divergent());
  CHECK(!sobolev_seminorms(view, RadialTestFunction::exp_decay(0.8), p).backward_divergent());
}

TEST_CASE("reversibility lies in its interval") {
  for (const FunkSpace* sp : {&kBall, &kRanders, &kEllipse}) {
    for (const Vec& x : {v2(0.1, 0.2), v2(-0.3, 0.1), v2(0, 0)}) {
      const auto [lo, hi] = sp->reversibility_bounds(x);
      const double lam = reversibility_at(*sp, x);
      CHECK(lam >= lo * (1 - 1e-9));
      CHECK(lam <= hi * (1 + 1e-9));
    }
  }
  CHECK(reversibility_at(kBall, v2(0.5, 0)) == doctest::Approx(3).epsilon(1e-9));
}

TEST_CASE("curvature of a Randers body") {
  Samples s;
  for (int i = 0; i < 10; ++i) {
    const Vec x = s.ball(2, 0.4), y = s.gauss(2), v = s.gauss(2);
    CHECK(flag_curvature(kRanders, x, y, v) == doctest::Approx(-0.25).epsilon(4e-3));
    CHECK(s_curvature(kRanders, x, y) / kRanders.metric(x, y) == doctest::Approx(1.5).epsilon(1e-4));
  }
}
