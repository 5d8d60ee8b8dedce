#include <cmath>
#include <string>

#include "doctest.h"
#include "finsler/error.hpp"
#include "finsler/sweep.hpp"

using namespace finsler;

TEST_CASE("iota grid") {
  const auto g = iota_grid();
  REQUIRE(g.size() == 13);
  CHECK(g.front() == doctest::Approx(1e-1).epsilon(1e-15));
  CHECK(g.back() == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(g[4] == doctest::Approx(1e-2).epsilon(1e-14));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, -0.25)));
  CHECK(iota_grid(0.5, 0.5, 1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(iota_grid(0, 1, 3), Error);
  CHECK_THROWS_AS(iota_grid(1, 0.5, 3), Error);
  CHECK_THROWS_AS(iota_grid(1e-3, 1, 0), Error);
}

TEST_CASE("log-log slope") {
  const auto g = iota_grid();
  std::vector<double> sq, root, flat;
  for (double i : g) {
    sq.push_back(i * i);
    root.push_back(3 * std::sqrt(i));
    flat.push_back(7.0);
  }
  const auto a = fit_loglog_slope(g, sq);
  CHECK(a.slope == doctest::Approx(2).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(0).scale(1));
  CHECK(a.r_squared == doctest::Approx(1).epsilon(1e-12));
  const auto b = fit_loglog_slope(g, root);
  CHECK(b.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit_loglog_slope(g, flat).slope == doctest::Approx(0).scale(1));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < g.size(); ++i) rows.push_back({g[i], 1, 1, sq[i]});
  CHECK(fit_loglog_slope(rows).slope == doctest::Approx(2).epsilon(1e-12));

  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind_of([] { fit_loglog_slope({1, 2}, {1, 2}); }) == ErrorKind::InsufficientData);
  CHECK(kind_of([] { fit_loglog_slope({1, 2, 3}, {1, 0, 2}); }) == ErrorKind::NonpositiveValue);
  CHECK(kind_of([] { fit_loglog_slope({1, 2, -3}, {1, 1, 2}); }) == ErrorKind::NonpositiveValue);
}

TEST_CASE("parallel and serial kernels agree") {
  auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)) * std::exp(-0.01 * i); };
  const auto a = parallel_map<double>(257, f, Execution::serial);
  const auto b = parallel_map<double>(257, f, Execution::parallel);
  CHECK(a == b);
  const auto eval = [](double iota) {
    return QuotientParts{iota, 2 * iota, 0.5};
  };
  const auto g = iota_grid();
  const auto r1 = sweep(eval, g, Execution::serial);
  const auto r2 = sweep(eval, g, Execution::parallel);
  REQUIRE(r1.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(r1[i].iota == g[i]);
    CHECK(r1[i].numerator == r2[i].numerator);
    CHECK(r1[i].denominator == r2[i].denominator);
    CHECK(r1[i].quotient == 0.5);
  }
  CHECK(max_threads() >= 1);
}

TEST_CASE("sweep errors name the offending iota") {
  const auto eval = [](double iota) -> QuotientParts {
    if (iota < 1e-3) throw Error(ErrorKind::QuadratureFailure, "no luck");
    return {1, 1, 1};
  };
  for (auto exec : {Execution::serial, Execution::parallel}) {
    try {
      sweep(eval, iota_grid(), exec);
      FAIL("expected a failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::QuadratureFailure);
      const std::string what = e.what();
      CHECK(what.find("no luck") != std::string::npos);
      // lowest failing index: the largest iota below 1e-3
      CHECK(what.find("at iota = 0.00056234") != std::string::npos);
    }
  }
}
