#include "oracles.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

double sup_ratio_2d(const std::function<double(const Vec&)>& F, const Vec& eta, int samples) {
  auto ratio = [&](double t) {
    Vec y(2);
    y << std::cos(t), std::sin(t);
    return eta.dot(y) / F(y);
  };
  const double step = 2 * M_PI / samples;
  int best = 0;
  double best_val = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double v = ratio(i * step);
    if (v > best_val) best_val = v, best = i;
  }
  // Golden section on the bracketing interval.
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = (best - 1) * step, b = (best + 1) * step;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = ratio(c), fd = ratio(d);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a);
      fc = ratio(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a);
      fd = ratio(d);
    }
  }
  return std::max({best_val, fc, fd});
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& y, double h) {
  Vec g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vec a = y, b = y;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& y, double h) {
  const Eigen::Index n = y.size();
  Mat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec pp = y, pm = y, mp = y, mm = y;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      H(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  return H;
}

double monte_carlo_area(const std::function<bool(const Vec&)>& inside, double half_width,
                        long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  long hits = 0;
  Vec x(2);
  for (long i = 0; i < samples; ++i) {
    x << u(rng), u(rng);
    hits += inside(x) ? 1 : 0;
  }
  return 4 * half_width * half_width * static_cast<double>(hits) / static_cast<double>(samples);
}

double berwald_metric(const Vec& x, const Vec& y) {
  const double c = 1 - x.squaredNorm();
  const double a = std::sqrt(c * y.squaredNorm() + std::pow(x.dot(y), 2)) / (c * c);
  const double b = x.dot(y) / (c * c);
  return (a + b) * (a + b) / a;
}

GridQuotient berwald_disc_quotient(finsler::FunctionalKind kind,
                                   const finsler::RadialTestFunction& tf,
                                   const finsler::FunctionalParams& params, int nu, int ntheta,
                                   bool parallel) {
  const double p = params.p, s = params.s, m = params.m, q = p / (p - 1);
  // Exponents (a, b) of \int |f|^a d^b for the second numerator factor and
  // the denominator.
  double a2 = 0, b2 = 0, ad = p, bd = -p;
  if (kind == finsler::FunctionalKind::uncertainty) a2 = p, b2 = q * s, ad = p, bd = s - 1;
  if (kind == finsler::FunctionalKind::ckn) a2 = q * (m - 1), b2 = q * s, ad = m, bd = s - 1;

  auto dist = [](double rho) { return rho / (1 - rho); };
  auto field = [&](const Vec& x) { return tf.f(dist(x.norm())); };

  std::vector<double> grad(nu), second(nu), den(nu);
  const double du = 1.0 / nu, dth = 2 * M_PI / ntheta;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (int i = 0; i < nu; ++i) {
    const double u = (i + 0.5) * du, rho = u * u;
    Vec x0(2);
    x0 << rho, 0;
    Vec e(2);
    e << 1, 0;
    auto F = [&](const Vec& y) { return berwald_metric(x0, y); };
    const double c_pos = sup_ratio_2d(F, e, 2000), c_neg = sup_ratio_2d(F, -e, 2000);
    const double h = 1e-5 * std::min(rho, 1 - rho);
    double gs = 0, ss = 0, ds = 0;
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dth;
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      const Vec x = rho * dir;
      const double xi_r = fd_gradient(field, x, h).dot(dir);
      const double fstar = xi_r >= 0 ? xi_r * c_pos : -xi_r * c_neg;
      const double v = std::abs(tf.f(dist(rho)));
      const double d = dist(rho);
      gs += std::pow(fstar, p);
      if (a2 > 0 && v > 0) ss += std::pow(v, a2) * std::pow(d, b2);
      if (v > 0) ds += std::pow(v, ad) * std::pow(d, bd);
    }
    // Lebesgue measure rho drho dtheta with drho = 2u du.
    const double w = rho * 2 * u * du * dth;
    grad[i] = gs * w, second[i] = ss * w, den[i] = ds * w;
  }
  double G = 0, S = 0, D = 0;
  for (int i = 0; i < nu; ++i) G += grad[i], S += second[i], D += den[i];
  GridQuotient out;
  if (kind == finsler::FunctionalKind::hardy) out.numerator = G;
  else out.numerator = std::pow(G, 1 / p) * std::pow(S, 1 / q);
  out.denominator = D;
  out.quotient = out.numerator / out.denominator;
  return out;
}

}  // namespace oracle
