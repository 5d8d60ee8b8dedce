#include "finsler/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "finsler/error.hpp"

namespace finsler {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

double checked(const ScalarFn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v))
    throw Error(ErrorKind::QuadratureFailure,
                "non-finite integrand value at x = " + std::to_string(x));
  return v;
}

// QUADPACK qk15 rule with its error heuristic.
Segment gk15(const ScalarFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = checked(f, center - dx);
    fv2[j] = checked(f, center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double scale = std::abs(half);
  resk *= half;
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {a, b, resk, err};
}

}  // namespace

QuadratureResult integrate_detailed(const ScalarFn& f, double a, double b,
                                    const QuadratureSpec& spec) {
  if (!(spec.rel_tol > 0) || !(spec.abs_tol > 0) || spec.max_subdivisions < 1)
    throw Error(ErrorKind::InvalidParams, "quadrature tolerances must be positive");
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::InvalidParams, "integrate needs finite limits; use integrate_radial");

  std::priority_queue<Segment> heap;
  const Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  double frozen_value = 0.0, frozen_err = 0.0;
  int subdivisions = 0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_err > tolerance()) {
    if (heap.empty()) break;
    if (subdivisions >= spec.max_subdivisions)
      throw Error(ErrorKind::QuadratureFailure,
                  "subdivision limit reached on [" + std::to_string(a) + ", " + std::to_string(b) +
                      "], estimated error " + std::to_string(total_err));
    const Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (std::abs(s.b - s.a) <= 100 * eps * std::max(std::abs(s.a), std::abs(s.b)) ||
        mid <= s.a || mid >= s.b) {
      // Resolution limit of double precision; keep the segment as it is.
      frozen_value += s.value;
      frozen_err += s.error;
      continue;
    }
    const Segment left = gk15(f, s.a, mid);
    const Segment right = gk15(f, mid, s.b);
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  if (total_err > tolerance() && frozen_err > tolerance())
    throw Error(ErrorKind::QuadratureFailure,
                "roundoff prevents reaching the requested tolerance, estimated error " +
                    std::to_string(total_err));
  // Re-sum to limit accumulated cancellation in the running total.
  double sum = frozen_value;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return {sum, total_err, subdivisions};
}

double integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_detailed(f, a, b, spec).value;
}

double integrate_radial(const ScalarFn& f, const ScalarFn& weight, double upper,
                        const QuadratureSpec& spec) {
  if (!(upper >= 0)) throw Error(ErrorKind::InvalidParams, "radial upper limit must be >= 0");
  if (upper == 0) return 0.0;
  const double t_max = std::isinf(upper) ? 1.0 : upper / (1.0 + upper);
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double r = t / one_minus;
    const double fw = f(r);
    if (fw == 0.0) return 0.0;
    return fw * weight(r) / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, t_max, spec);
}

double sk(double t, double k) {
  if (k > 0) {
    const double q = std::sqrt(k);
    return std::sin(q * t) / q;
  }
  if (k < 0) {
    const double q = std::sqrt(-k);
    return std::sinh(q * t) / q;
  }
  return t;
}

double gamma_fn(double z) {
  if (!(z > 0)) throw Error(ErrorKind::DomainError, "gamma_fn needs a positive argument");
  return std::tgamma(z);
}

double beta_fn(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error(ErrorKind::DomainError, "beta_fn needs positive arguments");
  if (a + b < 150) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double unit_ball_volume(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double polar_density_berwald(int n, double r) {
  if (r <= 0) return n == 1 ? n * unit_ball_volume(n) : 0.0;
  return n * unit_ball_volume(n) * std::pow(r, n - 1) / std::pow(1.0 + r, n + 1);
}

double polar_density_funk(int n, double r) {
  if (r <= 0) return n == 1 ? n * unit_ball_volume(n) : 0.0;
  return n * unit_ball_volume(n) * std::exp(-r) * std::pow(-std::expm1(-r), n - 1);
}

RadialMeasureModel RadialMeasureModel::make(int n, double k, double C) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "model dimension must be positive");
  if (k < 0) throw Error(ErrorKind::InvalidParams, "model curvature scale k must be >= 0");
  RadialMeasureModel m;
  m.n = n;
  m.k = k;
  m.C = C;
  m.angular_mass = n * unit_ball_volume(n);
  return m;
}

double RadialMeasureModel::mass() const {
  return angular_mass > 0 ? angular_mass : n * unit_ball_volume(n);
}

double RadialMeasureModel::density(double r) const {
  if (r <= 0) return n == 1 ? mass() : 0.0;
  // e^{-kr} sinh(kr)/k = (1 - e^{-2kr})/(2k), stable for large r.
  const double base = k > 0 ? -std::expm1(-2.0 * k * r) / (2.0 * k) : r;
  return mass() * std::pow(base, n - 1) * std::pow(1.0 + r, -C);
}

double RadialMeasureModel::distortion(double r) const {
  return (n - 1) * k * r + C * std::log1p(r);
}

double comparison_ratio(const ScalarFn& density, const ScalarFn& tau, double kappa, int n,
                        double r) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidParams, "comparison ratio needs r > 0");
  // Work in logs: e^{-tau} and s_kappa^{n-1} over/underflow separately at large r.
  const double s = sk(r, kappa);
  const double log_ref = -tau(r) + (n - 1) * std::log(s);
  return density(r) * std::exp(-log_ref);
}

double comparison_ratio(const RadialMeasureModel& model, double r) {
  return comparison_ratio([&](double t) { return model.density(t); },
                          [&](double t) { return model.distortion(t); },
                          model.comparison_curvature(), model.n, r);
}

}  // namespace finsler
