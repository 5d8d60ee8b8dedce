#include "finsler/functionals.hpp"

#include <cmath>
#include <sstream>

#include "finsler/berwald.hpp"
#include "finsler/error.hpp"

namespace finsler {

RadialTestFunction RadialTestFunction::exp_decay(double iota) {
  if (!(iota > 0)) throw Error(ErrorKind::InvalidParams, "exp_decay needs iota > 0");
  return {[iota](double r) { return -std::exp(-iota * r); },
          [iota](double r) { return iota * std::exp(-iota * r); }, "exp_decay"};
}

RadialTestFunction RadialTestFunction::stretched(double iota, double mu, double p) {
  if (!(iota > 0) || !(mu > 0) || !(p > 0))
    throw Error(ErrorKind::InvalidParams, "stretched needs iota, mu, p > 0");
  const double q = 1.0 + mu / p;
  return {[iota, q](double r) { return -std::exp(-iota * std::pow(r, q)); },
          [iota, q](double r) {
            return iota * q * std::pow(r, q - 1.0) * std::exp(-iota * std::pow(r, q));
          },
          "stretched"};
}

RadialTestFunction RadialTestFunction::log_power(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "log_power needs n >= 1");
  const double e = -1.0 / n;
  return {[e](double r) { return -std::pow(std::log(2.0 + r), e); },
          [e](double r) { return -e * std::pow(std::log(2.0 + r), e - 1.0) / (2.0 + r); },
          "log_power"};
}

RadialTestFunction RadialTestFunction::model_power(double iota, double s, double p, double m) {
  if (!(iota > 0) || !(p > 1) || p == m)
    throw Error(ErrorKind::InvalidParams, "model_power needs iota > 0, p > 1, p != m");
  const double a = 1.0 + s / (p - 1.0);
  const double e = (p - 1.0) / (p - m);
  if (!(a > 0)) throw Error(ErrorKind::InvalidParams, "model_power needs 1 + s/(p-1) > 0");
  return {[iota, a, e](double r) { return -std::pow(1.0 + std::pow(iota * r, a), e); },
          [iota, a, e](double r) {
            const double u = std::pow(iota * r, a);
            return -e * std::pow(1.0 + u, e - 1.0) * a * iota * std::pow(iota * r, a - 1.0);
          },
          "model_power"};
}

RadialTestFunction RadialTestFunction::bump(double R) {
  if (!(R > 0)) throw Error(ErrorKind::InvalidParams, "bump needs R > 0");
  return {[R](double r) { return r < R ? (1.0 - r / R) * (1.0 - r / R) : 0.0; },
          [R](double r) { return r < R ? -2.0 * (1.0 - r / R) / R : 0.0; }, "bump", R};
}

RadialTestFunction RadialTestFunction::gaussian() {
  return {[](double r) { return std::exp(-r * r); },
          [](double r) { return -2.0 * r * std::exp(-r * r); }, "gaussian"};
}

RadialTestFunction RadialTestFunction::custom(ScalarFn f, ScalarFn df, std::string tag,
                                              double support) {
  return {std::move(f), std::move(df), std::move(tag), support};
}

RadialTestFunction RadialTestFunction::scaled(double lambda) const {
  auto f0 = f;
  auto d0 = df;
  return {[f0, lambda](double r) { return lambda * f0(r); },
          [d0, lambda](double r) { return lambda * d0(r); }, tag, support};
}

RadialTestFunction RadialTestFunction::negated() const {
  auto out = scaled(-1.0);
  out.tag = "-" + tag;
  return out;
}

void FunctionalParams::validate(FunctionalKind kind) const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParams, what); };
  switch (kind) {
    case FunctionalKind::hardy:
      if (!(1 < p && p < n)) fail("Hardy functional needs 1 < p < n");
      break;
    case FunctionalKind::uncertainty:
      if (!(1 - p < s && s <= 1 && 1 < p && p < n))
        fail("uncertainty functional needs 1 - p < s <= 1 < p < n");
      break;
    case FunctionalKind::ckn:
      if (!(1 < p && p < m)) fail("CKN functional needs 1 < p < m");
      if (!(p * (n + s - 1) > m * (n - p) && m * (n - p) > 0))
        fail("CKN functional needs p(n+s-1) > m(n-p) > 0");
      break;
  }
}

RadialSpaceView berwald_view(int n) {
  return {"berwald", n, [](double) { return 1.0; },
          [](double r) { return berwald::cometric_neg_radial(r); },
          [n](double r) { return polar_density_berwald(n, r); }};
}

RadialSpaceView funk_view(int n, bool symmetric) {
  ScalarFn neg;
  if (symmetric) neg = [](double r) { return 2.0 * std::exp(r) - 1.0; };
  return {"funk", n, [](double) { return 1.0; }, neg,
          [n](double r) { return polar_density_funk(n, r); }};
}

RadialSpaceView euclidean_view(int n) {
  const double mass = n * unit_ball_volume(n);
  return {"euclidean", n, [](double) { return 1.0; }, [](double) { return 1.0; },
          [n, mass](double r) { return mass * std::pow(r, n - 1); }};
}

RadialSpaceView model_view(const RadialMeasureModel& model) {
  std::ostringstream name;
  name << "model:" << model.k << "," << model.C;
  return {name.str(), model.n, [](double) { return 1.0; }, nullptr,
          [model](double r) { return model.density(r); }};
}

double fstar_of_radial(const RadialSpaceView& view, const RadialTestFunction& tf, double r) {
  const double d = tf.df(r);
  if (d >= 0) return d == 0.0 ? 0.0 : d * view.fstar_dr_pos(r);
  if (!view.fstar_dr_neg)
    throw Error(ErrorKind::InvalidParams, view.name + " has no registered F*(-dr) profile");
  return -d * view.fstar_dr_neg(r);
}

namespace {

// Where the density drops below the normal range the contribution is dropped,
// so that an overflowing F*(-dr) there (Funk: 2e^r - 1) never meets 0 * inf.
double guarded(const RadialSpaceView& view, const ScalarFn& integrand, double r) {
  const double w = view.polar_density(r);
  if (w < std::numeric_limits<double>::min()) return 0.0;
  return integrand(r) * w;
}

double radial_moment(const RadialSpaceView& view, const ScalarFn& integrand, double upper,
                     const QuadratureSpec& spec) {
  auto f = [&](double r) { return guarded(view, integrand, r); };
  if (std::isinf(upper)) return integrate_radial(f, [](double) { return 1.0; }, upper, spec);
  return integrate(f, 0.0, upper, spec);
}

}  // namespace

double gradient_moment(const RadialSpaceView& view, const RadialTestFunction& tf, double p,
                       double upper, const QuadratureSpec& spec) {
  return radial_moment(
      view, [&](double r) { return std::pow(fstar_of_radial(view, tf, r), p); },
      std::min(upper, tf.support), spec);
}

double weighted_moment(const RadialSpaceView& view, const RadialTestFunction& tf, double a,
                       double b, double upper, const QuadratureSpec& spec) {
  return radial_moment(
      view,
      [&](double r) {
        const double v = std::abs(tf.f(r));
        return v == 0.0 ? 0.0 : std::pow(v, a) * std::pow(r, b);
      },
      std::min(upper, tf.support), spec);
}

namespace {

QuotientParts make_parts(double num, double den) {
  if (!(den > 0) || !std::isfinite(den))
    throw Error(ErrorKind::QuadratureFailure, "denominator is not positive and finite");
  return {num, den, num / den};
}

}  // namespace

QuotientParts hardy(const RadialSpaceView& view, const RadialTestFunction& tf,
                    const FunctionalParams& params, const QuadratureSpec& spec) {
  params.validate(FunctionalKind::hardy);
  const double p = params.p;
  return make_parts(gradient_moment(view, tf, p, INFINITY, spec),
                    weighted_moment(view, tf, p, -p, INFINITY, spec));
}

QuotientParts uncertainty(const RadialSpaceView& view, const RadialTestFunction& tf,
                          const FunctionalParams& params, const QuadratureSpec& spec) {
  params.validate(FunctionalKind::uncertainty);
  const double p = params.p, q = params.p_conj(), s = params.s;
  const double num = std::pow(gradient_moment(view, tf, p, INFINITY, spec), 1.0 / p) *
                     std::pow(weighted_moment(view, tf, p, q * s, INFINITY, spec), 1.0 / q);
  return make_parts(num, weighted_moment(view, tf, p, s - 1.0, INFINITY, spec));
}

QuotientParts ckn(const RadialSpaceView& view, const RadialTestFunction& tf,
                  const FunctionalParams& params, const QuadratureSpec& spec) {
  params.validate(FunctionalKind::ckn);
  const double p = params.p, q = params.p_conj(), s = params.s, m = params.m;
  const double num = std::pow(gradient_moment(view, tf, p, INFINITY, spec), 1.0 / p) *
                     std::pow(weighted_moment(view, tf, q * (m - 1.0), q * s, INFINITY, spec), 1.0 / q);
  return make_parts(num, weighted_moment(view, tf, m, s - 1.0, INFINITY, spec));
}

QuotientParts evaluate(FunctionalKind kind, const RadialSpaceView& view,
                       const RadialTestFunction& tf, const FunctionalParams& params,
                       const QuadratureSpec& spec) {
  switch (kind) {
    case FunctionalKind::hardy: return hardy(view, tf, params, spec);
    case FunctionalKind::uncertainty: return uncertainty(view, tf, params, spec);
    case FunctionalKind::ckn: return ckn(view, tf, params, spec);
  }
  throw Error(ErrorKind::InvalidParams, "unknown functional");
}

double hardy_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                      const FunctionalParams& params) {
  return hardy(view, tf, params).quotient;
}

double uncertainty_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                            const FunctionalParams& params) {
  return uncertainty(view, tf, params).quotient;
}

double ckn_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                    const FunctionalParams& params) {
  return ckn(view, tf, params).quotient;
}

LowerBoundCheck ckn_lower_bound_check(const RadialTestFunction& tf, const FunctionalParams& params) {
  if (!(params.s > 2)) throw Error(ErrorKind::InvalidParams, "lower-bound check needs s > 2");
  const double q = ckn_quotient(berwald_view(static_cast<int>(params.n)), tf, params);
  const double bound = (params.s - 2.0) / (4.0 * params.m);
  return {q, bound, q >= bound - 1e-9};
}

DivergenceIdentity divergence_identity(const RadialTestFunction& tf, int n, double m, double s) {
  const RadialSpaceView view = berwald_view(n);
  const double upper = tf.support;
  auto phi = [&](double r) {
    const double v = std::abs(tf.f(r));
    return v == 0.0 ? 0.0 : std::pow(v, m) * std::pow(r, s);
  };
  // (|f|^m r^s)' = m |f|^{m-1} sgn(f) f' r^s + s |f|^m r^{s-1}
  auto dphi = [&](double r) {
    const double f = tf.f(r);
    const double v = std::abs(f);
    if (v == 0.0) return 0.0;
    const double sgn = f > 0 ? 1.0 : -1.0;
    return m * std::pow(v, m - 1.0) * sgn * tf.df(r) * std::pow(r, s) +
           s * std::pow(v, m) * std::pow(r, s - 1.0);
  };
  const double lap_term =
      radial_moment(view, [&](double r) { return phi(r) * berwald::laplacian_r_radial(n, r); },
                    upper, {});
  const double s_term = s * weighted_moment(view, tf, m, s - 1.0, upper);
  const double flux = radial_moment(view, dphi, upper, {});
  DivergenceIdentity out;
  out.lhs = lap_term + s_term;
  out.rhs = -flux + s_term;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

double divergence_identity_residual(const RadialTestFunction& tf, int n, double m, double s) {
  return divergence_identity(tf, n, m, s).residual;
}

SeminormResult sobolev_seminorms(const RadialSpaceView& view, const RadialTestFunction& tf,
                                 double p) {
  if (!(p > 1)) throw Error(ErrorKind::InvalidParams, "seminorms need p > 1");
  SeminormResult out;
  out.forward = gradient_moment(view, tf, p);
  const RadialTestFunction back = tf.negated();
  bool overflow = false;
  auto integrand = [&](double r) {
    const double v =
        guarded(view, [&](double t) { return std::pow(fstar_of_radial(view, back, t), p); }, r);
    if (!std::isfinite(v)) {
      overflow = true;
      return 0.0;
    }
    return v;
  };
  for (int k = 4; k <= 14; ++k) {
    const double R = std::ldexp(1.0, k);
    overflow = false;
    double value = INFINITY;
    if (R < tf.support || k == 4) {
      value = integrate(integrand, 0.0, std::min(R, tf.support), {1e-10, 1e-14, 4000});
      if (overflow) value = INFINITY;
    } else {
      value = out.ladder.back();
    }
    out.ladder.push_back(value);
    if (!std::isfinite(value)) break;
  }
  const std::size_t L = out.ladder.size();
  const bool non_finite = !std::isfinite(out.ladder.back());
  const bool growing = L >= 3 && out.ladder[L - 1] >= 1.5 * out.ladder[L - 3];
  if (!(non_finite || growing)) out.backward = gradient_moment(view, back, p);
  return out;
}

double lemma_numerator_product(const RadialSpaceView& view, const RadialTestFunction& tf, double p,
                               double a, double b) {
  const double q = p / (p - 1.0);
  return std::pow(gradient_moment(view, tf, p), 1.0 / p) *
         std::pow(weighted_moment(view, tf, a, b), 1.0 / q);
}

double lemma_denominator_bound(double angular_mass, int n, double rho, double varsigma, double eps) {
  return angular_mass / (2.0 * std::exp(rho)) * std::pow(eps, n + varsigma);
}

}  // namespace finsler
