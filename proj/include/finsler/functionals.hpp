#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "finsler/quadrature.hpp"

namespace finsler {

// Radial profile f(r) with derivative. `support` is the radius beyond which f
// vanishes identically (infinity for decaying profiles).
struct RadialTestFunction {
  ScalarFn f;
  ScalarFn df;
  std::string tag;
  double support = std::numeric_limits<double>::infinity();

  double operator()(double r) const { return f(r); }

  // -e^{-iota r}
  static RadialTestFunction exp_decay(double iota);
  // -e^{-iota r^{1 + mu/p}}
  static RadialTestFunction stretched(double iota, double mu, double p);
  // -(ln(2 + r))^{-1/n}
  static RadialTestFunction log_power(int n);
  // -(1 + (iota r)^{1 + s/(p-1)})^{(p-1)/(p-m)}
  static RadialTestFunction model_power(double iota, double s, double p, double m);
  // (1 - r/R)_+^2
  static RadialTestFunction bump(double R = 1.0);
  // e^{-r^2}
  static RadialTestFunction gaussian();
  static RadialTestFunction custom(ScalarFn f, ScalarFn df, std::string tag,
                                   double support = std::numeric_limits<double>::infinity());

  RadialTestFunction scaled(double lambda) const;
  RadialTestFunction negated() const;
};

enum class FunctionalKind { hardy, uncertainty, ckn };

struct FunctionalParams {
  double n = 3;
  double p = 2;
  double s = 1;
  double m = 3;

  double p_conj() const { return p / (p - 1.0); }
  // Throws InvalidParams unless the admissibility conditions of `kind` hold.
  void validate(FunctionalKind kind) const;
};

// Everything a radial functional needs from a space: the co-metric of +-dr
// along a ray and the polar density of the reference measure.
struct RadialSpaceView {
  std::string name;
  int n = 0;
  ScalarFn fstar_dr_pos;
  ScalarFn fstar_dr_neg;  // empty when the space does not register it
  ScalarFn polar_density;
};

RadialSpaceView berwald_view(int n);
// Funk space with the BH measure. For a symmetric body F*(-dr) = 2e^r - 1;
// asymmetric bodies have no radial backward profile.
RadialSpaceView funk_view(int n, bool symmetric = true);
RadialSpaceView euclidean_view(int n);
RadialSpaceView model_view(const RadialMeasureModel& model);

// F*(df) for a radial f: f'(r) F*(dr) if f' >= 0, |f'(r)| F*(-dr) otherwise.
double fstar_of_radial(const RadialSpaceView& view, const RadialTestFunction& tf, double r);

// \int F*^p(df) dm and \int |f|^a r^b dm over r <= upper.
double gradient_moment(const RadialSpaceView& view, const RadialTestFunction& tf, double p,
                       double upper = std::numeric_limits<double>::infinity(),
                       const QuadratureSpec& spec = {});
double weighted_moment(const RadialSpaceView& view, const RadialTestFunction& tf, double a,
                       double b, double upper = std::numeric_limits<double>::infinity(),
                       const QuadratureSpec& spec = {});

struct QuotientParts {
  double numerator = 0.0;
  double denominator = 0.0;
  double quotient = 0.0;
};

QuotientParts hardy(const RadialSpaceView& view, const RadialTestFunction& tf,
                    const FunctionalParams& params, const QuadratureSpec& spec = {});
QuotientParts uncertainty(const RadialSpaceView& view, const RadialTestFunction& tf,
                          const FunctionalParams& params, const QuadratureSpec& spec = {});
QuotientParts ckn(const RadialSpaceView& view, const RadialTestFunction& tf,
                  const FunctionalParams& params, const QuadratureSpec& spec = {});
QuotientParts evaluate(FunctionalKind kind, const RadialSpaceView& view,
                       const RadialTestFunction& tf, const FunctionalParams& params,
                       const QuadratureSpec& spec = {});

double hardy_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                      const FunctionalParams& params);
double uncertainty_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                            const FunctionalParams& params);
double ckn_quotient(const RadialSpaceView& view, const RadialTestFunction& tf,
                    const FunctionalParams& params);

struct LowerBoundCheck {
  double quotient = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// CKN quotient on the Berwald ball against (s - 2)/(4m), s > 2.
LowerBoundCheck ckn_lower_bound_check(const RadialTestFunction& tf, const FunctionalParams& params);

struct DivergenceIdentity {
  double lhs = 0.0;  // \int |f|^m r^s Lap r + s \int |f|^m r^{s-1}
  double rhs = 0.0;  // -\int (|f|^m r^s)'
  double residual = 0.0;
};

// Radial form of the divergence identity on the Berwald ball, Lebesgue
// measure: both sides by independent quadratures.
DivergenceIdentity divergence_identity(const RadialTestFunction& tf, int n, double m, double s);
double divergence_identity_residual(const RadialTestFunction& tf, int n, double m, double s);

struct SeminormResult {
  double forward = 0.0;
  std::optional<double> backward;  // empty when DIVERGENT
  std::vector<double> ladder;      // backward truncations at R_k = 2^k
  bool backward_divergent() const { return !backward.has_value(); }
};

// Forward and backward W^{1,p} seminorms \int F*^p(+-df). The backward one is
// evaluated on r <= 2^k, k = 4..14, and reported DIVERGENT when the last
// truncation is >= 1.5x the third-to-last or a value is not finite.
SeminormResult sobolev_seminorms(const RadialSpaceView& view, const RadialTestFunction& tf,
                                 double p);

// Model-space quantities of the weak curvature criterion for v = stretched(iota, mu, p):
// numerator product (\int F*^p(dv))^{1/p} (\int |v|^a r^b)^{1/p'} and the
// small-ball lower bound I e^{-rho} eps^{n+varsigma} / 2 for \int |v|^rho r^varsigma.
double lemma_numerator_product(const RadialSpaceView& view, const RadialTestFunction& tf, double p,
                               double a, double b);
double lemma_denominator_bound(double angular_mass, int n, double rho, double varsigma,
                               double eps = 0.5);

}  // namespace finsler
