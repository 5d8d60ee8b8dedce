#include "finsler/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "finsler/berwald.hpp"
#include "finsler/error.hpp"
#include "finsler/funk.hpp"

namespace finsler {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.6g", v); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParams, "cannot parse number '" + item + "' in '" + text + "'");
    }
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

int dim_of(const ExperimentSpec& spec) {
  const double n = spec.params.n;
  if (!(n >= 1) || n != std::floor(n) || n > 64)
    throw Error(ErrorKind::InvalidParams, "n must be a positive integer");
  return static_cast<int>(n);
}

double tol_or(const ExperimentSpec& spec, double fallback) { return spec.tol.value_or(fallback); }

// Seeded samplers shared by the curvature, quartic and geodesic experiments.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Vec gaussian(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal_(rng_);
    return v;
  }
  Vec unit(int n) {
    for (;;) {
      Vec v = gaussian(n);
      const double len = v.norm();
      if (len > 1e-3) return v / len;
    }
  }
  Vec in_ball(int n, double rmax) { return unit(n) * (rmax * uniform_(rng_)); }
  double uniform(double a, double b) { return a + (b - a) * uniform_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

void add_check(ExperimentResult& res, std::string name, bool pass, std::string detail) {
  res.checks.push_back({std::move(name), res.claim, pass, std::move(detail)});
}

void add_metric(ExperimentResult& res, std::string name, double value) {
  res.metrics.push_back({std::move(name), value});
}

FunctionalKind kind_of(const std::string& id) {
  if (id == "hardy") return FunctionalKind::hardy;
  if (id == "uncertainty") return FunctionalKind::uncertainty;
  return FunctionalKind::ckn;
}

// mu default for the model spaces: the midpoint of the admissible window.
double model_mu(const ExperimentSpec& spec, int n, double k, double C) {
  if (spec.mu) return *spec.mu;
  return k > 0 ? C - 0.5 : C - n + 0.5;
}

std::vector<SweepRow> rows_in(const std::vector<SweepRow>& rows, double lo, double hi) {
  std::vector<SweepRow> out;
  for (const auto& r : rows)
    if (r.iota >= lo * (1 - 1e-12) && r.iota <= hi * (1 + 1e-12)) out.push_back(r);
  return out;
}

bool strictly_decreasing(const std::vector<SweepRow>& rows) {
  // rows run from large to small iota
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].quotient < rows[i - 1].quotient)) return false;
  return true;
}

void decay_checks(ExperimentResult& res) {
  const auto& rows = res.rows;
  const double first = rows.front().quotient, last = rows.back().quotient;
  add_metric(res, "quotient_initial", first);
  add_metric(res, "quotient_final", last);
  add_check(res, "quotient strictly decreasing", strictly_decreasing(rows),
            g(first) + " -> " + g(last));
  add_check(res, "final quotient <= 0.1 x initial", last <= 0.1 * first,
            "ratio " + g(last / first));
}

// Hardy, uncertainty and CKN sweeps.
ExperimentResult run_functional(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  const FunctionalKind kind = kind_of(spec.experiment);
  const FunctionalParams params = spec.params;
  params.validate(kind);
  const SpaceChoice choice = parse_space(spec.space, n, spec.k, spec.C, spec.norm);
  const RadialSpaceView view = choice.view(n);

  ExperimentResult res;
  res.experiment = spec.experiment;
  res.space = choice.label;

  // Test family: u_iota except where the lemma family v_iota is needed.
  std::function<RadialTestFunction(double)> family;
  std::string family_name;
  if (choice.kind == "model") {
    const double mu = model_mu(spec, n, choice.model->k, choice.model->C);
    family = [mu, p = params.p](double iota) { return RadialTestFunction::stretched(iota, mu, p); };
    family_name = "stretched(mu=" + g(mu) + ")";
  } else if (kind == FunctionalKind::ckn && choice.kind == "berwald") {
    const double mu = spec.mu.value_or(1.5);
    family = [mu, p = params.p](double iota) { return RadialTestFunction::stretched(iota, mu, p); };
    family_name = "stretched(mu=" + g(mu) + ")";
  } else {
    family = [](double iota) { return RadialTestFunction::exp_decay(iota); };
    family_name = "exp_decay";
  }
  res.notes.push_back("test family " + family_name);

  switch (kind) {
    case FunctionalKind::hardy: res.claim = "L^p Hardy inequality fails"; break;
    case FunctionalKind::uncertainty: res.claim = "generalized uncertainty principle fails"; break;
    case FunctionalKind::ckn:
      if (params.s < 2) res.claim = "CKN inequality fails for s < 2";
      else if (params.s == 2) res.claim = "CKN denominator diverges like ln(1/iota) at s = 2";
      else res.claim = "CKN quotient >= (s-2)/(4m) for s > 2";
      break;
  }

  res.rows = sweep([&](double iota) { return evaluate(kind, view, family(iota), params); },
                   spec.iotas(), spec.exec);
  if (res.rows.size() >= 3) res.fit = fit_loglog_slope(res.rows);
  if (res.fit) {
    add_metric(res, "slope", res.fit->slope);
    add_metric(res, "r_squared", res.fit->r_squared);
  }
  if (res.rows.size() < 2) return res;

  if (kind == FunctionalKind::hardy) {
    const auto window = rows_in(res.rows, 1e-3, 1e-1);
    if (window.size() >= 3) {
      const double slope = fit_loglog_slope(window).slope;
      add_metric(res, "slope_1e-3_1e-1", slope);
      const double tol = tol_or(spec, 0.1);
      add_check(res, "slope on [1e-3, 1e-1] within " + g(tol) + " of p",
                std::abs(slope - params.p) <= tol, "slope " + fmt("%.4f", slope) + ", p " + g(params.p));
    }
    const auto low = rows_in(res.rows, 1e-4, 1e-2);
    if (low.size() >= 3) add_metric(res, "slope_1e-4_1e-2", fit_loglog_slope(low).slope);
    add_check(res, "quotient strictly decreasing", strictly_decreasing(res.rows),
              g(res.rows.front().quotient) + " -> " + g(res.rows.back().quotient));
    return res;
  }

  if (kind == FunctionalKind::ckn && choice.kind == "berwald" && params.s < 2) {
    // Power decay with exponent p(2-s)/(p+mu); too slow for a fixed decay ratio.
    const double mu = spec.mu.value_or(1.5);
    const double expected = params.p * (2 - params.s) / (params.p + mu);
    add_metric(res, "expected_exponent", expected);
    add_check(res, "quotient strictly decreasing", strictly_decreasing(res.rows),
              g(res.rows.front().quotient) + " -> " + g(res.rows.back().quotient));
    if (res.fit) {
      const double slope = res.fit->slope;
      const double lo = 0.7 * expected, hi = 1.3 * expected;
      add_check(res, "slope within [" + fmt("%.2f", lo) + ", " + fmt("%.2f", hi) + "]",
                slope >= lo && slope <= hi,
                "slope " + fmt("%.4f", slope) + ", exponent p(2-s)/(p+mu) = " + g(expected));
    }
    return res;
  }
  if (kind == FunctionalKind::uncertainty || params.s < 2 || choice.kind != "berwald") {
    decay_checks(res);
    return res;
  }

  if (params.s == 2) {
    // den ~ a ln(1/iota) + b: the local growth rate d den / d ln(1/iota) must settle.
    const double lo = res.rows.back().iota;
    const auto last = rows_in(res.rows, lo, 10 * lo);
    if (last.size() < 3) throw Error(ErrorKind::InsufficientData, "s = 2 check needs a full decade");
    std::vector<double> L, D;
    for (const auto& r : last) {
      L.push_back(std::log(1.0 / r.iota));
      D.push_back(r.denominator);
    }
    double mL = 0, mD = 0;
    for (std::size_t i = 0; i < L.size(); ++i) mL += L[i] / L.size(), mD += D[i] / L.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < L.size(); ++i) sxy += (L[i] - mL) * (D[i] - mD), sxx += (L[i] - mL) * (L[i] - mL);
    const double rate = sxy / sxx;
    double spread = 0, raw_lo = INFINITY, raw_hi = 0;
    for (std::size_t i = 1; i < L.size(); ++i)
      spread = std::max(spread, std::abs((D[i] - D[i - 1]) / (L[i] - L[i - 1]) / rate - 1.0));
    for (std::size_t i = 0; i < L.size(); ++i) {
      raw_lo = std::min(raw_lo, D[i] / L[i]);
      raw_hi = std::max(raw_hi, D[i] / L[i]);
    }
    add_metric(res, "log_growth_rate", rate);
    add_metric(res, "log_growth_spread", spread);
    add_metric(res, "den_over_log_min", raw_lo);
    add_metric(res, "den_over_log_max", raw_hi);
    bool increasing = true;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
      increasing = increasing && res.rows[i].denominator > res.rows[i - 1].denominator;
    const double tol = tol_or(spec, 0.2);
    add_check(res, "denominator increasing as iota -> 0", increasing,
              g(res.rows.front().denominator) + " -> " + g(res.rows.back().denominator));
    add_check(res, "d den / d ln(1/iota) stable within " + g(100 * tol) + "% over the last decade",
              rate > 0 && spread <= tol,
              "rate " + g(rate) + ", max deviation " + fmt("%.1f%%", 100 * spread) +
                  "; den/ln(1/iota) " + g(raw_lo) + ".." + g(raw_hi));
    return res;
  }

  // s > 2: the lower bound on the sweep family and on the remaining shipped profiles.
  const double bound = (params.s - 2.0) / (4.0 * params.m);
  add_metric(res, "bound", bound);
  double worst = INFINITY;
  for (const auto& r : res.rows) worst = std::min(worst, r.quotient);
  std::vector<std::pair<std::string, RadialTestFunction>> extra = {
      {"exp_decay(0.5)", RadialTestFunction::exp_decay(0.5)},
      {"exp_decay(0.01)", RadialTestFunction::exp_decay(0.01)},
      {"bump(1)", RadialTestFunction::bump(1.0)},
      {"bump(5)", RadialTestFunction::bump(5.0)},
      {"gaussian", RadialTestFunction::gaussian()},
      {"model_power(0.1)", RadialTestFunction::model_power(0.1, params.s, params.p, params.m)},
      {"model_power(1)", RadialTestFunction::model_power(1.0, params.s, params.p, params.m)},
  };
  std::string worst_name = family_name;
  for (const auto& [name, tf] : extra) {
    const double q = ckn_lower_bound_check(tf, params).quotient;
    add_metric(res, "quotient " + name, q);
    if (q < worst) worst = q, worst_name = name;
  }
  add_metric(res, "min_quotient", worst);
  add_check(res, "quotient >= (s-2)/(4m) on every shipped profile", worst >= bound - 1e-9,
            "min " + g(worst) + " (" + worst_name + ") vs bound " + g(bound));
  const double r1 = divergence_identity(RadialTestFunction::bump(1.0), 2, params.m, params.s).residual;
  const double r2 = divergence_identity(RadialTestFunction::gaussian(), 3, params.m, params.s).residual;
  const DivergenceIdentity d3 = divergence_identity(RadialTestFunction::bump(3.0), n, params.m, params.s);
  const double worst_res = std::max({r1, r2, d3.residual / std::max(1.0, std::abs(d3.lhs))});
  add_metric(res, "divergence_residual", worst_res);
  add_check(res, "divergence identity residual <= 1e-6", worst_res <= 1e-6, "max " + g(worst_res));
  return res;
}

ExperimentResult run_sobolev(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  const double p = spec.params.p;
  const SpaceChoice choice = parse_space(spec.space, n, spec.k, spec.C, spec.norm);
  ExperimentResult res;
  res.experiment = "sobolev";
  res.space = choice.label;
  res.claim = "W^{1,p} is not a vector space: backward seminorm diverges";
  if (choice.kind == "berwald") {
    const SeminormResult sn = sobolev_seminorms(choice.view(n), RadialTestFunction::log_power(n), p);
    const double bound = unit_ball_volume(n) * std::pow(2.0, -p) * std::pow(n, -p) *
                         std::pow(std::log(2.0), -p / n - p);
    add_metric(res, "forward", sn.forward);
    add_metric(res, "forward_bound", bound);
    add_check(res, "forward seminorm of w <= explicit bound", sn.forward <= bound,
              g(sn.forward) + " <= " + g(bound));
    add_check(res, "backward seminorm of w DIVERGENT", sn.backward_divergent(),
              "last truncation " + g(sn.ladder.back()));
    return res;
  }
  if (choice.kind != "funk")
    throw Error(ErrorKind::InvalidParams, "sobolev runs on berwald or funk spaces");
  const double iota = spec.iota.value_or(0.1);
  res.notes.push_back("u_iota with iota = " + g(iota) + ", p(iota-1)+1 = " + g(p * (iota - 1) + 1));
  const RadialSpaceView view = choice.view(n);
  const RadialTestFunction u = RadialTestFunction::exp_decay(iota);
  const SeminormResult sn = sobolev_seminorms(view, u, p);
  const double exact = funk::sobolev_gradient_exact(n, p, iota);
  add_metric(res, "forward", sn.forward);
  add_metric(res, "forward_exact", exact);
  add_check(res, "forward seminorm matches the exact value",
            std::abs(sn.forward / exact - 1) <= 1e-8, g(sn.forward) + " vs " + g(exact));
  const bool expect_divergent = p * (iota - 1) + 1 < 0;
  // Truncations {phi < 1 - delta}: r < -ln(delta).
  std::vector<double> ladder;
  const RadialTestFunction back = u.negated();
  for (int j = 0; j <= 6; ++j) {
    const double delta = 1e-3 * std::ldexp(1.0, -j);
    ladder.push_back(integrate(
        [&](double r) { return std::pow(fstar_of_radial(view, back, r), p) * view.polar_density(r); },
        0.0, -std::log(delta), {1e-10, 1e-14, 4000}));
  }
  double min_growth = INFINITY;
  for (std::size_t i = 1; i < ladder.size(); ++i) min_growth = std::min(min_growth, ladder[i] / ladder[i - 1]);
  add_metric(res, "delta_halving_min_growth", min_growth);
  if (expect_divergent) {
    add_check(res, "backward seminorm DIVERGENT", sn.backward_divergent(),
              sn.backward_divergent() ? "DIVERGENT" : "finite " + g(*sn.backward));
    add_check(res, "value at delta/2 >= 1.5 x value at delta (delta <= 1e-3)", min_growth >= 1.5,
              "min growth " + g(min_growth));
  } else {
    add_check(res, "backward seminorm finite", !sn.backward_divergent(),
              sn.backward ? g(*sn.backward) : "DIVERGENT");
  }
  return res;
}

ExperimentResult run_curvature(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  const SpaceChoice choice = parse_space(spec.space, n, spec.k, spec.C, spec.norm);
  auto space = choice.make_space(n);
  ExperimentResult res;
  res.experiment = "curvature";
  res.space = choice.label;
  Sampler rng(spec.seed);
  const int flags = 200;
  const bool berwald = choice.kind == "berwald";
  const bool funk = choice.kind == "funk";
  const double target = funk ? -0.25 : 0.0;
  res.claim = funk ? "constant flag curvature -1/4 and S = (n+1)F/2"
                   : berwald ? "flat: K = 0 and S(grad r) = (n+1)/(1+r)" : "flat Minkowski space";
  if (n < 2) throw Error(ErrorKind::InvalidParams, "flag curvature needs n >= 2");
  double sum = 0, worst = 0;
  for (int i = 0; i < flags;) {
    const Vec x = funk ? Vec(rng.in_ball(n, 0.8)) : berwald ? Vec(rng.in_ball(n, 0.8)) : rng.gaussian(n);
    if (funk && !space->contains(x)) continue;
    const Vec y = rng.gaussian(n), v = rng.gaussian(n);
    double K;
    try {
      K = flag_curvature(*space, x, y, v);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateFlag) continue;
      throw;
    }
    sum += K;
    worst = std::max(worst, std::abs(K - target));
    ++i;
  }
  const double mean = sum / flags;
  add_metric(res, "flags", flags);
  add_metric(res, "mean_K", mean);
  add_metric(res, "max_abs_K_minus_target", worst);
  const double tol = tol_or(spec, funk ? 1e-3 : 1e-4);
  add_check(res, "K = " + g(target) + " +- " + g(tol) + " on " + std::to_string(flags) + " flags",
            worst <= tol, "mean " + fmt("%.8f", mean) + ", max deviation " + g(worst));

  // S-curvature.
  double s_worst = 0;
  const int samples = 100;
  for (int i = 0; i < samples;) {
    if (funk) {
      const Vec x = rng.in_ball(n, 0.8);
      if (!space->contains(x)) continue;
      const Vec y = rng.gaussian(n);
      const double ratio = s_curvature(*space, x, y) / space->metric(x, y);
      s_worst = std::max(s_worst, std::abs(ratio - (n + 1) / 2.0));
    } else if (berwald) {
      const Vec x = rng.in_ball(n, 0.8);
      if (x.norm() < 1e-2) continue;
      const double r = berwald::dist_from_origin(x);
      const double ratio = s_curvature(*space, x, berwald::grad_r(x)) * (1 + r) / (n + 1);
      s_worst = std::max(s_worst, std::abs(ratio - 1));
    } else {
      s_worst = std::max(s_worst, std::abs(s_curvature(*space, rng.gaussian(n), rng.gaussian(n))));
    }
    ++i;
  }
  add_metric(res, "s_curvature_max_deviation", s_worst);
  const std::string s_name = funk ? "S/F = (n+1)/2 +- 1e-4"
                                  : berwald ? "S(grad r)(1+r)/(n+1) = 1 +- 1e-4" : "S = 0 +- 1e-4";
  add_check(res, s_name, s_worst <= 1e-4, "max deviation " + g(s_worst));
  return res;
}

ExperimentResult run_quartic(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  if (n < 2 || n > 3) throw Error(ErrorKind::InvalidParams, "quartic experiment needs n in {2, 3}");
  const BerwaldSpace space(n);
  ExperimentResult res;
  res.experiment = "quartic";
  res.space = "berwald";
  res.claim = "co-metric solves the quartic; B*(dr) = 1";
  Sampler rng(spec.seed);
  const int samples = 1000;
  double max_res = 0, max_dev = 0;
  int multi = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec x = rng.in_ball(n, 0.9);
    const Vec xi = rng.gaussian(n);
    const berwald::QuarticRoot q = berwald::cometric_quartic_detailed(x, xi);
    max_res = std::max(max_res, q.residual);
    const double oracle = cometric_oracle(space, x, xi);
    max_dev = std::max(max_dev, std::abs(q.value - oracle) / oracle);
    if (q.admissible_roots > 1) ++multi;
  }
  double radial = 0, neg = 0;
  for (int i = 1; i <= 9; ++i) {
    const Vec x = rng.unit(n) * (0.1 * i);
    radial = std::max(radial, std::abs(berwald::cometric_quartic(x, berwald::dr_covector(x)) - 1.0));
    const double r = berwald::dist_from_origin(x);
    neg = std::max(neg, std::abs(berwald::cometric_quartic(x, -berwald::dr_covector(x)) /
                                     berwald::cometric_neg_radial(r) - 1.0));
  }
  add_metric(res, "samples", samples);
  add_metric(res, "max_scaled_residual", max_res);
  add_metric(res, "max_oracle_deviation", max_dev);
  add_metric(res, "samples_with_several_admissible_roots", multi);
  add_metric(res, "radial_max_error", radial);
  add_metric(res, "neg_radial_max_rel_error", neg);
  add_check(res, "scaled residual <= 1e-9", max_res <= tol_or(spec, 1e-9), "max " + g(max_res));
  add_check(res, "relative deviation from sup oracle <= 1e-5", max_dev <= 1e-5, "max " + g(max_dev));
  add_check(res, "B*(x, dr) = 1 within 1e-9 on |x| = 0.1..0.9", radial <= 1e-9, "max " + g(radial));
  add_check(res, "B*(x, -dr) = (1+2r)^2 within 1e-8", neg <= 1e-8, "max " + g(neg));
  res.notes.push_back(std::to_string(multi) + " of " + std::to_string(samples) +
                      " samples had more than one admissible root");
  return res;
}

ExperimentResult run_geodesic(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  const SpaceChoice choice = parse_space(spec.space, n, spec.k, spec.C, spec.norm);
  if (choice.kind != "berwald" && choice.kind != "funk")
    throw Error(ErrorKind::InvalidParams, "geodesic runs on berwald or funk spaces");
  auto space = choice.make_space(n);
  const bool berwald = choice.kind == "berwald";
  ExperimentResult res;
  res.experiment = "geodesic";
  res.space = choice.label;
  res.claim = berwald ? "d(0,x) = |x|/(1-|x|) along straight geodesics"
                      : "d(0,x) = -ln(1-phi(x)) along straight geodesics";
  Sampler rng(spec.seed);
  double len_err = 0, end_err = 0;
  for (int i = 1; i <= 9; ++i) {
    const Vec u = rng.unit(n);
    Vec x;
    double d;
    if (berwald) {
      x = u * (0.1 * i);
      d = berwald::dist_from_origin(x);
    } else {
      const auto& funk_space = static_cast<const FunkSpace&>(*space);
      x = u * (0.1 * i / funk_space.norm().eval(u));
      d = funk_space.dist_from_origin(x);
    }
    const double len = integrate([&](double t) { return space->metric(t * x, x); }, 0.0, 1.0,
                                 {1e-13, 1e-15, 2000});
    len_err = std::max(len_err, std::abs(len - d));
    // Unit-speed geodesic from the origin reaches x at time d.
    const Vec y0 = u / space->metric(Vec::Zero(n), u);
    const auto path = geodesic_integrate(*space, Vec::Zero(n), y0, d, 20000);
    end_err = std::max(end_err, (path.back().base - x).norm());
  }
  add_metric(res, "max_length_error", len_err);
  add_metric(res, "max_endpoint_error", end_err);
  add_check(res, "segment length = d(0,x) within 1e-8 for |x| = 0.1..0.9",
            len_err <= tol_or(spec, 1e-8), "max " + g(len_err));
  add_check(res, "unit-speed geodesic reaches x at time d(0,x) (1e-6)", end_err <= 1e-6,
            "max " + g(end_err));
  return res;
}

ExperimentResult run_funk_exact(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.experiment = "funk_exact";
  res.space = "funk";
  res.claim = "exact W^{1,p} integrals of u_iota on Funk spaces";
  struct Case {
    int n;
    double p, iota;
  };
  std::vector<Case> cases;
  if (spec.iota) {
    cases.push_back({dim_of(spec), spec.params.p, *spec.iota});
  } else {
    for (int n : {2, 3, 4})
      for (double p : {1.5, 2.0, 3.0})
        for (double iota : {0.25, 0.5, 1.0}) cases.push_back({n, p, iota});
  }
  const auto errs = parallel_map<std::pair<double, double>>(
      cases.size(),
      [&](std::size_t i) {
        const auto [n, p, iota] = cases[i];
        const double lp = funk::sobolev_lp_exact(n, p, iota);
        const double gr = funk::sobolev_gradient_exact(n, p, iota);
        const double lp_t = funk::radial_integral(
            [&](double t) { return std::pow(1 - t, iota * p); }, funk::RadialVariant::t, n);
        const RadialSpaceView view = funk_view(n);
        const RadialTestFunction u = RadialTestFunction::exp_decay(iota);
        const double lp_r = weighted_moment(view, u, p, 0.0);
        const double gr_r = gradient_moment(view, u, p);
        const double e_lp = std::max(std::abs(lp_t / lp - 1), std::abs(lp_r / lp - 1));
        return std::make_pair(e_lp, std::abs(gr_r / gr - 1));
      },
      spec.exec);
  double worst = 0;
  for (const auto& [a, b] : errs) worst = std::max({worst, a, b});
  add_metric(res, "cases", static_cast<double>(cases.size()));
  add_metric(res, "max_rel_error", worst);
  const double tol = tol_or(spec, 1e-10);
  add_check(res, "quadrature = closed forms within " + g(tol) + " rel. on " +
                     std::to_string(cases.size()) + " (n,p,iota) cases",
            worst <= tol, "max " + g(worst));
  const Case spot = spec.iota ? cases.front() : Case{2, 2.0, 0.5};
  const RadialSpaceView view = funk_view(spot.n);
  const RadialTestFunction u = RadialTestFunction::exp_decay(spot.iota);
  const double lp = weighted_moment(view, u, spot.p, 0.0);
  const double gr = gradient_moment(view, u, spot.p);
  add_metric(res, "spot_lp", lp);
  add_metric(res, "spot_lp_exact", funk::sobolev_lp_exact(spot.n, spot.p, spot.iota));
  add_metric(res, "spot_gradient", gr);
  add_metric(res, "spot_gradient_exact", funk::sobolev_gradient_exact(spot.n, spot.p, spot.iota));
  if (!spec.iota) {
    const double e1 = std::abs(lp / (M_PI / 3) - 1), e2 = std::abs(gr / (M_PI / 12) - 1);
    add_check(res, "spot values pi/3 and pi/12 at (n,p,iota) = (2,2,0.5)",
              std::max(e1, e2) <= tol, fmt("%.15f", lp) + ", " + fmt("%.15f", gr));
  }
  return res;
}

ExperimentResult run_model5(const ExperimentSpec& spec) {
  const int n = dim_of(spec);
  const SpaceChoice choice =
      parse_space(spec.space.rfind("model", 0) == 0 ? spec.space : "model", n, spec.k, spec.C);
  const double k = choice.model->k, C = choice.model->C, p = spec.params.p, s = spec.params.s;
  if (k < 0) throw Error(ErrorKind::InvalidParams, "model5 needs k >= 0");
  if (k > 0 && !(C > 1)) throw Error(ErrorKind::InvalidParams, "model5 with k > 0 needs C > 1");
  if (k == 0 && !(C >= n)) throw Error(ErrorKind::InvalidParams, "model5 with k = 0 needs C >= n");
  const double mu = model_mu(spec, n, k, C);
  const bool mu_ok = k > 0 ? (C - 1 < mu && mu < C) : (C - n < mu && mu < C - n + 1);
  if (!mu_ok) throw Error(ErrorKind::InvalidParams, "mu outside its admissible window for (k, C)");
  const double q = p / (p - 1);
  const double a = p, b = q * s;
  const bool b_ok = k > 0 ? (-n < b && b < q * C) : (b < q * (C - n + 1));
  if (!b_ok)
    throw Error(ErrorKind::InvalidParams, "b = p's = " + g(b) + " outside its window for (k, C)");
  const double iota_cap = std::min(1.0 / a, 1.0 / p);
  if (!(spec.iota_max < iota_cap))
    throw Error(ErrorKind::InvalidParams, "iota must stay below min(1/a, 1/p) = " + g(iota_cap));

  const RadialMeasureModel& model = *choice.model;
  const RadialSpaceView view = model_view(model);
  const double rho = p, vs = s - 1;
  const double bound = lemma_denominator_bound(model.mass(), n, rho, vs, 0.5);

  ExperimentResult res;
  res.experiment = "model5";
  res.space = view.name;
  res.claim = "weak curvature criterion: numerator product -> 0, denominator bounded below";
  res.notes.push_back("v_iota = stretched(iota, mu = " + g(mu) + ", p), a = " + g(a) + ", b = " + g(b));
  res.rows = sweep(
      [&](double iota) {
        const RadialTestFunction v = RadialTestFunction::stretched(iota, mu, p);
        const double num = lemma_numerator_product(view, v, p, a, b);
        const double den = weighted_moment(view, v, rho, vs);
        return QuotientParts{num, den, num / den};
      },
      spec.iotas(), spec.exec);
  res.fit = fit_loglog_slope(res.rows);
  add_metric(res, "slope", res.fit->slope);
  add_metric(res, "denominator_bound", bound);
  const double first = res.rows.front().numerator, last = res.rows.back().numerator;
  double min_den = INFINITY;
  for (const auto& r : res.rows) min_den = std::min(min_den, r.denominator);
  add_metric(res, "numerator_initial", first);
  add_metric(res, "numerator_final", last);
  add_metric(res, "min_denominator", min_den);
  add_check(res, "numerator product final <= 0.1 x initial", last <= 0.1 * first,
            g(first) + " -> " + g(last));
  add_check(res, "denominator >= small-ball bound (eps = 0.5)", min_den >= bound,
            "min " + g(min_den) + " vs " + g(bound));
  bool monotone = true;
  double prev = INFINITY;
  for (int i = 1; i <= 200; ++i) {
    const double r = 0.05 * i;
    const double h = comparison_ratio(model, r);
    monotone = monotone && h <= prev * (1 + 1e-12);
    prev = h;
  }
  add_check(res, "comparison ratio nonincreasing on r in (0, 10]", monotone, "last " + g(prev));
  return res;
}

}  // namespace

const std::vector<std::string>& ExperimentSpec::experiment_ids() {
  static const std::vector<std::string> ids = {"hardy",     "uncertainty", "ckn",
                                               "sobolev",   "curvature",   "quartic",
                                               "geodesic",  "funk_exact",  "model5"};
  return ids;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  try {
    if (j.contains("experiment")) spec.experiment = j.at("experiment").get<std::string>();
    if (j.contains("space")) {
      const auto& sp = j.at("space");
      if (sp.is_string()) {
        spec.space = sp.get<std::string>();
      } else if (sp.is_object() && sp.contains("funk")) {
        spec.space = "funk";
        spec.norm = sp.at("funk");
      } else {
        throw Error(ErrorKind::InvalidParams, "space must be a string or {\"funk\": <norm>}");
      }
    }
    if (j.contains("norm")) spec.norm = j.at("norm");
    if (j.contains("params")) {
      const auto& p = j.at("params");
      if (p.contains("n")) spec.params.n = p.at("n").get<double>();
      if (p.contains("p")) spec.params.p = p.at("p").get<double>();
      if (p.contains("s")) spec.params.s = p.at("s").get<double>();
      if (p.contains("m")) spec.params.m = p.at("m").get<double>();
      if (p.contains("mu")) spec.mu = p.at("mu").get<double>();
      if (p.contains("k")) spec.k = p.at("k").get<double>();
      if (p.contains("C")) spec.C = p.at("C").get<double>();
    }
    if (j.contains("iota")) {
      const auto& i = j.at("iota");
      if (i.is_number()) {
        spec.iota = i.get<double>();
      } else {
        if (i.contains("min")) spec.iota_min = i.at("min").get<double>();
        if (i.contains("max")) spec.iota_max = i.at("max").get<double>();
        if (i.contains("count")) spec.iota_count = i.at("count").get<int>();
      }
    }
    if (j.contains("out")) spec.out = j.at("out").get<std::string>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tol")) spec.tol = j.at("tol").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParams, std::string("bad config: ") + e.what());
  }
  return spec;
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["space"] = space;
  if (norm) j["norm"] = *norm;
  j["params"] = {{"n", params.n}, {"p", params.p}, {"s", params.s}, {"m", params.m},
                 {"k", k},        {"C", C}};
  if (mu) j["params"]["mu"] = *mu;
  j["iota"] = {{"min", iota_min}, {"max", iota_max}, {"count", iota_count}};
  if (iota) j["iota"]["value"] = *iota;
  j["out"] = out;
  j["seed"] = seed;
  if (tol) j["tol"] = *tol;
  return j;
}

void ExperimentSpec::validate() const {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
    throw Error(ErrorKind::InvalidParams, "unknown experiment '" + experiment + "'");
  if (!(iota_min > 0) || !(iota_max >= iota_min) || iota_count < 1)
    throw Error(ErrorKind::InvalidParams, "iota grid needs 0 < min <= max and count >= 1");
  if (iota && !(*iota > 0)) throw Error(ErrorKind::InvalidParams, "iota must be positive");
  if (tol && !(*tol > 0)) throw Error(ErrorKind::InvalidParams, "tol must be positive");
  if (experiment == "hardy") params.validate(FunctionalKind::hardy);
  if (experiment == "uncertainty") params.validate(FunctionalKind::uncertainty);
  if (experiment == "ckn") params.validate(FunctionalKind::ckn);
}

double ExperimentResult::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m.value;
  throw Error(ErrorKind::InvalidParams, "no metric '" + name + "' in " + experiment);
}

bool ExperimentResult::has_metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return true;
  return false;
}

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::unique_ptr<FinslerSpace> SpaceChoice::make_space(int n) const {
  if (kind == "berwald") return std::make_unique<BerwaldSpace>(n);
  if (kind == "funk") return std::make_unique<FunkSpace>(*norm);
  if (kind == "euclidean") return std::make_unique<MinkowskiSpace>(MinkowskiNorm::euclidean(n));
  throw Error(ErrorKind::InvalidParams, label + " is a radial measure model, not a metric space");
}

RadialSpaceView SpaceChoice::view(int n) const {
  if (kind == "berwald") return berwald_view(n);
  if (kind == "funk") return funk_view(n, norm->is_symmetric());
  if (kind == "euclidean") return euclidean_view(n);
  return model_view(*model);
}

SpaceChoice parse_space(const std::string& text, int n, double k, double C,
                        const std::optional<nlohmann::json>& norm) {
  SpaceChoice out;
  out.label = text;
  if (text == "berwald" || text == "euclidean") {
    if (text == "berwald" && n < 2) throw Error(ErrorKind::InvalidParams, "berwald needs n >= 2");
    out.kind = text;
    return out;
  }
  if (text.rfind("funk", 0) == 0) {
    out.kind = "funk";
    const std::string rest = text.size() > 4 ? text.substr(5) : "";
    if (text.size() > 4 && text[4] != ':')
      throw Error(ErrorKind::InvalidParams, "unknown space '" + text + "'");
    if (norm && rest.empty()) {
      out.norm = MinkowskiNorm::from_json(*norm, n);
    } else if (rest.empty() || rest == "euclidean") {
      out.norm = MinkowskiNorm::euclidean(n);
    } else if (rest.rfind("randers:", 0) == 0) {
      out.norm = MinkowskiNorm::randers(to_vec(parse_list(rest.substr(8))));
    } else if (rest.rfind("ellipsoid:", 0) == 0) {
      out.norm = MinkowskiNorm::ellipsoid(to_vec(parse_list(rest.substr(10))).asDiagonal());
    } else {
      throw Error(ErrorKind::InvalidParams, "unknown Funk body '" + rest + "'");
    }
    if (out.norm->dim() != n)
      throw Error(ErrorKind::InvalidParams, "Funk body has dimension " +
                                                std::to_string(out.norm->dim()) + " but n = " +
                                                std::to_string(n));
    out.label = "funk:" + out.norm->describe();
    return out;
  }
  if (text.rfind("model", 0) == 0) {
    out.kind = "model";
    if (text.size() > 5) {
      if (text[5] != ':') throw Error(ErrorKind::InvalidParams, "unknown space '" + text + "'");
      const auto kc = parse_list(text.substr(6));
      if (kc.size() != 2) throw Error(ErrorKind::InvalidParams, "model space needs model:k,C");
      k = kc[0];
      C = kc[1];
    }
    if (k < 0) throw Error(ErrorKind::InvalidParams, "model space needs k >= 0");
    out.model = RadialMeasureModel::make(n, k, C);
    out.label = "model:" + g(k) + "," + g(C);
    return out;
  }
  throw Error(ErrorKind::InvalidParams, "unknown space '" + text + "'");
}

ExperimentResult run(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  const std::string& id = spec.experiment;
  if (id == "hardy" || id == "uncertainty" || id == "ckn") res = run_functional(spec);
  else if (id == "sobolev") res = run_sobolev(spec);
  else if (id == "curvature") res = run_curvature(spec);
  else if (id == "quartic") res = run_quartic(spec);
  else if (id == "geodesic") res = run_geodesic(spec);
  else if (id == "funk_exact") res = run_funk_exact(spec);
  else res = run_model5(spec);
  return res;
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << "iota,numerator,denominator,quotient\n";
  char buf[160];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.iota, r.numerator,
                  r.denominator, r.quotient);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);

  std::string stem = path;
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
    stem.erase(dot);
  const std::string file = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  const std::string png = file.substr(0, file.rfind('.')) + ".png";
  std::ofstream gp(stem + ".gp");
  if (!gp) throw Error(ErrorKind::IoError, "cannot open " + stem + ".gp for writing");
  gp << "# " << result.experiment << " on " << result.space << "\n"
     << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'iota'\n"
     << "set ylabel 'quotient'\n"
     << "set key top left\n"
     << "set terminal pngcairo size 800,600\n"
     << "set output '" << png << "'\n";
  if (result.fit) {
    char line[160];
    std::snprintf(line, sizeof line, "fit_line(x) = exp(%.17g) * x**%.17g\n", result.fit->intercept,
                  result.fit->slope);
    gp << line
       << "plot '" << file << "' skip 1 using 1:4 with linespoints title 'quotient', \\\n"
       << "     fit_line(x) with lines dashtype 2 title sprintf('slope %.3f', "
       << fmt("%.17g", result.fit->slope) << ")\n";
  } else {
    gp << "plot '" << file << "' skip 1 using 1:4 with linespoints title 'quotient'\n";
  }
  if (!gp) throw Error(ErrorKind::IoError, "failed writing " + stem + ".gp");
}

std::string render_report(const std::vector<ExperimentResult>& results) {
  std::ostringstream out;
  for (const auto& r : results) {
    out << "== " << r.experiment << " on " << r.space << " ==\n";
    out << "claim: " << r.claim << "\n";
    for (const auto& n : r.notes) out << "note: " << n << "\n";
    if (!r.rows.empty()) out << "rows: " << r.rows.size() << "\n";
    for (const auto& m : r.metrics) out << "  " << m.name << " = " << fmt("%.10g", m.value) << "\n";
    for (const auto& c : r.checks)
      out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
    out << "result: " << (r.passed() ? "PASS" : "FAIL") << "\n\n";
  }
  return out.str();
}

void emit_report(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << render_report(results);
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

VerifyReport verify_suite(std::uint64_t seed, Execution exec) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  auto make = [&](const std::string& id, const std::string& space, double n, double p, double s,
                  double m) {
    ExperimentSpec spec;
    spec.experiment = id;
    spec.space = space;
    spec.params = {n, p, s, m};
    spec.seed = seed;
    spec.exec = exec;
    return spec;
  };
  auto criterion = [&](std::string name, std::vector<ExperimentSpec> specs) {
    Check c;
    c.name = std::move(name);
    c.pass = true;
    std::vector<std::string> parts;
    for (const auto& spec : specs) {
      ExperimentResult r;
      try {
        r = run(spec);
      } catch (const Error& e) {
        r.experiment = spec.experiment;
        r.space = spec.space;
        r.checks.push_back({"runs without error", "", false, e.what()});
      }
      if (c.claim.empty()) c.claim = r.claim;
      for (const auto& ch : r.checks) {
        c.pass = c.pass && ch.pass;
        parts.push_back(std::string(ch.pass ? "ok" : "FAILED") + " " + ch.name + " (" + ch.detail + ")");
      }
      report.results.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) c.detail += (i ? "; " : "") + parts[i];
    report.checks.push_back(std::move(c));
  };

  criterion("berwald_distances", {make("geodesic", "berwald", 2, 2, 1, 3)});
  criterion("quartic_cometric", {make("quartic", "berwald", 2, 2, 1, 3)});
  criterion("curvature_constants", {make("curvature", "berwald", 3, 2, 1, 3),
                                    make("curvature", "funk", 2, 2, 1, 3),
                                    make("curvature", "funk", 3, 2, 1, 3)});
  // The curvature runs also carry the S-curvature checks; split them out.
  {
    Check& k = report.checks.back();
    Check s{"s_curvature", "S-curvature closed forms", true, ""};
    Check kk{k.name, k.claim, true, ""};
    const std::size_t base = report.results.size() - 3;
    for (std::size_t i = base; i < report.results.size(); ++i) {
      const auto& r = report.results[i];
      for (const auto& ch : r.checks) {
        Check& dst = ch.name.rfind("S", 0) == 0 ? s : kk;
        dst.pass = dst.pass && ch.pass;
        dst.detail += (dst.detail.empty() ? "" : "; ") + r.space + ": " + ch.name + " (" + ch.detail + ")";
      }
    }
    k = kk;
    report.checks.push_back(s);
  }
  criterion("funk_exact_sobolev", {make("funk_exact", "funk", 2, 2, 1, 3)});
  criterion("hardy_failure", {make("hardy", "berwald", 3, 2, 1, 3)});
  criterion("uncertainty_failure", {make("uncertainty", "berwald", 3, 2, 1, 3)});
  criterion("ckn_threshold", {make("ckn", "berwald", 3, 2, 1.5, 3), make("ckn", "berwald", 3, 2, 2, 3),
                              make("ckn", "berwald", 3, 2, 2.5, 3)});
  criterion("funk_ckn_failure", {make("ckn", "funk", 3, 2, 1, 3)});
  {
    auto funk = make("sobolev", "funk", 3, 2, 1, 3);
    funk.iota = 0.1;
    criterion("sobolev_nonlinearity", {make("sobolev", "berwald", 2, 2, 1, 3), funk});
  }
  {
    const auto a = make("model5", "model:1,2", 3, 2, 0, 3);
    const auto b = make("model5", "model:0,3", 3, 2, 0, 3);
    criterion("weak_curvature_model", {a, b});
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace finsler
