#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "finsler/berwald.hpp"
#include "finsler/core.hpp"
#include "finsler/error.hpp"
#include "finsler/experiments.hpp"
#include "finsler/funk.hpp"

namespace fs = std::filesystem;
using namespace finsler;

namespace {

Vec parse_vec(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParams, "cannot parse vector '" + text + "'");
    }
  }
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

struct Flags {
  std::string config, space, out, x, y, xi, v;
  double n = 0, p = 0, s = 0, m = 0, mu = 0, k = 0, C = 0;
  double iota_min = 0, iota_max = 0, iota = 0, tol = 0, T = 5;
  int iota_count = 0, steps = 1000;
  std::uint64_t seed = 0;
  bool serial = false;
};

// Config first, then every flag the user actually passed.
ExperimentSpec build_spec(const CLI::App& app, const Flags& f) {
  ExperimentSpec spec;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw Error(ErrorKind::IoError, "cannot read config " + f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidParams, std::string("bad config: ") + e.what());
    }
    spec = ExperimentSpec::from_json(j);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--space")) spec.space = f.space;
  if (given("--n")) spec.params.n = f.n;
  if (given("--p")) spec.params.p = f.p;
  if (given("--s")) spec.params.s = f.s;
  if (given("--m")) spec.params.m = f.m;
  if (given("--mu")) spec.mu = f.mu;
  if (given("--k")) spec.k = f.k;
  if (given("--C")) spec.C = f.C;
  if (given("--iota-min")) spec.iota_min = f.iota_min;
  if (given("--iota-max")) spec.iota_max = f.iota_max;
  if (given("--iota-count")) spec.iota_count = f.iota_count;
  if (given("--iota")) spec.iota = f.iota;
  if (given("--out")) spec.out = f.out;
  if (given("--tol")) spec.tol = f.tol;
  if (given("--seed")) spec.seed = f.seed;
  if (f.serial) spec.exec = Execution::serial;
  return spec;
}

// --out names either a .csv file or a directory.
std::pair<std::string, std::string> out_paths(const std::string& out, const std::string& stem) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
    const fs::path p(out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return {out, (p.parent_path() / (p.stem().string() + "_report.txt")).string()};
  }
  fs::create_directories(out);
  return {(fs::path(out) / (stem + ".csv")).string(),
          (fs::path(out) / (stem + "_report.txt")).string()};
}

int cmd_eval(const ExperimentSpec& spec, const Flags& f) {
  const int n = static_cast<int>(spec.params.n);
  const SpaceChoice choice = parse_space(spec.space, n, spec.k, spec.C, spec.norm);
  const auto space = choice.make_space(n);
  const Vec x = f.x.empty() ? Vec(Vec::Zero(n)) : parse_vec(f.x);
  if (x.size() != n) throw Error(ErrorKind::InvalidParams, "--x must have n components");
  space->require_inside(x);
  nlohmann::json j;
  j["space"] = space->name();
  j["x"] = vec_json(x);
  j["reversibility"] = reversibility_at(*space, x);
  if (choice.kind == "berwald") {
    j["dist_from_origin"] = berwald::dist_from_origin(x);
    j["dist_to_origin"] = berwald::dist_to_origin(x);
  } else if (choice.kind == "funk") {
    j["dist_from_origin"] = static_cast<const FunkSpace&>(*space).dist_from_origin(x);
  }
  if (!f.y.empty()) {
    const Vec y = parse_vec(f.y);
    if (y.size() != n) throw Error(ErrorKind::InvalidParams, "--y must have n components");
    j["y"] = vec_json(y);
    j["F"] = space->metric(x, y);
    j["F_reverse"] = space->metric(x, -y);
    j["legendre"] = vec_json(legendre(*space, x, y));
    const Mat gm = fundamental_tensor(*space, x, y);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < gm.rows(); ++i) rows.push_back(vec_json(gm.row(i).transpose()));
    j["fundamental_tensor"] = rows;
    j["geodesic_coeffs"] = vec_json(geodesic_coeffs(*space, x, y));
    if (auto sigma = space->measure_density(x)) j["s_curvature"] = s_curvature(*space, x, y);
    if (n >= 2) j["ricci"] = ricci(*space, x, y);
    if (!f.v.empty()) {
      const Vec v = parse_vec(f.v);
      if (v.size() != n) throw Error(ErrorKind::InvalidParams, "--v must have n components");
      j["flag_curvature"] = flag_curvature(*space, x, y, v);
    }
  }
  if (!f.xi.empty()) {
    const Vec xi = parse_vec(f.xi);
    if (xi.size() != n) throw Error(ErrorKind::InvalidParams, "--xi must have n components");
    j["xi"] = vec_json(xi);
    j["cometric"] = cometric(*space, x, xi);
    if (n <= 3) j["cometric_oracle"] = cometric_oracle(*space, x, xi);
    j["legendre_inverse"] = vec_json(legendre_inverse(*space, x, xi));
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_geodesic(const ExperimentSpec& spec, const Flags& f) {
  const int n = static_cast<int>(spec.params.n);
  const auto space = parse_space(spec.space, n, spec.k, spec.C, spec.norm).make_space(n);
  const Vec x = f.x.empty() ? Vec(Vec::Zero(n)) : parse_vec(f.x);
  if (f.y.empty()) throw Error(ErrorKind::InvalidParams, "geodesic needs --y");
  const Vec y = parse_vec(f.y);
  if (x.size() != n || y.size() != n)
    throw Error(ErrorKind::InvalidParams, "--x and --y must have n components");
  const auto path = geodesic_integrate(*space, x, y, f.T, f.steps);
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < n; ++i) csv << ",x" << i;
  for (int i = 0; i < n; ++i) csv << ",y" << i;
  csv << ",F\n";
  char buf[64];
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", f.T * static_cast<double>(k) / f.steps);
    csv << buf;
    for (int i = 0; i < n; ++i) std::snprintf(buf, sizeof buf, ",%.17g", path[k].base[i]), csv << buf;
    for (int i = 0; i < n; ++i) std::snprintf(buf, sizeof buf, ",%.17g", path[k].v[i]), csv << buf;
    std::snprintf(buf, sizeof buf, ",%.17g\n", space->metric(path[k].base, path[k].v));
    csv << buf;
  }
  if (spec.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(spec.out);
    if (!(out << csv.str())) throw Error(ErrorKind::IoError, "cannot write " + spec.out);
  }
  return 0;
}

int cmd_sweep(ExperimentSpec spec, const std::string& experiment) {
  spec.experiment = experiment;
  const ExperimentResult res = run(spec);
  const std::string report = render_report({res});
  std::cout << report;
  if (!spec.out.empty()) {
    const auto [csv, txt] = out_paths(spec.out, experiment);
    emit_csv(res, csv);
    emit_report({res}, txt);
    std::cout << "wrote " << csv << "\n";
  }
  return 0;
}

int cmd_verify(const ExperimentSpec& spec, bool full_report) {
  const VerifyReport rep = verify_suite(spec.seed, spec.exec);
  int passed = 0;
  for (const auto& c : rep.checks) {
    std::printf("%s %-22s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    passed += c.pass ? 1 : 0;
  }
  std::printf("%d/%zu checks passed in %.1f s\n", passed, rep.checks.size(), rep.seconds);
  if (!spec.out.empty()) {
    fs::create_directories(spec.out);
    emit_report(rep.results, (fs::path(spec.out) / "report.txt").string());
    int idx = 0;
    for (const auto& r : rep.results)
      if (!r.rows.empty())
        emit_csv(r, (fs::path(spec.out) / (std::to_string(idx++) + "_" + r.experiment + ".csv")).string());
  }
  if (full_report) {
    std::cout << "\n" << render_report(rep.results);
    return 0;
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler model spaces: pointwise queries, functional sweeps and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config {experiment, space, params, iota, out, seed}");
  app.add_option("--space", f.space, "berwald | euclidean | funk[:euclidean|:randers:b..|:ellipsoid:d..] | model:k,C");
  app.add_option("--n", f.n, "dimension");
  app.add_option("--p", f.p, "exponent p");
  app.add_option("--s", f.s, "weight exponent s");
  app.add_option("--m", f.m, "CKN exponent m");
  app.add_option("--mu", f.mu, "stretched-profile exponent mu");
  app.add_option("--k", f.k, "model curvature scale k");
  app.add_option("--C", f.C, "model constant C");
  app.add_option("--iota-min", f.iota_min, "smallest iota");
  app.add_option("--iota-max", f.iota_max, "largest iota");
  app.add_option("--iota-count", f.iota_count, "grid points");
  app.add_option("--iota", f.iota, "single iota (funk_exact, sobolev)");
  app.add_option("--out", f.out, "output file or directory");
  app.add_option("--tol", f.tol, "override the main tolerance of an experiment");
  app.add_option("--seed", f.seed, "sampling seed");
  app.add_flag("--serial", f.serial, "evaluate sweeps without OpenMP");

  auto* eval = app.add_subcommand("eval", "metric, co-metric and curvature at a point");
  eval->add_option("--x", f.x, "base point, comma separated");
  eval->add_option("--y", f.y, "tangent vector");
  eval->add_option("--xi", f.xi, "covector");
  eval->add_option("--v", f.v, "transverse edge of the flag");
  auto* geo = app.add_subcommand("geodesic", "integrate a geodesic, CSV to stdout or --out");
  geo->add_option("--x", f.x, "start point");
  geo->add_option("--y", f.y, "initial velocity")->required();
  geo->add_option("--T", f.T, "duration");
  geo->add_option("--steps", f.steps, "RK4 steps");
  std::string experiment;
  auto* sw = app.add_subcommand("sweep", "run one experiment");
  sw->add_option("experiment", experiment, "experiment id")
      ->required()
      ->check(CLI::IsMember(ExperimentSpec::experiment_ids()));
  auto* verify = app.add_subcommand("verify", "acceptance suite; exit status 1 if a check fails");
  auto* report = app.add_subcommand("report", "acceptance suite with the full per-experiment report");

  CLI11_PARSE(app, argc, argv);
  try {
    const ExperimentSpec spec = build_spec(app, f);
    if (*eval) return cmd_eval(spec, f);
    if (*geo) return cmd_geodesic(spec, f);
    if (*sw) return cmd_sweep(spec, experiment);
    if (*verify) return cmd_verify(spec, false);
    if (*report) return cmd_verify(spec, true);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
