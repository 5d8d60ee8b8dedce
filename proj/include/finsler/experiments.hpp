#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "finsler/core.hpp"
#include "finsler/functionals.hpp"
#include "finsler/sweep.hpp"

namespace finsler {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct ExperimentSpec {
  std::string experiment = "hardy";
  // berwald | euclidean | funk | funk:euclidean | funk:randers:b1,b2[,b3] |
  // funk:ellipsoid:d1,d2[,d3] | model:k,C
  std::string space = "berwald";
  std::optional<nlohmann::json> norm;  // explicit Funk body from a config file
  FunctionalParams params;
  std::optional<double> mu;
  double k = 1.0;
  double C = 2.0;
  double iota_min = 1e-4;
  double iota_max = 1e-1;
  int iota_count = 13;
  std::optional<double> iota;  // single value (funk_exact, sobolev)
  std::string out;
  std::optional<double> tol;
  std::uint64_t seed = kDefaultSeed;
  Execution exec = Execution::parallel;

  static const std::vector<std::string>& experiment_ids();
  // {experiment, space, params:{n,p,s,m,mu,k,C}, iota:{min,max,count}, out, seed}
  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  std::vector<double> iotas() const { return iota_grid(iota_min, iota_max, iota_count); }
};

struct Metric {
  std::string name;
  double value = 0.0;
};

struct Check {
  std::string name;
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::string space;
  std::string claim;
  std::vector<SweepRow> rows;
  std::optional<SlopeFit> fit;
  std::vector<Metric> metrics;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  double metric(const std::string& name) const;
  bool has_metric(const std::string& name) const;
  bool passed() const;
};

// A parsed space argument.
struct SpaceChoice {
  std::string kind;  // berwald | euclidean | funk | model
  std::string label;
  std::optional<MinkowskiNorm> norm;
  std::optional<RadialMeasureModel> model;

  std::unique_ptr<FinslerSpace> make_space(int n) const;
  RadialSpaceView view(int n) const;
};
SpaceChoice parse_space(const std::string& text, int n, double k = 1.0, double C = 2.0,
                        const std::optional<nlohmann::json>& norm = std::nullopt);

ExperimentResult run(const ExperimentSpec& spec);

// CSV with header exactly "iota,numerator,denominator,quotient" (%.17g) and a
// gnuplot script next to it (same stem, ".gp").
void emit_csv(const ExperimentResult& result, const std::string& path);
void emit_report(const std::vector<ExperimentResult>& results, const std::string& path);
std::string render_report(const std::vector<ExperimentResult>& results);

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<ExperimentResult> results;
  double seconds = 0.0;
  bool all_pass() const;
};

// Runs the experiments behind the acceptance thresholds and returns one
// named check per criterion.
VerifyReport verify_suite(std::uint64_t seed = kDefaultSeed, Execution exec = Execution::parallel);

}  // namespace finsler
