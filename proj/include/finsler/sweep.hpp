#pragma once

#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/functionals.hpp"

namespace finsler {

enum class Execution { serial, parallel };

// Geometric grid from max down to min (descending), `count` points.
std::vector<double> iota_grid(double min = 1e-4, double max = 1e-1, int count = 13);

struct SweepRow {
  double iota = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double quotient = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of ln(value) against ln(iota). Throws InsufficientData for
// fewer than 3 points and NonpositiveValue for iota or value <= 0.
SlopeFit fit_loglog_slope(const std::vector<double>& iotas, const std::vector<double>& values);
SlopeFit fit_loglog_slope(const std::vector<SweepRow>& rows);

// Maps f over [0, count). The parallel kernel distributes indices with
// OpenMP; results land in their own slots, so output order never depends on
// scheduling. The first exception (lowest index) is rethrown after the loop.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, F&& f, Execution exec) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

using IotaEvaluator = std::function<QuotientParts(double iota)>;

// Evaluates `eval` at every grid point. Errors are rethrown with the
// offending iota appended, keeping the original error kind.
std::vector<SweepRow> sweep(const IotaEvaluator& eval, const std::vector<double>& iotas,
                            Execution exec = Execution::parallel);

int max_threads();

}  // namespace finsler
