#include "finsler/sweep.hpp"

#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace finsler {

std::vector<double> iota_grid(double min, double max, int count) {
  if (!(min > 0) || !(max >= min) || count < 1)
    throw Error(ErrorKind::InvalidParams, "iota grid needs 0 < min <= max and count >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(max);
    return out;
  }
  const double lmax = std::log(max), lmin = std::log(min);
  for (int i = 0; i < count; ++i) {
    if (i == 0) out.push_back(max);
    else if (i == count - 1) out.push_back(min);
    else out.push_back(std::exp(lmax + (lmin - lmax) * i / (count - 1)));
  }
  return out;
}

SlopeFit fit_loglog_slope(const std::vector<double>& iotas, const std::vector<double>& values) {
  if (iotas.size() != values.size())
    throw Error(ErrorKind::InvalidParams, "slope fit needs equally many abscissae and values");
  if (iotas.size() < 3) throw Error(ErrorKind::InsufficientData, "slope fit needs >= 3 rows");
  const double n = static_cast<double>(iotas.size());
  double sx = 0, sy = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < iotas.size(); ++i) {
    if (!(iotas[i] > 0) || !(values[i] > 0))
      throw Error(ErrorKind::NonpositiveValue, "slope fit needs positive iota and values");
    lx.push_back(std::log(iotas[i]));
    ly.push_back(std::log(values[i]));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::InsufficientData, "slope fit needs distinct iota values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

SlopeFit fit_loglog_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(r.iota);
    y.push_back(r.quotient);
  }
  return fit_loglog_slope(x, y);
}

std::vector<SweepRow> sweep(const IotaEvaluator& eval, const std::vector<double>& iotas,
                            Execution exec) {
  return parallel_map<SweepRow>(
      iotas.size(),
      [&](std::size_t i) {
        const double iota = iotas[i];
        try {
          const QuotientParts q = eval(iota);
          return SweepRow{iota, q.numerator, q.denominator, q.quotient};
        } catch (const Error& e) {
          char buf[64];
          std::snprintf(buf, sizeof buf, " (at iota = %.17g)", iota);
          // Strip the "Kind: " prefix the constructor will add again.
          std::string what = e.what();
          const auto prefix = std::string(to_string(e.kind())) + ": ";
          if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
          throw Error(e.kind(), what + buf);
        }
      },
      exec);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace finsler
