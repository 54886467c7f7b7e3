#include "cmusim/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace cmusim {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sd needs two points");
  double m = mean(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double standard_error(const std::vector<double>& xs) {
  return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

double student_t_975(int df) {
  static const double table[] = {
      12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060,
      2.2622,  2.2281, 2.2010, 2.1788, 2.1604, 2.1448, 2.1314, 2.1199,
      2.1098,  2.1009, 2.0930, 2.0860, 2.0796, 2.0739, 2.0687, 2.0639,
      2.0595,  2.0555, 2.0518, 2.0484, 2.0452, 2.0423};
  if (df < 1) throw std::invalid_argument("t quantile needs df >= 1");
  if (df <= 30) return table[df - 1];
  if (df <= 60) return 2.0003;
  return 1.96;
}

SlopeFit batch_mean_slope(const std::vector<double>& path, int num_batches) {
  const long long n = static_cast<long long>(path.size());
  if (num_batches < 3 || n / 2 < num_batches)
    throw std::invalid_argument("path too short for the requested batches");
  const long long start = n - n / 2;
  const long long len = (n - start) / num_batches;

  std::vector<double> x(num_batches), y(num_batches);
  for (int b = 0; b < num_batches; ++b) {
    long long lo = start + b * len;
    double s = 0.0;
    for (long long t = lo; t < lo + len; ++t) s += path[t];
    y[b] = s / static_cast<double>(len);
    x[b] = static_cast<double>(lo) + static_cast<double>(len - 1) / 2.0;
  }

  double xbar = mean(x), ybar = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (int b = 0; b < num_batches; ++b) {
    sxx += (x[b] - xbar) * (x[b] - xbar);
    sxy += (x[b] - xbar) * (y[b] - ybar);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (int b = 0; b < num_batches; ++b) {
    double e = y[b] - ybar - fit.slope * (x[b] - xbar);
    rss += e * e;
  }
  double se = std::sqrt(rss / (num_batches - 2) / sxx);
  fit.half_width = student_t_975(num_batches - 2) * se;
  fit.significant_positive = fit.slope > 0.0 && fit.slope - fit.half_width > 0.0;
  return fit;
}

}  // namespace cmusim
