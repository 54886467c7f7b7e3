#pragma once

#include <vector>

namespace cmusim {

double mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);
double standard_error(const std::vector<double>& xs);

// Two sided 97.5 percent Student t quantile.
double student_t_975(int df);

struct SlopeFit {
  double slope = 0.0;
  double half_width = 0.0;  // 95 percent confidence half width
  bool significant_positive = false;
};

// Slope of the last half of a path, fitted on batch means: the tail is cut
// into num_batches equal blocks and block means are regressed on block
// centers. Batching absorbs the short range correlation that makes a per
// slot regression overconfident on stable paths.
SlopeFit batch_mean_slope(const std::vector<double>& path,
                          int num_batches = 16);

}  // namespace cmusim
