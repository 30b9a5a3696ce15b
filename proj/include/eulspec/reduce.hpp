#pragma once

#include <cstddef>
#include <span>

namespace eulspec {

/// Pairwise sum over fixed-size leaf blocks. The summation tree depends only
/// on the length of the input, never on the number of worker threads.
double pairwise_sum(std::span<const double> values);

struct MinMax {
  double min;
  double max;
};

/// Extrema of a non-empty range. NaN entries are ignored.
MinMax min_max(std::span<const double> values);

double max_abs(std::span<const double> values);

}  // namespace eulspec
