#include "eulspec/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace eulspec {
namespace {

constexpr std::size_t kLeaf = 64;
constexpr std::size_t kBlock = 8192;

double pairwise_serial(const double* p, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_serial(p, half) + pairwise_serial(p + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= kBlock) return pairwise_serial(values.data(), n);

  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks);
  const double* data = values.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t len = std::min(kBlock, n - begin);
    partial[b] = pairwise_serial(data + begin, len);
  }
  return pairwise_serial(partial.data(), blocks);
}

MinMax min_max(std::span<const double> values) {
  MinMax r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double v : values) {
    if (std::isnan(v)) continue;
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  return r;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace eulspec
