#pragma once

#include <cmath>
#include <functional>

#include "eulspec/field.hpp"

namespace testutil {

using eulspec::Grid;
using eulspec::PhysicalField;
using eulspec::PhysicalVector;

inline PhysicalField sample(const Grid& g, const std::function<double(double, double, double)>& f) {
  PhysicalField out(g);
  for (int k = 0; k < g.n(); ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i)
        out[g.physical_index(i, j, k)] = f(g.coordinate(i), g.coordinate(j), g.coordinate(k));
  return out;
}

inline PhysicalVector sample_vec(const Grid& g, const std::function<double(double, double, double)>& fx,
                                 const std::function<double(double, double, double)>& fy,
                                 const std::function<double(double, double, double)>& fz) {
  return PhysicalVector(sample(g, fx), sample(g, fy), sample(g, fz));
}

inline double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const PhysicalField& a) {
  double m = 0.0;
  for (double x : a.values) m = std::max(m, std::abs(x));
  return m;
}

// Plain sequential sum times cell volume. The rectangle rule is spectrally
// exact for trigonometric polynomials on a periodic grid.
inline double naive_integral(const PhysicalField& f) {
  long double s = 0.0L;
  for (double x : f.values) s += x;
  return static_cast<double>(s) * f.grid.cell_volume();
}

}  // namespace testutil
