#pragma once

#include <cstddef>

namespace turbmimo {

// Square transverse sampling grid.  Sample i of an axis sits at
// (i - n/2) * spacing, so bin n/2 is the optical axis and the grid spans
// [-extent/2, extent/2).  n must be a power of two.
struct Grid {
  std::size_t n = 0;
  double spacing = 0.0;  // metres

  Grid() = default;
  Grid(std::size_t n_points, double dx);  // validates

  double extent() const { return static_cast<double>(n) * spacing; }
  double freq_spacing() const { return 1.0 / extent(); }  // cycles/m
  double nyquist() const { return 0.5 / spacing; }        // cycles/m

  double coord(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(n) / 2.0) * spacing;
  }

  // FFT-native signed spatial frequency of bin i, cycles/m.
  double freq(std::size_t i) const {
    double m = static_cast<double>(i);
    if (i >= n / 2) m -= static_cast<double>(n);
    return m * freq_spacing();
  }

  std::size_t size() const { return n * n; }
  bool operator==(const Grid&) const = default;
};

}  // namespace turbmimo
