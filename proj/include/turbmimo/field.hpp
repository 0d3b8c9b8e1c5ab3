#pragma once

#include <complex>
#include <vector>

#include "turbmimo/grid.hpp"

namespace turbmimo {

using cdouble = std::complex<double>;

// Scalar complex field sampled on a Grid, row-major (v[y * n + x]).
struct ComplexField {
  Grid grid;
  std::vector<cdouble> v;

  ComplexField() = default;
  explicit ComplexField(const Grid& g) : grid(g), v(g.size()) {}

  cdouble& at(std::size_t ix, std::size_t iy) { return v[iy * grid.n + ix]; }
  const cdouble& at(std::size_t ix, std::size_t iy) const { return v[iy * grid.n + ix]; }
};

// Real scalar sample plane with the same layout (phase screens, windows).
struct RealField {
  Grid grid;
  std::vector<double> v;

  RealField() = default;
  explicit RealField(const Grid& g) : grid(g), v(g.size()) {}
};

// Discrete power  sum |u|^2 dx^2.
double power(const ComplexField& u);

// Scales the field to unit discrete power.  Zero fields are left alone.
void normalize(ComplexField& u);

// <a, b> = sum conj(a) b dx^2 on a shared grid; throws on grid mismatch.
cdouble overlap(const ComplexField& a, const ComplexField& b);

}  // namespace turbmimo
