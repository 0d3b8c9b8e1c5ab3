#include "turbmimo/field.hpp"

#include <cmath>
#include <stdexcept>

namespace turbmimo {

double power(const ComplexField& u) {
  double s = 0.0;
  for (const cdouble& z : u.v) s += std::norm(z);
  return s * u.grid.spacing * u.grid.spacing;
}

void normalize(ComplexField& u) {
  const double p = power(u);
  if (p <= 0.0) return;
  const double inv = 1.0 / std::sqrt(p);
  for (cdouble& z : u.v) z *= inv;
}

cdouble overlap(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("overlap: fields live on different grids");
  }
  cdouble s = 0.0;
  const std::size_t m = a.v.size();
  for (std::size_t i = 0; i < m; ++i) s += std::conj(a.v[i]) * b.v[i];
  return s * (a.grid.spacing * a.grid.spacing);
}

}  // namespace turbmimo
