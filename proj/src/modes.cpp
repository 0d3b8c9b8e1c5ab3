#include "turbmimo/modes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "turbmimo/propagation.hpp"

namespace turbmimo {

ComplexField lg_field(const Grid& g, double waist, int ell) {
  if (!(waist > 0.0)) throw std::invalid_argument("waist must be positive");
  if (ell < -6 || ell > 6) throw std::invalid_argument("|ell| must be <= 6");
  const int a = std::abs(ell);
  double fact = 1.0;
  for (int i = 2; i <= a; ++i) fact *= i;
  const double amp0 = std::sqrt(2.0 / (std::numbers::pi * fact)) / waist;
  const double s2 = std::numbers::sqrt2;

  ComplexField u(g);
  for (std::size_t iy = 0; iy < g.n; ++iy) {
    const double y = g.coord(iy);
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const double x = g.coord(ix);
      const double r = std::hypot(x, y);
      const double radial = amp0 * std::pow(s2 * r / waist, a) *
                            std::exp(-(r * r) / (waist * waist));
      const double phi = (r > 0.0) ? std::atan2(y, x) : 0.0;
      const double lp = ell * phi;
      u.at(ix, iy) = radial * cdouble(std::cos(lp), std::sin(lp));
    }
  }
  normalize(u);  // discrete power exactly 1 regardless of sampling
  return u;
}

std::vector<int> mode_set(std::size_t n_modes) {
  switch (n_modes) {
    case 2: return {-1, 1};
    case 3: return {-1, 0, 1};
    case 4: return {-2, -1, 1, 2};
    case 5: return {-2, -1, 0, 1, 2};
    default: throw std::invalid_argument("mode count must be 2..5");
  }
}

void gram_schmidt(ModeBank& bank) {
  for (std::size_t i = 0; i < bank.fields.size(); ++i) {
    ComplexField& ui = bank.fields[i];
    for (std::size_t j = 0; j < i; ++j) {
      const cdouble c = overlap(bank.fields[j], ui);
      const std::size_t m = ui.v.size();
      for (std::size_t t = 0; t < m; ++t) ui.v[t] -= c * bank.fields[j].v[t];
    }
    normalize(ui);
  }
}

ModeBank vacuum_bank(const Grid& g, double waist, const std::vector<int>& ells,
                     double distance, double wavelength) {
  ModeBank bank;
  bank.ells = ells;
  bank.fields.reserve(ells.size());
  const FresnelKernel kernel(g, distance, wavelength);
  for (int ell : ells) {
    ComplexField u = lg_field(g, waist, ell);
    fresnel_propagate(u, kernel);
    bank.fields.push_back(std::move(u));
  }
  gram_schmidt(bank);
  return bank;
}

Banks build_banks(const Grid& g, double waist, std::size_t n_modes,
                  double distance, double wavelength) {
  const std::vector<int> ells = mode_set(n_modes);
  Banks banks;
  banks.transmit.ells = ells;
  for (int ell : ells) banks.transmit.fields.push_back(lg_field(g, waist, ell));
  banks.receive = vacuum_bank(g, waist, ells, distance, wavelength);
  return banks;
}

}  // namespace turbmimo
