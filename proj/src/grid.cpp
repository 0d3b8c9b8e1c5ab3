#include "turbmimo/grid.hpp"

#include <stdexcept>
#include <string>

namespace turbmimo {

namespace {
bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }
}

Grid::Grid(std::size_t n_points, double dx) : n(n_points), spacing(dx) {
  if (!power_of_two(n_points) || n_points < 2) {
    throw std::invalid_argument("grid size must be a power of two >= 2, got " +
                                std::to_string(n_points));
  }
  if (!(dx > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
}

}  // namespace turbmimo
