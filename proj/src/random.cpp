#include "dyadic/random.hpp"

#include "dyadic/haar.hpp"

namespace dyadic {

DyadicFunction random_function(const Grid& grid, Rng& rng) {
  std::normal_distribution<double> normal;
  DyadicFunction f(grid);
  for (Eigen::Index i = 0; i < f.samples().size(); ++i) f.samples()[i] = normal(rng);
  return f;
}

DyadicFunction random_band_function(const Grid& grid, int from_level, Rng& rng) {
  std::normal_distribution<double> normal;
  HaarCoefficients c(grid);
  const std::size_t first = grid.cubes_at(from_level);
  for (std::size_t s = first; s < grid.size(); ++s) c.values()[static_cast<Eigen::Index>(s)] = normal(rng);
  return haar_inverse(c);
}

}  // namespace dyadic
