#pragma once

#include <vector>

#include <Eigen/Core>

#include "dyadic/function.hpp"

namespace dyadic {

/// <f, h_I^1> for every cube, one vector per level 0..N.
using CubeAverages = std::vector<Eigen::VectorXd>;

/// Haar coefficients of a function, stored densely.
///
/// Slot 0 holds the root noncancellative coefficient (the mean); the
/// cancellative coefficient of (level k, cube index q, signature s) lives
/// at 2^{kd} + q (2^d - 1) + s. The vector therefore has exactly as many
/// entries as the grid has cells.
class HaarCoefficients {
 public:
  explicit HaarCoefficients(Grid grid);
  HaarCoefficients(Grid grid, Eigen::VectorXd values);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double mean() const { return values_[0]; }
  double& mean() { return values_[0]; }
  double operator[](HaarIndex h) const;
  double& operator[](HaarIndex h);

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

/// Dense slot of a cancellative Haar index.
std::size_t coefficient_slot(const Grid& grid, HaarIndex h);
/// Inverse of coefficient_slot for slots >= 1.
HaarIndex haar_index_at(const Grid& grid, std::size_t slot);

/// Sampled h_I^eps, built cell by cell from the tensor-product definition.
DyadicFunction haar_function(const Grid& grid, HaarIndex idx);

HaarCoefficients haar_forward(const DyadicFunction& f);
DyadicFunction haar_inverse(const HaarCoefficients& c);
CubeAverages cube_averages(const DyadicFunction& f);

/// Raw transform kernels over sample vectors; the product module applies
/// them slice by slice.
Eigen::VectorXd analyze(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& samples,
                        CubeAverages* averages = nullptr);
/// Inverse transform. `extra`, when given, adds sum_I extra[k][I] h_I^1
/// (noncancellative contributions on any level) to the result.
Eigen::VectorXd synthesize(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                           const CubeAverages* extra = nullptr);

/// Zero-initialised per-level storage shaped like CubeAverages.
CubeAverages zero_averages(const Grid& grid);

/// Tree utilities over the coefficient layout and flat-cube vectors
/// (indexed by Grid::flat). Cancellative cubes only, levels 0..N-1.

/// Per cube, the sum over its cancellative signatures.
Eigen::VectorXd signature_sums(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& coeffs);
/// Copy a per-cube value onto every cancellative signature slot (slot 0 is 0).
Eigen::VectorXd spread_signatures(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& per_cube);
/// out[J] = sum of w[I] over cubes I strictly containing J.
Eigen::VectorXd strict_ancestor_sums(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& w);
/// out[I] = sum of t[J] over cubes J strictly inside I.
Eigen::VectorXd strict_descendant_sums(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& t);

/// Cancellative coefficients plus cube averages: <f, h_I^sig> for any index.
struct HaarView {
  Eigen::VectorXd coeffs;
  CubeAverages averages;

  double pairing(const Grid& grid, HaarIndex h) const;
};

HaarView haar_view(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& samples);

/// Collects sum c_h h for arbitrary Haar indices and synthesises samples.
class HaarAccumulator {
 public:
  explicit HaarAccumulator(const Grid& grid);

  void add(HaarIndex h, double c);
  Eigen::VectorXd samples() const;

 private:
  Grid grid_;
  Eigen::VectorXd coeffs_;
  CubeAverages extra_;
};

}  // namespace dyadic
