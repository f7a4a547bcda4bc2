#pragma once

#include <cstdint>
#include <random>

#include "cmix/operator_core.hpp"

namespace cmix {

/// Seeded generator whose output is fixed by the seed on every platform:
/// mt19937_64 is fully specified, and the uniform/normal transforms are done
/// here rather than through std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Complex complex_normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed).
Matrix random_unitary(Eigen::Index dim, Rng& rng);
/// Hermitian with Gaussian entries, spectral norm of order `scale`.
Matrix random_hermitian(Eigen::Index dim, Rng& rng, double scale = 1.0);
/// V diag(e^{i theta}) V* with every eigenvalue at distance >= gap from 1.
Matrix random_unitary_away_from_one(Eigen::Index dim, Rng& rng, double gap);
Vector random_unit_vector(Eigen::Index dim, Rng& rng);

}  // namespace cmix
