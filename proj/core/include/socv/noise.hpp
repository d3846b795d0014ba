#pragma once

#include "socv/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace socv {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
/// A block is a pure function of (key, counter), so any (path, step,
/// component) cell can be generated independently and in any order.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 2>& key,
                                   std::array<uint32_t, 4> counter);

/// Standard normal draw for cell (path, step, component) under master_seed.
double counter_gaussian(uint64_t master_seed, int64_t path, int64_t step,
                        int64_t component);

/// Seeded collection of Brownian increments on a uniform grid.
/// increment(p, k, j) ~ N(0, dt), generated deterministically from
/// (master_seed, p, k, j); the map is independent of evaluation order, so
/// path-parallel code cannot reorder randomness.
class NoiseEnsemble {
 public:
  NoiseEnsemble(int paths, int steps, int noise_dim, double horizon,
                uint64_t master_seed);

  int paths() const { return paths_; }
  int steps() const { return steps_; }
  int noise_dim() const { return noise_dim_; }
  double dt() const { return dt_; }
  double horizon() const { return horizon_; }
  uint64_t master_seed() const { return master_seed_; }

  double increment(int path, int step, int component) const {
    return data_[(static_cast<size_t>(path) * steps_ + step) * noise_dim_ +
                 component];
  }

  /// All m components of Delta W at (path, step).
  Eigen::Map<const Vector> increments(int path, int step) const {
    return Eigen::Map<const Vector>(
        data_.data() + (static_cast<size_t>(path) * steps_ + step) * noise_dim_,
        noise_dim_);
  }

 private:
  int paths_, steps_, noise_dim_;
  double dt_, horizon_;
  uint64_t master_seed_;
  std::vector<double> data_;
};

}  // namespace socv
