#include "socv/noise.hpp"

#include <cmath>

namespace socv {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t prod = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(prod >> 32);
  lo = static_cast<uint32_t>(prod);
}

inline double to_unit_interval(uint64_t bits) {
  // 53 significant bits, shifted into (0,1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 2>& key,
                                   std::array<uint32_t, 4> ctr) {
  uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

double counter_gaussian(uint64_t master_seed, int64_t path, int64_t step,
                        int64_t component) {
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(master_seed),
                                       static_cast<uint32_t>(master_seed >> 32)};
  const std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(path), static_cast<uint32_t>(path >> 32),
      static_cast<uint32_t>(step),
      static_cast<uint32_t>(component)};
  const std::array<uint32_t, 4> r = philox4x32(key, ctr);
  const uint64_t a = (static_cast<uint64_t>(r[0]) << 32) | r[1];
  const uint64_t b = (static_cast<uint64_t>(r[2]) << 32) | r[3];
  const double u1 = to_unit_interval(a);
  const double u2 = to_unit_interval(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

NoiseEnsemble::NoiseEnsemble(int paths, int steps, int noise_dim,
                             double horizon, uint64_t master_seed)
    : paths_(paths),
      steps_(steps),
      noise_dim_(noise_dim),
      dt_(horizon / steps),
      horizon_(horizon),
      master_seed_(master_seed) {
  require(paths >= 1 && steps >= 1 && noise_dim >= 1,
          "NoiseEnsemble dimensions must be positive");
  require(horizon > 0.0, "NoiseEnsemble horizon must be positive");
  data_.resize(static_cast<size_t>(paths) * steps * noise_dim);
  const double scale = std::sqrt(dt_);
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      double* cell =
          data_.data() + (static_cast<size_t>(p) * steps + k) * noise_dim;
      for (int j = 0; j < noise_dim; ++j) {
        cell[j] = scale * counter_gaussian(master_seed, p, k, j);
      }
    }
  }
}

}  // namespace socv
