#include "socv/noise.hpp"

#include <doctest.h>

#include <cmath>

using namespace socv;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference outputs of the published algorithm (Salmon et al. 2011).
  const auto zeros = philox4x32({0u, 0u}, {0u, 0u, 0u, 0u});
  CHECK(zeros[0] == 0x6627e8d5u);
  CHECK(zeros[1] == 0xe169c58du);
  CHECK(zeros[2] == 0xbc57ac4cu);
  CHECK(zeros[3] == 0x9b00dbd8u);

  const auto pi = philox4x32({0xa4093822u, 0x299f31d0u},
                             {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                              0x03707344u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);

  const auto ones = philox4x32({0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu, 0xffffffffu,
                                0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("counter gaussians are deterministic and order-free") {
  const double a = counter_gaussian(42, 3, 17, 1);
  const double b = counter_gaussian(42, 3, 17, 1);
  CHECK(a == b);
  CHECK(counter_gaussian(42, 3, 17, 0) != a);
  CHECK(counter_gaussian(43, 3, 17, 1) != a);
}

TEST_CASE("noise ensemble reproduces bitwise and has N(0, dt) increments") {
  const NoiseEnsemble noise(2000, 16, 2, 1.0, 99);
  const NoiseEnsemble again(2000, 16, 2, 1.0, 99);
  for (int p = 0; p < 5; ++p) {
    for (int k = 0; k < noise.steps(); ++k) {
      CHECK(noise.increment(p, k, 0) == again.increment(p, k, 0));
      CHECK(noise.increment(p, k, 1) == again.increment(p, k, 1));
    }
  }

  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  for (int p = 0; p < noise.paths(); ++p) {
    for (int k = 0; k < noise.steps(); ++k) {
      for (int j = 0; j < noise.noise_dim(); ++j) {
        const double w = noise.increment(p, k, j);
        sum += w;
        sum_sq += w * w;
        ++count;
      }
    }
  }
  const double mean = sum / count;
  const double var = sum_sq / count - mean * mean;
  const double dt = noise.dt();
  // 64000 samples: ~4 sigma bands.
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / count));
  CHECK(std::abs(var - dt) <= 4.0 * dt * std::sqrt(2.0 / count));
}

TEST_CASE("different seeds decorrelate the ensemble") {
  const NoiseEnsemble a(500, 8, 1, 1.0, 1);
  const NoiseEnsemble b(500, 8, 1, 1.0, 2);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int p = 0; p < 500; ++p) {
    for (int k = 0; k < 8; ++k) {
      dot += a.increment(p, k, 0) * b.increment(p, k, 0);
      na += a.increment(p, k, 0) * a.increment(p, k, 0);
      nb += b.increment(p, k, 0) * b.increment(p, k, 0);
    }
  }
  CHECK(std::abs(dot) / std::sqrt(na * nb) < 0.1);
}
