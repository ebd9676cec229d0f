// Copyright 2026 The qpic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPIC_RNG_HPP
#define QPIC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qpic {

// Uniform double in [0, 1) built from the top 53 bits of one mt19937_64
// draw. std::uniform_real_distribution is not pinned down by the standard,
// so sampling through it would not be reproducible across toolchains.
inline double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_double(rng);
}

// Box-Muller standard normal sampler over the same pinned uniform source.
// Consumes two uniforms per pair of variates and caches the second one.
class NormalSampler {
  public:
    explicit NormalSampler(std::mt19937_64& rng) : rng_(rng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_double(rng_);
        while (u1 <= 0.0) {
            u1 = uniform_double(rng_);
        }
        const double u2 = uniform_double(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64& rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qpic

#endif
