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

#ifndef QPIC_POISSON_HPP
#define QPIC_POISSON_HPP

#include <string>
#include <vector>

#include "qpic/grid.hpp"
#include "qpic/sim_config.hpp"

namespace qpic {

// Field solver interface shared by the exact spectral solver and the
// learned surrogates, so the particle loop never knows which one it runs.
class PoissonSolver {
  public:
    virtual ~PoissonSolver() = default;

    // Solves the discrete periodic system L phi = -rho, where L is the
    // 3-point second-order Laplacian, under the zero-mean gauge on phi.
    // rho must have n_cells entries and (numerically) zero mean.
    virtual GridField solve(const GridField& rho, const SimConfig& config) = 0;

    virtual std::string name() const = 0;
};

// Inverts the 3-point Laplacian mode-by-mode in the discrete Fourier
// basis: phi_hat_k = rho_hat_k * dx^2 / (4 sin^2(pi k / n)), phi_hat_0 = 0.
// The result satisfies the stencil equation to round-off, not merely to
// truncation order. Direct O(n^2) transforms; n = 64 makes an FFT moot.
class SpectralPoissonSolver final : public PoissonSolver {
  public:
    GridField solve(const GridField& rho, const SimConfig& config) override;
    std::string name() const override {
        return "spectral";
    }

  private:
    // Trig and eigenvalue tables are rebuilt only when n changes.
    void prepare(int n, double dx);
    int cached_n_ = -1;
    double cached_dx_ = 0.0;
    std::vector<double> cos_table_;  // cos(2 pi r / n), r = 0..n-1
    std::vector<double> sin_table_;
    std::vector<double> inverse_eigenvalue_;  // dx^2 / (4 sin^2(pi k / n)), k = 1..n-1
};

// One-shot convenience wrapper around SpectralPoissonSolver.
GridField solve_poisson(const GridField& rho, const SimConfig& config);

}  // namespace qpic

#endif
