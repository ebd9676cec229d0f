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

#include "qpic/poisson.hpp"

#include <cmath>
#include <numbers>

#include "qpic/errors.hpp"

namespace qpic {

void SpectralPoissonSolver::prepare(int n, double dx) {
    if (n == cached_n_ && dx == cached_dx_) {
        return;
    }
    cos_table_.resize(n);
    sin_table_.resize(n);
    for (int r = 0; r < n; ++r) {
        const double angle = 2.0 * std::numbers::pi * r / n;
        cos_table_[r] = std::cos(angle);
        sin_table_[r] = std::sin(angle);
    }
    inverse_eigenvalue_.assign(n, 0.0);
    for (int k = 1; k < n; ++k) {
        const double s = std::sin(std::numbers::pi * k / n);
        inverse_eigenvalue_[k] = dx * dx / (4.0 * s * s);
    }
    cached_n_ = n;
    cached_dx_ = dx;
}

GridField SpectralPoissonSolver::solve(const GridField& rho, const SimConfig& config) {
    const int n = static_cast<int>(rho.size());
    if (n != config.n_cells) {
        throw ConfigError("charge density has " + std::to_string(n) + " entries, config expects " +
                          std::to_string(config.n_cells));
    }
    if (std::abs(rho.mean()) > 1e-8) {
        throw NumericError("charge density mean exceeds 1e-8; periodic system is not solvable");
    }
    prepare(n, config.dx());

    // Forward DFT of the real source, k = 1..n-1 (the zero mode is gauged
    // away). Angles repeat with period n, so (j*k) mod n indexes the table.
    std::vector<double> re(n, 0.0);
    std::vector<double> im(n, 0.0);
    for (int k = 1; k < n; ++k) {
        double rk = 0.0;
        double ik = 0.0;
        for (int j = 0; j < n; ++j) {
            const int r = static_cast<int>((static_cast<long long>(j) * k) % n);
            rk += rho[j] * cos_table_[r];
            ik -= rho[j] * sin_table_[r];
        }
        re[k] = rk * inverse_eigenvalue_[k];
        im[k] = ik * inverse_eigenvalue_[k];
    }

    GridField phi(n, FieldKind::potential);
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int k = 1; k < n; ++k) {
            const int r = static_cast<int>((static_cast<long long>(j) * k) % n);
            sum += re[k] * cos_table_[r] - im[k] * sin_table_[r];
        }
        phi[j] = sum / n;
    }
    return phi;
}

GridField solve_poisson(const GridField& rho, const SimConfig& config) {
    SpectralPoissonSolver solver;
    return solver.solve(rho, config);
}

}  // namespace qpic
