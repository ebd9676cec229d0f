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

#ifndef QPIC_GRID_HPP
#define QPIC_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace qpic {

enum class FieldKind {
    charge_density,
    potential,
    electric_field,
};

// One real-valued field sampled on the periodic grid, node i at x = i * dx.
struct GridField {
    std::vector<double> values;
    FieldKind kind = FieldKind::charge_density;

    GridField() = default;
    GridField(std::size_t n, FieldKind k) : values(n, 0.0), kind(k) {}

    std::size_t size() const {
        return values.size();
    }

    double& operator[](std::size_t i) {
        return values[i];
    }
    double operator[](std::size_t i) const {
        return values[i];
    }

    double mean() const {
        if (values.empty()) {
            return 0.0;
        }
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum / static_cast<double>(values.size());
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }
};

}  // namespace qpic

#endif
