// Copyright 2026 The fockbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace fockbench {

struct NelderMeadOptions {
    double initial_step = 0.3;
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-7;
    int max_evaluations = 4000;
};

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Downhill simplex minimization with the standard reflection, expansion,
/// contraction and shrink coefficients (1, 2, 1/2, 1/2).
inline OptimizeResult nelder_mead(const std::function<double(const std::vector<double> &)> &f, std::vector<double> x0,
                                  const NelderMeadOptions &opt = {}) {
    const std::size_t n = x0.size();
    OptimizeResult res;
    if (n == 0) {
        res.value = f(x0);
        res.evaluations = 1;
        return res;
    }
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
    int evals = 0;
    auto eval = [&](const std::vector<double> &x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);
    std::vector<std::size_t> idx(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    while (evals < opt.max_evaluations) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::abs(pts[idx[i]][k] - pts[best][k]));
        }
        if (std::abs(val[worst] - val[best]) <= opt.f_tolerance || spread <= opt.x_tolerance) break;
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[idx[i]][k] / static_cast<double>(n);
        }
        for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - pts[worst][k]);
        const double fr = eval(trial);
        if (fr < val[best]) {
            for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - pts[worst][k]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                val[worst] = fe;
            } else {
                pts[worst] = trial;
                val[worst] = fr;
            }
            continue;
        }
        if (fr < val[second]) {
            pts[worst] = trial;
            val[worst] = fr;
            continue;
        }
        const bool outside = fr < val[worst];
        for (std::size_t k = 0; k < n; ++k) {
            trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k]) : centroid[k] + 0.5 * (pts[worst][k] - centroid[k]);
        }
        const double fc = eval(trial2);
        if (fc < (outside ? fr : val[worst])) {
            pts[worst] = trial2;
            val[worst] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) pts[idx[i]][k] = pts[best][k] + 0.5 * (pts[idx[i]][k] - pts[best][k]);
            val[idx[i]] = eval(pts[idx[i]]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
    res.x = pts[best];
    res.value = val[best];
    res.evaluations = evals;
    return res;
}

}  // namespace fockbench
