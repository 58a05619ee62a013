#pragma once

// Nelder-Mead simplex minimizer with the standard coefficients. Objectives
// may return +inf to reject a point (box constraints, support violations).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace pmax {

struct NelderMeadResult {
    std::vector<double> x;
    double fmin{std::numeric_limits<double>::infinity()};
    int iterations{0};
    bool converged{false};
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start,
                                    std::vector<double> step,
                                    double ftol = 1e-10,
                                    int max_iter = 0) {
    const int n = static_cast<int>(start.size());
    if (max_iter <= 0) max_iter = 400 * n * n + 2000;
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> x(n + 1, start);
    for (int i = 0; i < n; ++i) x[i + 1][i] += step[i];
    std::vector<double> fx(n + 1);
    for (int i = 0; i <= n; ++i) fx[i] = f(x[i]);

    NelderMeadResult res;
    std::vector<int> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        if (std::isfinite(fx[best]) &&
            fx[worst] - fx[best] <= ftol * (1.0 + std::abs(fx[best]))) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int d = 0; d < n; ++d) centroid[d] += x[i][d];
        }
        for (int d = 0; d < n; ++d) centroid[d] /= n;

        for (int d = 0; d < n; ++d) xr[d] = centroid[d] + alpha * (centroid[d] - x[worst][d]);
        const double fr = f(xr);
        if (fr < fx[best]) {
            for (int d = 0; d < n; ++d) xe[d] = centroid[d] + gamma * (xr[d] - centroid[d]);
            const double fe = f(xe);
            if (fe < fr) { x[worst] = xe; fx[worst] = fe; }
            else { x[worst] = xr; fx[worst] = fr; }
        } else if (fr < fx[second]) {
            x[worst] = xr;
            fx[worst] = fr;
        } else {
            const bool outside = fr < fx[worst];
            const auto& base = outside ? xr : x[worst];
            for (int d = 0; d < n; ++d) xc[d] = centroid[d] + rho * (base[d] - centroid[d]);
            const double fc = f(xc);
            if (fc < (outside ? fr : fx[worst])) {
                x[worst] = xc;
                fx[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int d = 0; d < n; ++d)
                        x[i][d] = x[best][d] + sigma * (x[i][d] - x[best][d]);
                    fx[i] = f(x[i]);
                }
            }
        }
    }
    const int best = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    res.x = x[best];
    res.fmin = fx[best];
    res.iterations = iter;
    return res;
}

// Two-stage minimize: a fresh simplex is rebuilt once at the first-stage
// optimum with smaller steps, which recovers from degenerate simplices.
inline NelderMeadResult nelder_mead_restart(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, std::vector<double> step,
    double ftol = 1e-10, int max_iter = 0) {
    NelderMeadResult first = nelder_mead(f, std::move(start), step, ftol, max_iter);
    if (!std::isfinite(first.fmin)) return first;
    for (auto& s : step) s *= 0.1;
    NelderMeadResult second = nelder_mead(f, first.x, step, ftol, max_iter);
    second.iterations += first.iterations;
    if (first.fmin < second.fmin) {
        second.x = first.x;
        second.fmin = first.fmin;
    }
    return second;
}

}  // namespace pmax
