#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace pmax {

constexpr double inf = std::numeric_limits<double>::infinity();

// log(sum(exp(t))) over terms that may be -inf.
inline double log_sum_exp(const double* t, int k) {
    double m = -inf;
    for (int i = 0; i < k; ++i) m = std::max(m, t[i]);
    if (m == -inf) return -inf;
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::exp(t[i] - m);
    return m + std::log(s);
}

// Static partition of [0,n) over worker threads; fn(i) must be independent
// across indices. threads <= 0 picks the hardware count.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(nt, n)));
    if (nt == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([=, &fn] {
            for (std::int64_t i = w; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// In-place inverse of a symmetric positive-definite matrix (row-major n x n)
// by Cholesky. Returns false when the matrix is not positive definite.
inline bool spd_inverse(std::vector<double>& a, int n) {
    std::vector<double> l(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // Invert L, then A^{-1} = L^{-T} L^{-1}.
    for (int i = 0; i < n; ++i) {
        l[i * n + i] = 1.0 / l[i * n + i];
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int k = i; k < j; ++k) s -= l[j * n + k] * l[k * n + i];
            l[j * n + i] = s / l[j * n + j];
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = i; k < n; ++k) s += l[k * n + i] * l[k * n + j];
            a[i * n + j] = a[j * n + i] = s;
        }
    }
    return true;
}

inline std::vector<double> sorted_copy(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace pmax
