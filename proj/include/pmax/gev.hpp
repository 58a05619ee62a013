#pragma once

// Scalar generalized extreme value distribution on the real line,
//   G(z) = exp(-[1 + xi (z - mu)/sigma]^(-1/xi)),
// with the Gumbel limit at xi = 0. All branches route through
// u = log1p(xi*s)/xi, which stays accurate down to |xi| ~ 1e-12; below that
// the Gumbel closed form takes over.

#include <cmath>
#include <stdexcept>

#include "pmax/util.hpp"

namespace pmax {

constexpr double kXiZeroTol = 1e-12;

struct GevParams {
    double mu{0.0};
    double sigma{1.0};
    double xi{0.0};
};

namespace detail {

// u such that the tail transform is t = exp(-u); -inf when z is beyond the
// upper support end (xi < 0), +inf when below the lower end (xi > 0).
inline double gev_u(double z, const GevParams& p) {
    const double s = (z - p.mu) / p.sigma;
    if (std::abs(p.xi) < kXiZeroTol) return s;
    const double w = 1.0 + p.xi * s;
    if (w <= 0.0) return p.xi > 0.0 ? -inf : inf;
    return std::log1p(p.xi * s) / p.xi;
}

}  // namespace detail

inline double gev_log_cdf(double z, const GevParams& p) {
    const double u = detail::gev_u(z, p);
    if (u == -inf) return -inf;   // below lower support end
    if (u == inf) return 0.0;     // above upper support end
    return -std::exp(-u);
}

inline double gev_cdf(double z, const GevParams& p) {
    return std::exp(gev_log_cdf(z, p));
}

inline double gev_log_pdf(double z, const GevParams& p) {
    const double u = detail::gev_u(z, p);
    if (!std::isfinite(u)) return -inf;
    const double t = std::exp(-u);
    return -(1.0 + p.xi) * u - t - std::log(p.sigma);
}

inline double gev_quantile(double prob, const GevParams& p) {
    if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("gev_quantile: p outside (0,1)");
    const double t = -std::log(prob);
    if (std::abs(p.xi) < kXiZeroTol) return p.mu - p.sigma * std::log(t);
    return p.mu + p.sigma * std::expm1(-p.xi * std::log(t)) / p.xi;
}

// Support of G on the z axis (open interval).
inline std::pair<double, double> gev_support(const GevParams& p) {
    if (p.xi > kXiZeroTol) return {p.mu - p.sigma / p.xi, inf};
    if (p.xi < -kXiZeroTol) return {-inf, p.mu - p.sigma / p.xi};
    return {-inf, inf};
}

}  // namespace pmax
