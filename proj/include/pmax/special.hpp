#pragma once

// Scalar special functions used across the library: normal cdf/quantile,
// Owen's T (for the skew-normal cdf), and regularized incomplete gamma
// (chi-square tail probabilities, general-error cdf).

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmax {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Acklam's rational approximation refined by one Halley step; absolute error
// below 1e-15 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("normal_quantile: p outside [0,1]");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace detail {

// 64-point Gauss-Legendre nodes/weights on [0,1] built once from Newton
// iteration on Legendre polynomials.
struct GaussLegendre64 {
    double node[64];
    double weight[64];
    GaussLegendre64() {
        const int n = 64;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            node[i] = 0.5 * (1.0 - x);
            node[n - 1 - i] = 0.5 * (1.0 + x);
            weight[i] = weight[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 g;
    return g;
}

}  // namespace detail

// Integrates f over [a,b] with 64-point Gauss-Legendre per panel.
template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels = 1) {
    const auto& g = detail::gl64();
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        double s = 0.0;
        for (int i = 0; i < 64; ++i) s += g.weight[i] * f(lo + g.node[i] * h);
        total += s * h;
    }
    return total;
}

// Owen's T function. Direct quadrature for |a| <= 1, the standard reduction
// identity otherwise.
inline double owen_t(double h, double a) {
    if (a == 0.0 || std::isinf(h)) return 0.0;
    if (a < 0.0) return -owen_t(h, -a);
    if (a > 1.0) {
        const double ah = a * h;
        return 0.5 * (normal_cdf(h) + normal_cdf(ah)) - normal_cdf(h) * normal_cdf(ah) -
               owen_t(ah, 1.0 / a);
    }
    const double h2 = h * h;
    auto f = [h2](double t) { return std::exp(-0.5 * h2 * (1.0 + t * t)) / (1.0 + t * t); };
    return gauss_legendre(f, 0.0, a, 2) / (2.0 * M_PI);
}

// Skew-normal cdf: F_lambda(x) = Phi(x) - 2 T(x, lambda).
inline double skew_normal_cdf(double x, double lambda) {
    return normal_cdf(x) - 2.0 * owen_t(x, lambda);
}

inline double skew_normal_pdf(double x, double lambda) {
    return 2.0 * normal_pdf(x) * normal_cdf(lambda * x);
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

// Survival function of chi-square with df degrees of freedom.
inline double chisq_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace pmax
