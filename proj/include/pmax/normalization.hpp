#pragma once

// Normalizing constants for the catalogued parent families under linear and
// power normalization, the combined-constants map for a pair of competing
// blocks, and the limit-regime classifier for block-size couplings.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmax/distributions.hpp"

namespace pmax {

enum class ParentKind {
    LogFrechet,    // H_{1,alpha}
    LogPolynomial, // exp of a polynomial-tail variable, parameters (alpha, right_end)
    Uniform,       // U(lo, hi), 0 < hi
    StdNormal,
    GeneralError,  // nu
    Frechet,       // alpha
    Pareto,        // alpha
    SkewNormal,    // lambda
    Polynomial,    // F = 1 - (right_end - x)^alpha on (right_end-1, right_end)
};

struct Parent {
    ParentKind kind{ParentKind::Pareto};
    double alpha{1.0};      // tail parameter where applicable
    double nu{1.0};         // general error
    double lambda{0.0};     // skew normal
    double lo{0.0}, hi{1.0};  // uniform endpoints
    double right_end{0.0};  // gamma(F) for (log-)polynomial
};

Parent make_log_frechet(double alpha);
Parent make_log_polynomial(double alpha, double right_end);
Parent make_uniform(double lo, double hi);
Parent make_std_normal();
Parent make_general_error(double nu);
Parent make_frechet(double alpha);
Parent make_pareto(double alpha);
Parent make_skew_normal(double lambda);
Parent make_polynomial(double alpha, double right_end);

std::string parent_label(const Parent& p);

// alpha_n can underflow for large n; log_alpha is always exact and is what
// the simulation pipeline uses.
struct PowerConstants {
    double log_alpha{0.0};
    double alpha{1.0};
    double beta{1.0};
    PStable limit;
};

enum class LMaxKind { Gumbel, Frechet, Weibull };

struct LinearConstants {
    double a{1.0};
    double b{0.0};
    LMaxKind kind{LMaxKind::Gumbel};
    double alpha{1.0};  // tail parameter of the Frechet/Weibull tag

    double limit_cdf(double x) const;
};

// Raised when a family has no entry for the requested normalization.
struct NotInDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PowerConstants power_constants(const Parent& p, double n);
LinearConstants linear_constants(const Parent& p, double n);

// Combined constants of two blocks normalized by block 2:
//   alpha_n = alpha_1 * (1/alpha_2)^(beta_1/beta_2),  beta_n = beta_1/beta_2,
// evaluated in log space.
std::pair<double, double> combine_log(double log_alpha1, double beta1,
                                      double log_alpha2, double beta2);
std::pair<double, double> combine(double alpha1, double beta1, double alpha2, double beta2);

// Block-size couplings n2 = n2(n1).
struct Coupling {
    enum Rule { Proportional, Power, LogPower, LogLogPower } rule{Proportional};
    double a{1.0};  // prefactor (Power/LogPower/LogLogPower)
    double c{1.0};  // factor (Proportional) or exponent otherwise

    double n2(double n1) const;
    std::string label() const;
};

enum class RegimeCase { Accelerated, SingleDominant, LeftTruncated, Inconclusive };

struct RegimeReport {
    RegimeCase regime{RegimeCase::Inconclusive};
    int dominant_block{0};          // 1 or 2 when SingleDominant
    int normalized_by{2};           // block whose constants the limit statement uses
    double A{0.0}, B{0.0};          // limits of the combined constants (may be inf)
    double C{0.0};                  // -lim (log alpha_n)/beta_n when finite
    std::optional<double> jump_x0;  // LeftTruncated only
    std::optional<Model> limit_model;
    std::vector<std::string> notes;
};

// Symbolic classification of the limit regime as n1 -> infinity under the
// given coupling (Proportional / Power / LogPower / LogLogPower).
RegimeReport classify_regime(const Parent& p1, const Parent& p2, const Coupling& coupling);

nlohmann::json regime_to_json(const RegimeReport& r);

// Quantile of the skew-normal distribution, bisected to 1e-10.
double skew_normal_quantile(double p, double lambda);

}  // namespace pmax
