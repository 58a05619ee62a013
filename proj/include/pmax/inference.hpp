#pragma once

// Maximum likelihood for single and accelerated models on the positive half
// line (max and min orientation), the left-truncated mixed likelihood, the
// competing-risk minimum density with a common left endpoint, and a Monte
// Carlo harness checking consistency and Wald coverage of those estimates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmax/distributions.hpp"

namespace pmax {

enum class ModelKind { PMax, AccPMax, PMin, AccPMin, LeftTruncated, AccLMin };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

// log-likelihood of a single log-GEV model; -inf when some observation
// violates the support bracket (distinct from bad data, which throws).
double loglik_single(const LogGev& g, const std::vector<double>& data);

// Product-of-cdfs likelihood: sum_i log sum_j [ pdf_j(z_i) prod_{l!=j} cdf_l(z_i) ],
// evaluated through a log-sum-exp. Reduces exactly to loglik_single at k = 1.
double loglik_accelerated(const std::vector<LogGev>& comps, const std::vector<double>& data);

// Minimum of two Weibull-type risks sharing the left endpoint theta, in the
// (theta, sigma_j, alpha_j) parameterization with alpha_j = -1/xi_j > 1.
struct AccLMin {
    double theta{0.0};
    double sigma1{1.0}, alpha1{2.0};
    double sigma2{1.0}, alpha2{3.0};
};

double acc_lmin_log_pdf(const AccLMin& p, double x);
double acc_lmin_pdf(const AccLMin& p, double x);
double acc_lmin_cdf(const AccLMin& p, double x);
// The slowly varying factor g with f(x) = (x-theta)^(alpha1-1) g(x-theta);
// g(0+) = alpha1 * (1/(sigma1*alpha1))^alpha1 when alpha1 < alpha2.
double acc_lmin_g(const AccLMin& p, double x);
std::vector<double> acc_lmin_sample(const AccLMin& p, std::size_t n, std::uint64_t seed);
double acc_lmin_loglik(const AccLMin& p, const std::vector<double>& data);

struct FitOptions {
    int restarts{20};
    std::uint64_t seed{42};
    double tolerance{1e-9};
    int threads{0};
    std::optional<double> x0;  // known truncation point (LeftTruncated only)
};

struct FitResult {
    ModelKind kind{ModelKind::PMax};
    std::optional<Model> model;      // fitted model (except AccLMin)
    std::optional<AccLMin> acc_lmin; // fitted parameters for AccLMin
    std::vector<std::string> param_names;
    std::vector<double> estimates;
    std::vector<double> std_errors;  // empty when the information matrix is not PD
    double loglik{0.0};
    bool converged{false};
    bool info_pd{false};
    double gradient_norm{0.0};
    int restarts_used{0};
    std::vector<double> info;  // observed information, row-major
    std::vector<std::string> notes;
};

// Multi-start Nelder-Mead maximum likelihood. Non-convergence is reported in
// the result, never silently; standard errors come from the inverse observed
// information (central differences).
FitResult fit(ModelKind kind, const std::vector<double>& data, const FitOptions& opts = {});

nlohmann::json fit_result_to_json(const FitResult& r);

// Observed information (negative Hessian of fn) by central differences.
std::vector<double> observed_information(const std::function<double(const std::vector<double>&)>& loglik,
                                         const std::vector<double>& theta);

// ----- Consistency / asymptotic-normality validation -----------------------

struct ValidationConfig {
    double alpha1{3.0}, alpha2{6.0};
    double sigma1{1.0}, sigma2{1.0};
    double theta{0.0};
    std::vector<int> sample_sizes{500, 2000, 8000};
    int reps{200};
    std::uint64_t seed{42};
    int threads{0};
    int restarts{3};
};

struct ValidationRow {
    int n{0};
    std::vector<double> rmse;      // per parameter (theta, sigma1, alpha1, sigma2, alpha2)
    std::vector<double> coverage;  // Wald 95% coverage per parameter (alpha1 > 2 branch)
    int n_converged{0};
};

struct ValidationReport {
    std::vector<std::string> param_names;
    std::vector<ValidationRow> rows;
    bool normality_branch{false};  // alpha1 > 2 and alpha1 < alpha2 - 2
};

// Rejects configurations outside the consistency conditions
// (alpha1 > 1 with alpha1 = alpha2 or alpha1 < alpha2 - 1; or alpha1 > 2 with
// alpha1 < alpha2 - 2), naming the violated inequality.
ValidationReport validate_consistency_normality(const ValidationConfig& cfg);

nlohmann::json validation_to_json(const ValidationReport& r);

}  // namespace pmax
