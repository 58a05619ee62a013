#pragma once

// One-sample goodness-of-fit statistics (Kolmogorov-Smirnov, Cramer-von
// Mises, Anderson-Darling) with asymptotic or parametric-bootstrap p-values,
// the likelihood-ratio test for a single model nested in an accelerated one,
// and P-P/Q-Q diagnostic points.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pmax/distributions.hpp"

namespace pmax {

enum class TestMethod { KS, CVM, AD, LRT };

enum class PMethod { Asymptotic, Bootstrap };

struct TestResult {
    TestMethod method{TestMethod::KS};
    double statistic{0.0};
    double p_value{1.0};
    PMethod p_method{PMethod::Asymptotic};
    int n_boot{0};
};

using CdfFn = std::function<double(double)>;

// Statistic plus asymptotic (parameters-known) p-value against an arbitrary
// reference cdf. AD raises std::domain_error when some cdf value is exactly
// 0 or 1 (support violation); KS and CVM proceed.
TestResult gof_statistic(TestMethod method, const std::vector<double>& data, const CdfFn& cdf);

struct BootstrapOptions {
    int n_boot{999};
    std::uint64_t seed{42};
    int threads{0};
    // Optional refit applied to every resample (estimated-parameter null);
    // without it resamples are tested against the given model directly.
    std::function<Model(const std::vector<double>&)> refit;
};

// Statistic against a model, with either asymptotic or parametric-bootstrap
// p-value.
TestResult gof_test(TestMethod method, const std::vector<double>& data, const Model& model,
                    PMethod p_method = PMethod::Asymptotic,
                    const BootstrapOptions& boot = BootstrapOptions{});

// Asymptotic null distributions, exposed for verification.
double ks_asymptotic_pvalue(double d, std::size_t n);  // series truncated at 100 terms
double cvm_limit_cdf(double x);                        // limiting W^2 distribution
double ad_limit_cdf(double z);                         // limiting A^2 distribution

// 2 * (acc - single) log-likelihood difference against chi-square(3).
struct LrtInput {
    double loglik{0.0};
    int n_params{0};
    bool converged{true};
    Orientation orientation{Orientation::Max};
};
TestResult lrt(const LrtInput& single_fit, const LrtInput& acc_fit);

struct PpQqRow {
    double empirical_p, model_p, empirical_q, model_q;
};
std::vector<PpQqRow> pp_qq_points(const std::vector<double>& data, const Model& model);

const char* test_method_name(TestMethod m);
nlohmann::json test_result_to_json(const TestResult& t);

}  // namespace pmax
