#include "pmax/gof.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmax/rng.hpp"
#include "pmax/special.hpp"
#include "pmax/util.hpp"

namespace pmax {

namespace {

// Ordered model-cdf values of the sorted sample.
std::vector<double> u_values(const std::vector<double>& data, const CdfFn& cdf) {
    if (data.empty()) throw std::invalid_argument("gof: empty sample");
    std::vector<double> u = data;
    std::sort(u.begin(), u.end());
    for (auto& x : u) x = cdf(x);
    return u;
}

double ks_from_u(const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, (i + 1) / n - u[i]);
        d = std::max(d, u[i] - i / n);
    }
    return d;
}

double cvm_from_u(const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double w2 = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double diff = u[i] - (2.0 * (i + 1) - 1.0) / (2.0 * n);
        w2 += diff * diff;
    }
    return w2;
}

double ad_from_u(const std::vector<double>& u) {
    const std::size_t n = u.size();
    for (double v : u)
        if (v <= 0.0 || v >= 1.0)
            throw std::domain_error("anderson-darling: sample point outside the model support "
                                    "(cdf value exactly 0 or 1)");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += (2.0 * (i + 1) - 1.0) * (std::log(u[i]) + std::log1p(-u[n - 1 - i]));
    return -static_cast<double>(n) - s / static_cast<double>(n);
}

}  // namespace

double ks_asymptotic_pvalue(double d, std::size_t n) {
    const double t = std::sqrt(static_cast<double>(n)) * d;
    if (t <= 0.0) return 1.0;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * t * t);
        p += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

// Limiting Cramer-von Mises distribution via the classical Bessel-K series.
double cvm_limit_cdf(double x) {
    if (x <= 1e-3) return 0.0;
    if (x >= 20.0) return 1.0;
    double sum = 0.0;
    double binom = 1.0;  // C(2j, j) / 4^j
    for (int j = 0; j < 12; ++j) {
        if (j > 0) binom *= (2.0 * j - 1.0) / (2.0 * j);
        const double y = (4.0 * j + 1.0) * (4.0 * j + 1.0) / (16.0 * x);
        if (y > 700.0) break;
        sum += binom * std::sqrt(4.0 * j + 1.0) * std::exp(-y) * std::cyl_bessel_k(0.25, y);
        if (binom * std::exp(-y) < 1e-18) break;
    }
    return std::clamp(sum / (M_PI * std::sqrt(x)), 0.0, 1.0);
}

// Limiting Anderson-Darling distribution, Marsaglia's two-branch form.
double ad_limit_cdf(double z) {
    if (z <= 0.0) return 0.0;
    if (z < 2.0) {
        return std::pow(z, -0.5) * std::exp(-1.2337141 / z) *
               (2.00012 +
                (0.247105 - (0.0649821 - (0.0347962 - (0.0116720 - 0.00168691 * z) * z) * z) * z) *
                    z) /
               std::sqrt(M_PI);
    }
    return std::exp(
        -std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) *
                                          z) *
                               z));
}

TestResult gof_statistic(TestMethod method, const std::vector<double>& data, const CdfFn& cdf) {
    const std::vector<double> u = u_values(data, cdf);
    TestResult r;
    r.method = method;
    r.p_method = PMethod::Asymptotic;
    switch (method) {
        case TestMethod::KS:
            r.statistic = ks_from_u(u);
            r.p_value = ks_asymptotic_pvalue(r.statistic, u.size());
            break;
        case TestMethod::CVM:
            r.statistic = cvm_from_u(u);
            r.p_value = 1.0 - cvm_limit_cdf(r.statistic);
            break;
        case TestMethod::AD:
            r.statistic = ad_from_u(u);
            r.p_value = 1.0 - ad_limit_cdf(r.statistic);
            break;
        case TestMethod::LRT:
            throw std::invalid_argument("gof_statistic: LRT needs two fits, use lrt()");
    }
    return r;
}

TestResult gof_test(TestMethod method, const std::vector<double>& data, const Model& model,
                    PMethod p_method, const BootstrapOptions& boot) {
    const CdfFn cdf = [&model](double x) { return model.cdf(x); };
    TestResult r = gof_statistic(method, data, cdf);
    if (p_method == PMethod::Asymptotic) return r;

    if (boot.n_boot < 1) throw std::invalid_argument("gof_test: n_boot >= 1 required");
    const std::size_t n = data.size();
    std::vector<int> exceed(boot.n_boot, 0);
    parallel_for(boot.n_boot, boot.threads, [&](std::int64_t b) {
        const std::vector<double> resample =
            model.sample(n, substream_seed(boot.seed, static_cast<std::uint64_t>(b)));
        const Model refitted = boot.refit ? boot.refit(resample) : model;
        const CdfFn bcdf = [&refitted](double x) { return refitted.cdf(x); };
        double stat;
        try {
            stat = gof_statistic(method, resample, bcdf).statistic;
        } catch (const std::domain_error&) {
            stat = inf;  // resample outside the refitted support counts as extreme
        }
        exceed[b] = stat >= r.statistic ? 1 : 0;
    });
    int count = 0;
    for (int e : exceed) count += e;
    r.p_method = PMethod::Bootstrap;
    r.n_boot = boot.n_boot;
    r.p_value = (count + 1.0) / (boot.n_boot + 1.0);
    return r;
}

TestResult lrt(const LrtInput& single_fit, const LrtInput& acc_fit) {
    if (!single_fit.converged || !acc_fit.converged)
        throw std::invalid_argument("lrt: both fits must have converged");
    if (single_fit.orientation != acc_fit.orientation)
        throw std::invalid_argument("lrt: fits have different orientations (not nested)");
    const int df = acc_fit.n_params - single_fit.n_params;
    if (df != 3)
        throw std::invalid_argument("lrt: expected a single model nested in a k=2 accelerated "
                                    "model (3 extra parameters)");
    TestResult r;
    r.method = TestMethod::LRT;
    r.statistic = 2.0 * (acc_fit.loglik - single_fit.loglik);
    if (r.statistic < -1e-8)
        throw std::runtime_error("lrt: negative statistic; the accelerated fit is worse than the "
                                 "nested single fit (optimizer failure?)");
    r.statistic = std::max(r.statistic, 0.0);
    r.p_value = chisq_sf(r.statistic, df);
    return r;
}

std::vector<PpQqRow> pp_qq_points(const std::vector<double>& data, const Model& model) {
    if (data.empty()) throw std::invalid_argument("pp_qq_points: empty sample");
    std::vector<double> x = sorted_copy(data);
    const double n = static_cast<double>(x.size());
    std::vector<PpQqRow> rows(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = (i + 1) / (n + 1.0);
        rows[i] = {p, model.cdf(x[i]), x[i], model.quantile(p)};
    }
    return rows;
}

const char* test_method_name(TestMethod m) {
    switch (m) {
        case TestMethod::KS: return "ks";
        case TestMethod::CVM: return "cvm";
        case TestMethod::AD: return "ad";
        case TestMethod::LRT: return "lrt";
    }
    return "?";
}

nlohmann::json test_result_to_json(const TestResult& t) {
    nlohmann::json j = {{"method", test_method_name(t.method)},
                        {"statistic", t.statistic},
                        {"p_value", t.p_value},
                        {"p_method", t.p_method == PMethod::Asymptotic ? "asymptotic" : "bootstrap"}};
    if (t.p_method == PMethod::Bootstrap) j["n_boot"] = t.n_boot;
    return j;
}

}  // namespace pmax
