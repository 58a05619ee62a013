#include "pmax/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmax/nelder_mead.hpp"
#include "pmax/rng.hpp"
#include "pmax/util.hpp"

namespace pmax {

namespace {

constexpr double kXiLo = -1.0 + 1e-6;
constexpr double kXiHi = 5.0;

const char* kLmNames[] = {"theta", "sigma1", "alpha1", "sigma2", "alpha2"};

void require_positive_data(const std::vector<double>& data) {
    if (data.empty()) throw std::invalid_argument("fit: empty data");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(data[i] > 0.0) || !std::isfinite(data[i])) {
            std::ostringstream msg;
            msg << "data point " << i + 1 << " is not a positive real (" << data[i] << ")";
            throw std::invalid_argument(msg.str());
        }
}

// Per-observation log density and log cdf of the log-GEV model at log z.
struct LogGevTerms {
    double log_pdf;
    double log_cdf;
};

inline LogGevTerms loggev_terms(double lz, double mu, double sigma, double xi) {
    const double s = (lz - mu) / sigma;
    double u;
    if (std::abs(xi) < kXiZeroTol) {
        u = s;
    } else {
        const double w = 1.0 + xi * s;
        if (w <= 0.0) {
            if (xi > 0.0) return {-inf, -inf};  // below the lower support end
            return {-inf, 0.0};                 // above the upper end: cdf = 1
        }
        u = std::log1p(xi * s) / xi;
    }
    const double t = std::exp(-u);
    return {-(1.0 + xi) * u - t - std::log(sigma) - lz, -t};
}

double loglik_from_logs(const std::vector<LogGev>& comps, const std::vector<double>& logz) {
    const int k = static_cast<int>(comps.size());
    double total = 0.0;
    if (k == 1) {
        for (const double lz : logz) {
            const double lp = loggev_terms(lz, comps[0].mu, comps[0].sigma, comps[0].xi).log_pdf;
            if (lp == -inf) return -inf;
            total += lp;
        }
        return total;
    }
    if (k == 2) {
        const auto &c1 = comps[0], &c2 = comps[1];
        for (const double lz : logz) {
            const LogGevTerms t1 = loggev_terms(lz, c1.mu, c1.sigma, c1.xi);
            const LogGevTerms t2 = loggev_terms(lz, c2.mu, c2.sigma, c2.xi);
            const double a = t1.log_pdf + t2.log_cdf;
            const double b = t2.log_pdf + t1.log_cdf;
            double lse;
            if (a == -inf && b == -inf) return -inf;
            if (a >= b) lse = a + std::log1p(b == -inf ? 0.0 : std::exp(b - a));
            else lse = b + std::log1p(std::exp(a - b));
            total += lse;
        }
        return total;
    }
    std::vector<double> lp(k), lc(k), terms(k);
    for (const double lz : logz) {
        for (int j = 0; j < k; ++j) {
            const LogGevTerms t = loggev_terms(lz, comps[j].mu, comps[j].sigma, comps[j].xi);
            lp[j] = t.log_pdf;
            lc[j] = t.log_cdf;
        }
        for (int j = 0; j < k; ++j) {
            double t = lp[j];
            for (int l = 0; l < k; ++l)
                if (l != j) t += lc[l];
            terms[j] = t;
        }
        const double lse = log_sum_exp(terms.data(), k);
        if (lse == -inf) return -inf;
        total += lse;
    }
    return total;
}

std::vector<double> log_data(const std::vector<double>& data) {
    require_positive_data(data);
    std::vector<double> lz(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) lz[i] = std::log(data[i]);
    return lz;
}

// Hosking's probability-weighted-moment estimator for the GEV, used as a
// starting point. Input must be sorted.
GevParams pwm_gev(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double di = static_cast<double>(i);
        b0 += x[i];
        if (n > 1) b1 += x[i] * di / (n - 1.0);
        if (n > 2) b2 += x[i] * di * (di - 1.0) / ((n - 1.0) * (n - 2.0));
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    const double l2 = 2.0 * b1 - b0;
    const double l3 = 6.0 * b2 - 6.0 * b1 + b0;
    GevParams p;
    if (!(l2 > 0.0)) {  // degenerate spread; crude moment fallback
        double m = b0, s2 = 0.0;
        for (double v : x) s2 += (v - m) * (v - m);
        s2 = std::sqrt(s2 / std::max(1.0, n - 1.0));
        p.sigma = std::max(1e-6, s2);
        p.mu = m - 0.5772156649015329 * p.sigma;
        p.xi = 0.1;
        return p;
    }
    const double t3 = l3 / l2;
    const double c = 2.0 / (3.0 + t3) - std::log(2.0) / std::log(3.0);
    const double kk = 7.8590 * c + 2.9554 * c * c;  // Hosking's k = -xi
    if (std::abs(kk) < 1e-3) {
        p.sigma = l2 / std::log(2.0);
        p.mu = b0 - 0.5772156649015329 * p.sigma;
        p.xi = 0.0;
    } else {
        const double gk = std::tgamma(1.0 + kk);
        p.sigma = l2 * kk / (gk * (1.0 - std::pow(2.0, -kk)));
        p.mu = b0 - p.sigma * (1.0 - gk) / kk;
        p.xi = -kk;
    }
    if (!(p.sigma > 1e-8)) p.sigma = 1e-8;
    p.xi = std::clamp(p.xi, kXiLo + 1e-3, kXiHi - 1e-3);
    return p;
}

// ---------------------------------------------------------------------------
// Generic multi-start driver
// ---------------------------------------------------------------------------

struct Problem {
    // Maximizes loglik(theta) over natural parameters theta.
    std::function<double(const std::vector<double>&)> loglik;
    // Search-space encode/decode (log-sigma coordinates, boxes as penalties).
    std::function<std::vector<double>(const std::vector<double>&)> encode;
    std::function<std::vector<double>(const std::vector<double>&)> decode;
    std::function<bool(const std::vector<double>&)> feasible;
    std::vector<std::vector<double>> starts;  // natural space
    std::vector<double> search_step;
    std::vector<std::string> names;
};

struct Driven {
    std::vector<double> theta;
    double loglik{-inf};
    bool any_finite{false};
    int restarts_used{0};
};

Driven drive(const Problem& prob, const FitOptions& opts) {
    const int n_starts = static_cast<int>(prob.starts.size());
    std::vector<double> best_f(n_starts, inf);
    std::vector<std::vector<double>> best_x(n_starts);
    auto objective = [&prob](const std::vector<double>& s) {
        const std::vector<double> nat = prob.decode(s);
        if (!prob.feasible(nat)) return inf;
        const double ll = prob.loglik(nat);
        return std::isfinite(ll) ? -ll : inf;
    };
    parallel_for(n_starts, opts.threads, [&](std::int64_t i) {
        const NelderMeadResult r = nelder_mead_restart(objective, prob.encode(prob.starts[i]),
                                                       prob.search_step, opts.tolerance);
        best_f[i] = r.fmin;
        best_x[i] = r.x;
    });
    Driven out;
    out.restarts_used = n_starts;
    for (int i = 0; i < n_starts; ++i) {  // ties broken by start index
        if (best_f[i] < (out.any_finite ? -out.loglik : inf)) {
            out.loglik = -best_f[i];
            out.theta = prob.decode(best_x[i]);
            out.any_finite = std::isfinite(best_f[i]);
        }
    }
    return out;
}

std::vector<double> gradient_of(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& theta) {
    const int n = static_cast<int>(theta.size());
    std::vector<double> g(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double h = 1e-6 * (1.0 + std::abs(theta[i]));
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<double> tp = theta, tm = theta;
            tp[i] += h;
            tm[i] -= h;
            const double fp = f(tp), fm = f(tm);
            if (std::isfinite(fp) && std::isfinite(fm)) {
                g[i] = (fp - fm) / (2.0 * h);
                break;
            }
            h *= 0.25;
        }
    }
    return g;
}

}  // namespace

std::vector<double> observed_information(
    const std::function<double(const std::vector<double>&)>& loglik,
    const std::vector<double>& theta) {
    const int n = static_cast<int>(theta.size());
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = 1e-4 * (1.0 + std::abs(theta[i]));

    auto eval = [&](std::vector<double> t) { return loglik(t); };
    const double f0 = eval(theta);
    std::vector<double> info(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<double> tp = theta, tm = theta;
            tp[i] += h[i];
            tm[i] -= h[i];
            const double fp = eval(tp), fm = eval(tm);
            if (std::isfinite(fp) && std::isfinite(fm)) {
                info[i * n + i] = -(fp - 2.0 * f0 + fm) / (h[i] * h[i]);
                break;
            }
            h[i] *= 0.25;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double hij = 1.0;
            double val = 0.0;
            bool ok = false;
            double hi = h[i], hj = h[j];
            for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
                std::vector<double> tpp = theta, tpm = theta, tmp = theta, tmm = theta;
                tpp[i] += hi; tpp[j] += hj;
                tpm[i] += hi; tpm[j] -= hj;
                tmp[i] -= hi; tmp[j] += hj;
                tmm[i] -= hi; tmm[j] -= hj;
                const double a = eval(tpp), b = eval(tpm), c = eval(tmp), d = eval(tmm);
                if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)) {
                    val = -(a - b - c + d) / (4.0 * hi * hj);
                    ok = true;
                }
                hi *= 0.25;
                hj *= 0.25;
            }
            (void)hij;
            info[i * n + j] = info[j * n + i] = val;
        }
    }
    return info;
}

// ---------------------------------------------------------------------------
// Public likelihoods
// ---------------------------------------------------------------------------

double loglik_single(const LogGev& g, const std::vector<double>& data) {
    return loglik_from_logs({g}, log_data(data));
}

double loglik_accelerated(const std::vector<LogGev>& comps, const std::vector<double>& data) {
    if (comps.empty()) throw std::invalid_argument("loglik_accelerated: k >= 1 required");
    return loglik_from_logs(comps, log_data(data));
}

// ---------------------------------------------------------------------------
// Accelerated l-min density
// ---------------------------------------------------------------------------

namespace {

void check_acc_lmin(const AccLMin& p) {
    if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0))
        throw std::invalid_argument("acc-lmin: scales must be positive");
    if (!(p.alpha1 > 1.0) || !(p.alpha2 > 1.0))
        throw std::invalid_argument("acc-lmin: shape parameters must exceed 1");
}

// The two shape parameters are exchangeable; evaluate in sorted order.
AccLMin ordered(const AccLMin& p) {
    AccLMin q = p;
    if (q.alpha1 > q.alpha2) {
        std::swap(q.alpha1, q.alpha2);
        std::swap(q.sigma1, q.sigma2);
    }
    return q;
}

}  // namespace

double acc_lmin_log_pdf(const AccLMin& pin, double x) {
    check_acc_lmin(pin);
    const AccLMin p = ordered(pin);
    if (!(x > p.theta)) return -inf;
    const double y = x - p.theta;
    const double a1 = p.sigma1 * p.alpha1, a2 = p.sigma2 * p.alpha2;
    const double l1 = -std::log(p.sigma1) + (p.alpha1 - 1.0) * std::log(y / a1);
    const double l2 = -std::log(p.sigma2) + (p.alpha2 - 1.0) * std::log(y / a2);
    const double hazards[2] = {l1, l2};
    return log_sum_exp(hazards, 2) - std::pow(y / a1, p.alpha1) - std::pow(y / a2, p.alpha2);
}

double acc_lmin_pdf(const AccLMin& p, double x) { return std::exp(acc_lmin_log_pdf(p, x)); }

double acc_lmin_cdf(const AccLMin& pin, double x) {
    check_acc_lmin(pin);
    const AccLMin p = ordered(pin);
    if (!(x > p.theta)) return 0.0;
    const double y = x - p.theta;
    return -std::expm1(-std::pow(y / (p.sigma1 * p.alpha1), p.alpha1) -
                       std::pow(y / (p.sigma2 * p.alpha2), p.alpha2));
}

double acc_lmin_g(const AccLMin& pin, double x) {
    check_acc_lmin(pin);
    const AccLMin p = ordered(pin);
    if (!(x > 0.0)) throw std::domain_error("acc_lmin_g: x > 0 required");
    const double a1 = p.sigma1 * p.alpha1, a2 = p.sigma2 * p.alpha2;
    const double bracket = std::pow(1.0 / a1, p.alpha1 - 1.0) / p.sigma1 +
                           std::pow(1.0 / a2, p.alpha2 - 1.0) / p.sigma2 *
                               std::pow(x, p.alpha2 - p.alpha1);
    return bracket * std::exp(-std::pow(x / a1, p.alpha1) - std::pow(x / a2, p.alpha2));
}

std::vector<double> acc_lmin_sample(const AccLMin& pin, std::size_t n, std::uint64_t seed) {
    check_acc_lmin(pin);
    const AccLMin p = ordered(pin);
    const double a1 = p.sigma1 * p.alpha1, a2 = p.sigma2 * p.alpha2;
    std::vector<double> out(n);
    Rng rng(seed);
    for (auto& v : out) {
        const double w1 = a1 * std::pow(rng.exponential(), 1.0 / p.alpha1);
        const double w2 = a2 * std::pow(rng.exponential(), 1.0 / p.alpha2);
        v = p.theta + std::min(w1, w2);
    }
    return out;
}

double acc_lmin_loglik(const AccLMin& p, const std::vector<double>& data) {
    double total = 0.0;
    for (double x : data) {
        const double lp = acc_lmin_log_pdf(p, x);
        if (lp == -inf) return -inf;
        total += lp;
    }
    return total;
}

// ---------------------------------------------------------------------------
// fit()
// ---------------------------------------------------------------------------

namespace {

std::vector<double> pack_loggev(const std::vector<LogGev>& comps) {
    std::vector<double> v;
    for (const auto& c : comps) {
        v.push_back(c.mu);
        v.push_back(c.sigma);
        v.push_back(c.xi);
    }
    return v;
}

std::vector<LogGev> unpack_loggev(const std::vector<double>& v) {
    std::vector<LogGev> comps;
    for (std::size_t i = 0; i + 2 < v.size() + 1; i += 3)
        comps.push_back(LogGev(v[i], std::max(v[i + 1], 1e-300), v[i + 2]));
    return comps;
}

bool loggev_feasible(const std::vector<double>& nat) {
    for (std::size_t i = 0; i + 2 < nat.size() + 1; i += 3) {
        if (!(nat[i + 1] > 0.0)) return false;
        if (!(nat[i + 2] > kXiLo) || !(nat[i + 2] <= kXiHi)) return false;
    }
    return true;
}

// Encode/decode between natural (mu, sigma, xi)* and search (mu, log sigma, xi)*.
std::vector<double> loggev_encode(const std::vector<double>& nat) {
    std::vector<double> s = nat;
    for (std::size_t i = 1; i < s.size(); i += 3) s[i] = std::log(s[i]);
    return s;
}
std::vector<double> loggev_decode(const std::vector<double>& sv) {
    std::vector<double> nat = sv;
    for (std::size_t i = 1; i < nat.size(); i += 3) nat[i] = std::exp(nat[i]);
    return nat;
}

std::vector<std::string> loggev_names(int k) {
    std::vector<std::string> names;
    for (int j = 1; j <= k; ++j) {
        const std::string suffix = k == 1 ? "" : std::to_string(j);
        names.push_back("mu" + suffix);
        names.push_back("sigma" + suffix);
        names.push_back("xi" + suffix);
    }
    return names;
}

std::vector<std::vector<double>> loggev_starts(const std::vector<double>& logz, int k,
                                               int restarts, std::uint64_t seed) {
    std::vector<double> sorted = sorted_copy(logz);
    const GevParams whole = pwm_gev(sorted);
    std::vector<std::vector<double>> starts;
    if (k == 1) {
        starts.push_back({whole.mu, whole.sigma, whole.xi});
    } else {
        const std::size_t half = sorted.size() / 2;
        std::vector<double> lower(sorted.begin(), sorted.begin() + half);
        std::vector<double> upper(sorted.begin() + half, sorted.end());
        const GevParams lo = lower.size() > 5 ? pwm_gev(lower) : whole;
        const GevParams hi = upper.size() > 5 ? pwm_gev(upper) : whole;
        // Dominant component first, a lagging one second.
        starts.push_back({whole.mu, whole.sigma, whole.xi,
                          whole.mu - whole.sigma, whole.sigma, whole.xi});
        starts.push_back({hi.mu, hi.sigma, hi.xi, lo.mu, lo.sigma, lo.xi});
        starts.push_back({whole.mu, whole.sigma, whole.xi,
                          whole.mu - 2.0 * whole.sigma, 0.5 * whole.sigma,
                          std::clamp(whole.xi - 0.4, kXiLo + 1e-3, kXiHi)});
    }
    Rng rng(substream_seed(seed, 0x5eed));
    const std::size_t fixed = starts.size();
    while (starts.size() < static_cast<std::size_t>(restarts)) {
        std::vector<double> s = starts[starts.size() % fixed];
        for (std::size_t i = 0; i < s.size(); i += 3) {
            s[i] += whole.sigma * rng.uniform(-0.8, 0.8);
            s[i + 1] *= std::exp(rng.uniform(-0.7, 0.7));
            s[i + 2] = std::clamp(s[i + 2] + rng.uniform(-0.3, 0.3), kXiLo + 1e-3, kXiHi);
        }
        starts.push_back(std::move(s));
    }
    return starts;
}

FitResult fit_loggev_family(ModelKind kind, const std::vector<double>& data,
                            const FitOptions& opts) {
    const bool is_min = kind == ModelKind::PMin || kind == ModelKind::AccPMin;
    const bool is_acc = kind == ModelKind::AccPMax || kind == ModelKind::AccPMin;
    const int k = is_acc ? 2 : 1;

    require_positive_data(data);
    FitResult out;
    out.kind = kind;
    out.param_names = loggev_names(k);

    // A p-min model on the positive axis is the law of the reciprocal of its
    // max form with the same parameters, so fit the max form to 1/z and add
    // the (parameter-free) Jacobian -2 sum log z back in.
    std::vector<double> logz = log_data(data);
    double jacobian = 0.0;
    if (is_min) {
        for (auto& lz : logz) {
            jacobian -= 2.0 * lz;
            lz = -lz;
        }
    }

    const double zmin = *std::min_element(logz.begin(), logz.end());
    const double zmax = *std::max_element(logz.begin(), logz.end());
    if (!(zmax > zmin)) {
        out.notes.push_back("degenerate sample: all observations equal");
        return out;
    }

    Problem prob;
    prob.loglik = [&logz](const std::vector<double>& nat) {
        return loglik_from_logs(unpack_loggev(nat), logz);
    };
    prob.encode = loggev_encode;
    prob.decode = loggev_decode;
    prob.feasible = loggev_feasible;
    prob.names = out.param_names;
    prob.starts = loggev_starts(logz, k, std::max(opts.restarts, k == 1 ? 4 : 6), opts.seed);
    prob.search_step.assign(3 * k, 0.0);
    for (int j = 0; j < k; ++j) {
        prob.search_step[3 * j] = 0.25;      // mu
        prob.search_step[3 * j + 1] = 0.3;   // log sigma
        prob.search_step[3 * j + 2] = 0.12;  // xi
    }

    Driven d = drive(prob, opts);
    out.restarts_used = d.restarts_used;
    if (!d.any_finite) {
        out.notes.push_back("no start produced a finite likelihood");
        return out;
    }

    // Min models report locations in the (log z - mu) parameterization, the
    // negation of the max-form location fitted on the reciprocal data.
    std::vector<LogGev> comps = unpack_loggev(d.theta);
    if (is_min)
        for (auto& c : comps) c.mu = -c.mu;
    // Components ordered by location, largest first.
    std::sort(comps.begin(), comps.end(),
              [](const LogGev& a, const LogGev& b) { return a.mu > b.mu; });
    out.estimates = pack_loggev(comps);
    out.loglik = d.loglik + jacobian;
    out.model = Model(std::vector<Component>(comps.begin(), comps.end()),
                      is_min ? Orientation::Min : Orientation::Max);

    const auto natural_loglik = [&prob, is_min, jacobian](const std::vector<double>& nat) {
        std::vector<double> v = nat;
        if (is_min)
            for (std::size_t i = 0; i < v.size(); i += 3) v[i] = -v[i];
        return loggev_feasible(v) ? prob.loglik(v) + (is_min ? jacobian : 0.0) : -inf;
    };
    out.info = observed_information(natural_loglik, out.estimates);
    std::vector<double> cov = out.info;
    out.info_pd = spd_inverse(cov, static_cast<int>(out.estimates.size()));
    if (out.info_pd) {
        out.std_errors.resize(out.estimates.size());
        for (std::size_t i = 0; i < out.estimates.size(); ++i)
            out.std_errors[i] = std::sqrt(cov[i * out.estimates.size() + i]);
    } else {
        out.notes.push_back("observed information is not positive definite; standard errors "
                            "withheld");
    }
    const std::vector<double> grad = gradient_of(natural_loglik, out.estimates);
    for (double g : grad) out.gradient_norm = std::max(out.gradient_norm, std::abs(g));
    out.converged = out.gradient_norm <= 1e-4 * (1.0 + std::abs(out.loglik)) && out.info_pd;
    for (const auto& c : comps)
        if (c.xi <= kXiLo + 1e-5)
            out.notes.push_back("a shape estimate sits at the lower search bound; the maximum "
                                "likelihood estimator may not exist for shapes at or below -1");
    return out;
}

FitResult fit_left_truncated(const std::vector<double>& data, const FitOptions& opts) {
    require_positive_data(data);
    FitResult out;
    out.kind = ModelKind::LeftTruncated;
    out.param_names = loggev_names(1);

    const double mn = *std::min_element(data.begin(), data.end());
    std::size_t atoms = 0;
    for (double v : data) atoms += v == mn;
    double x0;
    if (atoms >= 2) {
        x0 = mn;
    } else if (opts.x0) {
        x0 = *opts.x0;
        if (!(x0 <= mn)) throw std::invalid_argument("left-truncated fit: x0 exceeds the minimum");
        atoms = x0 == mn ? 1 : 0;
    } else {
        throw std::invalid_argument("left-truncated fit: no repeated minimum detected; pass the "
                                    "truncation point explicitly");
    }
    std::vector<double> interior_log;
    for (double v : data)
        if (v > x0) interior_log.push_back(std::log(v));
    const double lx0 = std::log(x0);
    const double n_atoms = static_cast<double>(data.size() - interior_log.size());

    if (interior_log.empty()) {
        out.notes.push_back("degenerate sample: no observations above the truncation point");
        return out;
    }

    Problem prob;
    prob.loglik = [&](const std::vector<double>& nat) {
        const LogGev g(nat[0], std::max(nat[1], 1e-300), nat[2]);
        double ll = n_atoms > 0
                        ? n_atoms * gev_log_cdf(lx0, g.gev())
                        : 0.0;
        if (!std::isfinite(ll) || (n_atoms > 0 && ll == -inf)) return -inf;
        return ll + loglik_from_logs({g}, interior_log);
    };
    prob.encode = loggev_encode;
    prob.decode = loggev_decode;
    prob.feasible = loggev_feasible;
    prob.names = out.param_names;
    prob.starts = loggev_starts(interior_log, 1, std::max(opts.restarts, 4), opts.seed);
    prob.search_step = {0.25, 0.3, 0.12};

    Driven d = drive(prob, opts);
    out.restarts_used = d.restarts_used;
    if (!d.any_finite) {
        out.notes.push_back("no start produced a finite likelihood");
        return out;
    }
    out.estimates = d.theta;
    out.loglik = d.loglik;
    out.model = Model({LogGev(d.theta[0], d.theta[1], d.theta[2])}, Orientation::Max, x0);
    out.notes.push_back(atoms >= 2 ? "truncation point estimated as the repeated sample minimum"
                                   : "truncation point supplied by the caller");

    const auto natural_loglik = [&prob](const std::vector<double>& nat) {
        return loggev_feasible(nat) ? prob.loglik(nat) : -inf;
    };
    out.info = observed_information(natural_loglik, out.estimates);
    std::vector<double> cov = out.info;
    out.info_pd = spd_inverse(cov, 3);
    if (out.info_pd) {
        out.std_errors.resize(3);
        for (int i = 0; i < 3; ++i) out.std_errors[i] = std::sqrt(cov[i * 3 + i]);
    } else {
        out.notes.push_back("observed information is not positive definite; standard errors "
                            "withheld");
    }
    const std::vector<double> grad = gradient_of(natural_loglik, out.estimates);
    for (double g : grad) out.gradient_norm = std::max(out.gradient_norm, std::abs(g));
    out.converged = out.gradient_norm <= 1e-4 * (1.0 + std::abs(out.loglik)) && out.info_pd;
    return out;
}

FitResult fit_acc_lmin(const std::vector<double>& data, const FitOptions& opts) {
    if (data.empty()) throw std::invalid_argument("fit: empty data");
    FitResult out;
    out.kind = ModelKind::AccLMin;
    out.param_names.assign(std::begin(kLmNames), std::end(kLmNames));

    const double xmin = *std::min_element(data.begin(), data.end());
    const double xmax = *std::max_element(data.begin(), data.end());
    if (!(xmax > xmin)) {
        out.notes.push_back("degenerate sample: all observations equal");
        return out;
    }

    Problem prob;
    prob.loglik = [&data](const std::vector<double>& nat) {
        return acc_lmin_loglik({nat[0], nat[1], nat[2], nat[3], nat[4]}, data);
    };
    prob.encode = [](const std::vector<double>& nat) {
        return std::vector<double>{nat[0], std::log(nat[1]), nat[2], std::log(nat[3]), nat[4]};
    };
    prob.decode = [](const std::vector<double>& s) {
        return std::vector<double>{s[0], std::exp(s[1]), s[2], std::exp(s[3]), s[4]};
    };
    prob.feasible = [xmin](const std::vector<double>& nat) {
        return nat[0] < xmin && nat[1] > 0.0 && nat[3] > 0.0 && nat[2] > 1.0 + 1e-8 &&
               nat[4] > 1.0 + 1e-8 && nat[2] < 1e4 && nat[4] < 1e4;
    };
    prob.names = out.param_names;

    // Moment starts: a single Weibull fitted on the log scale, split into two
    // hazard components with staggered shapes.
    const double n = static_cast<double>(data.size());
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= n;
    const double spread = mean - xmin;
    const double theta0 = xmin - spread / n;
    double lmean = 0.0, lvar = 0.0;
    for (double v : data) lmean += std::log(v - theta0);
    lmean /= n;
    for (double v : data) {
        const double d = std::log(v - theta0) - lmean;
        lvar += d * d;
    }
    lvar /= std::max(1.0, n - 1.0);
    const double shape0 = std::max(1.3, M_PI / std::sqrt(6.0 * std::max(lvar, 1e-8)));
    const double scale0 = std::exp(lmean + 0.5772156649015329 / shape0);
    auto mk = [&](double a1, double a2, double th) {
        return std::vector<double>{th, scale0 / a1, a1, scale0 / a2 * 1.5, a2};
    };
    prob.starts.push_back(mk(shape0, 2.0 * shape0 + 1.5, theta0));
    prob.starts.push_back(mk(std::max(1.3, 0.7 * shape0), shape0 + 2.5, theta0));
    prob.starts.push_back(mk(shape0, shape0 + 1.2, xmin - 0.5 * spread));
    Rng rng(substream_seed(opts.seed, 0xacc));
    while (prob.starts.size() < static_cast<std::size_t>(std::max(opts.restarts, 3))) {
        std::vector<double> s = prob.starts[prob.starts.size() % 3];
        s[0] = xmin - spread / n * std::exp(rng.uniform(-2.0, 2.0));
        s[1] *= std::exp(rng.uniform(-0.5, 0.5));
        s[2] = std::max(1.2, s[2] * std::exp(rng.uniform(-0.3, 0.3)));
        s[3] *= std::exp(rng.uniform(-0.5, 0.5));
        s[4] = std::max(1.2, s[4] * std::exp(rng.uniform(-0.3, 0.3)));
        prob.starts.push_back(std::move(s));
    }
    prob.search_step = {0.5 * spread / std::sqrt(n), 0.3, 0.4, 0.3, 0.8};

    Driven d = drive(prob, opts);
    out.restarts_used = d.restarts_used;
    if (!d.any_finite) {
        out.notes.push_back("no start produced a finite likelihood");
        return out;
    }
    AccLMin fitted{d.theta[0], d.theta[1], d.theta[2], d.theta[3], d.theta[4]};
    fitted = ordered(fitted);
    out.acc_lmin = fitted;
    out.estimates = {fitted.theta, fitted.sigma1, fitted.alpha1, fitted.sigma2, fitted.alpha2};
    out.loglik = d.loglik;

    const auto natural_loglik = [&prob](const std::vector<double>& nat) {
        return prob.feasible(nat) ? prob.loglik(nat) : -inf;
    };
    out.info = observed_information(natural_loglik, out.estimates);
    std::vector<double> cov = out.info;
    out.info_pd = spd_inverse(cov, 5);
    if (out.info_pd) {
        out.std_errors.resize(5);
        for (int i = 0; i < 5; ++i) out.std_errors[i] = std::sqrt(cov[i * 5 + i]);
    } else {
        out.notes.push_back("observed information is not positive definite; standard errors "
                            "withheld");
    }
    const std::vector<double> grad = gradient_of(natural_loglik, out.estimates);
    for (double g : grad) out.gradient_norm = std::max(out.gradient_norm, std::abs(g));
    out.converged = out.gradient_norm <= 1e-4 * (1.0 + std::abs(out.loglik)) && out.info_pd;
    return out;
}

}  // namespace

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::PMax: return "pmax";
        case ModelKind::AccPMax: return "acc-pmax";
        case ModelKind::PMin: return "pmin";
        case ModelKind::AccPMin: return "acc-pmin";
        case ModelKind::LeftTruncated: return "left-truncated";
        case ModelKind::AccLMin: return "acc-lmin";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& s) {
    for (ModelKind k : {ModelKind::PMax, ModelKind::AccPMax, ModelKind::PMin, ModelKind::AccPMin,
                        ModelKind::LeftTruncated, ModelKind::AccLMin})
        if (s == model_kind_name(k)) return k;
    throw std::invalid_argument("unknown model kind: " + s);
}

FitResult fit(ModelKind kind, const std::vector<double>& data, const FitOptions& opts) {
    switch (kind) {
        case ModelKind::PMax:
        case ModelKind::AccPMax:
        case ModelKind::PMin:
        case ModelKind::AccPMin:
            return fit_loggev_family(kind, data, opts);
        case ModelKind::LeftTruncated:
            return fit_left_truncated(data, opts);
        case ModelKind::AccLMin:
            return fit_acc_lmin(data, opts);
    }
    throw std::invalid_argument("fit: unknown model kind");
}

nlohmann::json fit_result_to_json(const FitResult& r) {
    nlohmann::json est = nlohmann::json::object();
    nlohmann::json se = nlohmann::json::object();
    for (std::size_t i = 0; i < r.param_names.size(); ++i) {
        est[r.param_names[i]] = i < r.estimates.size() ? nlohmann::json(r.estimates[i])
                                                       : nlohmann::json(nullptr);
        se[r.param_names[i]] =
            i < r.std_errors.size() ? nlohmann::json(r.std_errors[i]) : nlohmann::json(nullptr);
    }
    nlohmann::json jmodel;
    if (r.model) {
        jmodel = model_to_json(*r.model);
    } else if (r.acc_lmin) {
        jmodel = {{"family", "acc-lmin"},
                  {"theta", r.acc_lmin->theta},
                  {"sigma1", r.acc_lmin->sigma1},
                  {"alpha1", r.acc_lmin->alpha1},
                  {"sigma2", r.acc_lmin->sigma2},
                  {"alpha2", r.acc_lmin->alpha2}};
    }
    return {{"kind", model_kind_name(r.kind)},
            {"model", jmodel},
            {"estimates", est},
            {"std_errors", se},
            {"loglik", r.loglik},
            {"converged", r.converged},
            {"gradient_norm", r.gradient_norm},
            {"restarts_used", r.restarts_used},
            {"notes", r.notes}};
}

// ---------------------------------------------------------------------------
// Theorem validation harness
// ---------------------------------------------------------------------------

ValidationReport validate_consistency_normality(const ValidationConfig& cfg) {
    double a1 = cfg.alpha1, a2 = cfg.alpha2, s1 = cfg.sigma1, s2 = cfg.sigma2;
    if (a1 > a2) {
        std::swap(a1, a2);
        std::swap(s1, s2);
    }
    const bool branch_i = a1 > 1.0 && (a1 == a2 || a1 < a2 - 1.0);
    const bool branch_ii = a1 > 2.0 && a1 < a2 - 2.0;
    if (!branch_i && !branch_ii) {
        std::ostringstream msg;
        msg << "configuration satisfies neither consistency condition: needs alpha1 > 1 with "
               "alpha1 = alpha2 or alpha1 < alpha2 - 1 (got alpha1 = "
            << a1 << ", alpha2 = " << a2 << ", alpha2 - 1 = " << a2 - 1.0
            << "), or alpha1 > 2 with alpha1 < alpha2 - 2 (alpha2 - 2 = " << a2 - 2.0 << ")";
        throw std::invalid_argument(msg.str());
    }

    ValidationReport rep;
    rep.param_names.assign(std::begin(kLmNames), std::end(kLmNames));
    rep.normality_branch = branch_ii;
    const AccLMin truth{cfg.theta, s1, a1, s2, a2};
    const double tv[5] = {truth.theta, truth.sigma1, truth.alpha1, truth.sigma2, truth.alpha2};

    for (std::size_t si = 0; si < cfg.sample_sizes.size(); ++si) {
        const int n = cfg.sample_sizes[si];
        ValidationRow row;
        row.n = n;
        std::vector<std::vector<double>> errs(cfg.reps);
        std::vector<std::vector<int>> covered(cfg.reps);
        std::vector<int> conv(cfg.reps, 0);
        parallel_for(cfg.reps, cfg.threads, [&](std::int64_t r) {
            const std::uint64_t rep_seed =
                substream_seed(cfg.seed, (static_cast<std::uint64_t>(si) << 32) | r);
            const std::vector<double> sample = acc_lmin_sample(truth, n, rep_seed);
            FitOptions fo;
            fo.restarts = cfg.restarts;
            fo.seed = substream_seed(rep_seed, 1);
            fo.threads = 1;
            const FitResult f = fit(ModelKind::AccLMin, sample, fo);
            if (f.estimates.size() == 5) {
                errs[r].resize(5);
                for (int i = 0; i < 5; ++i) errs[r][i] = f.estimates[i] - tv[i];
                if (rep.normality_branch && f.std_errors.size() == 5) {
                    covered[r].resize(5);
                    for (int i = 0; i < 5; ++i)
                        covered[r][i] =
                            std::abs(f.estimates[i] - tv[i]) <= 1.959963985 * f.std_errors[i];
                }
            }
            conv[r] = f.converged ? 1 : 0;
        });
        row.rmse.assign(5, 0.0);
        int used = 0;
        std::vector<int> cov_count(5, 0);
        int cov_used = 0;
        for (int r = 0; r < cfg.reps; ++r) {
            row.n_converged += conv[r];
            if (errs[r].size() == 5) {
                ++used;
                for (int i = 0; i < 5; ++i) row.rmse[i] += errs[r][i] * errs[r][i];
            }
            if (covered[r].size() == 5) {
                ++cov_used;
                for (int i = 0; i < 5; ++i) cov_count[i] += covered[r][i];
            }
        }
        for (int i = 0; i < 5; ++i) row.rmse[i] = std::sqrt(row.rmse[i] / std::max(1, used));
        if (rep.normality_branch && cov_used > 0) {
            row.coverage.resize(5);
            for (int i = 0; i < 5; ++i)
                row.coverage[i] = static_cast<double>(cov_count[i]) / cov_used;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

nlohmann::json validation_to_json(const ValidationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jr = {{"n", row.n}, {"n_converged", row.n_converged}};
        nlohmann::json rmse = nlohmann::json::object(), cov = nlohmann::json::object();
        for (std::size_t i = 0; i < r.param_names.size(); ++i) {
            rmse[r.param_names[i]] = row.rmse[i];
            if (row.coverage.size() == r.param_names.size())
                cov[r.param_names[i]] = row.coverage[i];
        }
        jr["rmse"] = rmse;
        if (!row.coverage.empty()) jr["coverage_95"] = cov;
        rows.push_back(std::move(jr));
    }
    return {{"param_names", r.param_names},
            {"normality_branch", r.normality_branch},
            {"rows", rows}};
}

}  // namespace pmax
