#include "pmax/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmax/rng.hpp"

namespace pmax {

namespace {

constexpr const char* kSixNames[] = {"h1", "h2", "h3", "h4", "h5", "h6"};

// cdf of the pure type at t (no power rescaling).
double base_cdf(SixType k, double alpha, double t) {
    switch (k) {
        case SixType::H1:
            return t <= 1.0 ? 0.0 : std::exp(-std::pow(std::log(t), -alpha));
        case SixType::H2:
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return std::exp(-std::pow(-std::log(t), alpha));
        case SixType::H3:
            if (t <= -1.0) return 0.0;
            if (t >= 0.0) return 1.0;
            return std::exp(-std::pow(-std::log(-t), -alpha));
        case SixType::H4:
            if (t >= -1.0) return 1.0;
            return std::exp(-std::pow(std::log(-t), alpha));
        case SixType::H5:
            return t <= 0.0 ? 0.0 : std::exp(-1.0 / t);
        case SixType::H6:
            return t >= 0.0 ? 1.0 : std::exp(t);
    }
    return 0.0;
}

double base_log_pdf(SixType k, double alpha, double t) {
    const double la = std::log(alpha);
    switch (k) {
        case SixType::H1: {
            if (t <= 1.0) return -inf;
            const double u = std::log(t);
            return -std::pow(u, -alpha) + la - (alpha + 1.0) * std::log(u) - u;
        }
        case SixType::H2: {
            if (t <= 0.0 || t >= 1.0) return -inf;
            const double u = -std::log(t);
            const double shape = alpha == 1.0 ? 0.0 : (alpha - 1.0) * std::log(u);
            return -std::pow(u, alpha) + la + shape + u;
        }
        case SixType::H3: {
            if (t <= -1.0 || t >= 0.0) return -inf;
            const double u = -std::log(-t);
            return -std::pow(u, -alpha) + la - (alpha + 1.0) * std::log(u) + u;
        }
        case SixType::H4: {
            if (t >= -1.0) return -inf;
            const double v = std::log(-t);
            const double shape = alpha == 1.0 ? 0.0 : (alpha - 1.0) * std::log(v);
            return -std::pow(v, alpha) + la + shape - v;
        }
        case SixType::H5:
            if (t <= 0.0) return -inf;
            return -1.0 / t - 2.0 * std::log(t);
        case SixType::H6:
            if (t >= 0.0) return -inf;
            return t;
    }
    return -inf;
}

double base_quantile(SixType k, double alpha, double p) {
    const double lp = -std::log(p);  // > 0
    switch (k) {
        case SixType::H1:
            return std::exp(std::pow(lp, -1.0 / alpha));
        case SixType::H2:
            return std::exp(-std::pow(lp, 1.0 / alpha));
        case SixType::H3:
            return -std::exp(-std::pow(lp, -1.0 / alpha));
        case SixType::H4:
            return -std::exp(std::pow(lp, 1.0 / alpha));
        case SixType::H5:
            return 1.0 / lp;
        case SixType::H6:
            return std::log(p);
    }
    return 0.0;
}

std::pair<double, double> base_support(SixType k) {
    switch (k) {
        case SixType::H1: return {1.0, inf};
        case SixType::H2: return {0.0, 1.0};
        case SixType::H3: return {-1.0, 0.0};
        case SixType::H4: return {-inf, -1.0};
        case SixType::H5: return {0.0, inf};
        case SixType::H6: return {-inf, 0.0};
    }
    return {0.0, 0.0};
}

}  // namespace

const char* six_type_name(SixType t) { return kSixNames[static_cast<int>(t)]; }

SixType six_type_from_name(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kSixNames[i]) return static_cast<SixType>(i);
    throw std::invalid_argument("unknown p-type family: " + name);
}

PStable::PStable(SixType k, double a, double A, double B)
    : kind(k), alpha(a), scale_a(A), power_b(B) {
    if (kind == SixType::H5 || kind == SixType::H6) alpha = 1.0;
    if (!(alpha > 0.0)) throw std::invalid_argument("PStable: alpha must be > 0");
    if (!(scale_a > 0.0) || !(power_b > 0.0))
        throw std::invalid_argument("PStable: scale and power must be > 0");
}

double PStable::cdf(double x) const {
    const double t = scale_a * std::pow(std::abs(x), power_b) * (x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0);
    return base_cdf(kind, alpha, t);
}

double PStable::log_pdf(double x) const {
    if (x == 0.0 || std::isinf(x)) return -inf;
    const double ax = std::abs(x);
    const double t = scale_a * std::pow(ax, power_b) * (x > 0 ? 1.0 : -1.0);
    const double lp = base_log_pdf(kind, alpha, t);
    if (lp == -inf) return -inf;
    const double jac = power_b == 1.0 ? 0.0 : (power_b - 1.0) * std::log(ax);
    return lp + std::log(scale_a) + std::log(power_b) + jac;
}

double PStable::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("PStable::quantile: p outside (0,1)");
    const double t = base_quantile(kind, alpha, p);
    const double sign = t > 0 ? 1.0 : t < 0 ? -1.0 : 0.0;
    return sign * std::pow(std::abs(t) / scale_a, 1.0 / power_b);
}

std::pair<double, double> PStable::support() const {
    auto [lo, hi] = base_support(kind);
    auto back = [&](double t) {
        if (t == 0.0) return 0.0;
        if (std::isinf(t)) return t;
        const double sign = t > 0 ? 1.0 : -1.0;
        return sign * std::pow(std::abs(t) / scale_a, 1.0 / power_b);
    };
    return {back(lo), back(hi)};
}

LogGev::LogGev(double m, double s, double x) : mu(m), sigma(s), xi(x) {
    if (!(sigma > 0.0)) throw std::invalid_argument("LogGev: sigma must be > 0");
}

double LogGev::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return gev_cdf(std::log(x), gev());
}

double LogGev::log_pdf(double x) const {
    if (x <= 0.0) return -inf;
    const double lx = std::log(x);
    const double lp = gev_log_pdf(lx, gev());
    return lp == -inf ? -inf : lp - lx;
}

double LogGev::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("LogGev::quantile: p outside (0,1)");
    return std::exp(gev_quantile(p, gev()));
}

std::pair<double, double> LogGev::support() const {
    auto [zlo, zhi] = gev_support(gev());
    return {zlo == -inf ? 0.0 : std::exp(zlo), std::exp(zhi)};
}

double component_cdf(const Component& c, double x) {
    return std::visit([x](const auto& d) { return d.cdf(x); }, c);
}
double component_log_pdf(const Component& c, double x) {
    return std::visit([x](const auto& d) { return d.log_pdf(x); }, c);
}
double component_quantile(const Component& c, double p) {
    return std::visit([p](const auto& d) { return d.quantile(p); }, c);
}
std::pair<double, double> component_support(const Component& c) {
    return std::visit([](const auto& d) { return d.support(); }, c);
}

namespace {

// +1 when every component lives on (0, inf)-side, -1 on the negative side.
int support_side(const std::vector<Component>& comps) {
    int side = 0;
    for (const auto& c : comps) {
        auto [lo, hi] = component_support(c);
        const int s = lo >= 0.0 ? +1 : hi <= 0.0 ? -1 : 0;
        if (s == 0 || (side != 0 && s != side))
            throw std::invalid_argument("Model: components must share the sign of their support");
        side = s;
    }
    return side;
}

double reciprocal_bound(double t, bool is_upper) {
    // 1/t with the conventions needed for support endpoints.
    if (t == 0.0) return is_upper ? inf : -inf;
    if (std::isinf(t)) return 0.0;
    return 1.0 / t;
}

// A min-model component with parameters theta is the law of 1/X where X
// follows the max-form component with the location flipped; this keeps
// log-GEV parameters of min models in the (log z - mu) parameterization.
Component min_base(const Component& c) {
    if (std::holds_alternative<LogGev>(c)) {
        const auto& g = std::get<LogGev>(c);
        return LogGev(-g.mu, g.sigma, g.xi);
    }
    return c;
}

}  // namespace

Model::Model(std::vector<Component> comps, Orientation o, std::optional<double> trunc)
    : components_(std::move(comps)), orientation_(o), truncation_x0_(trunc) {
    if (components_.empty()) throw std::invalid_argument("Model: needs k >= 1 components");
    if (orientation_ == Orientation::Min) min_side_ = support_side(components_);
    if (truncation_x0_) {
        const double x0 = *truncation_x0_;
        const double c0 = untruncated_cdf(x0);
        if (!(c0 > 0.0) || !(c0 < 1.0))
            throw std::invalid_argument("Model: truncation point must lie inside the support");
    }
}

double Model::untruncated_cdf(double x) const {
    if (orientation_ == Orientation::Max) {
        double p = 1.0;
        for (const auto& c : components_) {
            p *= component_cdf(c, x);
            if (p == 0.0) return 0.0;
        }
        return p;
    }
    if (min_side_ > 0 && x <= 0.0) return 0.0;
    if (min_side_ < 0 && x >= 0.0) return 1.0;
    double surv = 1.0;
    const double y = 1.0 / x;
    for (const auto& c : components_) surv *= component_cdf(min_base(c), y);
    return 1.0 - surv;
}

double Model::untruncated_log_pdf(double x) const {
    const int k = static_cast<int>(components_.size());
    double eval_at = x;
    double jac = 0.0;
    if (orientation_ == Orientation::Min) {
        if ((min_side_ > 0 && x <= 0.0) || (min_side_ < 0 && x >= 0.0)) return -inf;
        eval_at = 1.0 / x;
        jac = -2.0 * std::log(std::abs(x));
    }
    std::vector<double> lc(k), lp(k);
    for (int j = 0; j < k; ++j) {
        const Component base = orientation_ == Orientation::Min ? min_base(components_[j])
                                                                : components_[j];
        const double c = component_cdf(base, eval_at);
        lc[j] = c > 0.0 ? std::log(c) : -inf;
        lp[j] = component_log_pdf(base, eval_at);
    }
    std::vector<double> terms(k);
    for (int j = 0; j < k; ++j) {
        double t = lp[j];
        for (int l = 0; l < k; ++l)
            if (l != j) t += lc[l];
        terms[j] = t;
    }
    const double lse = log_sum_exp(terms.data(), k);
    return lse == -inf ? -inf : lse + jac;
}

double Model::untruncated_quantile(double p) const {
    const int k = static_cast<int>(components_.size());
    if (orientation_ == Orientation::Min) {
        std::vector<Component> bases;
        for (const auto& c : components_) bases.push_back(min_base(c));
        Model maxform(std::move(bases), Orientation::Max);
        return 1.0 / maxform.untruncated_quantile(1.0 - p);
    }
    if (k == 1) return component_quantile(components_[0], p);
    // Bracket from component quantiles: product cdf is <= p at max_j q_j(p)
    // and >= p at max_j q_j(p^(1/k)).
    double lo = -inf, hi = -inf;
    for (const auto& c : components_) {
        lo = std::max(lo, component_quantile(c, p));
        hi = std::max(hi, component_quantile(c, std::pow(p, 1.0 / k)));
    }
    if (!(hi > lo)) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (untruncated_cdf(mid) < p ? lo : hi) = mid;
        if (hi - lo <= 1e-13 * (1.0 + std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

double Model::cdf(double x) const {
    if (truncation_x0_ && x < *truncation_x0_) return 0.0;
    return untruncated_cdf(x);
}

double Model::log_pdf(double x) const {
    if (truncation_x0_ && x <= *truncation_x0_)
        throw std::domain_error("Model::log_pdf: x at or below the truncation point; "
                                "the atom mass is reported by truncation_mass()");
    return untruncated_log_pdf(x);
}

double Model::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("Model::quantile: p outside (0,1)");
    if (truncation_x0_ && p <= untruncated_cdf(*truncation_x0_)) return *truncation_x0_;
    return untruncated_quantile(p);
}

double Model::truncation_mass() const {
    return truncation_x0_ ? untruncated_cdf(*truncation_x0_) : 0.0;
}

std::pair<double, double> Model::support() const {
    double lo, hi;
    if (orientation_ == Orientation::Max) {
        lo = -inf;
        hi = -inf;
        for (const auto& c : components_) {
            auto [l, h] = component_support(c);
            lo = std::max(lo, l);
            hi = std::max(hi, h);
        }
    } else {
        std::vector<Component> bases;
        for (const auto& c : components_) bases.push_back(min_base(c));
        Model maxform(std::move(bases), Orientation::Max);
        auto [l, h] = maxform.support();
        lo = reciprocal_bound(h, false);
        hi = reciprocal_bound(l, true);
    }
    if (truncation_x0_) lo = *truncation_x0_;
    return {lo, hi};
}

std::vector<double> Model::sample(std::size_t n, std::uint64_t seed) const {
    std::vector<double> out(n);
    if (truncation_x0_) {
        const double mass = truncation_mass();
        Rng rng(substream_seed(seed, 0));
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform01();
            out[i] = u <= mass ? *truncation_x0_ : untruncated_quantile(u);
        }
        return out;
    }
    // Componentwise inverse transform with one substream per component; the
    // fold (max, or reciprocal of max for min models) is exact.
    bool first = true;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const Component base =
            orientation_ == Orientation::Min ? min_base(components_[j]) : components_[j];
        Rng rng(substream_seed(seed, j));
        for (std::size_t i = 0; i < n; ++i) {
            const double v = component_quantile(base, rng.uniform01());
            out[i] = first ? v : std::max(out[i], v);
        }
        first = false;
    }
    if (orientation_ == Orientation::Min)
        for (auto& v : out) v = 1.0 / v;
    return out;
}

Model dual_min(const Model& m) {
    if (m.truncation_x0())
        throw std::invalid_argument("dual_min: truncated models have no dual");
    std::vector<Component> comps;
    for (const auto& c : m.components()) comps.push_back(min_base(c));
    return Model(std::move(comps),
                 m.orientation() == Orientation::Max ? Orientation::Min : Orientation::Max);
}

nlohmann::json model_to_json(const Model& m) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : m.components()) {
        nlohmann::json jc;
        if (std::holds_alternative<LogGev>(c)) {
            const auto& g = std::get<LogGev>(c);
            jc = {{"family", "loggev"}, {"mu", g.mu}, {"sigma", g.sigma}, {"xi", g.xi}};
        } else {
            const auto& p = std::get<PStable>(c);
            jc = {{"family", six_type_name(p.kind)},
                  {"alpha", p.alpha},
                  {"scale_a", p.scale_a},
                  {"power_b", p.power_b}};
        }
        comps.push_back(std::move(jc));
    }
    nlohmann::json j = {{"orientation", m.orientation() == Orientation::Max ? "max" : "min"},
                        {"components", std::move(comps)}};
    if (m.truncation_x0()) j["truncation_x0"] = *m.truncation_x0();
    return j;
}

Model model_from_json(const nlohmann::json& j) {
    std::vector<Component> comps;
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
        throw std::invalid_argument("model JSON: non-empty \"components\" array required");
    for (const auto& jc : j["components"]) {
        const std::string fam = jc.at("family").get<std::string>();
        if (fam == "loggev") {
            comps.emplace_back(LogGev(jc.at("mu").get<double>(), jc.at("sigma").get<double>(),
                                      jc.at("xi").get<double>()));
        } else {
            comps.emplace_back(PStable(six_type_from_name(fam),
                                       jc.value("alpha", 1.0),
                                       jc.value("scale_a", 1.0),
                                       jc.value("power_b", 1.0)));
        }
    }
    Orientation o = Orientation::Max;
    if (j.contains("orientation")) {
        const std::string s = j["orientation"].get<std::string>();
        if (s == "min") o = Orientation::Min;
        else if (s != "max") throw std::invalid_argument("model JSON: orientation must be max|min");
    }
    std::optional<double> x0;
    if (j.contains("truncation_x0") && !j["truncation_x0"].is_null())
        x0 = j["truncation_x0"].get<double>();
    return Model(std::move(comps), o, x0);
}

}  // namespace pmax
