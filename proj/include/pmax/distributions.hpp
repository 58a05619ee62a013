#pragma once

// Max-stable distributions under power normalization (the six p-types), their
// log-GEV unified form on the positive half line, finite products of them
// ("accelerated" models), the p-min duals realized through the reciprocal
// map, and left truncation with an atom at the jump point.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pmax/gev.hpp"

namespace pmax {

enum class SixType { H1, H2, H3, H4, H5, H6 };

const char* six_type_name(SixType t);
SixType six_type_from_name(const std::string& name);

// One of the six p-types composed with the power-type rescaling
// x -> scale_a * |x|^power_b * sign(x). alpha is fixed to 1 for H5/H6.
struct PStable {
    SixType kind{SixType::H5};
    double alpha{1.0};
    double scale_a{1.0};
    double power_b{1.0};

    PStable() = default;
    PStable(SixType k, double a, double A = 1.0, double B = 1.0);

    double cdf(double x) const;
    double log_pdf(double x) const;
    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double quantile(double p) const;
    std::pair<double, double> support() const;
};

// H1^xi(x; mu, sigma) = G_xi(log x; mu, sigma) on x > 0. Covers the types
// H1 (xi > 0), H2 (xi < 0) and H5 (xi = 0) up to power rescaling.
struct LogGev {
    double mu{0.0};
    double sigma{1.0};
    double xi{0.0};

    LogGev() = default;
    LogGev(double m, double s, double x);

    GevParams gev() const { return {mu, sigma, xi}; }
    double cdf(double x) const;
    double log_pdf(double x) const;
    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double quantile(double p) const;
    std::pair<double, double> support() const;
};

using Component = std::variant<PStable, LogGev>;

double component_cdf(const Component& c, double x);
double component_log_pdf(const Component& c, double x);
double component_quantile(const Component& c, double p);
std::pair<double, double> component_support(const Component& c);

enum class Orientation { Max, Min };

// A model is a list of k >= 1 independent components combined as a maximum
// (cdfs multiply) or, through the reciprocal duality, as a minimum
// (survivals multiply), optionally left-truncated at truncation_x0.
class Model {
public:
    Model() = default;
    Model(std::vector<Component> comps, Orientation o = Orientation::Max,
          std::optional<double> truncation_x0 = std::nullopt);

    static Model single(Component c) { return Model({std::move(c)}); }

    const std::vector<Component>& components() const { return components_; }
    Orientation orientation() const { return orientation_; }
    std::optional<double> truncation_x0() const { return truncation_x0_; }
    int k() const { return static_cast<int>(components_.size()); }

    double cdf(double x) const;
    double log_pdf(double x) const;  // throws std::domain_error at/below a truncation point
    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double quantile(double p) const;
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    // Mass of the atom at the truncation point; 0 for untruncated models.
    double truncation_mass() const;

    // Support of the (possibly truncated) model, open at the continuous end.
    std::pair<double, double> support() const;

private:
    double untruncated_cdf(double x) const;
    double untruncated_log_pdf(double x) const;
    double untruncated_quantile(double p) const;

    std::vector<Component> components_;
    Orientation orientation_{Orientation::Max};
    std::optional<double> truncation_x0_;
    int min_side_{0};  // +1 / -1 for min models on the positive / negative half line
};

// p-min dual of a max model (and back): flips the orientation, keeping the
// component parameters. On the positive half line the dual is the law of the
// reciprocal, so dual_min(m).cdf(x) = 1 - m.cdf(1/x).
Model dual_min(const Model& m);

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

}  // namespace pmax
