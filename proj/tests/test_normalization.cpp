#include <doctest.h>

#include <cmath>

#include "pmax/normalization.hpp"
#include "pmax/rng.hpp"
#include "pmax/special.hpp"

using namespace pmax;

TEST_CASE("power constants match the catalogue") {
    // log-frechet(2), n = 16
    auto c = power_constants(make_log_frechet(2), 16);
    CHECK(c.alpha == doctest::Approx(1.0));
    CHECK(c.beta == doctest::Approx(0.25));
    CHECK(c.limit.kind == SixType::H1);
    CHECK(c.limit.alpha == doctest::Approx(2.0));

    // pareto(3), n = 10
    c = power_constants(make_pareto(3), 10);
    CHECK(c.alpha == doctest::Approx(0.1));
    CHECK(c.beta == doctest::Approx(3.0));
    CHECK(c.limit.kind == SixType::H5);

    // uniform[2,4], n = 4: alpha_n = 4^-8, beta_n = 8
    c = power_constants(make_uniform(2, 4), 4);
    CHECK(c.alpha == doctest::Approx(std::pow(4.0, -8.0)).epsilon(1e-12));
    CHECK(c.beta == doctest::Approx(8.0));
    CHECK(c.limit.kind == SixType::H2);
    CHECK(c.limit.alpha == doctest::Approx(1.0));

    // log_alpha stays exact where alpha underflows
    c = power_constants(make_uniform(2, 4), 1e4);
    CHECK(c.alpha == 0.0);
    CHECK(c.log_alpha == doctest::Approx(-(4.0 * 1e4 / 2.0) * std::log(4.0)));
}

TEST_CASE("linear constants match the catalogue") {
    auto c = linear_constants(make_pareto(3), 8);
    CHECK(c.a == doctest::Approx(std::pow(8.0, -1.0 / 3.0)));
    CHECK(c.b == 0.0);
    CHECK(c.kind == LMaxKind::Frechet);
    CHECK(c.alpha == doctest::Approx(3.0));

    c = linear_constants(make_uniform(0, 1), 5);
    CHECK(c.a == doctest::Approx(5.0));
    CHECK(c.b == doctest::Approx(1.0));
    CHECK(c.kind == LMaxKind::Weibull);
    CHECK(c.alpha == doctest::Approx(1.0));

    CHECK_THROWS_AS(linear_constants(make_log_frechet(2), 5), NotInDomainError);
}

TEST_CASE("normalized maxima distribution identities (analytic spot checks)") {
    // Uniform power constants reproduce H_{2,1} exactly in the n -> inf
    // limit; check the finite-n cdf of the normalized maximum directly.
    const double n = 2000;
    auto c = power_constants(make_uniform(2, 4), n);
    // P(alpha_n M^beta_n <= x) = F((x/alpha_n)^(1/beta_n))^n
    auto norm_cdf = [&](double x) {
        const double t = std::exp((std::log(x) - c.log_alpha) / c.beta);
        const double f = std::min(1.0, std::max(0.0, (t - 2.0) / 2.0));
        return std::pow(f, n);
    };
    for (double x : {0.2, 0.5, 0.9}) {
        const double h21 = x;  // H_{2,1} is the standard uniform on (0,1)
        CHECK(norm_cdf(x) == doctest::Approx(h21).epsilon(5e-3));
    }

    // polynomial with right endpoint 0: constants (n, alpha) make the
    // normalized maxima exactly H6.
    auto cp = power_constants(make_polynomial(2.0, 0.0), 50);
    CHECK(cp.limit.kind == SixType::H6);
    auto poly_norm_cdf = [&](double x) {
        // P(n |M|^2 sign(M) <= x) for F(y) = 1 - (-y)^2 on (-1, 0)
        const double t = -std::pow(-x / std::exp(cp.log_alpha), 1.0 / cp.beta);
        return std::pow(1.0 - std::pow(-t, 2.0), 50.0);
    };
    CHECK(poly_norm_cdf(-0.5) == doctest::Approx(std::exp(-0.5)).epsilon(5e-3));
    CHECK(poly_norm_cdf(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(5e-2));
}

TEST_CASE("combine implements the two-block map") {
    auto [a, b] = combine(1.0, 0.5, 1.0, 0.25);
    CHECK(a == doctest::Approx(1.0));
    CHECK(b == doctest::Approx(2.0));

    // alpha_j = 1/n_j, beta_j = tail parameters: n1=100, n2=10, both tails 2
    std::tie(a, b) = combine(1.0 / 100, 2.0, 1.0 / 10, 2.0);
    CHECK(a == doctest::Approx(0.1));
    CHECK(b == doctest::Approx(1.0));

    // identical constants cancel
    std::tie(a, b) = combine(0.37, 1.7, 0.37, 1.7);
    CHECK(a == doctest::Approx(1.0));
    CHECK(b == doctest::Approx(1.0));

    CHECK_THROWS_AS(combine(std::nan(""), 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(combine(-1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("combined transform identity in log space") {
    // alpha_n |x|^beta_n == alpha_1n |x'|^beta_1n at x' = (x/alpha_2n)^(1/beta_2n)
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const double la1 = rng.uniform(-40, 40), b1 = std::exp(rng.uniform(-3, 3));
        const double la2 = rng.uniform(-40, 40), b2 = std::exp(rng.uniform(-3, 3));
        const double x = std::exp(rng.uniform(-5, 5));
        auto [lan, bn] = combine_log(la1, b1, la2, b2);
        const double lhs = lan + bn * std::log(x);
        const double lxp = (std::log(x) - la2) / b2;
        const double rhs = la1 + b1 * lxp;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("skew-normal quantile inversion") {
    // lambda = 0 reduces to the standard normal
    for (double p : {0.05, 0.4, 0.9, 0.999})
        CHECK(skew_normal_quantile(p, 0.0) == doctest::Approx(normal_quantile(p)).epsilon(1e-8));
    // round trip through the cdf
    for (double lambda : {2.0, -1.5})
        for (double p : {0.1, 0.6, 0.99}) {
            const double x = skew_normal_quantile(p, lambda);
            CHECK(skew_normal_cdf(x, lambda) == doctest::Approx(p).epsilon(1e-9));
        }
}

namespace {

struct GoldenRow {
    const char* name;
    Parent p1, p2;
    Coupling coupling;
    RegimeCase expected;
    int dominant{0};       // for SingleDominant
    double A{-1}, B{-1};   // checked when >= 0 (accelerated rows)
    double x0{-1};         // checked when >= 0 (left-truncated rows)
};

}  // namespace

TEST_CASE("regime classifier golden table") {
    const double e = std::exp(1.0);
    std::vector<GoldenRow> rows = {
        // log-frechet pairs: proportional sizes let the heavier tail win;
        // the tuned power coupling balances them into an accelerated limit.
        {"logF/logF prop", make_log_frechet(40), make_log_frechet(3),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"logF/logF tuned", make_log_frechet(40), make_log_frechet(3),
         {Coupling::Power, std::pow(1.5, 3.0), 3.0 / 40.0}, RegimeCase::Accelerated, 0, 1.0, 1.5,
         -1},
        {"logF/logF balanced", make_log_frechet(4), make_log_frechet(2),
         {Coupling::Power, 1, 0.5}, RegimeCase::Accelerated, 0, 1.0, 1.0, -1},
        {"logF/logF fast growth", make_log_frechet(40), make_log_frechet(3),
         {Coupling::Power, 1, 0.5}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"logF/logF slow growth", make_log_frechet(40), make_log_frechet(3),
         {Coupling::Power, 1, 0.05}, RegimeCase::SingleDominant, 1, -1, -1, -1},

        // log-polynomial pairs
        {"logP/logP prop", make_log_polynomial(20, 0), make_log_polynomial(1.7, 0),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"logP/logP tuned", make_log_polynomial(20, 0), make_log_polynomial(1.7, 0),
         {Coupling::Power, std::pow(0.6, -1.7), 1.7 / 20.0}, RegimeCase::Accelerated, 0, 1.0, 0.6,
         -1},
        {"logP/logP balanced", make_log_polynomial(4, 0), make_log_polynomial(2, 0),
         {Coupling::Power, 1, 0.5}, RegimeCase::Accelerated, 0, 1.0, 1.0, -1},

        // pareto & log-frechet
        {"par/logF logpow tuned", make_pareto(2), make_log_frechet(4),
         {Coupling::LogPower, std::pow(0.5, 4.0), 4.0}, RegimeCase::LeftTruncated, 0, -1, -1, e},
        {"par/logF prop", make_pareto(2), make_log_frechet(4),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"par/logF slow logpow", make_pareto(2), make_log_frechet(4),
         {Coupling::LogPower, 1, 2}, RegimeCase::SingleDominant, 1, -1, -1, -1},

        // uniform pair
        {"U[2,4]/U[1,5]", make_uniform(2, 4), make_uniform(1, 5),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},

        // general error & log-frechet
        {"ged/logF loglog tuned", make_general_error(1), make_log_frechet(6),
         {Coupling::LogLogPower, 1, 6}, RegimeCase::LeftTruncated, 0, -1, -1, e},
        {"ged2/logF loglog tuned", make_general_error(2), make_log_frechet(3),
         {Coupling::LogLogPower, 1, 3}, RegimeCase::LeftTruncated, 0, -1, -1, std::sqrt(e)},
        {"ged/logF loglog fast", make_general_error(1), make_log_frechet(6),
         {Coupling::LogLogPower, 1, 8}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"ged/logF loglog slow", make_general_error(1), make_log_frechet(6),
         {Coupling::LogLogPower, 1, 3}, RegimeCase::SingleDominant, 1, -1, -1, -1},

        // pareto pairs
        {"par/par tuned", make_pareto(3), make_pareto(2),
         {Coupling::Power, 2, 2.0 / 3.0}, RegimeCase::Accelerated, 0, std::pow(2.0, 1.5), 1.5, -1},
        {"par/par equal prop", make_pareto(2), make_pareto(2),
         {Coupling::Proportional, 1, 3}, RegimeCase::Accelerated, 0, 3.0, 1.0, -1},
        {"par/par prop heavy2", make_pareto(3), make_pareto(2),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"par/par slow", make_pareto(3), make_pareto(2),
         {Coupling::Power, 1, 0.5}, RegimeCase::SingleDominant, 1, -1, -1, -1},

        // polynomial & frechet
        {"poly/frechet", make_polynomial(4, 2), make_frechet(2),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},
        {"poly(neg)/frechet", make_polynomial(4, -1), make_frechet(2),
         {Coupling::Proportional, 1, 1}, RegimeCase::SingleDominant, 2, -1, -1, -1},

        // normal-family blocks against heavy competitors
        {"normal/frechet logpow", make_std_normal(), make_frechet(2),
         {Coupling::LogPower, 1, 1}, RegimeCase::LeftTruncated, 0, -1, -1, 2.0},
        {"skew/logF loglog tuned", make_skew_normal(1), make_log_frechet(3),
         {Coupling::LogLogPower, 1, 3}, RegimeCase::LeftTruncated, 0, -1, -1, std::sqrt(e)},
    };

    for (const GoldenRow& row : rows) {
        CAPTURE(row.name);
        const RegimeReport rep = classify_regime(row.p1, row.p2, row.coupling);
        CHECK(rep.regime == row.expected);
        if (row.expected == RegimeCase::SingleDominant) CHECK(rep.dominant_block == row.dominant);
        if (row.A >= 0) CHECK(rep.A == doctest::Approx(row.A).epsilon(1e-9));
        if (row.B >= 0) CHECK(rep.B == doctest::Approx(row.B).epsilon(1e-9));
        if (row.x0 >= 0) {
            REQUIRE(rep.jump_x0.has_value());
            CHECK(*rep.jump_x0 == doctest::Approx(row.x0).epsilon(1e-9));
            REQUIRE(rep.limit_model.has_value());
            CHECK(rep.limit_model->truncation_x0().has_value());
        }
        if (row.expected == RegimeCase::Accelerated) {
            CHECK(rep.A * rep.B > 0.0);
            CHECK(std::isfinite(rep.A * rep.B));
            REQUIRE(rep.limit_model.has_value());
            CHECK(rep.limit_model->k() == 2);
        }
    }
}

TEST_CASE("classifier flags the pareto-pair constant discrepancy, not failing it") {
    const RegimeReport rep = classify_regime(make_pareto(3), make_pareto(2),
                                             {Coupling::Power, 2.0, 2.0 / 3.0});
    CHECK(rep.regime == RegimeCase::Accelerated);
    CHECK(rep.A == doctest::Approx(std::pow(2.0, 1.5)));
    bool flagged = false;
    for (const auto& n : rep.notes) flagged = flagged || n.find("differs") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("accelerated limit model evaluates the classified product") {
    // log-frechet(4) & log-frechet(2) with matched growth: limit
    // H_{1,4}(x) H_{1,2}(x) = exp(-(log x)^-2 - (log x)^-4)
    const RegimeReport rep =
        classify_regime(make_log_frechet(4), make_log_frechet(2), {Coupling::Power, 1, 0.5});
    REQUIRE(rep.limit_model.has_value());
    for (double x : {1.5, std::exp(1.0), 10.0}) {
        const double expected =
            std::exp(-std::pow(std::log(x), -2.0) - std::pow(std::log(x), -4.0));
        CHECK(rep.limit_model->cdf(x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("classifier reports inconclusive for unrepresentable couplings") {
    // pareto under a loglog coupling needs log n2 ~ log(loglog n1): outside
    // the symbolic scale basis, reported as inconclusive rather than guessed.
    const RegimeReport rep =
        classify_regime(make_log_frechet(2), make_pareto(2), {Coupling::LogLogPower, 1, 2});
    CHECK(rep.regime == RegimeCase::Inconclusive);
    CHECK(!rep.notes.empty());
}

TEST_CASE("regime report serialization carries the contract fields") {
    const RegimeReport rep = classify_regime(make_pareto(2), make_log_frechet(4),
                                             {Coupling::LogPower, std::pow(0.5, 4.0), 4.0});
    const nlohmann::json j = regime_to_json(rep);
    CHECK(j.contains("case"));
    CHECK(j.contains("A"));
    CHECK(j.contains("B"));
    CHECK(j.contains("x0"));
    CHECK(j.contains("limit_model"));
    CHECK(j.contains("notes"));
    CHECK(j["case"] == "left-truncated");
    CHECK(j["x0"].get<double>() == doctest::Approx(std::exp(1.0)));
}
