#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pmax/distributions.hpp"
#include "pmax/rng.hpp"

using namespace pmax;

namespace {

// Independent one-sample KS distance against a cdf.
double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = cdf(x[i]);
        d = std::max(d, std::max((i + 1) / n - u, u - i / n));
    }
    return d;
}

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    boost::math::quadrature::tanh_sinh<double> quad;
    return quad.integrate(f, lo, hi, 1e-10);
}

// Integration over a possibly very wide range, split per decade so the
// quadrature resolves both the body and a slowly decaying tail.
double integrate_decades(const std::function<double(double)>& f, double lo, double hi) {
    if (hi <= 1.0 || lo < 0.0) return integrate(f, lo, hi);
    double total = integrate(f, lo, 1.0);
    double a = 1.0;
    while (a < hi) {
        const double b = std::min(hi, 10.0 * a);
        total += integrate(f, a, b);
        a = b;
    }
    return total;
}

// Model mass over the support, integrated in a substituted variable where the
// density has a textbook shape. Cutoffs leave analytic tail mass below 1e-9
// where the support fits in doubles; the very heavy types (H1/H3 with small
// alpha) carry mass beyond the double range, accounted for by the model cdf
// at the range edge. Exercises the pdf over the whole representable support.
double total_mass(const Model& m) {
    const Component& c = m.components()[0];
    if (std::holds_alternative<LogGev>(c)) {
        const LogGev& g = std::get<LogGev>(c);
        auto f = [&m](double u) { return std::exp(m.log_pdf(std::exp(u)) + u); };  // GEV in u
        const double zlo = g.xi > 1e-9 ? g.mu - g.sigma / g.xi : g.mu - 40.0 * g.sigma;
        double zhi = g.xi < -1e-9 ? g.mu - g.sigma / g.xi
                     : g.xi > 1e-9 ? g.mu + g.sigma * (std::pow(1e9, g.xi) - 1.0) / g.xi
                                   : g.mu + 25.0 * g.sigma;
        double tail = 0.0;
        if (zhi > 690.0) {  // beyond exp() range: add the analytic tail
            zhi = 690.0;
            tail = 1.0 - m.cdf(std::exp(zhi));
        }
        double mass;
        if (zhi - zlo <= 100.0)
            mass = integrate(f, zlo, zhi);
        else
            mass = integrate(f, zlo, zlo + 100.0) +
                   integrate_decades([&f, zlo](double u) { return f(zlo + u); }, 100.0, zhi - zlo);
        return mass + tail;
    }
    const PStable& p = std::get<PStable>(c);
    const double frechet_cut = std::min(690.0, std::pow(1e9, 1.0 / p.alpha));
    switch (p.kind) {
        case SixType::H1:  // u = log x: Frechet(alpha) shape
            return integrate_decades(
                       [&m](double u) { return std::exp(m.log_pdf(std::exp(u)) + u); }, 0.0,
                       frechet_cut) +
                   (1.0 - m.cdf(std::exp(frechet_cut)));
        case SixType::H2:  // u = -log x: Weibull(alpha) shape
            return integrate([&m](double u) { return std::exp(m.log_pdf(std::exp(-u)) - u); }, 0.0,
                             std::pow(60.0, 1.0 / p.alpha));
        case SixType::H3:  // u = -log(-x): Frechet(alpha) shape
            return integrate_decades(
                       [&m](double u) { return std::exp(m.log_pdf(-std::exp(-u)) - u); }, 0.0,
                       frechet_cut) +
                   (1.0 - m.cdf(-std::exp(-frechet_cut)));
        case SixType::H4:  // u = log(-x): Weibull(alpha) shape
            return integrate([&m](double u) { return std::exp(m.log_pdf(-std::exp(u)) + u); }, 0.0,
                             std::pow(60.0, 1.0 / p.alpha));
        case SixType::H5:  // u = log x: Gumbel shape
            return integrate([&m](double u) { return std::exp(m.log_pdf(std::exp(u)) + u); },
                             -45.0, 25.0) +
                   (1.0 - m.cdf(std::exp(25.0)));
        case SixType::H6:
            return integrate([&m](double x) { return m.pdf(x); }, -50.0, -1e-290);
    }
    return 0.0;
}

}  // namespace

TEST_CASE("closed-form cdf values") {
    const double e = std::exp(1.0);
    CHECK(PStable(SixType::H1, 3).cdf(e) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(PStable(SixType::H5, 1).cdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(LogGev(0, 1, 0).cdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    const Model acc({PStable(SixType::H1, 2), PStable(SixType::H1, 2)});
    CHECK(acc.cdf(e) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

    // outside-support conventions
    CHECK(PStable(SixType::H1, 3).cdf(0.5) == 0.0);
    CHECK(PStable(SixType::H2, 2).cdf(1.5) == 1.0);
    CHECK(PStable(SixType::H6, 1).cdf(0.5) == 1.0);
    CHECK(LogGev(0, 1, 0).cdf(-1.0) == 0.0);
}

TEST_CASE("pdf closed forms and finite-difference oracle") {
    const double e = std::exp(1.0);
    CHECK(PStable(SixType::H5, 1).pdf(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

    // d/dx exp(-2 (log x)^-2) at x = e equals 4 e^-3
    const Model acc({PStable(SixType::H1, 2), PStable(SixType::H1, 2)});
    CHECK(acc.pdf(e) == doctest::Approx(4.0 * std::exp(-3.0)).epsilon(1e-12));

    const LogGev g(2, 1, -0.2);
    const auto [lo, hi] = g.support();
    for (int i = 1; i <= 10; ++i) {
        const double x = lo + (hi - lo) * i / 11.5;
        const double h = 1e-5 * (1.0 + std::abs(x));
        const double fd = (g.cdf(x + h) - g.cdf(x - h)) / (2.0 * h);
        CHECK(g.pdf(x) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("quantile closed forms and round trips") {
    const double e = std::exp(1.0);
    CHECK(PStable(SixType::H1, 3).quantile(std::exp(-1.0)) == doctest::Approx(e).epsilon(1e-12));
    CHECK(LogGev(0, 1, 0).quantile(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    const Model acc({PStable(SixType::H1, 2), PStable(SixType::H1, 2)});
    CHECK(acc.quantile(std::exp(-2.0)) == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("grid invariants: monotone cdf, quantile round trip, normalization") {
    std::vector<Model> models;
    for (SixType k : {SixType::H1, SixType::H2, SixType::H3, SixType::H4, SixType::H5, SixType::H6})
        for (double a : {0.5, 1.0, 2.0, 5.0}) models.push_back(Model::single(PStable(k, a)));
    for (double xi : {-0.8, -0.2, 0.0, 0.3, 0.8}) models.push_back(Model::single(LogGev(0.5, 1.2, xi)));
    models.push_back(Model({PStable(SixType::H1, 2, 1.0, 1.5), PStable(SixType::H1, 4)}));
    models.push_back(Model({LogGev(2, 1, -0.2), LogGev(0, 1, -0.5)}));
    models.push_back(dual_min(Model({LogGev(1, 1, 0.2), LogGev(0.5, 2, -0.3)})));

    for (const Model& m : models) {
        // probe the support through quantiles for a well-spread grid
        std::vector<double> xs;
        for (int i = 1; i < 1000; ++i) xs.push_back(m.quantile(i / 1000.0));
        CHECK(std::is_sorted(xs.begin(), xs.end()));
        double prev = -0.1;
        for (std::size_t i = 0; i < xs.size(); i += 37) {
            const double c = m.cdf(xs[i]);
            CHECK(c >= prev - 1e-15);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
        for (double p : {0.003, 0.1, 0.5, 0.9, 0.997}) {
            const double x = m.quantile(p);
            // extreme types can push quantiles past the double range
            if (std::abs(x) < 1e12 && std::abs(x) > 1e-12)
                CHECK(std::abs(m.quantile(m.cdf(x)) - x) <= 1e-8 * (1.0 + std::abs(x)));
        }
    }
}

TEST_CASE("density integrates to one across the parameter grid") {
    for (SixType k : {SixType::H1, SixType::H2, SixType::H3, SixType::H4, SixType::H5, SixType::H6})
        for (double a : {0.5, 1.0, 2.0, 5.0}) {
            const Model m = Model::single(PStable(k, a));
            CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-6));
        }
    for (double xi : {-0.8, -0.2, 0.0, 0.3, 0.8}) {
        const Model m = Model::single(LogGev(0.5, 1.2, xi));
        CHECK(total_mass(m) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("p-max stability identity") {
    for (double a : {0.5, 2.0, 5.0}) {
        const PStable h(SixType::H1, a);
        for (double x : {1.3, 2.0, std::exp(1.0), 7.0, 40.0})
            for (int n : {2, 5, 10}) {
                const double lhs = std::pow(h.cdf(x), n);
                const double rhs = h.cdf(std::pow(x, std::pow(n, -1.0 / a)));
                CHECK(std::abs(lhs - rhs) <= 1e-12);
            }
    }
}

TEST_CASE("product identity and stable log pdf") {
    const Model acc({LogGev(2, 1, -0.2), LogGev(0, 1, -0.5), PStable(SixType::H5, 1)});
    for (double x : {0.5, 1.0, 3.0, 12.0, 200.0}) {
        double prod = 1.0;
        for (const auto& c : acc.components()) prod *= component_cdf(c, x);
        CHECK(std::abs(acc.cdf(x) - prod) <= 1e-15);
    }
    // log pdf stays finite deep in the tail where densities underflow
    const Model pair({LogGev(0, 1, 0), LogGev(1, 2, 0)});
    const double lp = pair.log_pdf(1e60);
    CHECK(std::isfinite(lp));
    CHECK(lp < -100.0);
}

TEST_CASE("p-min duality") {
    const Model m = Model::single(PStable(SixType::H5, 1));
    const Model d = dual_min(m);
    for (double x : {0.1, 0.5, 1.0, 2.5, 10.0})
        CHECK(d.cdf(x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));

    // involution on parameters
    const Model m2({LogGev(1.5, 0.8, 0.25), LogGev(0.2, 1.1, -0.4)});
    const Model back = dual_min(dual_min(m2));
    for (std::size_t j = 0; j < m2.components().size(); ++j) {
        const auto& a = std::get<LogGev>(m2.components()[j]);
        const auto& b = std::get<LogGev>(back.components()[j]);
        CHECK(a.mu == b.mu);
        CHECK(a.sigma == b.sigma);
        CHECK(a.xi == b.xi);
    }
    CHECK(back.orientation() == Orientation::Max);

    // dual cdf + primal cdf at the reciprocal point is one
    const Model d2 = dual_min(m2);
    for (double x : {0.2, 0.7, 1.3, 6.0})
        CHECK(std::abs(d2.cdf(x) + m2.cdf(1.0 / x) - 1.0) <= 1e-12);

    // medians map through the reciprocal
    const double med = d2.quantile(0.5);
    CHECK(d2.cdf(med) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m2.cdf(1.0 / med) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sampling matches the distribution (KS oracle)") {
    const Model m = Model::single(PStable(SixType::H5, 1));
    const auto x = m.sample(100000, 20240601);
    const double d = ks_distance(x, [&m](double v) { return m.cdf(v); });
    CHECK(d < 0.01);

    const auto one = Model::single(LogGev(0, 1, -0.3)).sample(1, 7);
    const auto [lo, hi] = Model::single(LogGev(0, 1, -0.3)).support();
    CHECK(one[0] > lo);
    CHECK(one[0] < hi);

    // acc sample is the componentwise max over per-component substreams
    const Model acc({LogGev(2, 1, -0.2), LogGev(0, 1, -0.5)});
    const auto both = acc.sample(256, 99);
    const auto c1 = Model::single(LogGev(2, 1, -0.2)).sample(256, 99);
    Rng check_stream(substream_seed(99, 1));
    for (std::size_t i = 0; i < both.size(); ++i) {
        const double v2 = LogGev(0, 1, -0.5).quantile(check_stream.uniform01());
        CHECK(both[i] == doctest::Approx(std::max(c1[i], v2)).epsilon(1e-15));
    }

    // min model sampling is the reciprocal of the dual max sample
    const Model mn = dual_min(acc);
    const auto zs = mn.sample(128, 1234);
    const auto ms = acc.sample(128, 1234);
    for (std::size_t i = 0; i < zs.size(); ++i)
        CHECK(zs[i] == doctest::Approx(1.0 / ms[i]).epsilon(1e-15));
}

TEST_CASE("left truncation: atom, cdf, quantile, sampling, errors") {
    const double e = std::exp(1.0);
    const Model base = Model::single(PStable(SixType::H1, 4));
    const Model trunc({PStable(SixType::H1, 4)}, Orientation::Max, e);
    const double mass = trunc.truncation_mass();
    CHECK(mass == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    CHECK(trunc.cdf(2.0) == 0.0);
    CHECK(trunc.cdf(e) == doctest::Approx(mass));
    CHECK(trunc.cdf(5.0) == doctest::Approx(base.cdf(5.0)));
    CHECK(trunc.quantile(0.2) == e);  // p below the atom mass maps to x0
    CHECK(trunc.quantile(0.9) == doctest::Approx(base.quantile(0.9)));
    CHECK_THROWS_AS(trunc.log_pdf(e), std::domain_error);
    CHECK_THROWS_AS(trunc.log_pdf(1.5), std::domain_error);
    CHECK(trunc.pdf(4.0) == doctest::Approx(base.pdf(4.0)));

    const auto draws = trunc.sample(20000, 5);
    std::size_t at_atom = 0;
    for (double v : draws) {
        CHECK(v >= e);
        at_atom += v == e;
    }
    CHECK(std::abs(at_atom / 20000.0 - mass) < 0.01);

    CHECK_THROWS_AS(Model({PStable(SixType::H1, 4)}, Orientation::Max, 0.5),
                    std::invalid_argument);
}

TEST_CASE("construction-time validation") {
    CHECK_THROWS_AS(PStable(SixType::H1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(PStable(SixType::H1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LogGev(0, -1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Model(std::vector<Component>{}), std::invalid_argument);
    // min models cannot mix support signs
    CHECK_THROWS_AS(Model({PStable(SixType::H5, 1), PStable(SixType::H6, 1)}, Orientation::Min),
                    std::invalid_argument);
    // alpha pinned to 1 for H5/H6
    CHECK(PStable(SixType::H5, 3.0).alpha == 1.0);
}

TEST_CASE("model JSON round trip") {
    const Model m({LogGev(2, 1, -0.2), PStable(SixType::H1, 4, 1.0, 1.5)}, Orientation::Max, 1.7);
    const Model r = model_from_json(model_to_json(m));
    CHECK(r.orientation() == m.orientation());
    CHECK(r.truncation_x0().value() == doctest::Approx(1.7));
    for (double x : {1.8, 2.5, 7.0, 42.0}) CHECK(r.cdf(x) == doctest::Approx(m.cdf(x)).epsilon(1e-15));

    const Model mn = dual_min(Model({LogGev(1, 1, 0.1), LogGev(0, 2, -0.2)}));
    const Model rn = model_from_json(model_to_json(mn));
    CHECK(rn.orientation() == Orientation::Min);
    for (double x : {0.1, 0.4, 2.0}) CHECK(rn.cdf(x) == doctest::Approx(mn.cdf(x)).epsilon(1e-15));

    const nlohmann::json contract = model_to_json(m);
    CHECK(contract.contains("orientation"));
    CHECK(contract.contains("components"));
    CHECK(contract["components"][0].contains("family"));
    CHECK(contract["components"][0].contains("mu"));
    CHECK(contract["components"][0].contains("sigma"));
    CHECK(contract["components"][0].contains("xi"));
    CHECK(contract["components"][1].contains("alpha"));
    CHECK(contract.contains("truncation_x0"));
}
