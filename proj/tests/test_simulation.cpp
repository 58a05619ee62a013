#include <doctest.h>

#include <cmath>

#include "pmax/simulation.hpp"

using namespace pmax;

TEST_CASE("parent draw oracles") {
    // pareto(2): E[min(X,10)] = 1.9 by direct integration of the survival
    const auto x = draw_parent(make_pareto(2), 100000, 11);
    double m = 0.0;
    for (double v : x) m += std::min(v, 10.0);
    m /= x.size();
    CHECK(m == doctest::Approx(1.9).epsilon(0.02 / 1.9));

    for (double v : draw_parent(make_uniform(2, 4), 10000, 3)) {
        CHECK(v >= 2.0);
        CHECK(v <= 4.0);
    }
    for (double v : draw_parent(make_log_frechet(2), 10000, 4)) CHECK(v > 1.0);

    // general error is standardized to unit variance; skew-normal mean is
    // delta sqrt(2/pi)
    const auto g = draw_parent(make_general_error(1), 200000, 5);
    double gm = 0.0, gv = 0.0;
    for (double v : g) gm += v;
    gm /= g.size();
    for (double v : g) gv += (v - gm) * (v - gm);
    gv /= g.size();
    CHECK(gm == doctest::Approx(0.0).epsilon(1.0));  // abs tolerance via scale below
    CHECK(std::abs(gm) < 0.01);
    CHECK(gv == doctest::Approx(1.0).epsilon(0.02));

    const double lambda = 1.5, delta = lambda / std::sqrt(1 + lambda * lambda);
    const auto s = draw_parent(make_skew_normal(lambda), 200000, 6);
    double sm = 0.0;
    for (double v : s) sm += v;
    sm /= s.size();
    CHECK(sm == doctest::Approx(delta * std::sqrt(2.0 / M_PI)).epsilon(0.02));
}

TEST_CASE("experiments are deterministic under any thread count") {
    Experiment e;
    e.parent1 = make_pareto(2);
    e.parent2 = make_log_frechet(4);
    e.n1 = 200;
    e.n2 = 50;
    e.reps = 64;
    e.seed = 99;
    e.threads = 1;
    const auto a = simulate_extremes(e);
    e.threads = 2;
    const auto b = simulate_extremes(e);
    e.threads = 4;
    const auto c = simulate_extremes(e);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("min orientation is the pathwise reciprocal of max") {
    Experiment e;
    e.parent1 = make_pareto(3);
    e.parent2 = make_pareto(2);
    e.n1 = 64;
    e.n2 = 64;
    e.reps = 32;
    e.seed = 4242;
    const auto mx = simulate_extremes(e);
    e.orientation = Orientation::Min;
    const auto mn = simulate_extremes(e);
    for (std::size_t i = 0; i < mx.size(); ++i)
        CHECK(mn[i] == doctest::Approx(1.0 / mx[i]).epsilon(1e-15));

    // normalized values reciprocate as well
    e.orientation = Orientation::Max;
    const auto rx = run_experiment(e);
    e.orientation = Orientation::Min;
    const auto rn = run_experiment(e);
    for (std::size_t i = 0; i < rx.values.size(); ++i)
        CHECK(rn.values[i] == doctest::Approx(1.0 / rx.values[i]).epsilon(1e-12));
}

TEST_CASE("single replication and error paths") {
    Experiment e;
    e.parent1 = make_uniform(2, 4);
    e.parent2 = make_uniform(1, 5);
    e.n1 = e.n2 = 30;
    e.reps = 1;
    const auto r = run_experiment(e);
    CHECK(r.values.size() == 1);

    Experiment bad = e;
    bad.parent1 = make_log_frechet(2);
    bad.parent2 = make_log_frechet(4);
    bad.norm = NormKind::Linear;
    CHECK_THROWS_AS(run_experiment(bad), NotInDomainError);
}

TEST_CASE("finite-size regime snapshot matches the known setups") {
    // uniform pair: block 2 dominates, limit H_{2,1}
    Experiment uu;
    uu.parent1 = make_uniform(2, 4);
    uu.parent2 = make_uniform(1, 5);
    uu.n1 = 100;
    uu.n2 = 150;
    uu.reps = 8;
    auto rep = run_experiment(uu);
    CHECK(rep.regime.regime == RegimeCase::SingleDominant);
    CHECK(rep.regime.dominant_block == 2);
    REQUIRE(rep.regime.limit_model.has_value());
    CHECK(std::get<PStable>(rep.regime.limit_model->components()[0]).kind == SixType::H2);

    // pareto(2) & log-frechet(4) at the jump-point tuned sizes
    Experiment pj;
    pj.parent1 = make_pareto(2);
    pj.parent2 = make_log_frechet(4);
    pj.n1 = 10000;
    pj.n2 = 449;
    pj.reps = 8;
    rep = run_experiment(pj);
    CHECK(rep.regime.regime == RegimeCase::LeftTruncated);
    REQUIRE(rep.regime.jump_x0.has_value());
    CHECK(*rep.regime.jump_x0 == doctest::Approx(std::exp(1.0)).epsilon(1e-3));
    CHECK(rep.empirical_jump_mass.has_value());

    // balanced log-frechet pair: accelerated with A = B = 1
    Experiment ac;
    ac.parent1 = make_log_frechet(4);
    ac.parent2 = make_log_frechet(2);
    ac.n1 = 10000;
    ac.n2 = 100;
    ac.reps = 8;
    rep = run_experiment(ac);
    CHECK(rep.regime.regime == RegimeCase::Accelerated);
    CHECK(rep.regime.A == doctest::Approx(1.0));
    CHECK(rep.regime.B == doctest::Approx(1.0));

    // supplying the coupling switches to the asymptotic rule
    Experiment withc = pj;
    withc.coupling = Coupling{Coupling::LogPower, std::pow(0.5, 4.0), 4.0};
    rep = run_experiment(withc);
    CHECK(rep.regime.regime == RegimeCase::LeftTruncated);
    CHECK(*rep.regime.jump_x0 == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("power and linear rows coincide for a pareto pair") {
    Experiment e;
    e.parent1 = make_pareto(4);
    e.parent2 = make_pareto(2);
    e.n1 = e.n2 = 500;
    e.reps = 400;
    e.seed = 7;
    const auto rows = convergence_table({e});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].norm == NormKind::Power);
    CHECK(rows[1].norm == NormKind::Linear);
    CHECK(std::abs(rows[0].ks - rows[1].ks) <= 1e-12);
    CHECK(std::abs(rows[0].cvm - rows[1].cvm) <= 1e-12);
    CHECK(std::abs(rows[0].ad - rows[1].ad) <= 1e-12);
}

TEST_CASE("convergence table produces both normalizations for the uniform pair") {
    Experiment e;
    e.parent1 = make_uniform(2, 4);
    e.parent2 = make_uniform(1, 5);
    e.n1 = 100;
    e.n2 = 150;
    e.reps = 1000;
    const auto rows = convergence_table({e});
    REQUIRE(rows.size() == 2);
    // both fits should be adequate at these sizes
    CHECK(rows[0].ks < 0.05);
    CHECK(rows[1].ks < 0.05);
    // log-frechet pair: the linear row is skipped (no l-max entry)
    Experiment lf;
    lf.parent1 = make_log_frechet(4);
    lf.parent2 = make_log_frechet(2);
    lf.n1 = 1000;
    lf.n2 = 31;  // ~ n1^(1/2)
    lf.reps = 500;
    const auto lfrows = convergence_table({lf});
    CHECK(lfrows.size() == 1);
    CHECK(lfrows[0].norm == NormKind::Power);
    CHECK_THROWS_AS(convergence_table({lf}, /*strict=*/true), NotInDomainError);
}
