#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracdim/errors.hpp"
#include "fracdim/measures.hpp"

using namespace fracdim;

namespace {

FiniteMeasure half_half() {
    return make_measure(1, {{{0.0}, 0.5}, {{1.0}, 0.5}});
}

}  // namespace

TEST_CASE("measure construction and io") {
    auto mu = half_half();
    CHECK(mu.atoms.size() == 2);
    CHECK(mu.atoms[0].x == Vec{0.0});
    const std::string s = serialize_measure(mu);
    auto back = parse_measure(s);
    CHECK(serialize_measure(back) == s);
    CHECK_THROWS_AS(make_measure(1, {{{0.0}, 0.7}}), PreconditionError);
    CHECK_THROWS_AS(make_measure(1, {{{0.0}, 0.5}, {{0.0}, 0.5}}), PreconditionError);
    CHECK_THROWS_AS(parse_measure("{\"atoms\":[]}"), ParseError);
}

TEST_CASE("log-domain measures admit underflowed masses") {
    auto mu = make_measure_log(1, {{{0.0}, std::log1p(-1e-320)}, {{1.0}, -800.0}});
    CHECK(mu.atoms[1].p == 0.0);
    CHECK(mu.atoms[1].log_p == -800.0);
    CHECK(log_ball_mass(mu, {1.0}, 0.25) == -800.0);
}

TEST_CASE("ball masses use open balls") {
    auto mu = half_half();
    CHECK(ball_mass(mu, {0.0}, 1.0) == 0.5);   // 1 is on the boundary
    CHECK(ball_mass(mu, {0.0}, 1.01) == 1.0);
    CHECK(ball_mass(mu, {0.5}, 0.5) == 0.0);
    CHECK(log_ball_mass(mu, {0.5}, 0.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("moment integrals at the reference radius") {
    auto mu = half_half();
    CHECK(I(mu, 0.25, QValue::real(2)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(I(mu, 0.25, QValue::real(0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(I(mu, 0.25, QValue::real(1)) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-14));
    CHECK(I(mu, 0.25, QValue::plus_inf()) == 0.5);
    CHECK(I(mu, 0.25, QValue::minus_inf()) == 0.5);
    CHECK(I(mu, 2.00, QValue::real(2)) == 1.0);  // one big ball
}

TEST_CASE("phi is exact for the two-point measure") {
    auto mu = half_half();
    // below r = 1 each ball holds mass 1/2: phi = log2 / log(1/r)
    for (double r : {0.5, 0.25, 0.125}) {
        const double want = std::log(2.0) / -std::log(r);
        for (auto q : {QValue::real(2), QValue::real(0.5), QValue::real(1),
                       QValue::plus_inf(), QValue::minus_inf()}) {
            CHECK(phi(mu, r, q) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(phi(mu, 1.5, QValue::real(2)), PreconditionError);
}

TEST_CASE("phi is nonincreasing in q") {
    auto mu = make_measure(1, {{{0.0}, 0.6}, {{0.3}, 0.3}, {{0.9}, 0.1}});
    for (double r : {0.2, 0.35, 0.5}) {
        double prev = phi(mu, r, QValue::minus_inf());
        for (double q : {-2.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0}) {
            const double cur = phi(mu, r, QValue::real(q));
            CHECK(cur <= prev + 1e-10);
            prev = cur;
        }
        CHECK(phi(mu, r, QValue::plus_inf()) <= prev + 1e-10);
    }
}

TEST_CASE("lq profile emits slope and csv") {
    auto mu = half_half();
    auto [series, est] = lq_profile(mu, {0.5, 0.25, 0.125, 0.0625}, QValue::real(2));
    REQUIRE(series.rows.size() == 4);
    CHECK(series.rows[1].ratio == doctest::Approx(0.5).epsilon(1e-12));
    const std::string csv = profile_csv(series);
    CHECK(csv.substr(0, csv.find('\n')) == "r,phi");
}

TEST_CASE("fortet-mourier closed forms") {
    auto d0 = make_measure(1, {{{0.0}, 1.0}});
    auto d1 = make_measure(1, {{{1.0}, 1.0}});
    auto d5 = make_measure(1, {{{5.0}, 1.0}});
    CHECK(fm_distance(d0, d0) == 0.0);
    CHECK(fm_distance(d0, d1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fm_distance(d0, d5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fm_distance(d0, half_half()) == doctest::Approx(0.5).epsilon(1e-12));
    // primal and dual agree; argument order is canonicalized, so symmetry is
    // bitwise
    CHECK(fm_distance_dual(d0, d5) == doctest::Approx(2.0).epsilon(1e-12));
    auto a = make_measure(1, {{{0.1}, 0.4}, {{0.7}, 0.6}});
    auto b = make_measure(1, {{{0.2}, 0.5}, {{0.9}, 0.5}});
    CHECK(fm_distance(a, b) == fm_distance(b, a));
    CHECK(fm_distance(a, b) == doctest::Approx(fm_distance_dual(a, b)).epsilon(1e-9));
}

TEST_CASE("mix merges coinciding atoms") {
    auto a = make_measure(1, {{{0.0}, 1.0}});
    auto b = half_half();
    auto m = mix(a, b, 0.5);
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.atoms[0].p == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(m.atoms[1].p == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("stability probe passes on the reference measures") {
    auto mu = half_half();
    for (auto q : {QValue::real(2), QValue::real(1)}) {
        auto rep = stability_probe(mu, 0.25, q, 10, 12345);
        CHECK(rep.passed);
        CHECK(rep.delta >= std::ldexp(1.0, -20));
    }
    // q < 1 needs every r-ball over the support box charged: use a denser
    // measure
    auto dense = make_measure(
        1, {{{0.0}, 0.25}, {{0.25}, 0.25}, {{0.5}, 0.25}, {{0.75}, 0.25}});
    auto rep = stability_probe(dense, 0.25, QValue::real(0.5), 10, 12345);
    CHECK(rep.passed);
    CHECK(rep.delta >= std::ldexp(1.0, -20));
    // identical seed, identical report
    auto r1 = stability_probe(mu, 0.25, QValue::real(2), 10, 777);
    auto r2 = stability_probe(mu, 0.25, QValue::real(2), 10, 777);
    CHECK(r1.delta == r2.delta);
    CHECK(r1.detail == r2.detail);
}

TEST_CASE("probe q<1 requires everywhere-positive ball masses") {
    auto gap = make_measure(1, {{{0.0}, 0.5}, {{1.0}, 0.5}});
    CHECK_THROWS_AS(stability_probe(gap, 0.25, QValue::real(0.5), 5, 1),
                    PreconditionError);
}

TEST_CASE("iv root: regular crossing") {
    auto mu = half_half();
    auto res = iv_root(mu, QValue::real(2), 0.5, 0.125, 0.5);
    REQUIRE(std::holds_alternative<double>(res));
    CHECK(std::get<double>(res) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("iv root: jump certificate at the atom distance") {
    // atoms 1/2 apart: phi = 1 for r <= 1/2 and 0 above, tau = 0.3 is skipped
    auto mu = make_measure(1, {{{0.0}, 0.5}, {{0.5}, 0.5}});
    auto res = iv_root(mu, QValue::real(2), 0.3, 0.4, 0.9);
    REQUIRE(std::holds_alternative<JumpCertificate>(res));
    const auto& c = std::get<JumpCertificate>(res);
    CHECK(c.r_star == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.phi_left == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.phi_right == doctest::Approx(0.0).epsilon(1e-12));
}
