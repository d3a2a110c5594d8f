#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracdim/convexdim.hpp"
#include "cantor_pair.hpp"

using namespace fracdim;

TEST_CASE("profile json roundtrip") {
    RateProfile p;
    p.m = 2;
    p.vectors = {{0.5, 1.0}, {1.0, 0.25}};
    const std::string s = serialize_profile(p);
    auto back = parse_profile(s);
    CHECK(back.m == 2);
    CHECK(back.vectors == p.vectors);
    CHECK(serialize_profile(back) == s);
}

TEST_CASE("single-vector profile collapses all three quantities") {
    RateProfile p;
    p.m = 1;
    p.vectors = {{0.75}};
    CHECK(s_u(p) == 0.75);
    CHECK(s_conv(p).value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s_conv_max(p) == 0.75);
}

TEST_CASE("point-union-interval profile") {
    // {0} u [1,2]: rates (0, 1); localizing to the interval gives 1
    auto sets = std::vector<SetSpecPtr>{SetSpec::points({{0.0}}),
                                        SetSpec::box({1.0}, {2.0})};
    auto p = profile_estimate(sets, 3, 12);
    REQUIRE(p.vectors.size() == 1);
    CHECK(p.vectors[0][0] == 0.0);
    CHECK(p.vectors[0][1] == 1.0);
    auto cd = s_conv(p);
    CHECK(cd.value == 0.0);
    CHECK(cd.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s_conv_max(p) == 1.0);
    CHECK(s_u(p) == 0.0);
    // the interval alone has uniform dimension 1: localization breaks
    // monotonicity of s_u under inclusion
    auto interval = profile_estimate({SetSpec::box({1.0}, {2.0})}, 3, 12);
    CHECK(s_u(interval) == 1.0);
}

TEST_CASE("simplex agrees with grid search") {
    RateProfile p;
    p.m = 2;
    p.vectors = {{1.0, 0.2}, {0.1, 0.9}};
    auto cd = s_conv(p);
    CHECK(std::abs(s_conv_grid(p, 1e-3) - cd.value) < 5e-3);
    // weights are a probability vector
    double sum = 0;
    for (double w : cd.weights) {
        CHECK(w >= -1e-12);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alternating-block pair: all three dimensions differ") {
    const double c = std::log(3.0) / std::log(100.0);
    auto e = testpair::make_set(true);
    auto f = testpair::make_set(false);
    auto prof = profile_estimate({e, f}, testpair::extremal_levels());
    REQUIRE(prof.vectors.size() == 2);
    CHECK(s_u(prof) == doctest::Approx(2 * c).epsilon(1e-11));
    auto cd = s_conv(prof);
    CHECK(cd.value == doctest::Approx(13 * c / 6).epsilon(1e-11));
    REQUIRE(cd.weights.size() == 2);
    CHECK(cd.weights[0] == doctest::Approx(1.0 / 3).epsilon(1e-7));
    CHECK(cd.weights[1] == doctest::Approx(2.0 / 3).epsilon(1e-7));
    CHECK(s_conv_max(prof) == doctest::Approx(5 * c / 2).epsilon(1e-11));
    // per-set box dimensions from the same extremal levels
    auto pe = profile_estimate({e}, testpair::extremal_levels());
    auto pf = profile_estimate({f}, testpair::extremal_levels());
    CHECK(s_conv_max(pe) == doctest::Approx(5 * c / 2).epsilon(1e-11));
    CHECK(s_conv_max(pf) == doctest::Approx(9 * c / 4).epsilon(1e-11));
}

TEST_CASE("dominated vectors are pruned") {
    auto sets = std::vector<SetSpecPtr>{SetSpec::box({0.0}, {1.0})};
    auto p = profile_estimate(sets, std::vector<int>{4, 6, 8});
    CHECK(p.vectors.size() == 1);  // rate is exactly 1 at every level
    CHECK(p.vectors[0][0] == 1.0);
}
