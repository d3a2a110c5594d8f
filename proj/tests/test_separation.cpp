#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracdim/errors.hpp"
#include "fracdim/separation.hpp"

using namespace fracdim;

namespace {

SetSpecPtr middle_thirds() {
    HomothetyIfsSpec ifs;
    ifs.maps = {{1.0 / 3, {0.0}}, {1.0 / 3, {2.0 / 3}}};
    ifs.separation = IfsSeparation::Strong;
    return SetSpec::homothety_ifs(ifs, 1);
}

}  // namespace

TEST_CASE("component decomposition") {
    auto u = SetSpec::union_of({SetSpec::points({{0.0}}), SetSpec::box({0.5}, {1.0})});
    auto c = components(*u, 3);
    REQUIRE(c.count() == 2);
    CHECK(c.components[0].size() == 1);
    CHECK(c.components[1].size() == 5);
    CHECK(component_separation(c) == doctest::Approx(3.0 / 8).epsilon(1e-12));

    // diagonal adjacency joins corner-touching cubes
    auto diag = SetSpec::points({{0.0, 0.0}, {0.5, 0.5}});
    CHECK(components(*diag, 1).count() == 1);
}

TEST_CASE("connected sets have one component at every level") {
    auto box = SetSpec::box({0.0}, {1.0});
    for (int n = 3; n <= 20; ++n) {
        CHECK(components(*box, n).count() == 1);
    }
}

TEST_CASE("bsi of an interval is identically zero") {
    auto box = SetSpec::box({0.0}, {1.0});
    auto s = bsi_series(*box, 3, 20);
    for (const auto& row : s.rows) {
        CHECK(row.log_value == 0.0);
        CHECK(row.ratio == 0.0);
    }
    auto est = bsi_estimate(*box, 3, 20);
    CHECK(est.slope_fit == 0.0);
    CHECK_FALSE(est.degenerate);
}

TEST_CASE("bsi of the middle-thirds set approaches log2/log3") {
    auto est = bsi_estimate(*middle_thirds(), 8, 20);
    const double target = std::log(2.0) / std::log(3.0);
    CHECK(std::abs(est.slope_fit - target) < 0.05);
    CHECK(selfsimilar_bsi({1.0 / 3, 1.0 / 3}) == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("bsi of the harmonic closure approaches 1/2") {
    auto est = bsi_estimate(*SetSpec::harmonic_closure(), 10, 30);
    CHECK(std::abs(est.slope_fit - 0.5) < 0.05);
}

TEST_CASE("bsi refuses outer covers") {
    auto skew = SetSpec::affine(SetSpec::box({0.0}, {1.0}), 0.3, {0.0});
    CHECK_THROWS_AS(bsi_series(*skew, 3, 6), ExactnessError);
}

TEST_CASE("components csv shape") {
    auto u = SetSpec::union_of({SetSpec::points({{0.0}}), SetSpec::points({{1.0}})});
    const std::string csv = components_csv(components(*u, 1));
    CHECK(csv == "n,component_id,cube_index\n1,0,0\n1,1,2\n");
}
