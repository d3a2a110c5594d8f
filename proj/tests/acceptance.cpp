// Acceptance gate: nine numbered criteria, one PASS/FAIL line each. Exit 0
// only when every criterion passes inside its runtime cap.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracdim/constructors.hpp"
#include "fracdim/convexdim.hpp"
#include "cantor_pair.hpp"

using namespace fracdim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
int failures = 0;

void criterion(int id, const char* name, double cap_seconds,
               const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= cap_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time cap");
    }
    if (!ok) ++failures;
    std::printf("criterion %d (%s): %s (%.2fs / %.0fs cap)%s%s\n", id, name,
                ok ? "PASS" : "FAIL", secs, cap_seconds, detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

SetSpecPtr middle_thirds() {
    HomothetyIfsSpec ifs;
    ifs.maps = {{1.0 / 3, {0.0}}, {1.0 / 3, {2.0 / 3}}};
    ifs.separation = IfsSeparation::Strong;
    return SetSpec::homothety_ifs(ifs, 1);
}

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

FiniteMeasure random_measure(std::mt19937_64& rng, int dim, int max_atoms) {
    const int n = 1 + static_cast<int>(uniform(rng) * max_atoms);
    std::vector<std::pair<Vec, double>> atoms;
    double total = 0;
    for (int i = 0; i < n; ++i) {
        Vec x;
        for (int j = 0; j < dim; ++j) x.push_back(uniform(rng));
        const double w = 0.05 + uniform(rng);
        atoms.emplace_back(std::move(x), w);
        total += w;
    }
    for (auto& [x, w] : atoms) w /= total;
    return make_measure(dim, std::move(atoms), 1e-9);
}

WeightedGraph cube_adjacency(const std::vector<Idx>& cubes, int dim) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        for (std::size_t j = i + 1; j < cubes.size(); ++j) {
            bool adj = true;
            for (int a = 0; a < dim; ++a) {
                adj = adj && std::llabs(cubes[i][a] - cubes[j][a]) <= 1;
            }
            if (adj) edges.emplace_back(i, j);
        }
    }
    return WeightedGraph::make(cubes.size(), std::move(edges));
}

}  // namespace

int main() {
    const double c = std::log(3.0) / std::log(100.0);

    criterion(1, "alternating-pair dimension values", 1.0, [&](std::string& why) {
        auto e = testpair::make_set(true);
        auto f = testpair::make_set(false);
        auto prof = profile_estimate({e, f}, testpair::extremal_levels());
        auto cd = s_conv(prof);
        auto pe = profile_estimate({e}, testpair::extremal_levels());
        auto pf = profile_estimate({f}, testpair::extremal_levels());
        const bool ok = near(s_u(prof), 2 * c, 1e-9) &&
                        near(cd.value, 13 * c / 6, 1e-9) &&
                        near(s_conv_max(prof), 5 * c / 2, 1e-9) &&
                        near(s_conv_max(pe), 5 * c / 2, 1e-9) &&
                        near(s_conv_max(pf), 9 * c / 4, 1e-9) &&
                        cd.weights.size() == 2 &&
                        near(cd.weights[0], 1.0 / 3, 1e-6) &&
                        near(cd.weights[1], 2.0 / 3, 1e-6);
        if (!ok) {
            why = "s_u=" + std::to_string(s_u(prof)) +
                  " s_conv=" + std::to_string(cd.value) +
                  " s_conv_max=" + std::to_string(s_conv_max(prof));
        }
        return ok;
    });

    criterion(2, "box separation index", 10.0, [&](std::string& why) {
        auto box = SetSpec::box({0.0}, {1.0});
        for (const auto& row : bsi_series(*box, 3, 20).rows) {
            if (row.log_value != 0.0 || row.ratio != 0.0) {
                why = "interval bsi not identically zero";
                return false;
            }
        }
        const double h = bsi_estimate(*SetSpec::harmonic_closure(), 10, 30).slope_fit;
        const double k = bsi_estimate(*middle_thirds(), 8, 20).slope_fit;
        const double target = std::log(2.0) / std::log(3.0);
        const double moran = selfsimilar_bsi({1.0 / 3, 1.0 / 3});
        const bool ok = near(h, 0.5, 0.05) && near(k, target, 0.05) &&
                        near(moran, target, 1e-12);
        if (!ok) why = "harmonic=" + std::to_string(h) + " cantor=" + std::to_string(k);
        return ok;
    });

    criterion(3, "point-union-interval non-monotonicity", 1.0, [&](std::string& why) {
        auto pt = SetSpec::points({{0.0}});
        auto iv = SetSpec::box({1.0}, {2.0});
        auto prof = profile_estimate({pt, iv}, 3, 12);
        auto cd = s_conv(prof);
        const bool ok = cd.value == 0.0 && s_conv_max(prof) == 1.0 &&
                        s_u(prof) == 0.0 &&
                        s_u(profile_estimate({iv}, 3, 12)) == 1.0;
        if (!ok) why = "s_conv=" + std::to_string(cd.value);
        return ok;
    });

    criterion(4, "mixture moment campaign", 30.0, [&](std::string& why) {
        std::mt19937_64 rng(424242);
        const double qs[] = {0.0, -1.0, -2.0};
        const double thetas[] = {0.1, 0.5};
        for (int it = 0; it < 200; ++it) {
            auto mu = random_measure(rng, 2, 20);
            const int n = 3 + static_cast<int>(uniform(rng) * 4);
            const double q = qs[it % 3];
            const double theta = thetas[it % 2];
            std::vector<Vec> pts;
            for (const auto& a : mu.atoms) pts.push_back(a.x);
            auto set = SetSpec::points(pts);
            auto res = imubsi_check(*set, n, q, mu, theta);
            if (!res.pass) {
                why = "instance " + std::to_string(it) + " failed: " + res.params;
                return false;
            }
            // re-run the cascade per component and validate the three bullets
            auto comp = components(*set, n);
            std::size_t total = 0;
            for (const auto& cubes : comp.components) total += cubes.size();
            const double eps =
                std::pow(static_cast<double>(comp.count()), q) / (2.0 * total);
            for (const auto& cubes : comp.components) {
                auto g = cube_adjacency(cubes, 2);
                auto w = graph_weights(g, eps, 1.0 - q);
                std::string bullet_why;
                if (!validate_graph_weights(g, w, &bullet_why)) {
                    why = "cascade validator: " + bullet_why;
                    return false;
                }
            }
        }
        return true;
    });

    criterion(5, "power-mean monotonicity and jensen suites", 30.0,
              [&](std::string& why) {
        std::mt19937_64 rng(515151);
        const std::vector<QValue> grid{
            QValue::minus_inf(), QValue::real(-2), QValue::real(-1), QValue::real(0),
            QValue::real(0.5),  QValue::real(1),  QValue::real(1.5), QValue::real(2),
            QValue::plus_inf()};
        for (int it = 0; it < 500; ++it) {
            auto mu = random_measure(rng, 1, 8);
            const double r = 0.05 + 0.75 * uniform(rng);
            double prev = kInf;
            for (const auto& q : grid) {
                const double cur = phi(mu, r, q);
                if (cur > prev + 1e-10) {
                    why = "monotonicity failed at instance " + std::to_string(it);
                    return false;
                }
                prev = cur;
            }
        }
        for (int it = 0; it < 200; ++it) {
            auto mu = random_measure(rng, 1, 8);
            std::vector<Ball> balls;
            const int nb = 1 + static_cast<int>(uniform(rng) * 3);
            for (int b = 0; b < nb; ++b) {
                const auto& at = mu.atoms[static_cast<std::size_t>(
                    uniform(rng) * mu.atoms.size())];
                balls.push_back({at.x, 0.01 + 0.5 * uniform(rng)});
            }
            const double r = 0.05 + 0.45 * uniform(rng);
            const double q = 1.1 + 1.9 * uniform(rng);
            if (!jensen_lq_check(mu, balls, r, q).pass) {
                why = "jensen_lq failed at instance " + std::to_string(it);
                return false;
            }
            if (!jensen_l1_check(mu, balls, r).pass) {
                why = "jensen_l1 failed at instance " + std::to_string(it);
                return false;
            }
        }
        auto mu = make_measure(1, {{{0.0}, 0.5}, {{1.0}, 0.5}});
        std::vector<Ball> e{{{0.0}, 0.1}, {{1.0}, 0.1}};
        auto res = jensen_lq_check(mu, e, 0.1, 2.0);
        if (!(res.pass && near(res.lhs, 0.5, 1e-12) && near(res.rhs, 0.5, 1e-12))) {
            why = "equality witness not reproduced";
            return false;
        }
        return true;
    });

    criterion(6, "fortet-mourier metric", 20.0, [&](std::string& why) {
        auto d0 = make_measure(1, {{{0.0}, 1.0}});
        auto d1 = make_measure(1, {{{1.0}, 1.0}});
        auto d5 = make_measure(1, {{{5.0}, 1.0}});
        if (!near(fm_distance(d0, d1), 1.0, 1e-12) ||
            !near(fm_distance(d0, d5), 2.0, 1e-12)) {
            why = "delta closed forms wrong";
            return false;
        }
        std::mt19937_64 rng(616161);
        for (int it = 0; it < 100; ++it) {
            auto a = random_measure(rng, 1, 6);
            auto b = random_measure(rng, 1, 6);
            auto cmeas = random_measure(rng, 1, 6);
            const double ab = fm_distance(a, b);
            const double bc = fm_distance(b, cmeas);
            const double ac = fm_distance(a, cmeas);
            if (ab != fm_distance(b, a)) {
                why = "symmetry broken at instance " + std::to_string(it);
                return false;
            }
            if (ac > ab + bc + 1e-9) {
                why = "triangle inequality broken at instance " + std::to_string(it);
                return false;
            }
            if (!near(ab, fm_distance_dual(a, b), 1e-9)) {
                why = "primal/dual gap at instance " + std::to_string(it);
                return false;
            }
        }
        return true;
    });

    criterion(7, "perturbation stability probes", 60.0, [&](std::string& why) {
        std::vector<std::pair<FiniteMeasure, double>> cases;
        cases.emplace_back(make_measure(1, {{{0.5}, 1.0}}), 0.25);
        cases.emplace_back(make_measure(1, {{{0.0}, 0.5}, {{0.25}, 0.5}}), 0.25);
        cases.emplace_back(
            make_measure(1, {{{0.0}, 0.2}, {{0.25}, 0.2}, {{0.5}, 0.2},
                             {{0.75}, 0.2}, {{1.0}, 0.2}}),
            0.25);
        cases.emplace_back(
            make_measure(1, {{{0.0}, 0.5}, {{0.1}, 0.25}, {{0.2}, 0.125},
                             {{0.3}, 0.125}}),
            0.25);
        cases.emplace_back(
            make_measure(2, {{{0.0, 0.0}, 0.25}, {{0.0, 0.5}, 0.25},
                             {{0.5, 0.0}, 0.25}, {{0.5, 0.5}, 0.25}}),
            0.5);
        int idx = 0;
        for (const auto& [mu, r] : cases) {
            for (auto q : {QValue::real(2), QValue::real(1), QValue::real(0.5)}) {
                auto rep = stability_probe(mu, r, q, 10, 70000 + idx);
                if (!rep.passed || rep.delta < std::ldexp(1.0, -20)) {
                    why = "probe failed on case " + std::to_string(idx) + ": " +
                          rep.detail;
                    return false;
                }
                ++idx;
            }
        }
        return true;
    });

    criterion(8, "intermediate-value root finding", 1.0, [&](std::string& why) {
        auto mu = make_measure(1, {{{0.0}, 0.5}, {{1.0}, 0.5}});
        auto root = iv_root(mu, QValue::real(2), 0.5, 0.125, 0.5);
        if (!std::holds_alternative<double>(root) ||
            !near(std::get<double>(root), 0.25, 1e-9)) {
            why = "root 1/4 not recovered";
            return false;
        }
        auto muc = make_measure(1, {{{0.0}, 0.5}, {{0.5}, 0.5}});
        auto jump = iv_root(muc, QValue::real(2), 0.3, 0.4, 0.9);
        if (!std::holds_alternative<JumpCertificate>(jump)) {
            why = "jump certificate not returned";
            return false;
        }
        const auto& cert = std::get<JumpCertificate>(jump);
        const bool ok = near(cert.r_star, 0.5, 1e-12) && near(cert.phi_left, 1.0, 1e-12) &&
                        near(cert.phi_right, 0.0, 1e-12);
        if (!ok) why = "certificate values wrong";
        return ok;
    });

    criterion(9, "frostman packing constructors", 5.0, [&](std::string& why) {
        auto box = SetSpec::box({0.0}, {1.0});
        auto up = packing_measure_upper(*box, 0.5, 0.125);
        if (up.r != 1.0 / 16 || up.mu.atoms.size() != 9) {
            why = "upper measure is not the 9-center packing";
            return false;
        }
        for (std::size_t i = 0; i < up.mu.atoms.size(); ++i) {
            for (std::size_t j = i + 1; j < up.mu.atoms.size(); ++j) {
                if (norm_dist(up.mu.atoms[i].x, up.mu.atoms[j].x) < 2 * up.r) {
                    why = "packing certificate violated";
                    return false;
                }
            }
        }
        auto lo1 = packing_measure_lower(*box, 1.0, 0.25);
        auto lo2 = packing_measure_lower(*middle_thirds(), 0.7, 0.125);
        if (lo1.r <= 0 || lo2.r <= 0) {
            why = "lower constructor returned no radius";
            return false;
        }
        return true;
    });

    if (failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
