#include "fracdim/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "fracdim/errors.hpp"

namespace fracdim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
    double mx = -kInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == -kInf) return -kInf;
    double acc = 0;
    for (double x : v) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

}  // namespace

WeightedGraph WeightedGraph::make(
    std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
    WeightedGraph g;
    g.n = n;
    for (auto [a, b] : edges) {
        if (a == b) throw PreconditionError("graph: self-loops are not allowed");
        if (a >= n || b >= n) throw PreconditionError("graph: vertex out of range");
        g.edges.emplace(std::min(a, b), std::max(a, b));
    }
    if (!g.connected()) throw PreconditionError("graph: must be connected");
    return g;
}

std::vector<std::size_t> WeightedGraph::neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (const auto& [a, b] : edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool WeightedGraph::connected() const {
    if (n == 0) return false;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t cnt = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t u : neighbors(v)) {
            if (!seen[u]) {
                seen[u] = true;
                ++cnt;
                stack.push_back(u);
            }
        }
    }
    return cnt == n;
}

std::vector<std::size_t> articulation_points(const WeightedGraph& g) {
    std::vector<int> disc(g.n, -1), low(g.n, 0);
    std::vector<bool> cut(g.n, false);
    int timer = 0;
    std::function<void(std::size_t, std::size_t, bool)> dfs =
        [&](std::size_t v, std::size_t parent, bool root) {
            disc[v] = low[v] = timer++;
            int children = 0;
            for (std::size_t u : g.neighbors(v)) {
                if (disc[u] < 0) {
                    ++children;
                    dfs(u, v, false);
                    low[v] = std::min(low[v], low[u]);
                    if (!root && low[u] >= disc[v]) cut[v] = true;
                } else if (u != parent) {
                    low[v] = std::min(low[v], disc[u]);
                }
            }
            if (root && children > 1) cut[v] = true;
        };
    dfs(0, 0, true);
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < g.n; ++v) {
        if (cut[v]) out.push_back(v);
    }
    return out;
}

std::size_t graph_peel(const WeightedGraph& g) {
    if (g.n < 2) throw PreconditionError("graph_peel: need at least two vertices");
    const auto cuts = articulation_points(g);
    for (std::size_t v = 0; v < g.n; ++v) {
        if (std::binary_search(cuts.begin(), cuts.end(), v)) continue;
        // verify independently that the remainder stays connected
        WeightedGraph h;
        h.n = g.n - 1;
        for (const auto& [a, b] : g.edges) {
            if (a == v || b == v) continue;
            h.edges.emplace(a - (a > v), b - (b > v));
        }
        if (h.connected()) return v;
    }
    throw PreconditionError("graph_peel: no removable vertex found");
}

double GraphWeights::w(std::size_t v) const { return std::exp(log_w[v]); }

bool validate_graph_weights(const WeightedGraph& g, const GraphWeights& w,
                            std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (w.log_w.size() != g.n || w.v0 >= g.n) return fail("shape mismatch");
    for (double lw : w.log_w) {
        if (!std::isfinite(lw)) return fail("weight not positive");
    }
    if (std::abs(logsumexp(w.log_w)) > 1e-9) return fail("weights do not sum to 1");
    if (!(w.log_w[w.v0] > std::log(0.5))) return fail("w(v0) <= 1/2");
    const double leps = std::log(w.eps);
    for (std::size_t v = 0; v < g.n; ++v) {
        if (v == w.v0) continue;
        bool ok = false;
        for (std::size_t u : g.neighbors(v)) {
            if (w.log_w[v] <= leps + w.rho * w.log_w[u] + 1e-12) {
                ok = true;
                break;
            }
        }
        if (!ok) return fail("no dominating neighbor for vertex " + std::to_string(v));
    }
    return true;
}

GraphWeights graph_weights(const WeightedGraph& g, double eps, double rho) {
    if (!(eps > 0) || !(eps < 1)) throw PreconditionError("graph_weights: eps in (0,1)");
    if (!(rho >= 1)) throw PreconditionError("graph_weights: rho >= 1");
    GraphWeights out;
    out.eps = eps;
    out.rho = rho;
    if (g.n == 1) {
        out.v0 = 0;
        out.log_w = {0.0};
        return out;
    }
    const std::size_t v1 = graph_peel(g);
    WeightedGraph h;
    h.n = g.n - 1;
    for (const auto& [a, b] : g.edges) {
        if (a == v1 || b == v1) continue;
        h.edges.emplace(a - (a > v1), b - (b > v1));
    }
    GraphWeights sub = graph_weights(h, eps / 2, rho);
    auto lift = [&](std::size_t u) { return u + (u >= v1); };
    // the binding requirement is log a <= log eps + rho (log(1-a) + log w(u))
    // for v1's heaviest neighbor u; start near it instead of halving down
    double wu = -kInf;
    for (std::size_t u : g.neighbors(v1)) {
        const std::size_t su = u - (u > v1);
        wu = std::max(wu, sub.log_w[su]);
    }
    double log_a = std::min(std::log(0.25),
                            std::log(eps) + rho * (std::log(0.75) + wu) - std::log(2.0));
    for (int it = 0; it < 300; ++it) {
        const double a = std::exp(log_a);
        GraphWeights cand;
        cand.eps = eps;
        cand.rho = rho;
        cand.v0 = lift(sub.v0);
        cand.log_w.assign(g.n, 0.0);
        cand.log_w[v1] = log_a;
        const double l1a = std::log1p(-a);
        for (std::size_t u = 0; u < h.n; ++u) {
            cand.log_w[lift(u)] = l1a + sub.log_w[u];
        }
        if (validate_graph_weights(g, cand)) {
            out = cand;
            return out;
        }
        log_a -= std::log(2.0);
    }
    throw SearchFailureError("graph_weights: no admissible peel weight found");
}

namespace {

WeightedGraph cube_graph(const std::vector<Idx>& cubes, int dim) {
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

FiniteMeasure imubsi_nu(const SetSpec& set, int n, double q) {
    if (!(q <= 0)) throw PreconditionError("imubsi_nu: q <= 0 required");
    CubeCover cover = cubes_at(set, n);
    if (!cover.exact) {
        throw ExactnessError("imubsi_nu: exact cube cover required");
    }
    const ComponentDecomposition comp = components_of(cover);
    const double C = static_cast<double>(comp.count());
    const double kappa_sum = static_cast<double>(cover.indices.size());
    const double eps = std::pow(C, q) / (2.0 * kappa_sum);
    const double rho = 1.0 - q;
    auto reps = cover_representatives(set, n);
    std::vector<std::pair<Vec, double>> atoms_log;
    for (const auto& cubes : comp.components) {
        const WeightedGraph g = cube_graph(cubes, cover.dim);
        const GraphWeights w = graph_weights(g, eps, rho);
        for (std::size_t i = 0; i < cubes.size(); ++i) {
            atoms_log.emplace_back(reps.at(cubes[i]), w.log_w[i] - std::log(C));
        }
    }
    return make_measure_log(cover.dim, std::move(atoms_log));
}

std::string CheckResult::csv() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%s,", lhs, rhs,
                  pass ? "true" : "false");
    return std::string(buf) + params;
}

CheckResult imubsi_check(const SetSpec& set, int n, double q,
                         const FiniteMeasure& mu, double theta) {
    if (!(theta > 0) || !(theta < 1)) {
        throw PreconditionError("imubsi_check: theta in (0,1)");
    }
    const auto& bb = set.bounding_box();
    for (const auto& a : mu.atoms) {
        for (int j = 0; j < mu.dim; ++j) {
            if (a.x[j] < bb.lower[j] - 1e-9 || a.x[j] > bb.upper[j] + 1e-9) {
                throw PreconditionError(
                    "imubsi_check: mu has atoms outside the bounding box");
            }
        }
    }
    const FiniteMeasure nu_n = imubsi_nu(set, n, q);
    const FiniteMeasure nu = mix(mu, nu_n, theta);
    const double r = 3.0 * std::ldexp(1.0, -n);
    const double log_lhs = log_I(nu, r, QValue::real(q), Norm::Chebyshev);
    const double C = static_cast<double>(components(set, n).count());
    const double N = static_cast<double>(mu.atoms.size());
    double a = 1.0;
    for (const auto& at : mu.atoms) a = std::min(a, at.p);
    const double rhs = N * std::pow(1 - theta, q) * std::pow(a, q) +
                       std::pow(theta, q) +
                       std::pow(theta, q) * std::pow(2.0, -q) * std::pow(C, 1 - q);
    CheckResult res;
    res.lhs = std::exp(log_lhs);
    res.rhs = rhs;
    res.pass = log_lhs <= std::log(rhs) + 1e-12;
    // the mixture must charge every 3*2^-n ball around K
    for (const auto& [k, p] : cover_representatives(set, n)) {
        if (!(ball_mass(nu, p, r, Norm::Chebyshev) > 0)) {
            res.pass = false;
            break;
        }
    }
    std::ostringstream os;
    os << "n=" << n << ";q=" << q << ";theta=" << theta;
    res.params = os.str();
    return res;
}

namespace {

// Upper bound for the r-covering number of a finite union of balls: the ball
// count itself when every radius is <= r, else the number of level-l dyadic
// cubes (2^-l <= r) meeting the union. A larger bound only weakens the checks.
double covering_bound(const std::vector<Ball>& balls, double r, int dim) {
    bool small = true;
    for (const auto& b : balls) small = small && b.radius <= r;
    if (small) return static_cast<double>(balls.size());
    const int level =
        std::max(0, static_cast<int>(std::ceil(std::log2(1.0 / r) - 1e-12)));
    std::set<Idx> cubes;
    for (const auto& b : balls) {
        Idx lo{0, 0, 0}, hi{0, 0, 0};
        for (int j = 0; j < dim; ++j) {
            lo[j] = static_cast<std::int64_t>(
                std::floor(std::ldexp(b.center[j] - b.radius, level)));
            hi[j] = static_cast<std::int64_t>(
                std::floor(std::ldexp(b.center[j] + b.radius, level)));
        }
        Idx k = lo;
        while (true) {
            cubes.insert(k);
            int j = dim - 1;
            while (j >= 0 && k[j] == hi[j]) k[j--] = lo[j];
            if (j < 0) break;
            ++k[j];
        }
    }
    return static_cast<double>(cubes.size());
}

bool in_region(const std::vector<Ball>& balls, const Vec& x, Norm norm) {
    for (const auto& b : balls) {
        if (ball_contains(b.center, b.radius, x, norm)) return true;
    }
    return false;
}

double region_dist(const std::vector<Ball>& balls, const Vec& x, Norm norm) {
    double best = kInf;
    for (const auto& b : balls) {
        best = std::min(best, std::max(0.0, norm_dist(b.center, x, norm) - b.radius));
    }
    return best;
}

}  // namespace

CheckResult jensen_lq_check(const FiniteMeasure& mu, const std::vector<Ball>& E,
                            double r, double q, Norm norm) {
    if (!(q > 1)) throw PreconditionError("jensen_lq_check: q > 1 required");
    if (E.empty() || r <= 0) throw PreconditionError("jensen_lq_check: bad region");
    double muE = 0;
    for (const auto& a : mu.atoms) {
        if (in_region(E, a.x, norm)) muE += a.p;
    }
    if (!(muE > 0)) throw PreconditionError("jensen_lq_check: mu(E) must be positive");
    const double N = covering_bound(E, r, mu.dim);
    CheckResult res;
    res.lhs = I(mu, 2 * r, QValue::real(q), norm);
    res.rhs = std::pow(muE, q) / std::pow(N, q - 1);
    res.pass = res.lhs >= res.rhs - 1e-12;
    std::ostringstream os;
    os << "r=" << r << ";q=" << q << ";balls=" << E.size();
    res.params = os.str();
    return res;
}

CheckResult jensen_l1_check(const FiniteMeasure& mu, const std::vector<Ball>& A,
                            double r, Norm norm) {
    if (A.empty() || r <= 0) throw PreconditionError("jensen_l1_check: bad region");
    double lhs = 0;
    for (const auto& a : mu.atoms) {
        if (in_region(A, a.x, norm)) {
            lhs += a.p * log_ball_mass(mu, a.x, 2 * r, norm);
        }
    }
    double muAr = 0;
    for (const auto& a : mu.atoms) {
        if (region_dist(A, a.x, norm) < r) muAr += a.p;
    }
    const double N = covering_bound(A, r, mu.dim);
    CheckResult res;
    res.lhs = lhs;
    res.rhs = -muAr * std::log(N) - std::exp(-1.0);
    res.pass = res.lhs >= res.rhs - 1e-12;
    std::ostringstream os;
    os << "r=" << r << ";balls=" << A.size();
    res.params = os.str();
    return res;
}

namespace {

std::map<Idx, Vec> packing_candidates(const SetSpec& set, double r) {
    const int level =
        std::max(0, static_cast<int>(std::ceil(std::log2(1.0 / r) - 1e-12)) + 2);
    return cover_representatives(set, level);
}

std::vector<Vec> greedy_packing(const std::map<Idx, Vec>& cands, double r) {
    std::vector<Vec> centers;
    for (const auto& [k, p] : cands) {
        bool ok = true;
        for (const auto& c : centers) {
            if (norm_dist(c, p) < 2 * r) {
                ok = false;
                break;
            }
        }
        if (ok) centers.push_back(p);
    }
    return centers;
}

FiniteMeasure uniform_on(int dim, const std::vector<Vec>& centers) {
    std::vector<std::pair<Vec, double>> atoms;
    const double lp = -std::log(static_cast<double>(centers.size()));
    for (const auto& c : centers) atoms.emplace_back(c, lp);
    return make_measure_log(dim, std::move(atoms));
}

}  // namespace

PackedMeasure packing_measure_lower(const SetSpec& set, double t, double alpha) {
    if (!(alpha > 0) || !(t > 0)) {
        throw PreconditionError("packing_measure_lower: need t > 0 and alpha > 0");
    }
    std::ostringstream scan;
    for (int j = 1; j <= 40; ++j) {
        const double r = std::ldexp(1.0, -j);
        if (r >= alpha) continue;
        const auto cands = packing_candidates(set, r / 2);
        const auto centers = greedy_packing(cands, r / 2);
        const double P = static_cast<double>(centers.size());
        const double cap = std::pow(2.0, t) * std::pow(r, -t);
        if (P > cap) {
            scan << " r=2^-" << j << ":P=" << P << ">cap=" << cap;
            continue;
        }
        FiniteMeasure mu = uniform_on(set.dim(), centers);
        const double bound = std::pow(2.0, -t) * std::pow(r, t);
        bool ok = true;
        for (const auto& [k, g] : cands) {
            if (!(ball_mass(mu, g, r) >= bound - 1e-15)) {
                ok = false;
                break;
            }
        }
        if (ok) return {std::move(mu), r};
        scan << " r=2^-" << j << ":grid-check-failed";
    }
    throw SearchFailureError("packing_measure_lower: no admissible radius;" +
                             scan.str());
}

PackedMeasure packing_measure_upper(const SetSpec& set, double t, double alpha) {
    if (!(alpha > 0) || !(t >= 0)) {
        throw PreconditionError("packing_measure_upper: need t >= 0 and alpha > 0");
    }
    std::ostringstream scan;
    for (int j = 1; j <= 40; ++j) {
        const double r = std::ldexp(1.0, -j);
        if (r >= alpha) continue;
        const auto cands = packing_candidates(set, r);
        const auto centers = greedy_packing(cands, r);
        const double P = static_cast<double>(centers.size());
        if (P < std::pow(r, -t)) {
            scan << " r=2^-" << j << ":P=" << P << "<" << std::pow(r, -t);
            continue;
        }
        // exact certificate: pairwise distances >= 2r, so any open r-ball
        // holds at most one center
        for (std::size_t a = 0; a < centers.size(); ++a) {
            for (std::size_t b = a + 1; b < centers.size(); ++b) {
                if (norm_dist(centers[a], centers[b]) < 2 * r) {
                    throw PreconditionError(
                        "packing_measure_upper: packing certificate violated");
                }
            }
        }
        return {uniform_on(set.dim(), centers), r};
    }
    throw SearchFailureError("packing_measure_upper: no admissible radius;" +
                             scan.str());
}

}  // namespace fracdim
