#include "fracdim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fracdim/errors.hpp"
#include "fracdim/simplex.hpp"

namespace fracdim {
namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
    double mx = -kInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == -kInf) return -kInf;
    double acc = 0;
    for (double x : v) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

void sort_and_check(FiniteMeasure& mu) {
    std::sort(mu.atoms.begin(), mu.atoms.end(),
              [](const auto& a, const auto& b) { return a.x < b.x; });
    for (std::size_t i = 0; i + 1 < mu.atoms.size(); ++i) {
        if (mu.atoms[i].x == mu.atoms[i + 1].x) {
            throw PreconditionError("measure: atoms must have distinct points");
        }
    }
    for (const auto& a : mu.atoms) {
        if (static_cast<int>(a.x.size()) != mu.dim) {
            throw PreconditionError("measure: atom dimension mismatch");
        }
    }
}

}  // namespace

FiniteMeasure make_measure(int dim, std::vector<std::pair<Vec, double>> atoms,
                           double tol) {
    FiniteMeasure mu;
    mu.dim = dim;
    double sum = 0;
    for (auto& [x, p] : atoms) {
        if (!(p > 0)) throw PreconditionError("measure: masses must be positive");
        sum += p;
        mu.atoms.push_back({std::move(x), p, std::log(p)});
    }
    if (mu.atoms.empty() || std::abs(sum - 1.0) > tol) {
        throw PreconditionError("measure: masses must sum to 1");
    }
    sort_and_check(mu);
    return mu;
}

FiniteMeasure make_measure_log(int dim, std::vector<std::pair<Vec, double>> atoms_log) {
    FiniteMeasure mu;
    mu.dim = dim;
    std::vector<double> logs;
    for (auto& [x, lp] : atoms_log) {
        if (!std::isfinite(lp)) throw PreconditionError("measure: bad log mass");
        logs.push_back(lp);
        mu.atoms.push_back({std::move(x), std::exp(lp), lp});
    }
    if (mu.atoms.empty() || std::abs(logsumexp(logs)) > 1e-9) {
        throw PreconditionError("measure: masses must sum to 1");
    }
    sort_and_check(mu);
    return mu;
}

FiniteMeasure parse_measure(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("measure file: invalid JSON: ") + e.what());
    }
    std::vector<std::pair<Vec, double>> atoms;
    int dim = 0;
    try {
        for (const auto& a : j.at("atoms")) {
            Vec x;
            for (const auto& v : a.at("x")) x.push_back(v.get<double>());
            dim = static_cast<int>(x.size());
            atoms.emplace_back(std::move(x), a.at("p").get<double>());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("measure file: ") + e.what());
    }
    if (atoms.empty()) throw ParseError("measure file: no atoms");
    return make_measure(dim, std::move(atoms), 1e-9);
}

FiniteMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open measure file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_measure(ss.str());
}

std::string serialize_measure(const FiniteMeasure& mu) {
    json j;
    json atoms = json::array();
    for (const auto& a : mu.atoms) {
        json e;
        json x = json::array();
        for (double v : a.x) x.push_back(v);
        e["x"] = x;
        e["p"] = a.p;
        atoms.push_back(e);
    }
    j["atoms"] = atoms;
    return j.dump(2) + "\n";
}

FiniteMeasure mix(const FiniteMeasure& mu, const FiniteMeasure& nu, double s) {
    if (!(s > 0) || !(s < 1)) throw PreconditionError("mix: weight must be in (0,1)");
    if (mu.dim != nu.dim) throw PreconditionError("mix: dimension mismatch");
    FiniteMeasure out;
    out.dim = mu.dim;
    const double la = std::log1p(-s), lb = std::log(s);
    std::map<Vec, double> logs;
    auto add = [&](const Vec& x, double lp) {
        auto it = logs.find(x);
        if (it == logs.end()) {
            logs.emplace(x, lp);
        } else {
            it->second = logsumexp({it->second, lp});
        }
    };
    for (const auto& a : mu.atoms) add(a.x, la + a.log_p);
    for (const auto& a : nu.atoms) add(a.x, lb + a.log_p);
    for (const auto& [x, lp] : logs) out.atoms.push_back({x, std::exp(lp), lp});
    return out;
}

double ball_mass(const FiniteMeasure& mu, const Vec& x, double r, Norm norm) {
    if (r <= 0) throw PreconditionError("ball_mass: radius must be positive");
    double acc = 0;
    for (const auto& a : mu.atoms) {
        if (ball_contains(x, r, a.x, norm)) acc += a.p;
    }
    return acc;
}

double log_ball_mass(const FiniteMeasure& mu, const Vec& x, double r, Norm norm) {
    if (r <= 0) throw PreconditionError("ball_mass: radius must be positive");
    std::vector<double> logs;
    for (const auto& a : mu.atoms) {
        if (ball_contains(x, r, a.x, norm)) logs.push_back(a.log_p);
    }
    return logsumexp(logs);
}

double log_I(const FiniteMeasure& mu, double r, QValue q, Norm norm) {
    if (r <= 0) throw PreconditionError("moment integral: radius must be positive");
    if (q.kind == QValue::Kind::PlusInf || q.kind == QValue::Kind::MinusInf) {
        double best = q.kind == QValue::Kind::PlusInf ? -kInf : kInf;
        for (const auto& a : mu.atoms) {
            const double lm = log_ball_mass(mu, a.x, r, norm);
            best = q.kind == QValue::Kind::PlusInf ? std::max(best, lm)
                                                   : std::min(best, lm);
        }
        return best;
    }
    if (q.is_one()) {
        double acc = 0;
        for (const auto& a : mu.atoms) {
            acc += a.p * log_ball_mass(mu, a.x, r, norm);
        }
        return acc;  // the q = 1 integral itself (logarithmic form)
    }
    std::vector<double> terms;
    for (const auto& a : mu.atoms) {
        terms.push_back(a.log_p + (q.q - 1.0) * log_ball_mass(mu, a.x, r, norm));
    }
    return logsumexp(terms);
}

double I(const FiniteMeasure& mu, double r, QValue q, Norm norm) {
    const double v = log_I(mu, r, q, norm);
    return q.is_one() ? v : std::exp(v);
}

double phi(const FiniteMeasure& mu, double r, QValue q, Norm norm) {
    if (!(r > 0) || !(r < 1)) {
        throw PreconditionError("phi: radius must lie in (0,1)");
    }
    const double v = log_I(mu, r, q, norm);
    if (q.kind == QValue::Kind::Real && !q.is_one()) {
        return v / ((q.q - 1.0) * std::log(r));
    }
    return v / std::log(r);
}

std::pair<ScaleSeries, DimEstimate> lq_profile(const FiniteMeasure& mu,
                                               const std::vector<double>& scales,
                                               QValue q, Norm norm) {
    if (scales.size() < 2) throw PreconditionError("lq_profile: need >= 2 scales");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0) || !(scales[i] < 1) ||
            (i > 0 && scales[i] >= scales[i - 1])) {
            throw PreconditionError(
                "lq_profile: scales must be strictly decreasing in (0,1)");
        }
    }
    ScaleSeries s;
    s.quantity = "phi";
    s.base = 2.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const double r = scales[i];
        const double p = phi(mu, r, q, norm);
        s.rows.push_back({static_cast<int>(i), r, p, p});
        const double x = std::log(r);
        const double v = log_I(mu, r, q, norm);
        const double y =
            q.kind == QValue::Kind::Real && !q.is_one() ? v / (q.q - 1.0) : v;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    DimEstimate e;
    e.n_min = 0;
    e.n_max = static_cast<int>(scales.size()) - 1;
    const double m = static_cast<double>(scales.size());
    e.slope_fit = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    e.lower_window = kInf;
    e.upper_window = -kInf;
    for (std::size_t i = scales.size() / 2; i < scales.size(); ++i) {
        e.lower_window = std::min(e.lower_window, s.rows[i].ratio);
        e.upper_window = std::max(e.upper_window, s.rows[i].ratio);
    }
    return {std::move(s), e};
}

std::string profile_csv(const ScaleSeries& s) {
    std::ostringstream out;
    out << "r,phi\n";
    char buf[64];
    for (const auto& row : s.rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", row.r, row.ratio);
        out << buf;
    }
    return out.str();
}

namespace {

struct FmInstance {
    std::vector<Vec> pts;
    std::vector<double> c;  // signed mass difference per point
};

FmInstance fm_instance(const FiniteMeasure& mu, const FiniteMeasure& nu) {
    std::map<Vec, double> c;
    for (const auto& a : mu.atoms) c[a.x] += a.p;
    for (const auto& a : nu.atoms) c[a.x] -= a.p;
    FmInstance inst;
    for (const auto& [x, v] : c) {
        inst.pts.push_back(x);
        inst.c.push_back(v);
    }
    return inst;
}

bool measure_less(const FiniteMeasure& a, const FiniteMeasure& b) {
    std::vector<std::pair<Vec, double>> va, vb;
    for (const auto& t : a.atoms) va.emplace_back(t.x, t.p);
    for (const auto& t : b.atoms) vb.emplace_back(t.x, t.p);
    return va < vb;
}

double fm_primal(const FmInstance& inst, Norm norm) {
    const std::size_t n = inst.pts.size();
    // variables: g_i in [0,2] (f = g - 1), slack per bound, slack per pair
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::size_t npairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) ++npairs;
        }
    }
    const std::size_t nvar = n + n + npairs;
    std::size_t slack = 2 * n;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(nvar, 0.0);
        row[i] = 1;
        row[n + i] = 1;
        A.push_back(std::move(row));
        b.push_back(2.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<double> row(nvar, 0.0);
            row[i] = 1;
            row[j] = -1;
            row[slack++] = 1;
            A.push_back(std::move(row));
            b.push_back(norm_dist(inst.pts[i], inst.pts[j], norm));
        }
    }
    std::vector<double> cost(nvar, 0.0);
    for (std::size_t i = 0; i < n; ++i) cost[i] = -inst.c[i];  // maximize c.g
    auto sol = lp_solve<double>(std::move(A), std::move(b), cost);
    if (sol.status != LpSolution<double>::Status::Optimal) {
        throw PreconditionError("fm_distance: primal program failed");
    }
    double shift = 0;
    for (double ci : inst.c) shift += ci;
    return -sol.value - shift;  // value of sum c_i f_i with f = g - 1
}

double fm_dual(const FmInstance& inst, Norm norm) {
    const std::size_t n = inst.pts.size();
    // variables: gamma_ij (ordered pairs, i != j), u_i, w_i; all >= 0
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    const std::size_t nvar = pairs.size() + 2 * n;
    std::vector<std::vector<double>> A(n, std::vector<double>(nvar, 0.0));
    std::vector<double> b(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        A[pairs[k].first][k] += 1;
        A[pairs[k].second][k] -= 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        A[i][pairs.size() + i] = 1;        // u_i
        A[i][pairs.size() + n + i] = -1;   // w_i
        b[i] = inst.c[i];
    }
    std::vector<double> cost(nvar, 0.0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        cost[k] = norm_dist(inst.pts[pairs[k].first], inst.pts[pairs[k].second], norm);
    }
    for (std::size_t i = 0; i < 2 * n; ++i) cost[pairs.size() + i] = 1.0;
    auto sol = lp_solve<double>(std::move(A), std::move(b), cost);
    if (sol.status != LpSolution<double>::Status::Optimal) {
        throw PreconditionError("fm_distance: dual program failed");
    }
    return sol.value;
}

}  // namespace

double fm_distance(const FiniteMeasure& mu, const FiniteMeasure& nu, Norm norm) {
    if (mu.dim != nu.dim) throw PreconditionError("fm_distance: dimension mismatch");
    // canonical argument order makes the metric bitwise symmetric
    const bool swap = measure_less(nu, mu);
    const FmInstance inst = fm_instance(swap ? nu : mu, swap ? mu : nu);
    if (inst.pts.size() <= 1) return 0.0;
    return fm_primal(inst, norm);
}

double fm_distance_dual(const FiniteMeasure& mu, const FiniteMeasure& nu, Norm norm) {
    if (mu.dim != nu.dim) throw PreconditionError("fm_distance: dimension mismatch");
    const bool swap = measure_less(nu, mu);
    const FmInstance inst = fm_instance(swap ? nu : mu, swap ? mu : nu);
    if (inst.pts.size() <= 1) return 0.0;
    return fm_dual(inst, norm);
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

FiniteMeasure perturb(const FiniteMeasure& mu, double delta, std::mt19937_64& rng,
                      Norm norm) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::pair<Vec, double>> atoms;
        double sum = 0;
        double cheap = 0;
        for (const auto& a : mu.atoms) {
            Vec x = a.x;
            for (double& v : x) v += (2 * unit_uniform(rng) - 1) * delta / 4;
            cheap += a.p * norm_dist(a.x, x, norm);
            const double p = a.p * (1 + (2 * unit_uniform(rng) - 1) * delta / 4);
            sum += p;
            atoms.emplace_back(std::move(x), p);
        }
        double mass_shift = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            atoms[i].second /= sum;
            mass_shift += std::abs(atoms[i].second - mu.atoms[i].p);
        }
        // distinct-point guard (jitter may collide only with prob. 0)
        std::vector<Vec> xs;
        for (auto& [x, p] : atoms) xs.push_back(x);
        std::sort(xs.begin(), xs.end());
        if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) continue;
        FiniteMeasure nu = make_measure(mu.dim, atoms, 1e-9);
        if (cheap + mass_shift <= delta) return nu;          // certified bound
        if (fm_distance(mu, nu, norm) <= delta) return nu;   // exact check
    }
    throw SearchFailureError("stability probe: could not sample a perturbation");
}

}  // namespace

ProbeReport stability_probe(const FiniteMeasure& mu, double r, QValue q, int trials,
                            std::uint64_t seed, Norm norm) {
    if (q.kind != QValue::Kind::Real) {
        throw PreconditionError("stability probe: finite q only");
    }
    if (trials < 1) throw PreconditionError("stability probe: need trials >= 1");
    if (q.q < 1.0) {
        // positivity precondition over a grid on the support bounding box
        Vec lo = mu.atoms.front().x, hi = lo;
        for (const auto& a : mu.atoms) {
            for (int j = 0; j < mu.dim; ++j) {
                lo[j] = std::min(lo[j], a.x[j]);
                hi[j] = std::max(hi[j], a.x[j]);
            }
        }
        std::vector<Vec> grid{lo};
        for (int j = 0; j < mu.dim; ++j) {
            std::vector<Vec> next;
            for (const auto& g : grid) {
                for (double v = lo[j]; v <= hi[j] + r / 4; v += r / 2) {
                    Vec h = g;
                    h[j] = std::min(v, hi[j]);
                    next.push_back(std::move(h));
                }
            }
            grid = std::move(next);
        }
        for (const auto& g : grid) {
            if (!(ball_mass(mu, g, r, norm) > 0)) {
                throw PreconditionError(
                    "stability probe: mu(B(x,r)) vanishes on the support box");
            }
        }
    }
    const double tol = 1e-12;
    ProbeReport rep;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    for (int k = 1; k <= 20; ++k) {
        const double delta = std::ldexp(1.0, -k);
        bool all = true;
        std::string why;
        for (int t = 0; t < trials && all; ++t) {
            FiniteMeasure nu = perturb(mu, delta, rng, norm);
            if (q.q > 1.0) {
                const double c = std::pow(2.0, q.q) + 1.0;
                if (!(I(nu, r, q, norm) <= c * I(mu, 2 * r, q, norm) + tol) ||
                    !(I(nu, 2 * r, q, norm) >=
                      std::pow(2.0, -q.q) * I(mu, r, q, norm) - tol)) {
                    all = false;
                    why = "q>1 inequality failed";
                }
            } else if (q.q < 1.0) {
                if (!(I(nu, 2 * r, q, norm) <=
                      std::pow(2.0, 3.0 - q.q) * I(mu, r, q, norm) + tol) ||
                    !(I(nu, r, q, norm) >=
                      std::pow(2.0, q.q - 2.0) * I(mu, 2 * r, q, norm) - tol)) {
                    all = false;
                    why = "q<1 inequality failed";
                }
            } else {
                if (!(I(nu, r, q, norm) <=
                      std::log(2.0) + 0.5 * I(mu, 2 * r, q, norm) + tol)) {
                    all = false;
                    why = "q=1 inequality failed";
                }
            }
        }
        if (all) {
            rep.passed = true;
            rep.delta = delta;
            rep.detail = "all trials satisfied the perturbation inequalities";
            return rep;
        }
        rep.detail = why + " at delta=2^-" + std::to_string(k);
    }
    return rep;
}

IvRootResult iv_root(const FiniteMeasure& mu, QValue q, double tau, double r1,
                     double r2, Norm norm) {
    if (!(r1 > 0) || !(r1 < r2) || !(r2 < 1)) {
        throw PreconditionError("iv_root: need 0 < r1 < r2 < 1");
    }
    // discontinuities of I are exactly the inter-atom distances
    std::vector<double> jumps;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        for (std::size_t j = i + 1; j < mu.atoms.size(); ++j) {
            const double d = norm_dist(mu.atoms[i].x, mu.atoms[j].x, norm);
            if (d > r1 && d < r2) jumps.push_back(d);
        }
    }
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
    std::vector<double> cuts{r1};
    cuts.insert(cuts.end(), jumps.begin(), jumps.end());
    cuts.push_back(r2);

    const bool scaled = q.kind == QValue::Kind::Real && !q.is_one();
    auto piece_phi = [&](double v, double r) {
        return scaled ? v / ((q.q - 1.0) * std::log(r)) : v / std::log(r);
    };
    const double tol = 1e-9;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double v = log_I(mu, b, q, norm);  // piece value, left-continuous
        double pa = piece_phi(v, a);             // right limit at a
        double pb = piece_phi(v, b);
        if ((pa - tau) * (pb - tau) <= 0) {
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double pm = piece_phi(v, mid);
                if (std::abs(pm - tau) <= tol) return IvRootResult(mid);
                if ((piece_phi(v, lo) - tau) * (pm - tau) <= 0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return IvRootResult(0.5 * (lo + hi));
        }
        if (i + 2 < cuts.size()) {
            // jump at b: left value from this piece, right from the next
            const double vr = log_I(mu, cuts[i + 2], q, norm);
            const double left = piece_phi(v, b);
            const double right = piece_phi(vr, b);
            if ((left - tau) * (right - tau) < 0) {
                return IvRootResult(JumpCertificate{b, left, right});
            }
        }
    }
    throw PreconditionError(
        "iv_root: target not attained or bracketed on the given interval");
}

}  // namespace fracdim
