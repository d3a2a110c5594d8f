#include "fracdim/convexdim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracdim/errors.hpp"
#include "fracdim/gridscheme.hpp"
#include "fracdim/simplex.hpp"

namespace fracdim {
namespace {

using json = nlohmann::ordered_json;

void validate(const RateProfile& p) {
    if (p.m < 1 || p.vectors.empty()) {
        throw PreconditionError("rate profile: need m >= 1 and a nonempty vector set");
    }
    for (const auto& v : p.vectors) {
        if (static_cast<int>(v.size()) != p.m) {
            throw PreconditionError("rate profile: vector length mismatch");
        }
        for (double x : v) {
            if (!(x >= 0)) throw PreconditionError("rate profile: negative entry");
        }
    }
}

void compress(RateProfile& p) {
    auto& V = p.vectors;
    std::sort(V.begin(), V.end());
    // near-duplicates
    V.erase(std::unique(V.begin(), V.end(),
                        [&](const Vec& a, const Vec& b) {
                            for (int j = 0; j < p.m; ++j) {
                                if (std::abs(a[j] - b[j]) > 1e-12) return false;
                            }
                            return true;
                        }),
            V.end());
    // componentwise-dominated vectors contribute to neither max nor minimax
    std::vector<Vec> kept;
    for (std::size_t i = 0; i < V.size(); ++i) {
        bool dominated = false;
        for (std::size_t k = 0; k < V.size() && !dominated; ++k) {
            if (k == i) continue;
            bool ge = true, strict = false;
            for (int j = 0; j < p.m; ++j) {
                ge = ge && V[k][j] >= V[i][j];
                strict = strict || V[k][j] > V[i][j];
            }
            dominated = ge && strict;
        }
        if (!dominated) kept.push_back(V[i]);
    }
    V = std::move(kept);
}

}  // namespace

RateProfile parse_profile(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("profile file: invalid JSON: ") + e.what());
    }
    RateProfile p;
    try {
        p.m = j.at("m").get<int>();
        for (const auto& row : j.at("vectors")) {
            Vec v;
            for (const auto& x : row) v.push_back(x.get<double>());
            p.vectors.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("profile file: ") + e.what());
    }
    validate(p);
    return p;
}

RateProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open profile file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str());
}

std::string serialize_profile(const RateProfile& p) {
    json j;
    j["m"] = p.m;
    json rows = json::array();
    for (const auto& v : p.vectors) {
        json row = json::array();
        for (double x : v) row.push_back(x);
        rows.push_back(row);
    }
    j["vectors"] = rows;
    return j.dump(2) + "\n";
}

RateProfile profile_estimate(const std::vector<SetSpecPtr>& sets,
                             const std::vector<int>& levels) {
    if (sets.empty() || levels.empty()) {
        throw PreconditionError("profile_estimate: need components and levels");
    }
    int base = 0;
    for (const auto& s : sets) {
        const auto* g = s->get_if<GridSchemeSpec>();
        const int b = g ? g->base : 2;
        if (base == 0) base = b;
        if (b != base) {
            throw PreconditionError("profile_estimate: components use mixed bases");
        }
    }
    RateProfile p;
    p.m = static_cast<int>(sets.size());
    p.estimated = true;
    p.n_min = *std::min_element(levels.begin(), levels.end());
    p.n_max = *std::max_element(levels.begin(), levels.end());
    const double lb = std::log(static_cast<double>(base));
    for (int n : levels) {
        if (n < 1) throw PreconditionError("profile_estimate: levels must be >= 1");
        Vec v(p.m);
        for (int i = 0; i < p.m; ++i) {
            const auto* g = sets[i]->get_if<GridSchemeSpec>();
            const double lc =
                g ? grid_log_count(*g, n)
                  : std::log(static_cast<double>(cube_count(*sets[i], n)));
            v[i] = std::clamp(lc / (n * lb), 0.0, double(sets[i]->dim()));
        }
        p.vectors.push_back(std::move(v));
    }
    compress(p);
    validate(p);
    return p;
}

RateProfile profile_estimate(const std::vector<SetSpecPtr>& sets, int n_min,
                             int n_max) {
    if (n_min < 1 || n_min >= n_max) {
        throw PreconditionError("profile_estimate: bad level range");
    }
    std::vector<int> levels;
    for (int n = (n_min + n_max + 1) / 2; n <= n_max; ++n) levels.push_back(n);
    RateProfile p = profile_estimate(sets, levels);
    p.n_min = n_min;
    p.n_max = n_max;
    return p;
}

double s_u(const RateProfile& p) {
    validate(p);
    double best = 0;
    for (const auto& v : p.vectors) {
        best = std::max(best, *std::min_element(v.begin(), v.end()));
    }
    return best;
}

ConvexDim s_conv(const RateProfile& p) {
    validate(p);
    const int m = p.m;
    const std::size_t nv = p.vectors.size();
    // variables: t, p_1..p_m, slack per vector; all >= 0
    const std::size_t n = 1 + m + nv;
    std::vector<std::vector<Rat>> A;
    std::vector<Rat> b;
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<Rat> row(n, Rat(0));
        row[0] = 1;
        for (int j = 0; j < m; ++j) row[1 + j] = -Rat(p.vectors[v][j]);
        row[1 + m + v] = -1;
        A.push_back(std::move(row));
        b.push_back(Rat(0));
    }
    std::vector<Rat> simplex_row(n, Rat(0));
    for (int j = 0; j < m; ++j) simplex_row[1 + j] = 1;
    A.push_back(std::move(simplex_row));
    b.push_back(Rat(1));
    std::vector<Rat> c(n, Rat(0));
    c[0] = 1;
    auto sol = lp_solve<Rat>(std::move(A), std::move(b), c);
    if (sol.status != LpSolution<Rat>::Status::Optimal) {
        throw PreconditionError("s_conv: linear program failed");
    }
    ConvexDim out;
    out.value = sol.value.convert_to<double>();
    out.weights.resize(m);
    for (int j = 0; j < m; ++j) out.weights[j] = sol.x[1 + j].convert_to<double>();
    return out;
}

double s_conv_grid(const RateProfile& p, double step) {
    validate(p);
    if (p.m > 3) throw PreconditionError("s_conv_grid: m <= 3 only");
    const int steps = static_cast<int>(std::lround(1.0 / step));
    auto objective = [&](const Vec& w) {
        double worst = 0;
        for (const auto& v : p.vectors) {
            double dot = 0;
            for (int j = 0; j < p.m; ++j) dot += w[j] * v[j];
            worst = std::max(worst, dot);
        }
        return worst;
    };
    double best = std::numeric_limits<double>::infinity();
    Vec w(p.m, 0.0);
    if (p.m == 1) return objective({1.0});
    for (int a = 0; a <= steps; ++a) {
        w[0] = double(a) / steps;
        if (p.m == 2) {
            w[1] = 1.0 - w[0];
            best = std::min(best, objective(w));
        } else {
            for (int bq = 0; bq + a <= steps; ++bq) {
                w[1] = double(bq) / steps;
                w[2] = 1.0 - w[0] - w[1];
                best = std::min(best, objective(w));
            }
        }
    }
    return best;
}

double s_conv_max(const RateProfile& p) {
    validate(p);
    double best = 0;
    for (const auto& v : p.vectors) {
        best = std::max(best, *std::max_element(v.begin(), v.end()));
    }
    return best;
}

double s_conv_max(const std::vector<RateProfile>& localizations) {
    if (localizations.empty()) {
        throw PreconditionError("s_conv_max: need at least one localization");
    }
    double best = 0;
    for (const auto& p : localizations) best = std::max(best, s_conv(p).value);
    return best;
}

}  // namespace fracdim
