#include "fracdim/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fracdim/errors.hpp"

namespace fracdim {
namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

ComponentDecomposition components_of(const CubeCover& cover) {
    const auto& idx = cover.indices;
    UnionFind uf(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        // enumerate neighbor offsets in {-1,0,1}^d and look them up
        Idx off{0, 0, 0};
        const int d = cover.dim;
        std::vector<int> digits(d, -1);
        while (true) {
            Idx nb = idx[i];
            bool all_zero = true;
            for (int j = 0; j < d; ++j) {
                nb[j] += digits[j];
                all_zero = all_zero && digits[j] == 0;
            }
            if (!all_zero) {
                auto it = std::lower_bound(idx.begin(), idx.end(), nb);
                if (it != idx.end() && *it == nb) {
                    uf.unite(i, static_cast<std::size_t>(it - idx.begin()));
                }
            }
            int j = d - 1;
            while (j >= 0 && digits[j] == 1) digits[j--] = -1;
            if (j < 0) break;
            ++digits[j];
        }
        (void)off;
    }
    std::vector<std::vector<Idx>> buckets(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) buckets[uf.find(i)].push_back(idx[i]);
    ComponentDecomposition out;
    out.dim = cover.dim;
    out.level = cover.level;
    out.exact = cover.exact;
    for (auto& b : buckets) {
        if (!b.empty()) out.components.push_back(std::move(b));
    }
    // roots appear in first-seen order of sorted indices, so components are
    // already ordered by smallest contained index; enforce it regardless
    std::sort(out.components.begin(), out.components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

ComponentDecomposition components(const SetSpec& set, int n) {
    return components_of(cubes_at(set, n));
}

std::string components_csv(const ComponentDecomposition& c) {
    std::ostringstream out;
    out << "n,component_id,cube_index\n";
    for (std::size_t j = 0; j < c.components.size(); ++j) {
        for (const auto& k : c.components[j]) {
            out << c.level << ',' << j << ',';
            for (int a = 0; a < c.dim; ++a) out << (a ? ";" : "") << k[a];
            out << '\n';
        }
    }
    return out.str();
}

double component_separation(const ComponentDecomposition& c) {
    const double w = std::ldexp(1.0, -c.level);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < c.components.size(); ++a) {
        for (std::size_t b = a + 1; b < c.components.size(); ++b) {
            for (const auto& p : c.components[a]) {
                for (const auto& q : c.components[b]) {
                    double dist = 0;
                    for (int j = 0; j < c.dim; ++j) {
                        const std::int64_t gap =
                            p[j] > q[j] ? p[j] - q[j] - 1 : q[j] - p[j] - 1;
                        dist = std::max(dist, gap > 0 ? gap * w : 0.0);
                    }
                    best = std::min(best, dist);
                }
            }
        }
    }
    return best;
}

ScaleSeries bsi_series(const SetSpec& set, int n_min, int n_max) {
    if (n_min >= n_max) throw PreconditionError("bsi_series: need n_min < n_max");
    auto covers = cubes_range(set, n_min, n_max);
    ScaleSeries s;
    s.quantity = "log_component_count";
    s.base = 2.0;
    for (int n = n_min; n <= n_max; ++n) {
        const CubeCover& c = covers[n - n_min];
        if (!c.exact) {
            throw ExactnessError(
                "bsi requires exact cube covers; this set only yields outer "
                "covers at level " +
                std::to_string(n));
        }
        const double lv =
            std::log(static_cast<double>(components_of(c).count()));
        s.rows.push_back(
            {n, std::ldexp(1.0, -n), lv, n > 0 ? lv / (n * std::log(2.0)) : 0.0});
    }
    return s;
}

DimEstimate bsi_estimate(const SetSpec& set, int n_min, int n_max) {
    ScaleSeries s = bsi_series(set, n_min, n_max);
    DimEstimate e = estimate_from_series(s, set.dim());
    if (e.degenerate) {
        // a single component throughout is the legitimate bsi = 0 case
        e.degenerate = false;
    }
    return e;
}

double selfsimilar_bsi(const std::vector<double>& ratios) {
    return moran_beta(ratios);
}

}  // namespace fracdim
