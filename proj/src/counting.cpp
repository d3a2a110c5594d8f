#include "fracdim/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fracdim/errors.hpp"

namespace fracdim {
namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

int ceil_log2_inv(double r) {
    // smallest integer l with 2^-l <= r
    return static_cast<int>(std::ceil(std::log2(1.0 / r) - 1e-12));
}

}  // namespace

std::string series_csv(const ScaleSeries& s) {
    std::ostringstream out;
    out << "n,r,log_count,ratio\n";
    for (const auto& row : s.rows) {
        out << row.n << ',' << fmt(row.r) << ',' << fmt(row.log_value) << ','
            << fmt(row.ratio) << '\n';
    }
    return out.str();
}

DimEstimate estimate_from_series(const ScaleSeries& s, double dim_cap) {
    if (s.rows.size() < 2) throw PreconditionError("estimate: need at least two rows");
    DimEstimate e;
    e.n_min = s.rows.front().n;
    e.n_max = s.rows.back().n;
    if (s.rows.back().log_value == 0.0) {
        e.degenerate = true;
        return e;
    }
    const double lb = std::log(s.base);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t m = s.rows.size();
    for (const auto& row : s.rows) {
        const double x = row.n * lb;
        sx += x;
        sy += row.log_value;
        sxx += x * x;
        sxy += x * row.log_value;
    }
    e.slope_fit = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    e.lower_window = dim_cap;
    e.upper_window = 0;
    for (std::size_t i = m / 2; i < m; ++i) {
        const double ratio = std::clamp(s.rows[i].ratio, 0.0, dim_cap);
        e.lower_window = std::min(e.lower_window, ratio);
        e.upper_window = std::max(e.upper_window, ratio);
    }
    return e;
}

std::uint64_t cube_count(const SetSpec& set, int n) {
    return cubes_at(set, n).indices.size();
}

double grid_log_count(const GridSchemeSpec& spec, int m) {
    double acc = 0;
    for (int i = 1; i <= m; ++i) {
        acc += std::log(static_cast<double>(grid_digits_at(spec, i).size()));
    }
    return acc;
}

ScaleSeries box_count_series(const SetSpec& set, int n_min, int n_max) {
    if (n_min >= n_max) throw PreconditionError("box_count_series: need n_min < n_max");
    ScaleSeries s;
    if (const auto* g = set.get_if<GridSchemeSpec>()) {
        s.quantity = "log_cylinder_count";
        s.base = g->base;
        for (int n = n_min; n <= n_max; ++n) {
            const double lv = grid_log_count(*g, n);
            s.rows.push_back({n, std::pow(static_cast<double>(g->base), -n), lv,
                              n > 0 ? lv / (n * std::log(s.base)) : 0.0});
        }
        return s;
    }
    s.quantity = "log_cube_count";
    s.base = 2.0;
    auto covers = cubes_range(set, n_min, n_max);
    for (int n = n_min; n <= n_max; ++n) {
        const double lv =
            std::log(static_cast<double>(covers[n - n_min].indices.size()));
        s.rows.push_back(
            {n, std::ldexp(1.0, -n), lv, n > 0 ? lv / (n * std::log(2.0)) : 0.0});
    }
    return s;
}

DimEstimate box_dim_estimate(const SetSpec& set, int n_min, int n_max) {
    return estimate_from_series(box_count_series(set, n_min, n_max), set.dim());
}

PackingCount packing_count(const SetSpec& set, const std::optional<Ball>& region,
                           double r, Norm norm) {
    if (r <= 0) throw PreconditionError("packing_count: radius must be positive");
    const int cand_level = std::max(0, ceil_log2_inv(r) + 2);
    auto reps = cover_representatives(set, cand_level);
    PackingCount out{0, 0, {}};
    for (const auto& [k, p] : reps) {
        if (region && !ball_contains(region->center, region->radius, p, norm)) {
            continue;
        }
        bool ok = true;
        for (const auto& c : out.centers) {
            if (norm_dist(c, p, norm) < 2 * r) {
                ok = false;
                break;
            }
        }
        if (ok) out.centers.push_back(p);
    }
    if (out.centers.empty()) throw PreconditionError("packing_count: empty region");
    out.greedy = out.centers.size();
    const int ub_level = std::max(0, ceil_log2_inv(2 * r));
    out.upper = cube_count(set, ub_level);
    return out;
}

double moran_beta(const std::vector<double>& ratios) {
    if (ratios.empty()) throw PreconditionError("moran_beta: empty ratio list");
    for (double r : ratios) {
        if (r <= 0 || r >= 1) {
            throw PreconditionError("moran_beta: ratios must lie in (0,1)");
        }
    }
    if (ratios.size() <= 1) return 0.0;
    auto f = [&](double beta) {
        double acc = 0;
        for (double r : ratios) acc += std::pow(r, beta);
        return acc;
    };
    double lo = 0, hi = 1;
    while (f(hi) > 1) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace fracdim
