#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fracdim/geometry.hpp"

namespace fracdim {

struct ScaleSeries {
    std::string quantity;
    double base = 2.0;  // scale base: r = base^-n
    struct Row {
        int n;
        double r;
        double log_value;  // natural log of the counted quantity
        double ratio;      // log_value / (n log base)
    };
    std::vector<Row> rows;  // n strictly increasing (r strictly decreasing)
};

std::string series_csv(const ScaleSeries& s);

struct DimEstimate {
    double lower_window = 0;  // min ratio over the tail half (liminf proxy)
    double upper_window = 0;  // max ratio over the tail half (limsup proxy)
    double slope_fit = 0;     // least-squares slope of log_value vs n log base
    int n_min = 0, n_max = 0;
    bool degenerate = false;
};

// Window statistics + least-squares slope; ratios clamped to [0, dim_cap].
DimEstimate estimate_from_series(const ScaleSeries& s, double dim_cap);

std::uint64_t cube_count(const SetSpec& set, int n);

// Natural-log cube/cylinder count. Analytic (no enumeration) for grid schemes
// at their own base-b levels: sum of log |D_i|.
double grid_log_count(const GridSchemeSpec& spec, int m);

// log cube_count at dyadic levels n_min..n_max (grid schemes get base-b levels
// with analytic counts instead; the series base records which).
ScaleSeries box_count_series(const SetSpec& set, int n_min, int n_max);
DimEstimate box_dim_estimate(const SetSpec& set, int n_min, int n_max);

struct Ball {
    Vec center;
    double radius;
};

struct PackingCount {
    std::uint64_t greedy;  // pairwise-disjoint open r-balls found greedily
    std::uint64_t upper;   // cube-based upper bound on the packing number
    std::vector<Vec> centers;
};

// Greedy maximal packing of open r-balls with centers in the set (optionally
// restricted to an open ball region), candidates taken from cube
// representatives at level ceil(log2(1/r)) + 2, in lexicographic cube order.
PackingCount packing_count(const SetSpec& set, const std::optional<Ball>& region,
                           double r, Norm norm = Norm::Chebyshev);

// Unique beta with sum_i ratios[i]^beta = 1 (0 when there is at most one map).
double moran_beta(const std::vector<double>& ratios);

}  // namespace fracdim
