#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "fracdim/setspec.hpp"

namespace fracdim {

using Rat = boost::multiprecision::cpp_rational;

// Exact one-axis view of a grid scheme. Works entirely in rationals, so
// membership of the axis projection in a half-open interval is decided
// exactly, including at interval endpoints.
class GridAxis {
  public:
    GridAxis(const GridSchemeSpec& spec, int axis);

    // Does the axis set meet [u, v), u < v?
    bool meets(const Rat& u, const Rat& v) const;

    // A point of the axis set inside [u, v); the minimum up to a relative
    // resolution of (v-u)*2^-40 in degenerate corner cases. Requires meets.
    Rat min_point(const Rat& u, const Rat& v) const;

    const Rat& origin() const { return origin_; }
    const Rat& side() const { return side_; }

  private:
    struct Extent {
        Rat lo, hi;  // reachable min/max tail sums, in [0, 1]
    };
    // Digits available on this axis at a given level (1-based).
    const std::vector<int>& digits(int level) const;
    // min/max of sum_{j>=1} d_{m+j} b^-j over admissible continuations.
    Extent tail_extent(int m) const;

    bool meets_rec(int m, const Rat& a, const Rat& w, const Rat& u, const Rat& v) const;
    bool min_rec(int m, const Rat& a, const Rat& w, const Rat& u, const Rat& v,
                 const Rat& res, Rat& out) const;

    int base_;
    Rat origin_, side_;
    int stable_;                           // digits(level) constant for level > stable_
    std::vector<std::vector<int>> digit_;  // per level 1..stable_+1 (last = constant)
    std::vector<Extent> tails_;            // tail_extent(m) for m = 0..stable_
    Extent tail_const_;                    // tail_extent(m) for m >= stable_
};

}  // namespace fracdim
