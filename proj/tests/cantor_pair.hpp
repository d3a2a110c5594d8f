#pragma once

// The base-100 pair of grid sets E and F whose per-level digit counts are
// powers of 3 arranged in blocks n_k = 5^k (k <= 3): E runs "fat" (27 digits)
// on levels (n_k, 2n_k] and "thin" (3 digits) on (2n_k, 3n_k]; F does the same
// shifted to (3n_k, 4n_k] and (4n_k, 5n_k]; 9 digits everywhere else. The two
// sets alternate their extremal counting rates, which is what makes the
// uniform, convex and maximal convex dimensions of the union all differ.

#include "fracdim/setspec.hpp"

namespace fracdim::testpair {

inline DigitSet digits_of_size(int s) {
    DigitSet d;
    if (s == 3) {
        for (int a : {0, 44, 88}) d.push_back({a, 0, 0});
    } else if (s == 9) {
        for (int a : {0, 4, 8})
            for (int b : {0, 4, 8}) d.push_back({10 * a + b, 0, 0});
    } else {
        for (int a : {0, 3, 6})
            for (int b = 0; b < 9; ++b) d.push_back({10 * a + b, 0, 0});
    }
    return d;
}

inline int pow3_exponent(int level, bool is_e) {
    for (long nk = 1; nk <= 125; nk *= 5) {
        const long lo3 = is_e ? nk : 3 * nk;
        const long lo1 = is_e ? 2 * nk : 4 * nk;
        if (level > lo3 && level <= lo3 + nk) return 3;
        if (level > lo1 && level <= lo1 + nk) return 1;
    }
    return 2;
}

inline SetSpecPtr make_set(bool is_e) {
    GridSchemeSpec g;
    g.base = 100;
    g.origin = {0.0};
    g.side = {1.0};
    for (int l = 1; l <= 625; ++l) {
        int s = 1;
        for (int e = 0; e < pow3_exponent(l, is_e); ++e) s *= 3;
        g.levels.push_back(digits_of_size(s));
    }
    g.tail.kind = GridTail::Kind::Constant;
    g.tail.constant = digits_of_size(9);
    return SetSpec::grid_scheme(std::move(g));
}

inline const std::vector<int>& extremal_levels() {
    static const std::vector<int> levels{10, 20, 50, 100, 250, 500};
    return levels;
}

}  // namespace fracdim::testpair
