#include "fracdim/gridscheme.hpp"

#include <algorithm>
#include <set>

#include "fracdim/errors.hpp"

namespace fracdim {

GridAxis::GridAxis(const GridSchemeSpec& spec, int axis) : base_(spec.base) {
    origin_ = Rat(spec.origin[axis]);
    side_ = Rat(spec.side[axis]);
    if (spec.tail.kind == GridTail::Kind::Constant) {
        stable_ = static_cast<int>(spec.levels.size());
    } else {
        stable_ = spec.tail.boundaries.empty()
                      ? static_cast<int>(spec.levels.size())
                      : spec.tail.boundaries.back();
    }
    digit_.resize(stable_ + 1);
    for (int lvl = 1; lvl <= stable_ + 1; ++lvl) {
        std::set<int> proj;
        for (const auto& dv : grid_digits_at(spec, lvl)) proj.insert(dv[axis]);
        digit_[lvl - 1].assign(proj.begin(), proj.end());
    }

    // Tail extents, backwards from the constant continuation.
    const auto& cd = digit_.back();
    tail_const_.lo = Rat(cd.front()) / (base_ - 1);
    tail_const_.hi = Rat(cd.back()) / (base_ - 1);
    tails_.resize(stable_ + 1);
    tails_[stable_] = tail_const_;
    for (int m = stable_ - 1; m >= 0; --m) {
        const auto& d = digit_[m];  // digits of level m+1
        tails_[m].lo = (d.front() + tails_[m + 1].lo) / base_;
        tails_[m].hi = (d.back() + tails_[m + 1].hi) / base_;
    }
}

const std::vector<int>& GridAxis::digits(int level) const {
    return level <= stable_ ? digit_[level - 1] : digit_.back();
}

GridAxis::Extent GridAxis::tail_extent(int m) const {
    return m >= stable_ ? tail_const_ : tails_[m];
}

bool GridAxis::meets_rec(int m, const Rat& a, const Rat& w, const Rat& u,
                         const Rat& v) const {
    const Extent t = tail_extent(m);
    const Rat lo = a + w * t.lo;
    const Rat hi = a + w * t.hi;
    if (hi < u || lo >= v) return false;
    if (lo >= u) return true;  // lo is a point of the set inside [u, v)
    if (hi < v) return true;   // likewise hi
    // lo < u and hi >= v: the reachable extent straddles the whole interval.
    const Rat cw = w / base_;
    for (int d : digits(m + 1)) {
        if (meets_rec(m + 1, a + d * cw, cw, u, v)) return true;
    }
    return false;
}

bool GridAxis::meets(const Rat& u, const Rat& v) const {
    return meets_rec(0, origin_, side_, u, v);
}

bool GridAxis::min_rec(int m, const Rat& a, const Rat& w, const Rat& u, const Rat& v,
                       const Rat& res, Rat& out) const {
    const Extent t = tail_extent(m);
    const Rat lo = a + w * t.lo;
    const Rat hi = a + w * t.hi;
    if (hi < u || lo >= v) return false;
    if (lo >= u) {
        out = lo;
        return true;
    }
    if (w < res) {
        // Degenerate corner: the set accumulates on u from below; hi is a
        // genuine point of the set within resolution of the true minimum.
        if (hi < v) {
            out = hi;
            return true;
        }
        return false;
    }
    const Rat cw = w / base_;
    for (int d : digits(m + 1)) {
        if (min_rec(m + 1, a + d * cw, cw, u, v, res, out)) return true;
    }
    if (hi < v) {
        out = hi;
        return true;
    }
    return false;
}

Rat GridAxis::min_point(const Rat& u, const Rat& v) const {
    Rat out;
    Rat res = (v - u) / Rat(std::int64_t(1) << 40);
    if (!min_rec(0, origin_, side_, u, v, res, out)) {
        throw PreconditionError("grid axis: no point in the requested interval");
    }
    return out;
}

}  // namespace fracdim
