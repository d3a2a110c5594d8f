#include "fracdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fracdim/errors.hpp"
#include "fracdim/gridscheme.hpp"

namespace fracdim {
namespace {

constexpr std::size_t kCubeBudget = std::size_t(1) << 24;
constexpr std::size_t kPieceBudget = std::size_t(1) << 21;

void finalize(CubeCover& c) {
    std::sort(c.indices.begin(), c.indices.end());
    c.indices.erase(std::unique(c.indices.begin(), c.indices.end()), c.indices.end());
}

std::int64_t dyadic_floor(double x, int n) {
    return static_cast<std::int64_t>(std::floor(std::ldexp(x, n)));
}

// Marks every level-n cube meeting the closed box [lo, hi].
void mark_box(CubeCover& out, const Vec& lo, const Vec& hi, int n) {
    const int d = out.dim;
    Idx a{0, 0, 0}, b{0, 0, 0};
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
        a[j] = dyadic_floor(lo[j], n);
        b[j] = dyadic_floor(hi[j], n);
        const std::int64_t span = b[j] - a[j] + 1;
        if (span <= 0 || static_cast<std::size_t>(span) > kCubeBudget) {
            throw RefinementLimitError("cube enumeration exceeds the cube budget");
        }
        total *= static_cast<std::size_t>(span);
    }
    if (out.indices.size() + total > kCubeBudget) {
        throw RefinementLimitError("cube enumeration exceeds the cube budget at level " +
                                   std::to_string(n));
    }
    Idx k = a;
    while (true) {
        out.indices.push_back(k);
        int j = d - 1;
        while (j >= 0 && k[j] == b[j]) k[j--] = a[j];
        if (j < 0) break;
        ++k[j];
    }
}

Rat dyadic_rat(std::int64_t k, int n) {
    Rat r(k);
    r /= Rat(boost::multiprecision::cpp_int(1) << n);
    return r;
}

void axis_rec(const GridAxis& ax, int level, int n, std::int64_t k,
              std::vector<std::int64_t>& out) {
    const Rat u = dyadic_rat(k, level);
    const Rat v = dyadic_rat(k + 1, level);
    if (!ax.meets(u, v)) return;
    if (level == n) {
        out.push_back(k);
        return;
    }
    axis_rec(ax, level + 1, n, 2 * k, out);
    axis_rec(ax, level + 1, n, 2 * k + 1, out);
}

std::int64_t rat_floor(const Rat& r) {
    using boost::multiprecision::cpp_int;
    const cpp_int n = numerator(r), d = denominator(r);
    cpp_int q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q.convert_to<std::int64_t>();
}

std::vector<std::int64_t> axis_indices(const GridAxis& ax, int n) {
    std::vector<std::int64_t> out;
    const Rat hi = ax.origin() + ax.side();
    const std::int64_t k0 = rat_floor(ax.origin());
    std::int64_t k1 = k0;
    while (dyadic_rat(k1 + 1, 0) <= hi) ++k1;
    for (std::int64_t k = k0; k <= k1; ++k) axis_rec(ax, 0, n, k, out);
    return out;
}

bool grid_axes_decompose(const GridSchemeSpec& g, int dim) {
    int stable = static_cast<int>(g.levels.size());
    if (g.tail.kind == GridTail::Kind::Blocks && !g.tail.boundaries.empty()) {
        stable = std::max(stable, g.tail.boundaries.back());
    }
    return dim == 1 || grid_is_product(g, dim, stable + 1);
}

// Exact product-path cover of a grid scheme at dyadic level n.
CubeCover grid_cover_product(const GridSchemeSpec& g, int dim, int n) {
    CubeCover out;
    out.dim = dim;
    out.level = n;
    out.exact = true;
    std::array<std::vector<std::int64_t>, kMaxDim> per_axis;
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) {
        per_axis[j] = axis_indices(GridAxis(g, j), n);
        total *= per_axis[j].size();
    }
    if (total > kCubeBudget) {
        throw RefinementLimitError("grid cover exceeds the cube budget at level " +
                                   std::to_string(n));
    }
    Idx k{0, 0, 0};
    std::function<void(int)> rec = [&](int j) {
        if (j == dim) {
            out.indices.push_back(k);
            return;
        }
        for (std::int64_t v : per_axis[j]) {
            k[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    finalize(out);
    return out;
}

// OUTER cover of a non-product grid scheme: refine full cylinders until their
// size is at most 2^-n/8, then mark every cube meeting each cylinder cell.
CubeCover grid_cover_outer(const GridSchemeSpec& g, int dim, int n) {
    double side_max = 0;
    for (int j = 0; j < dim; ++j) side_max = std::max(side_max, g.side[j]);
    int m = 0;
    double w = side_max;
    const double target = std::ldexp(1.0, -n) / 8.0;
    while (w > target) {
        w /= g.base;
        ++m;
    }
    CubeCover out;
    out.dim = dim;
    out.level = n;
    out.exact = false;
    std::vector<std::pair<Vec, double>> cells;  // (anchor, cell width factor)
    Vec anchor(g.origin.begin(), g.origin.begin() + dim);
    double frac = 1.0;
    std::function<void(int, Vec, double)> rec = [&](int lvl, Vec a, double f) {
        if (lvl == m) {
            Vec lo(dim), hi(dim);
            for (int j = 0; j < dim; ++j) {
                lo[j] = a[j];
                hi[j] = a[j] + g.side[j] * f;
            }
            mark_box(out, lo, hi, n);
            return;
        }
        const double cf = f / g.base;
        for (const auto& dv : grid_digits_at(g, lvl + 1)) {
            Vec b = a;
            for (int j = 0; j < dim; ++j) b[j] += g.side[j] * cf * dv[j];
            rec(lvl + 1, std::move(b), cf);
        }
    };
    rec(0, anchor, frac);
    finalize(out);
    return out;
}

CubeCover grid_cover(const GridSchemeSpec& g, int dim, int n) {
    if (grid_axes_decompose(g, dim)) return grid_cover_product(g, dim, n);
    return grid_cover_outer(g, dim, n);
}

CubeCover harmonic_cover(int n) {
    CubeCover out;
    out.dim = 1;
    out.level = n;
    out.exact = true;
    if (n > 50) throw RefinementLimitError("harmonic closure: level too deep");
    const std::int64_t N = std::int64_t(1) << n;
    std::int64_t s = 0;
    while ((s + 1) * (s + 1) <= N) ++s;
    std::vector<std::int64_t> idx;
    idx.push_back(0);
    // small indices: j occupied iff some integer k lies in (N/(j+1), N/j]
    for (std::int64_t j = 1; j <= s; ++j) {
        if ((N / j) * (j + 1) > N) idx.push_back(j);
    }
    // large indices are exactly the values floor(N/k) for small k
    for (std::int64_t k = 1; k <= s; ++k) idx.push_back(N / k);
    for (std::int64_t j : idx) out.indices.push_back(Idx{j, 0, 0});
    finalize(out);
    return out;
}

CubeCover ifs_cover(const HomothetyIfsSpec& s, const SetSpec& set, int n) {
    if (auto g = ifs_as_grid(s, set.dim())) return grid_cover(*g, set.dim(), n);
    const int d = set.dim();
    const auto& hull = set.bounding_box();
    double diam = 0;
    for (int j = 0; j < d; ++j) diam = std::max(diam, hull.upper[j] - hull.lower[j]);
    CubeCover out;
    out.dim = d;
    out.level = n;
    out.exact = false;
    const double target = std::ldexp(1.0, -n) / 8.0;
    struct Piece {
        double r;
        Vec t;
    };
    std::vector<Piece> stack{{1.0, Vec(d, 0.0)}};
    std::size_t expanded = 0;
    while (!stack.empty()) {
        Piece p = stack.back();
        stack.pop_back();
        if (p.r * diam > target && diam > 0) {
            if (++expanded > kPieceBudget) {
                double rmax = 0;
                for (const auto& m : s.maps) rmax = std::max(rmax, m.ratio);
                const int need = static_cast<int>(
                    std::ceil(std::log(target / diam) / std::log(rmax)));
                throw RefinementLimitError(
                    "homothety IFS refinement budget exceeded at level " +
                    std::to_string(n) + " (word depth beyond " +
                    std::to_string(need) + ")");
            }
            for (const auto& m : s.maps) {
                Piece q;
                q.r = p.r * m.ratio;
                q.t.resize(d);
                for (int j = 0; j < d; ++j) q.t[j] = m.ratio * p.t[j] + m.shift[j];
                stack.push_back(std::move(q));
            }
            continue;
        }
        Vec lo(d), hi(d);
        for (int j = 0; j < d; ++j) {
            lo[j] = p.r * hull.lower[j] + p.t[j];
            hi[j] = p.r * hull.upper[j] + p.t[j];
        }
        mark_box(out, lo, hi, n);
    }
    finalize(out);
    return out;
}

// Exact affine reindexing applies when the scale is a power of two that keeps
// the child level non-negative and the shift is integral at level n.
struct AffineExact {
    int child_level;
    Idx offset;
};
std::optional<AffineExact> affine_exact(const AffineSpec& a, int dim, int n) {
    const double l = std::log2(a.scale);
    const int p = static_cast<int>(std::lround(l));
    if (std::ldexp(1.0, p) != a.scale) return std::nullopt;
    const int child_level = n + p;
    if (child_level < 0) return std::nullopt;
    AffineExact e;
    e.child_level = child_level;
    for (int j = 0; j < dim; ++j) {
        const double s = std::ldexp(a.shift[j], n);
        const double r = std::round(s);
        if (s != r) return std::nullopt;
        e.offset[j] = static_cast<std::int64_t>(r);
    }
    for (int j = dim; j < kMaxDim; ++j) e.offset[j] = 0;
    return e;
}

CubeCover affine_cover(const AffineSpec& a, const SetSpec& set, int n) {
    const int d = set.dim();
    if (auto e = affine_exact(a, d, n)) {
        CubeCover child = cubes_at(*a.child, e->child_level);
        CubeCover out;
        out.dim = d;
        out.level = n;
        out.exact = child.exact;
        out.indices.reserve(child.indices.size());
        for (const auto& k : child.indices) {
            Idx m{0, 0, 0};
            for (int j = 0; j < d; ++j) m[j] = k[j] + e->offset[j];
            out.indices.push_back(m);
        }
        finalize(out);
        return out;
    }
    // General path: refine the child until image cubes are small, then mark.
    int extra = 3;
    while (std::ldexp(a.scale, -extra) > 1.0 / 8.0) ++extra;
    const int m = n + extra;
    CubeCover child = cubes_at(*a.child, m);
    CubeCover out;
    out.dim = d;
    out.level = n;
    out.exact = false;
    const double w = std::ldexp(1.0, -m);
    for (const auto& k : child.indices) {
        Vec lo(d), hi(d);
        for (int j = 0; j < d; ++j) {
            lo[j] = a.scale * (k[j] * w) + a.shift[j];
            hi[j] = a.scale * (k[j] * w + w) + a.shift[j];
        }
        mark_box(out, lo, hi, n);
    }
    finalize(out);
    return out;
}

}  // namespace

bool CubeCover::contains(const Idx& k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
}

CubeCover cubes_at(const SetSpec& set, int n) {
    if (n < 0) throw PreconditionError("cubes_at: level must be >= 0");
    const int d = set.dim();
    return std::visit(
        [&](const auto& node) -> CubeCover {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, PointsSpec>) {
                CubeCover out;
                out.dim = d;
                out.level = n;
                out.exact = true;
                for (const auto& p : node.points) {
                    Idx k{0, 0, 0};
                    for (int j = 0; j < d; ++j) k[j] = dyadic_floor(p[j], n);
                    out.indices.push_back(k);
                }
                finalize(out);
                return out;
            } else if constexpr (std::is_same_v<T, BoxSpec>) {
                CubeCover out;
                out.dim = d;
                out.level = n;
                out.exact = true;
                mark_box(out, node.lower, node.upper, n);
                finalize(out);
                return out;
            } else if constexpr (std::is_same_v<T, GridSchemeSpec>) {
                return grid_cover(node, d, n);
            } else if constexpr (std::is_same_v<T, HomothetyIfsSpec>) {
                return ifs_cover(node, set, n);
            } else if constexpr (std::is_same_v<T, HarmonicClosureSpec>) {
                return harmonic_cover(n);
            } else if constexpr (std::is_same_v<T, UnionSpec>) {
                CubeCover out;
                out.dim = d;
                out.level = n;
                out.exact = true;
                for (const auto& m : node.members) {
                    CubeCover c = cubes_at(*m, n);
                    out.exact = out.exact && c.exact;
                    out.indices.insert(out.indices.end(), c.indices.begin(),
                                       c.indices.end());
                }
                finalize(out);
                return out;
            } else {
                return affine_cover(std::get<AffineSpec>(set.node()), set, n);
            }
        },
        set.node());
}

std::vector<CubeCover> cubes_range(const SetSpec& set, int n_min, int n_max) {
    if (n_min < 0 || n_min > n_max) throw PreconditionError("cubes_range: bad range");
    CubeCover deep = cubes_at(set, n_max);
    std::vector<CubeCover> out(n_max - n_min + 1);
    out.back() = std::move(deep);
    for (int n = n_max - 1; n >= n_min; --n) {
        const CubeCover& child = out[n + 1 - n_min];
        CubeCover c;
        c.dim = child.dim;
        c.level = n;
        c.exact = child.exact;
        c.indices.reserve(child.indices.size());
        for (const auto& k : child.indices) {
            Idx p{0, 0, 0};
            for (int j = 0; j < c.dim; ++j) {
                p[j] = k[j] >= 0 ? k[j] / 2 : (k[j] - 1) / 2;
            }
            c.indices.push_back(p);
        }
        finalize(c);
        out[n - n_min] = std::move(c);
    }
    return out;
}

std::vector<Idx> grid_cylinders(const GridSchemeSpec& spec, int dim, int m) {
    std::vector<Idx> out;
    Idx k{0, 0, 0};
    std::function<void(int)> rec = [&](int lvl) {
        if (lvl == m) {
            out.push_back(k);
            return;
        }
        if (out.size() > kCubeBudget) {
            throw RefinementLimitError("grid cylinder budget exceeded");
        }
        const Idx saved = k;
        for (const auto& dv : grid_digits_at(spec, lvl + 1)) {
            for (int j = 0; j < dim; ++j) k[j] = saved[j] * spec.base + dv[j];
            rec(lvl + 1);
        }
        k = saved;
    };
    rec(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<GridSchemeSpec> ifs_as_grid(const HomothetyIfsSpec& spec, int dim) {
    const double r = spec.maps.front().ratio;
    const double binv = 1.0 / r;
    const int b = static_cast<int>(std::lround(binv));
    if (b < 2 || std::abs(binv - b) > 1e-9) return std::nullopt;
    for (const auto& m : spec.maps) {
        if (std::abs(m.ratio - r) > 1e-12) return std::nullopt;
    }
    GridSchemeSpec g;
    g.base = b;
    g.origin.resize(dim);
    g.side.resize(dim);
    for (int j = 0; j < dim; ++j) {
        double lo = spec.maps.front().shift[j], hi = lo;
        for (const auto& m : spec.maps) {
            lo = std::min(lo, m.shift[j]);
            hi = std::max(hi, m.shift[j]);
        }
        g.origin[j] = lo / (1.0 - r);
        g.side[j] = (hi - lo) / (1.0 - r);
        if (g.side[j] <= 0) return std::nullopt;  // degenerate axis
        // hull endpoints are exact in typical dyadic/triadic data; snap the
        // rounding noise of the 1/(1-r) division
        for (double* v : {&g.origin[j], &g.side[j]}) {
            const double snapped = std::round(*v * 4096.0) / 4096.0;
            if (*v != snapped && std::abs(*v - snapped) < 1e-12) *v = snapped;
        }
    }
    DigitSet digits;
    for (const auto& m : spec.maps) {
        DigitVec dv{0, 0, 0};
        for (int j = 0; j < dim; ++j) {
            const double cell = g.side[j] / b;
            const double off = (r * g.origin[j] + m.shift[j] - g.origin[j]) / cell;
            const double k = std::round(off);
            if (std::abs(off - k) > 1e-9 || k < 0 || k > b - 1) return std::nullopt;
            dv[j] = static_cast<int>(k);
        }
        digits.push_back(dv);
    }
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    g.tail.kind = GridTail::Kind::Constant;
    g.tail.constant = std::move(digits);
    return g;
}

std::map<Idx, Vec> cover_representatives(const SetSpec& set, int n) {
    const int d = set.dim();
    const double w = std::ldexp(1.0, -n);
    return std::visit(
        [&](const auto& node) -> std::map<Idx, Vec> {
            using T = std::decay_t<decltype(node)>;
            std::map<Idx, Vec> out;
            if constexpr (std::is_same_v<T, PointsSpec>) {
                std::vector<Vec> pts = node.points;
                std::sort(pts.begin(), pts.end());
                for (const auto& p : pts) {
                    Idx k{0, 0, 0};
                    for (int j = 0; j < d; ++j) k[j] = dyadic_floor(p[j], n);
                    out.emplace(k, p);  // first (lex-smallest) point wins
                }
                return out;
            } else if constexpr (std::is_same_v<T, BoxSpec>) {
                for (const auto& k : cubes_at(set, n).indices) {
                    Vec p(d);
                    for (int j = 0; j < d; ++j) {
                        p[j] = std::max(k[j] * w, node.lower[j]);
                    }
                    out.emplace(k, std::move(p));
                }
                return out;
            } else if constexpr (std::is_same_v<T, GridSchemeSpec>) {
                if (!grid_axes_decompose(node, d)) {
                    throw PreconditionError(
                        "representatives unavailable for non-product grid schemes");
                }
                std::array<std::optional<GridAxis>, kMaxDim> ax;
                for (int j = 0; j < d; ++j) ax[j].emplace(node, j);
                for (const auto& k : cubes_at(set, n).indices) {
                    Vec p(d);
                    for (int j = 0; j < d; ++j) {
                        const Rat q = ax[j]->min_point(dyadic_rat(k[j], n),
                                                       dyadic_rat(k[j] + 1, n));
                        p[j] = q.convert_to<double>();
                    }
                    out.emplace(k, std::move(p));
                }
                return out;
            } else if constexpr (std::is_same_v<T, HarmonicClosureSpec>) {
                const std::int64_t N = std::int64_t(1) << n;
                for (const auto& k : cubes_at(set, n).indices) {
                    const std::int64_t j = k[0];
                    out.emplace(k, Vec{j == 0 ? 0.0 : 1.0 / double(N / j)});
                }
                return out;
            } else if constexpr (std::is_same_v<T, HomothetyIfsSpec>) {
                if (auto g = ifs_as_grid(node, d)) {
                    return cover_representatives(*SetSpec::grid_scheme(*g), n);
                }
                throw PreconditionError(
                    "representatives unavailable for general homothety IFS");
            } else if constexpr (std::is_same_v<T, UnionSpec>) {
                for (const auto& m : node.members) {
                    for (auto& [k, p] : cover_representatives(*m, n)) {
                        auto it = out.find(k);
                        if (it == out.end() || p < it->second) out[k] = p;
                    }
                }
                return out;
            } else {
                const auto& a = std::get<AffineSpec>(set.node());
                auto e = affine_exact(a, d, n);
                if (!e) {
                    throw PreconditionError(
                        "representatives unavailable for non-dyadic affine images");
                }
                for (auto& [k, p] : cover_representatives(*a.child, e->child_level)) {
                    Idx m{0, 0, 0};
                    Vec q(d);
                    for (int j = 0; j < d; ++j) {
                        m[j] = k[j] + e->offset[j];
                        q[j] = a.scale * p[j] + a.shift[j];
                    }
                    out.emplace(m, std::move(q));
                }
                return out;
            }
        },
        set.node());
}

bool in_fattening(const std::vector<Vec>& pts, double alpha, const Vec& x, Norm norm) {
    if (alpha <= 0) throw PreconditionError("fatten: alpha must be positive");
    for (const auto& p : pts) {
        if (norm_dist(p, x, norm) < alpha) return true;
    }
    return false;
}

bool in_fattening(const CubeCover& cover, double alpha, const Vec& x, Norm norm) {
    if (alpha <= 0) throw PreconditionError("fatten: alpha must be positive");
    const double w = std::ldexp(1.0, -cover.level);
    for (const auto& k : cover.indices) {
        double acc = 0;
        for (int j = 0; j < cover.dim; ++j) {
            const double lo = k[j] * w, hi = lo + w;
            const double dj = x[j] < lo ? lo - x[j] : (x[j] > hi ? x[j] - hi : 0.0);
            if (norm == Norm::Chebyshev) {
                acc = std::max(acc, dj);
            } else {
                acc += dj * dj;
            }
        }
        const double dist = norm == Norm::Chebyshev ? acc : std::sqrt(acc);
        if (dist < alpha) return true;
    }
    return false;
}

}  // namespace fracdim
