#include "fracdim/setspec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracdim/errors.hpp"

namespace fracdim {
namespace {

using json = nlohmann::ordered_json;

void require(bool cond, const std::string& msg) {
    if (!cond) throw PreconditionError(msg);
}

void check_dim(int dim) {
    require(dim >= 1 && dim <= kMaxDim,
            "ambient dimension must be in [1," + std::to_string(kMaxDim) + "]");
}

struct Box {
    Vec lo, hi;
};

Box ifs_hull(const HomothetyIfsSpec& spec, int dim) {
    // Fixed point of B -> bbox(union_i S_i(B)); each coordinate iteration is a
    // contraction with factor max ratio.
    Vec lo(dim, -1e6), hi(dim, 1e6);
    for (int it = 0; it < 4000; ++it) {
        for (int j = 0; j < dim; ++j) {
            double nlo = std::numeric_limits<double>::infinity();
            double nhi = -std::numeric_limits<double>::infinity();
            for (const auto& m : spec.maps) {
                nlo = std::min(nlo, m.ratio * lo[j] + m.shift[j]);
                nhi = std::max(nhi, m.ratio * hi[j] + m.shift[j]);
            }
            lo[j] = nlo;
            hi[j] = nhi;
        }
    }
    return {lo, hi};
}

bool boxes_disjoint(const Box& a, const Box& b, int dim) {
    for (int j = 0; j < dim; ++j) {
        if (a.hi[j] < b.lo[j] || b.hi[j] < a.lo[j]) return true;
    }
    return false;
}

Box map_box(const HomothetyMap& m, const Box& b, int dim) {
    Box out;
    out.lo.resize(dim);
    out.hi.resize(dim);
    for (int j = 0; j < dim; ++j) {
        out.lo[j] = m.ratio * b.lo[j] + m.shift[j];
        out.hi[j] = m.ratio * b.hi[j] + m.shift[j];
    }
    return out;
}

// Strong separation check on bounding boxes: refine each branch S_i(K) into
// word-piece boxes until all branch clouds are pairwise disjoint, or give up.
void validate_strong_separation(const HomothetyIfsSpec& spec, int dim) {
    const Box hull = ifs_hull(spec, dim);
    const std::size_t n = spec.maps.size();
    std::vector<std::vector<Box>> clouds(n);
    for (std::size_t i = 0; i < n; ++i) clouds[i] = {map_box(spec.maps[i], hull, dim)};
    const std::size_t kPieceBudget = 1u << 15;
    for (int depth = 0; depth < 24; ++depth) {
        bool clash = false;
        for (std::size_t i = 0; i < n && !clash; ++i) {
            for (std::size_t k = i + 1; k < n && !clash; ++k) {
                for (const auto& a : clouds[i]) {
                    for (const auto& b : clouds[k]) {
                        if (!boxes_disjoint(a, b, dim)) {
                            clash = true;
                            break;
                        }
                    }
                    if (clash) break;
                }
            }
        }
        if (!clash) return;
        std::size_t total = 0;
        for (const auto& c : clouds) total += c.size();
        if (total * n > kPieceBudget) break;
        for (auto& cloud : clouds) {
            std::vector<Box> next;
            next.reserve(cloud.size() * n);
            for (const auto& b : cloud) {
                for (const auto& m : spec.maps) next.push_back(map_box(m, b, dim));
            }
            cloud = std::move(next);
        }
    }
    throw PreconditionError(
        "homothety IFS declared STRONG separation, but piece bounding boxes could "
        "not be separated within the refinement budget");
}

void validate_digit_set(const DigitSet& ds, int base, int dim, const char* where) {
    require(!ds.empty(), std::string(where) + ": empty digit set");
    std::set<DigitVec> seen;
    for (const auto& dv : ds) {
        for (int j = 0; j < dim; ++j) {
            require(dv[j] >= 0 && dv[j] < base,
                    std::string(where) + ": digit out of [0,base)");
        }
        for (int j = dim; j < kMaxDim; ++j) {
            require(dv[j] == 0, std::string(where) + ": digit entry beyond dimension");
        }
        require(seen.insert(dv).second, std::string(where) + ": duplicate digit");
    }
}

}  // namespace

SetSpec::SetSpec(Node node, int dim) : node_(std::move(node)), dim_(dim) {
    check_dim(dim);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PointsSpec>) {
                require(!n.points.empty(), "POINTS: empty point list");
                bbox_.lower = bbox_.upper = n.points.front();
                for (const auto& p : n.points) {
                    require(static_cast<int>(p.size()) == dim, "POINTS: dimension mismatch");
                    for (int j = 0; j < dim; ++j) {
                        bbox_.lower[j] = std::min(bbox_.lower[j], p[j]);
                        bbox_.upper[j] = std::max(bbox_.upper[j], p[j]);
                    }
                }
            } else if constexpr (std::is_same_v<T, BoxSpec>) {
                require(static_cast<int>(n.lower.size()) == dim &&
                            static_cast<int>(n.upper.size()) == dim,
                        "BOX: dimension mismatch");
                for (int j = 0; j < dim; ++j) {
                    require(n.lower[j] <= n.upper[j], "BOX: lower > upper");
                }
                bbox_ = {n.lower, n.upper};
            } else if constexpr (std::is_same_v<T, GridSchemeSpec>) {
                require(n.base >= 2, "GRID_SCHEME: base must be >= 2");
                require(static_cast<int>(n.origin.size()) == dim &&
                            static_cast<int>(n.side.size()) == dim,
                        "GRID_SCHEME: dimension mismatch");
                for (int j = 0; j < dim; ++j) {
                    require(n.side[j] > 0, "GRID_SCHEME: nonpositive side");
                }
                for (const auto& ds : n.levels) {
                    validate_digit_set(ds, n.base, dim, "GRID_SCHEME level");
                }
                if (n.tail.kind == GridTail::Kind::Constant) {
                    validate_digit_set(n.tail.constant, n.base, dim, "GRID_SCHEME tail");
                } else {
                    require(n.tail.block_digits.size() == n.tail.boundaries.size() + 1,
                            "GRID_SCHEME blocks tail: need one digit set per block plus "
                            "the constant continuation");
                    int prev = static_cast<int>(n.levels.size());
                    for (int b : n.tail.boundaries) {
                        require(b > prev, "GRID_SCHEME blocks tail: boundaries must be "
                                          "increasing and past the explicit prefix");
                        prev = b;
                    }
                    for (const auto& ds : n.tail.block_digits) {
                        validate_digit_set(ds, n.base, dim, "GRID_SCHEME tail block");
                    }
                }
                bbox_.lower = n.origin;
                bbox_.upper = n.origin;
                for (int j = 0; j < dim; ++j) bbox_.upper[j] += n.side[j];
            } else if constexpr (std::is_same_v<T, HomothetyIfsSpec>) {
                require(!n.maps.empty(), "HOMOTHETY_IFS: no maps");
                for (const auto& m : n.maps) {
                    require(m.ratio > 0 && m.ratio < 1, "HOMOTHETY_IFS: ratio not in (0,1)");
                    require(static_cast<int>(m.shift.size()) == dim,
                            "HOMOTHETY_IFS: dimension mismatch");
                }
                const Box hull = ifs_hull(n, dim);
                bbox_ = {hull.lo, hull.hi};
                if (n.separation == IfsSeparation::Strong) {
                    validate_strong_separation(n, dim);
                }
            } else if constexpr (std::is_same_v<T, HarmonicClosureSpec>) {
                require(dim == 1, "HARMONIC_CLOSURE: only defined in dimension 1");
                bbox_ = {{0.0}, {1.0}};
            } else if constexpr (std::is_same_v<T, UnionSpec>) {
                require(!n.members.empty(), "UNION: empty member list");
                for (const auto& m : n.members) {
                    require(m != nullptr && m->dim() == dim, "UNION: dimension mismatch");
                }
                bbox_ = n.members.front()->bounding_box();
                for (const auto& m : n.members) {
                    for (int j = 0; j < dim; ++j) {
                        bbox_.lower[j] = std::min(bbox_.lower[j], m->bounding_box().lower[j]);
                        bbox_.upper[j] = std::max(bbox_.upper[j], m->bounding_box().upper[j]);
                    }
                }
            } else if constexpr (std::is_same_v<T, AffineSpec>) {
                require(n.child != nullptr, "AFFINE: missing child");
                require(n.scale > 0, "AFFINE: scale must be positive");
                require(static_cast<int>(n.shift.size()) == dim && n.child->dim() == dim,
                        "AFFINE: dimension mismatch");
                const auto& cb = n.child->bounding_box();
                bbox_.lower.resize(dim);
                bbox_.upper.resize(dim);
                for (int j = 0; j < dim; ++j) {
                    bbox_.lower[j] = n.scale * cb.lower[j] + n.shift[j];
                    bbox_.upper[j] = n.scale * cb.upper[j] + n.shift[j];
                }
            }
        },
        node_);
}

SetSpecPtr SetSpec::points(std::vector<Vec> pts) {
    require(!pts.empty(), "POINTS: empty point list");
    const int dim = static_cast<int>(pts.front().size());
    return std::make_shared<SetSpec>(PointsSpec{std::move(pts)}, dim);
}

SetSpecPtr SetSpec::box(Vec lower, Vec upper) {
    const int dim = static_cast<int>(lower.size());
    return std::make_shared<SetSpec>(BoxSpec{std::move(lower), std::move(upper)}, dim);
}

SetSpecPtr SetSpec::grid_scheme(GridSchemeSpec spec) {
    const int dim = static_cast<int>(spec.origin.size());
    return std::make_shared<SetSpec>(std::move(spec), dim);
}

SetSpecPtr SetSpec::homothety_ifs(HomothetyIfsSpec spec, int dim) {
    return std::make_shared<SetSpec>(std::move(spec), dim);
}

SetSpecPtr SetSpec::harmonic_closure() {
    return std::make_shared<SetSpec>(HarmonicClosureSpec{}, 1);
}

SetSpecPtr SetSpec::union_of(std::vector<SetSpecPtr> members) {
    require(!members.empty(), "UNION: empty member list");
    const int dim = members.front()->dim();
    return std::make_shared<SetSpec>(UnionSpec{std::move(members)}, dim);
}

SetSpecPtr SetSpec::affine(SetSpecPtr child, double scale, Vec shift) {
    require(child != nullptr, "AFFINE: missing child");
    const int dim = child->dim();
    return std::make_shared<SetSpec>(AffineSpec{std::move(child), scale, std::move(shift)},
                                     dim);
}

const DigitSet& grid_digits_at(const GridSchemeSpec& spec, int level) {
    if (level <= 0) throw PreconditionError("grid_digits_at: level must be >= 1");
    if (level <= static_cast<int>(spec.levels.size())) return spec.levels[level - 1];
    if (spec.tail.kind == GridTail::Kind::Constant) return spec.tail.constant;
    for (std::size_t b = 0; b < spec.tail.boundaries.size(); ++b) {
        if (level <= spec.tail.boundaries[b]) return spec.tail.block_digits[b];
    }
    return spec.tail.block_digits.back();
}

bool grid_is_product(const GridSchemeSpec& spec, int dim, int max_level) {
    if (dim == 1) return true;
    const int stable = static_cast<int>(spec.levels.size()) +
                       (spec.tail.kind == GridTail::Kind::Blocks
                            ? 0  // boundaries resolved below via grid_digits_at
                            : 0);
    const int upto = std::max(max_level, stable + 1);
    for (int lvl = 1; lvl <= upto; ++lvl) {
        const DigitSet& ds = grid_digits_at(spec, lvl);
        std::vector<std::set<int>> proj(dim);
        for (const auto& dv : ds) {
            for (int j = 0; j < dim; ++j) proj[j].insert(dv[j]);
        }
        std::size_t prod = 1;
        for (int j = 0; j < dim; ++j) prod *= proj[j].size();
        if (prod != ds.size()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace {

Vec parse_vec(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected array");
    Vec v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ParseError(std::string(what) + ": expected number");
        v.push_back(x.get<double>());
    }
    return v;
}

DigitSet parse_digit_set(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected array");
    DigitSet ds;
    for (const auto& d : j) {
        DigitVec dv{0, 0, 0};
        if (d.is_number_integer()) {
            dv[0] = d.get<int>();
        } else if (d.is_array()) {
            if (d.size() > kMaxDim) throw ParseError(std::string(what) + ": digit too long");
            for (std::size_t k = 0; k < d.size(); ++k) dv[k] = d[k].get<int>();
        } else {
            throw ParseError(std::string(what) + ": digit must be int or array");
        }
        ds.push_back(dv);
    }
    return ds;
}

SetSpecPtr parse_node(const json& j);

GridTail parse_tail(const json& j) {
    GridTail t;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        t.kind = GridTail::Kind::Constant;
        t.constant = parse_digit_set(j.at("digits"), "tail digits");
    } else if (kind == "blocks") {
        t.kind = GridTail::Kind::Blocks;
        for (const auto& b : j.at("boundaries")) t.boundaries.push_back(b.get<int>());
        for (const auto& ds : j.at("digits")) {
            t.block_digits.push_back(parse_digit_set(ds, "tail block digits"));
        }
    } else {
        throw ParseError("grid_scheme tail: unknown kind '" + kind + "'");
    }
    return t;
}

SetSpecPtr parse_node(const json& j) {
    if (!j.is_object()) throw ParseError("set node: expected object");
    const std::string type = j.at("type").get<std::string>();
    if (type == "points") {
        std::vector<Vec> pts;
        for (const auto& p : j.at("points")) pts.push_back(parse_vec(p, "point"));
        return SetSpec::points(std::move(pts));
    }
    if (type == "box") {
        return SetSpec::box(parse_vec(j.at("lower"), "box lower"),
                            parse_vec(j.at("upper"), "box upper"));
    }
    if (type == "grid_scheme") {
        GridSchemeSpec g;
        g.base = j.at("base").get<int>();
        g.origin = parse_vec(j.at("origin"), "grid origin");
        if (j.at("side").is_number()) {
            g.side.assign(g.origin.size(), j.at("side").get<double>());
        } else {
            g.side = parse_vec(j.at("side"), "grid side");
        }
        if (j.contains("levels")) {
            for (const auto& ds : j.at("levels")) {
                g.levels.push_back(parse_digit_set(ds, "grid level"));
            }
        }
        g.tail = parse_tail(j.at("tail"));
        return SetSpec::grid_scheme(std::move(g));
    }
    if (type == "homothety_ifs") {
        HomothetyIfsSpec s;
        int dim = 0;
        for (const auto& m : j.at("maps")) {
            HomothetyMap hm;
            hm.ratio = m.at("ratio").get<double>();
            hm.shift = parse_vec(m.at("shift"), "map shift");
            dim = static_cast<int>(hm.shift.size());
            s.maps.push_back(std::move(hm));
        }
        const std::string sep = j.value("separation", std::string("none"));
        if (sep == "strong") {
            s.separation = IfsSeparation::Strong;
        } else if (sep == "open_set") {
            s.separation = IfsSeparation::OpenSet;
        } else if (sep == "none") {
            s.separation = IfsSeparation::None;
        } else {
            throw ParseError("homothety_ifs: unknown separation '" + sep + "'");
        }
        return SetSpec::homothety_ifs(std::move(s), dim);
    }
    if (type == "harmonic_closure") return SetSpec::harmonic_closure();
    if (type == "union") {
        std::vector<SetSpecPtr> members;
        for (const auto& m : j.at("members")) members.push_back(parse_node(m));
        return SetSpec::union_of(std::move(members));
    }
    if (type == "affine") {
        return SetSpec::affine(parse_node(j.at("child")), j.at("scale").get<double>(),
                               parse_vec(j.at("shift"), "affine shift"));
    }
    throw ParseError("set node: unknown type '" + type + "'");
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json digit_set_to_json(const DigitSet& ds, int dim) {
    json a = json::array();
    for (const auto& dv : ds) {
        if (dim == 1) {
            a.push_back(dv[0]);
        } else {
            json d = json::array();
            for (int j = 0; j < dim; ++j) d.push_back(dv[j]);
            a.push_back(d);
        }
    }
    return a;
}

json node_to_json(const SetSpec& spec) {
    const int dim = spec.dim();
    json j;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PointsSpec>) {
                j["type"] = "points";
                json pts = json::array();
                for (const auto& p : n.points) pts.push_back(vec_to_json(p));
                j["points"] = pts;
            } else if constexpr (std::is_same_v<T, BoxSpec>) {
                j["type"] = "box";
                j["lower"] = vec_to_json(n.lower);
                j["upper"] = vec_to_json(n.upper);
            } else if constexpr (std::is_same_v<T, GridSchemeSpec>) {
                j["type"] = "grid_scheme";
                j["base"] = n.base;
                j["origin"] = vec_to_json(n.origin);
                j["side"] = vec_to_json(n.side);
                json lv = json::array();
                for (const auto& ds : n.levels) lv.push_back(digit_set_to_json(ds, dim));
                j["levels"] = lv;
                json t;
                if (n.tail.kind == GridTail::Kind::Constant) {
                    t["kind"] = "constant";
                    t["digits"] = digit_set_to_json(n.tail.constant, dim);
                } else {
                    t["kind"] = "blocks";
                    json b = json::array();
                    for (int x : n.tail.boundaries) b.push_back(x);
                    t["boundaries"] = b;
                    json d = json::array();
                    for (const auto& ds : n.tail.block_digits) {
                        d.push_back(digit_set_to_json(ds, dim));
                    }
                    t["digits"] = d;
                }
                j["tail"] = t;
            } else if constexpr (std::is_same_v<T, HomothetyIfsSpec>) {
                j["type"] = "homothety_ifs";
                json maps = json::array();
                for (const auto& m : n.maps) {
                    json mj;
                    mj["ratio"] = m.ratio;
                    mj["shift"] = vec_to_json(m.shift);
                    maps.push_back(mj);
                }
                j["maps"] = maps;
                switch (n.separation) {
                    case IfsSeparation::Strong: j["separation"] = "strong"; break;
                    case IfsSeparation::OpenSet: j["separation"] = "open_set"; break;
                    case IfsSeparation::None: j["separation"] = "none"; break;
                }
            } else if constexpr (std::is_same_v<T, HarmonicClosureSpec>) {
                j["type"] = "harmonic_closure";
            } else if constexpr (std::is_same_v<T, UnionSpec>) {
                j["type"] = "union";
                json ms = json::array();
                for (const auto& m : n.members) ms.push_back(node_to_json(*m));
                j["members"] = ms;
            } else if constexpr (std::is_same_v<T, AffineSpec>) {
                j["type"] = "affine";
                j["scale"] = n.scale;
                j["shift"] = vec_to_json(n.shift);
                j["child"] = node_to_json(*n.child);
            }
        },
        spec.node());
    return j;
}

}  // namespace

SetSpecPtr parse_setspec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("set-spec file: invalid JSON: ") + e.what());
    }
    try {
        return parse_node(j.at("set"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("set-spec file: ") + e.what());
    }
}

SetSpecPtr load_setspec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open set-spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_setspec(ss.str());
}

std::string serialize_setspec(const SetSpec& spec) {
    json j;
    j["set"] = node_to_json(spec);
    return j.dump(2) + "\n";
}

}  // namespace fracdim
