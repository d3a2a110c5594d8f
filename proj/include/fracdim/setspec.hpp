#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracdim/norm.hpp"

namespace fracdim {

// Ambient dimension is capped at 3: everything here is desk-scale enumeration.
inline constexpr int kMaxDim = 3;

// Digit vector of a grid scheme, one entry per axis (unused axes zero).
using DigitVec = std::array<int, kMaxDim>;
using DigitSet = std::vector<DigitVec>;

class SetSpec;
using SetSpecPtr = std::shared_ptr<const SetSpec>;

struct PointsSpec {
    std::vector<Vec> points;  // nonempty, each of the ambient dimension
};

struct BoxSpec {
    Vec lower;
    Vec upper;  // closed box, lower <= upper componentwise
};

// Tail rule for grid-scheme digit sequences past the explicit prefix.
struct GridTail {
    enum class Kind { Constant, Blocks };
    Kind kind = Kind::Constant;
    DigitSet constant;                   // Kind::Constant
    std::vector<int> boundaries;         // Kind::Blocks, absolute level indices
    std::vector<DigitSet> block_digits;  // boundaries.size()+1 entries, last is the
                                         // constant continuation past the final block
};

// Base-b construction: at level n, each surviving cell splits into the cells
// selected by D_n. The compact set is the intersection over all levels.
struct GridSchemeSpec {
    int base = 2;                  // b >= 2
    Vec origin;                    // lower corner of the ambient box
    Vec side;                      // per-axis side of the ambient box, > 0
    std::vector<DigitSet> levels;  // explicit digit sets for levels 1..levels.size()
    GridTail tail;
};

struct HomothetyMap {
    double ratio = 0.0;  // 0 < ratio < 1
    Vec shift;
};

enum class IfsSeparation { Strong, OpenSet, None };

struct HomothetyIfsSpec {
    std::vector<HomothetyMap> maps;
    IfsSeparation separation = IfsSeparation::None;
};

// {0} union {1/k : k >= 1} in dimension 1.
struct HarmonicClosureSpec {};

struct UnionSpec {
    std::vector<SetSpecPtr> members;
};

struct AffineSpec {
    SetSpecPtr child;
    double scale = 1.0;  // s > 0
    Vec shift;
};

// Symbolic description of a nonempty compact set inside a computable bounding
// box. Immutable after construction; all queries on it are pure.
class SetSpec {
  public:
    using Node = std::variant<PointsSpec, BoxSpec, GridSchemeSpec, HomothetyIfsSpec,
                              HarmonicClosureSpec, UnionSpec, AffineSpec>;

    SetSpec(Node node, int dim);

    int dim() const { return dim_; }
    const Node& node() const { return node_; }

    template <class T>
    const T* get_if() const {
        return std::get_if<T>(&node_);
    }

    // Axis-aligned bounding box (closed) containing the set.
    struct BoundingBox {
        Vec lower;
        Vec upper;
    };
    const BoundingBox& bounding_box() const { return bbox_; }

    // Convenience constructors. Each validates its invariants and throws
    // PreconditionError on violation.
    static SetSpecPtr points(std::vector<Vec> pts);
    static SetSpecPtr box(Vec lower, Vec upper);
    static SetSpecPtr grid_scheme(GridSchemeSpec spec);
    static SetSpecPtr homothety_ifs(HomothetyIfsSpec spec, int dim);
    static SetSpecPtr harmonic_closure();
    static SetSpecPtr union_of(std::vector<SetSpecPtr> members);
    static SetSpecPtr affine(SetSpecPtr child, double scale, Vec shift);

  private:
    Node node_;
    int dim_;
    BoundingBox bbox_;
};

// Digit set of a grid scheme at a given level (1-based), resolving the tail.
const DigitSet& grid_digits_at(const GridSchemeSpec& spec, int level);

// True when every level's digit set is the cartesian product of its per-axis
// projections; such schemes split into independent one-dimensional schemes.
bool grid_is_product(const GridSchemeSpec& spec, int dim, int max_level);

// Set-spec file I/O: JSON document with a top-level "set" field.
// serialize(parse(s)) is idempotent (canonical form is byte-stable).
SetSpecPtr parse_setspec(const std::string& json_text);
SetSpecPtr load_setspec(const std::string& path);
std::string serialize_setspec(const SetSpec& spec);

}  // namespace fracdim
