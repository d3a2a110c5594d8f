#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "fracdim/setspec.hpp"

namespace fracdim {

// Index vector of a half-open dyadic cube prod_j [k_j 2^-n, (k_j+1) 2^-n);
// unused axes are zero.
using Idx = std::array<std::int64_t, kMaxDim>;

struct CubeCover {
    int dim = 1;
    int level = 0;
    std::vector<Idx> indices;  // sorted lexicographically, deduplicated
    bool exact = true;         // EXACT: cube present iff it meets K.
                               // OUTER: superset; every present cube meets the
                               // 2^-n/8 fattening of K.

    bool contains(const Idx& k) const;
};

// Level-n dyadic cubes meeting the set (see CubeCover::exact for semantics).
CubeCover cubes_at(const SetSpec& set, int n);

// Covers for every level in [n_min, n_max], computed once at the deepest level
// and coarsened by halving indices (sound for both EXACT and OUTER covers).
std::vector<CubeCover> cubes_range(const SetSpec& set, int n_min, int n_max);

// Deterministic point of K inside each cover cube; available for the exactly
// enumerable variants only (throws PreconditionError otherwise).
std::map<Idx, Vec> cover_representatives(const SetSpec& set, int n);

// Cylinder indices of a grid scheme at its own base-b level m (each axis entry
// in [0, b^m)), relative to the scheme's ambient box.
std::vector<Idx> grid_cylinders(const GridSchemeSpec& spec, int dim, int m);

// Recognize an equal-ratio homothety IFS whose maps land on a common 1/b grid
// of its attractor hull, and re-express it as a constant-digit grid scheme.
std::optional<GridSchemeSpec> ifs_as_grid(const HomothetyIfsSpec& spec, int dim);

// Open alpha-neighborhood membership.
bool in_fattening(const std::vector<Vec>& pts, double alpha, const Vec& x,
                  Norm norm = Norm::Chebyshev);
bool in_fattening(const CubeCover& cover, double alpha, const Vec& x,
                  Norm norm = Norm::Chebyshev);

}  // namespace fracdim
