#pragma once

#include "fracdim/counting.hpp"

namespace fracdim {

struct ComponentDecomposition {
    int dim = 1;
    int level = 0;
    bool exact = true;  // OUTER covers may merge components relative to truth
    std::vector<std::vector<Idx>> components;  // each sorted; ordered by
                                               // smallest contained index
    std::size_t count() const { return components.size(); }
};

// Connected components of the cube cover under closure-intersection adjacency
// (index difference in {-1,0,1}^d, diagonals included).
ComponentDecomposition components_of(const CubeCover& cover);
ComponentDecomposition components(const SetSpec& set, int n);

std::string components_csv(const ComponentDecomposition& c);

// Minimum Chebyshev distance between the cube unions of distinct components
// (+infinity when there is a single component).
double component_separation(const ComponentDecomposition& c);

// log C_n(K) across levels; EXACT covers required.
ScaleSeries bsi_series(const SetSpec& set, int n_min, int n_max);
DimEstimate bsi_estimate(const SetSpec& set, int n_min, int n_max);

// Closed form under strong separation: the Moran exponent.
double selfsimilar_bsi(const std::vector<double>& ratios);

}  // namespace fracdim
