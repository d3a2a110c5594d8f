#pragma once

#include <set>

#include "fracdim/measures.hpp"
#include "fracdim/separation.hpp"

namespace fracdim {

struct WeightedGraph {
    std::size_t n = 0;                                    // vertices 0..n-1
    std::set<std::pair<std::size_t, std::size_t>> edges;  // a < b, no loops
    static WeightedGraph make(std::size_t n,
                              std::vector<std::pair<std::size_t, std::size_t>> edges);
    bool connected() const;
    std::vector<std::size_t> neighbors(std::size_t v) const;
};

// A non-cut vertex (smallest label); removal re-verified to keep connectivity.
std::size_t graph_peel(const WeightedGraph& g);
// Cut vertices by a lowlink computation (cross-check for graph_peel).
std::vector<std::size_t> articulation_points(const WeightedGraph& g);

struct GraphWeights {
    std::size_t v0 = 0;
    std::vector<double> log_w;  // natural-log weights, one per vertex
    double eps = 0, rho = 1;
    double w(std::size_t v) const;
};

// The weight cascade: positive weights summing to 1 with w(v0) > 1/2 and, for
// every v != v0, a neighbor u with w(v) <= eps * w(u)^rho. Weights live in the
// log domain: chains make them tower-exponentially small.
GraphWeights graph_weights(const WeightedGraph& g, double eps, double rho);
// The three-bullet validator (machine check of the invariants above).
bool validate_graph_weights(const WeightedGraph& g, const GraphWeights& w,
                            std::string* why = nullptr);

struct PackedMeasure {
    FiniteMeasure mu;
    double r;
};

// Uniform measure on a maximal r/2-packing with mu(B(x,r)) >= 2^-t r^t,
// validated on the candidate grid; scans dyadic r < alpha.
PackedMeasure packing_measure_lower(const SetSpec& set, double t, double alpha);
// Uniform measure on an r-packing with mu(B(x,r)) <= r^t; the packing itself
// (pairwise distances >= 2r) is the exact certificate.
PackedMeasure packing_measure_upper(const SetSpec& set, double t, double alpha);

// The component-wise cascade measure: one atom per cover cube, cascade weights
// within each component, components averaged uniformly. Requires q <= 0 and an
// exact cover.
FiniteMeasure imubsi_nu(const SetSpec& set, int n, double q);

struct CheckResult {
    double lhs = 0, rhs = 0;
    bool pass = false;
    std::string params;
    std::string csv() const;
};

// With nu = (1-theta) mu + theta nu_n, checks
//   I_nu(3*2^-n, q) <= N (1-theta)^q a^q + theta^q + theta^q 2^-q C_n^{1-q}
// (Chebyshev norm; N = atom count of mu, a = min mass). Compared in the log
// domain since both sides can exceed double range for cascade weights.
CheckResult imubsi_check(const SetSpec& set, int n, double q,
                         const FiniteMeasure& mu, double theta);

// I_mu(2r,q) >= mu(E)^q / N_r(E)^{q-1} for q > 1, E a finite union of balls;
// N_r(E) is an upper bound (ball count when all radii <= r, else cube count).
CheckResult jensen_lq_check(const FiniteMeasure& mu, const std::vector<Ball>& E,
                            double r, double q, Norm norm = Norm::Chebyshev);

// int_A log mu(B(x,2r)) dmu >= -mu(A(r)) log N_r(A) - 1/e.
CheckResult jensen_l1_check(const FiniteMeasure& mu, const std::vector<Ball>& A,
                            double r, Norm norm = Norm::Chebyshev);

}  // namespace fracdim
