#pragma once

#include <cstddef>
#include <vector>

#include "fracdim/errors.hpp"

namespace fracdim {

// Dense two-phase simplex with Bland's rule for small linear programs
//   minimize c.x  subject to  A x = b, x >= 0.
// Scalar is double (epsilon comparisons) or an exact rational type (eps = 0).

template <class S>
struct LpTol {
    static S eps() { return S(0); }
};
template <>
struct LpTol<double> {
    static double eps() { return 1e-9; }
};

template <class S>
struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Optimal;
    S value{};
    std::vector<S> x;
};

template <class S>
LpSolution<S> lp_solve(std::vector<std::vector<S>> A, std::vector<S> b,
                       const std::vector<S>& c) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    const S eps = LpTol<S>::eps();
    for (std::size_t i = 0; i < m; ++i) {
        if (A[i].size() != n) throw PreconditionError("lp_solve: ragged matrix");
        if (b[i] < S(0)) {
            for (auto& v : A[i]) v = -v;
            b[i] = -b[i];
        }
    }
    // tableau: n original + m artificial columns + rhs
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<S>> T(m, std::vector<S>(cols, S(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = S(1);
        T[i][cols - 1] = b[i];
        basis[i] = n + i;
    }

    auto pivot = [&](std::size_t row, std::size_t col) {
        const S p = T[row][col];
        for (auto& v : T[row]) v /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const S f = T[i][col];
            if (f == S(0)) continue;
            for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[row][j];
        }
        basis[row] = col;
    };

    auto run = [&](const std::vector<S>& cost, std::size_t ncols) -> bool {
        // returns false on unboundedness
        for (;;) {
            // reduced costs d_j = c_j - c_B . T[., j]; Bland: smallest j < 0
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols; ++j) {
                S d = cost[j];
                for (std::size_t i = 0; i < m; ++i) {
                    if (cost[basis[i]] != S(0)) d -= cost[basis[i]] * T[i][j];
                }
                if (d < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == ncols) return true;
            std::size_t leave = m;
            S best{};
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][enter] > eps) {
                    const S ratio = T[i][cols - 1] / T[i][enter];
                    if (leave == m || ratio < best ||
                        (ratio == best && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
    };

    LpSolution<S> sol;
    // Phase 1: minimize the sum of artificials.
    std::vector<S> c1(n + m, S(0));
    for (std::size_t j = n; j < n + m; ++j) c1[j] = S(1);
    if (!run(c1, n + m)) {
        sol.status = LpSolution<S>::Status::Infeasible;  // cannot happen: bounded
        return sol;
    }
    S art{};
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) art += T[i][cols - 1];
    }
    if (art > eps + eps) {
        sol.status = LpSolution<S>::Status::Infeasible;
        return sol;
    }
    // Drive remaining zero-level artificials out of the basis when possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (T[i][j] > eps || T[i][j] < -eps) {
                pivot(i, j);
                break;
            }
        }
    }
    // Phase 2: original costs; artificial columns may not re-enter.
    std::vector<S> c2(n + m, S(0));
    for (std::size_t j = 0; j < n; ++j) c2[j] = c[j];
    if (!run(c2, n)) {
        sol.status = LpSolution<S>::Status::Unbounded;
        return sol;
    }
    sol.status = LpSolution<S>::Status::Optimal;
    sol.x.assign(n, S(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) sol.x[basis[i]] = T[i][cols - 1];
    }
    sol.value = S(0);
    for (std::size_t j = 0; j < n; ++j) sol.value += c[j] * sol.x[j];
    return sol;
}

}  // namespace fracdim
