#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "fracdim/counting.hpp"

namespace fracdim {

// Finitely supported probability measure. Masses are carried in both linear
// and log form: the constructive weight cascades produce masses far below
// double underflow, so every moment computation runs in the log domain.
struct FiniteMeasure {
    struct Atom {
        Vec x;
        double p;      // may underflow to 0 for cascade outputs
        double log_p;  // always finite
    };
    int dim = 1;
    std::vector<Atom> atoms;  // sorted lexicographically by point; points distinct
};

// Validates: distinct points, masses positive and summing to 1 within tol.
FiniteMeasure make_measure(int dim, std::vector<std::pair<Vec, double>> atoms,
                           double tol = 1e-12);
FiniteMeasure make_measure_log(int dim, std::vector<std::pair<Vec, double>> atoms_log);

FiniteMeasure parse_measure(const std::string& json_text);
FiniteMeasure load_measure(const std::string& path);
std::string serialize_measure(const FiniteMeasure& mu);

// Convex combination (1-s) mu + s nu (coinciding atoms merged).
FiniteMeasure mix(const FiniteMeasure& mu, const FiniteMeasure& nu, double s);

struct QValue {
    enum class Kind { Real, PlusInf, MinusInf };
    Kind kind = Kind::Real;
    double q = 2.0;
    static QValue real(double q) { return {Kind::Real, q}; }
    static QValue plus_inf() { return {Kind::PlusInf, 0}; }
    static QValue minus_inf() { return {Kind::MinusInf, 0}; }
    bool is_one() const { return kind == Kind::Real && q == 1.0; }
};

double ball_mass(const FiniteMeasure& mu, const Vec& x, double r,
                 Norm norm = Norm::Chebyshev);
// log of the open-ball mass; -infinity when the ball misses the support.
double log_ball_mass(const FiniteMeasure& mu, const Vec& x, double r,
                     Norm norm = Norm::Chebyshev);

// The moment integral I_mu(r,q): sum_i p_i m_i^{q-1} for real q != 1,
// sum_i p_i log m_i at q = 1, and min/max ball mass over the support at
// q = -inf / +inf. log_I is the natural log of I (identity at q = 1).
double I(const FiniteMeasure& mu, double r, QValue q, Norm norm = Norm::Chebyshev);
double log_I(const FiniteMeasure& mu, double r, QValue q,
             Norm norm = Norm::Chebyshev);

// Dimension profile at radius r in (0,1): log I / ((q-1) log r); I / log r at
// q = 1; log(extremal ball mass)/log r at q = +-inf.
double phi(const FiniteMeasure& mu, double r, QValue q, Norm norm = Norm::Chebyshev);

// phi sampled on a strictly decreasing scale grid in (0,1), plus window
// statistics over the tail half.
std::pair<ScaleSeries, DimEstimate> lq_profile(const FiniteMeasure& mu,
                                               const std::vector<double>& scales,
                                               QValue q, Norm norm = Norm::Chebyshev);
std::string profile_csv(const ScaleSeries& s);

// Fortet-Mourier distance: sup { sum c_i f(x_i) : |f| <= 1, Lip(f) <= 1 },
// an exact finite linear program on the union of supports.
double fm_distance(const FiniteMeasure& mu, const FiniteMeasure& nu,
                   Norm norm = Norm::Chebyshev);
// Capped-transport dual of the same program (cross-check).
double fm_distance_dual(const FiniteMeasure& mu, const FiniteMeasure& nu,
                        Norm norm = Norm::Chebyshev);

struct ProbeReport {
    bool passed = false;
    double delta = 0;  // largest perturbation radius at which all trials pass
    int trials = 0;
    std::string detail;
};

// Empirical stability probe of the perturbation inequalities:
//   q > 1:  I_nu(r,q)  <= (2^q+1) I_mu(2r,q)  and  I_nu(2r,q) >= 2^-q I_mu(r,q)
//   q < 1:  I_nu(2r,q) <= 2^{3-q} I_mu(r,q)   and  I_nu(r,q) >= 2^{q-2} I_mu(2r,q)
//   q = 1:  I_nu(r,1)  <= log 2 + (1/2) I_mu(2r,1)
// Perturbations nu are seeded jitters with fm_distance(mu,nu) <= delta; delta
// halves from 2^-1 down to 2^-20.
ProbeReport stability_probe(const FiniteMeasure& mu, double r, QValue q, int trials,
                            std::uint64_t seed, Norm norm = Norm::Chebyshev);

struct JumpCertificate {
    double r_star;     // discontinuity radius (an inter-atom distance)
    double phi_left;   // phi(r_star) (I is left-continuous)
    double phi_right;  // limit from the right
};
using IvRootResult = std::variant<double, JumpCertificate>;

// Event-aware intermediate-value search for phi(r) = tau on [r1, r2] in (0,1).
// phi is continuous and monotone between inter-atom distances (I is piecewise
// constant), so the root is found by per-piece bisection; if tau is skipped at
// a jump radius, the exact certificate is returned instead.
IvRootResult iv_root(const FiniteMeasure& mu, QValue q, double tau, double r1,
                     double r2, Norm norm = Norm::Chebyshev);

}  // namespace fracdim
