#pragma once

#include <string>

#include "fracdim/counting.hpp"

namespace fracdim {

// Finite set of asymptotic rate vectors (one entry per union component, units
// of dimension) along the extremal level subsequences.
struct RateProfile {
    int m = 1;                     // component count
    std::vector<Vec> vectors;      // nonempty; entries >= 0
    bool estimated = false;        // numeric provenance (vs user-supplied)
    int n_min = 0, n_max = 0;      // scale window when estimated
};

RateProfile parse_profile(const std::string& json_text);
RateProfile load_profile(const std::string& path);
std::string serialize_profile(const RateProfile& p);

// Observed rate vectors (a_1(n),...,a_m(n)), a_i(n) = log count_i / (n log
// base), clamped to [0, d], at the given levels; deduplicated and with
// componentwise-dominated vectors removed. All components must share a common
// counting base (grid schemes count analytically at base-b levels).
RateProfile profile_estimate(const std::vector<SetSpecPtr>& sets,
                             const std::vector<int>& levels);
// Levels n_min..n_max, keeping the tail half as the extremal candidates.
RateProfile profile_estimate(const std::vector<SetSpecPtr>& sets, int n_min,
                             int n_max);

// Local uniform upper box dimension of the profile: max_v min_j v_j.
double s_u(const RateProfile& p);

struct ConvexDim {
    double value;
    Vec weights;  // minimizing probability vector over the components
};

// Convex upper box dimension: min over the probability simplex p of
// max_v <p, v>, solved exactly by a rational-pivot simplex.
ConvexDim s_conv(const RateProfile& p);

// Brute-force verifier on a simplex grid of the given resolution (m <= 3).
double s_conv_grid(const RateProfile& p, double step);

// Maximal convex upper box dimension, homogeneous-union fast path:
// max_i max_v v_i (each component alone is a localization).
double s_conv_max(const RateProfile& p);
// General form: max of s_conv over explicit localization profiles.
double s_conv_max(const std::vector<RateProfile>& localizations);

}  // namespace fracdim
