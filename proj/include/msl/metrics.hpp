#pragma once

#include <utility>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/linalg.hpp"

namespace msl {

// (p, q) of the loss metric: weight exponent on theta_i/theta_bar and the
// row-norm exponent. (0,1) is the unweighted l1 loss, (0.5,1) the weighted.
struct LossSpec {
    double p = 0.0;
    double q = 1.0;

    static LossSpec unweighted_l1() { return {0.0, 1.0}; }
    static LossSpec weighted_l1() { return {0.5, 1.0}; }
};

struct AlignedLoss {
    double value = 0.0;
    // permutation[l] = column of pi_hat matched to truth column l.
    std::vector<int> permutation;
    // Per-node ||T pi_hat_i - pi_i||_q^q under the stored permutation,
    // before degree weighting.
    Vector nodewise;
};

// Cost-minimizing column permutation. q = 1 decomposes into an assignment
// problem solved exactly by the Hungarian method; other q fall back to
// exhaustive search over K! (K <= 8). theta is required when spec.p > 0.
std::vector<int> align_permutation(const Matrix& pi_hat, const Matrix& pi, const LossSpec& spec,
                                   const DegreeParams* theta = nullptr);

AlignedLoss loss(const Matrix& pi_hat, const Matrix& pi, const DegreeParams* theta,
                 const LossSpec& spec);

// (theta_i, error_i) pairs from an aligned q=1 loss; restricted to
// theta_i <= theta_bar when cap is set.
std::vector<std::pair<double, double>> nodewise_errors(const AlignedLoss& aligned,
                                                       const DegreeParams& theta, bool cap);

// OLS slope of log(error) on log(theta); exact-zero errors are excluded and
// counted. Returns NaN when fewer than two usable points remain.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs,
                        int* excluded_zero = nullptr);

// Exact minimum-cost assignment on a square cost matrix; returns, for each
// column l, the assigned row.
std::vector<int> hungarian_assignment(const Matrix& cost);

}  // namespace msl
