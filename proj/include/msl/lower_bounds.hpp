#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/degree_profiles.hpp"
#include "msl/metrics.hpp"
#include "msl/rng.hpp"

namespace msl {

// Binary packing code with pairwise Hamming distance >= s/8; word 0 is zero.
struct PackingCode {
    int s = 0;
    std::vector<std::vector<std::uint8_t>> words;
    bool starved = false;  // fewer nonzero words than requested
    int requested = 0;
};

// Greedy rejection sampling; stops at j_target nonzero words or after
// 100*j_target rejections (starved is reported, never silently short).
PackingCode varshamov_gilbert(int s, int j_target, RandomSeed seed);

enum class LfcVariant { Weighted, Unweighted, UnweightedViolated };

std::string to_string(LfcVariant v);

// Least-favorable configuration: Pi* plus packing-indexed perturbations
// sharing (theta, P*). Rows follow the construction's node re-ordering; theta
// is stored in the same order.
struct LfcEnsemble {
    LfcVariant variant = LfcVariant::Weighted;
    MixingMatrix p_star;
    MembershipMatrix pi_star;
    std::vector<MembershipMatrix> members;  // Pi^(0) = Pi* first
    DegreeParams theta;                     // re-ordered
    std::vector<int> original_index;        // position -> input node id

    double beta_n = 0.0;
    double err_n = 0.0;     // with delta_n := beta_n
    double gamma_n = 0.0;   // perturbation scale of the variant
    double c0 = 0.0;        // after halving
    int c0_halvings = 0;
    int n0 = 0;             // perturbed (uniform) block size
    int m = 0, r = 0;       // H^(j) shape
    bool feasible = true;   // variant's F_n condition
    std::string feasibility_note;
    PackingCode packing;
};

// c_check is the weighted variant's constant (F_n(err_n^2) <= c_check, with
// c = (1 + c_check)/2); c_n caps the unweighted variant's M0 band.
LfcEnsemble build_lfc(const DegreeParams& theta, int k, double beta_n, double c0, int j_target,
                      LfcVariant variant, RandomSeed seed, double c_check = 0.5, double c_n = 1.0);

struct KlResult {
    double nats = 0.0;
    bool infinite = false;
};

// Sum over unordered pairs i<j of the two-term Bernoulli KL between the edge
// probabilities. 0-vs-0 contributes nothing; positive-vs-zero flags infinity.
KlResult kl_divergence(const ExpectedAdjacency& omega_a, const ExpectedAdjacency& omega_b);

struct LfcReport {
    LossSpec loss_spec;
    double min_pairwise_loss = 0.0;
    double min_pairwise_ratio = 0.0;   // vs err_n (weighted/unweighted) or n0/n (violated)
    double kl_sum = 0.0;               // sum_j KL(P_j, P_0)
    double kl_ratio = 0.0;             // kl_sum / (J log J)
    bool kl_ratio_defined = false;     // false when J <= 1 or any KL infinite
    int j_nonzero = 0;
    ConditionReport conditions;        // for Pi^(0) under P*
    double min_member_beta_n = 0.0;    // worst |lambda_K(P* G^(j))| across members
    std::string summary() const;
};

LfcReport lfc_report(const LfcEnsemble& ensemble);

}  // namespace msl
