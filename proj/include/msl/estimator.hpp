#pragma once

#include <cstdint>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/linalg.hpp"
#include "msl/spectral.hpp"

namespace msl {

// Pre-PCA normalization: the regularized Laplacian (this paper's method) or
// the raw adjacency (the orthodox Mixed-SCORE baseline).
struct PrePcaMode {
    enum class Kind { Laplacian, Identity };
    Kind kind = Kind::Laplacian;
    double tau = 1.0;

    static PrePcaMode laplacian(double tau = 1.0) { return {Kind::Laplacian, tau}; }
    static PrePcaMode identity() { return {Kind::Identity, 0.0}; }
};

struct ScoreEmbedding {
    EigenPairs eigen;                    // K pairs of the normalized matrix
    Matrix r_hat;                        // n x (K-1); degenerate rows zeroed
    double delta_hat = 0.0;              // min{sqrt(K)(l1-l2), K|lK|}, clamped at 0
    std::vector<std::uint8_t> degenerate;  // |xi1(i)| below threshold
};

struct TrimSets {
    std::vector<int> keep;  // S_n(c), ascending
    std::vector<int> vh;    // S*_n(c,gamma) subset used for vertex hunting
};

struct SimplexEstimate {
    Matrix vertices;                 // K x (K-1), rows are picked points
    std::vector<int> vertex_indices;
    Vector b1_hat;                   // filled by reconstruct_memberships
    bool b1_clamped = false;
};

enum class NodeFlag : std::uint8_t { Estimated, TrimmedUniform, DegenerateXi1 };

struct MembershipEstimate {
    Matrix pi_hat;                // n x K row-stochastic
    std::vector<NodeFlag> flags;
    bool b1_clamped = false;
    int clipped_to_zero = 0;      // rows where all entries clipped, fell back to uniform
};

// Step 1: eigen-decompose the normalized matrix, build R-hat and delta-hat.
ScoreEmbedding score_embedding(const AdjacencyMatrix& a, int k, const PrePcaMode& mode);

// Step 2/3 index sets: keep = {d_i delta^2 >= c K^3 log n}, vh = keep and
// {d_i >= gamma dbar}. An unreachable threshold (delta = 0) yields empty sets;
// VertexHuntingStarved fires only when keep is nonempty but |vh| < K.
TrimSets trim_sets(const AdjacencyMatrix& a, double delta_hat, double c, double gamma, int k);

// Step 3: successive projection over the candidate rows of `points`, greedily
// maximizing the residual norm of the affine-augmented rows (1, r_i). Ties go
// to the lowest index.
SimplexEstimate successive_projection(const Matrix& points, const std::vector<int>& candidates,
                                      int k);

// Step 4: barycentric solve, b1-hat correction, clipping and row normalization.
// Fills simplex.b1_hat as a side effect.
MembershipEstimate reconstruct_memberships(const ScoreEmbedding& emb, SimplexEstimate& simplex,
                                           const TrimSets& trims);

// The full pipeline (Steps 1-4) with the paper's defaults c=0.1, gamma=0.05,
// tau=1. Errors from sub-steps surface as PipelineError with the step name.
MembershipEstimate mixed_score_laplacian(const AdjacencyMatrix& a, int k, double c = 0.1,
                                         double gamma = 0.05, double tau = 1.0);

struct OrthodoxOptions {
    double c = 0.1;
    double gamma = 0.05;
    bool trimming = false;  // the cited baseline does not trim
};

// Identity-normalization ablation: same pipeline on the adjacency eigenvectors.
MembershipEstimate orthodox_mixed_score(const AdjacencyMatrix& a, int k,
                                        const OrthodoxOptions& options = {});

// Noiseless run: Steps 1-4 on L0 with expected degrees in place of observed
// ones. With exact eigenpairs the recovery is exact up to column order.
MembershipEstimate estimate_from_expected(const ExpectedAdjacency& omega, int k, double c = 0.1,
                                          double gamma = 0.05, double tau = 1.0);

namespace estimator_tol {
inline constexpr double degenerate_xi1 = 1e-10;    // relative to max |xi1|
inline constexpr double b1_floor = 1e-8;           // clamp for l1 + v'L1v
inline constexpr double simplex_condition = 1e10;  // barycentric system cap
inline constexpr double oracle_recovery = 1e-6;    // population closed loop
inline constexpr double row_sum = 1e-12;
}  // namespace estimator_tol

}  // namespace msl
