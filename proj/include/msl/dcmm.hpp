#pragma once

#include <string>
#include <vector>

#include "msl/errors.hpp"
#include "msl/linalg.hpp"
#include "msl/rng.hpp"

namespace msl {

// Per-node degree parameters theta with the cached mean.
struct DegreeParams {
    Vector theta;
    double theta_bar = 0.0;

    static DegreeParams from(Vector theta);
    int n() const { return static_cast<int>(theta.size()); }
    double norm2() const { return theta.norm(); }
};

// Row-stochastic membership matrix; row i is node i's PMF over K communities.
struct MembershipMatrix {
    Matrix pi;

    int n() const { return static_cast<int>(pi.rows()); }
    int k() const { return static_cast<int>(pi.cols()); }
    void validate(bool require_pure_rows = false) const;
    // Index of the first exactly-pure node per community, -1 when absent.
    std::vector<int> pure_node_per_community() const;
};

// Symmetric K x K community mixing matrix with unit diagonal.
struct MixingMatrix {
    Matrix p;

    int k() const { return static_cast<int>(p.rows()); }
};

struct IdentifiabilityReport {
    bool pass = false;
    bool symmetric = false;
    bool unit_diagonal = false;
    bool nonsingular = false;
    double max_diag_deviation = 0.0;
    double singular_value_ratio = 0.0;  // sigma_min / sigma_max
    std::string summary() const;
};

// Omega = Theta Pi P Pi' Theta. `clipped` counts entries clamped to 1 when the
// clipped builder was used.
struct ExpectedAdjacency {
    Matrix omega;
    long clipped = 0;

    int n() const { return static_cast<int>(omega.rows()); }
};

// Observed symmetric binary network with zero diagonal and cached degrees.
struct AdjacencyMatrix {
    int n = 0;
    Matrix edges;
    Vector degrees;
    double dbar = 0.0;

    static AdjacencyMatrix from_edges(Matrix edges);
};

IdentifiabilityReport validate_identifiability(const MixingMatrix& p);

// Strict builder: throws OmegaOutOfRange when any off-diagonal entry exceeds 1.
ExpectedAdjacency build_omega(const DegreeParams& theta, const MembershipMatrix& pi,
                              const MixingMatrix& p);

// Clamps entries to 1 instead of throwing; used by the simulation harness for
// heavy-tailed degree profiles where the model leaves the Bernoulli range.
ExpectedAdjacency build_omega_clipped(const DegreeParams& theta, const MembershipMatrix& pi,
                                      const MixingMatrix& p);

// Upper-triangular entries are independent Bernoulli(Omega(i,j)), mirrored.
AdjacencyMatrix sample_adjacency(const ExpectedAdjacency& omega, RandomSeed seed);

// First floor(pure_frac*n) nodes per community are pure. Mixed rows follow the
// K=2 recipe (t, 1-t) with t ~ Uniform(0,1); for K>2 a symmetric Dirichlet(1).
MembershipMatrix generate_membership(int n, int k, double pure_frac, RandomSeed seed);

}  // namespace msl
