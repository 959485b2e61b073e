#pragma once

#include <string>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/estimator.hpp"
#include "msl/linalg.hpp"
#include "msl/spectral.hpp"

namespace msl {

// Noiseless spectral geometry of a DCMM triple: the population SCORE rows, the
// simplex vertices, the vertex scaling b1 and the barycentric weights.
struct PopulationGeometry {
    EigenPairs eigen;                // top-K pairs of L0
    Matrix r;                        // n x (K-1)
    Matrix vertices;                 // K x (K-1); row k from a pure node of community k
    std::vector<int> vertex_nodes;   // the pure node chosen per community
    Vector b1;                       // K
    Matrix w;                        // n x K barycentric weights
    Matrix vertices_from_b;          // independent route via Xi = H0^{-1/2} Theta Pi B
};

// Requires at least one exactly-pure node per community (MissingPureNode).
PopulationGeometry population_pipeline(const DegreeParams& theta, const MembershipMatrix& pi,
                                       const MixingMatrix& p, double tau);

struct SimplexReport {
    double max_vertex_deviation = 0.0;      // pure rows vs their vertex
    double max_hull_residual = 0.0;         // mixed rows vs the convex hull
    double max_membership_error = 0.0;      // closed-loop row l1 error
    double max_vertex_route_mismatch = 0.0; // pure-row vertices vs the B route
    bool within(double tol) const;
    std::string summary() const;
};

SimplexReport verify_simplex(const PopulationGeometry& geom, const MembershipMatrix& pi,
                             double tol);

// Distance from a point to the convex hull of the vertex rows, solved exactly
// over all active sets of the K barycentric weights.
double hull_residual(const Matrix& vertices, const Vector& point);

// Closed loop used by tests and the oracle report: feed the exact eigenpairs
// of L0 through the estimator's Step 4 and return the recovered memberships.
MembershipEstimate population_closed_loop(const PopulationGeometry& geom);

}  // namespace msl
