#pragma once

#include <vector>

#include "msl/dcmm.hpp"
#include "msl/linalg.hpp"

namespace msl {

struct LaplacianConfig {
    double tau = 1.0;
};

// Top-k eigenpairs of a symmetric matrix, ordered by decreasing |lambda|.
// Ties in magnitude break by signed value descending, then position in the
// ascending spectrum. Each vector's sign is fixed so its largest-magnitude
// entry is positive (lowest index on ties); the first vector is instead
// aligned so its entry sum is positive.
struct EigenPairs {
    Vector values;   // k
    Matrix vectors;  // n x k, orthonormal columns
};

// L = H^{-1/2} A H^{-1/2} with H = diag(d) + tau*dbar*I.
Matrix regularized_laplacian(const AdjacencyMatrix& a, const LaplacianConfig& cfg);

// Expected value of the diagonal normalization: H0(i,i) = E[d_i] + tau*E[dbar].
Vector expected_h0(const ExpectedAdjacency& omega, double tau);

// L0 = H0^{-1/2} Omega H0^{-1/2}; the diagonal of Omega is retained.
Matrix population_laplacian(const ExpectedAdjacency& omega, const LaplacianConfig& cfg);

// Dense symmetric eigensolver: Householder tridiagonalization + implicit-shift
// QL for the full spectrum; the k selected eigenvectors come from rotation
// accumulation (small n or k close to n) or tridiagonal inverse iteration with
// reflector back-transform (k << n). Throws NotSymmetric if the input deviates
// from symmetry by more than 1e-10 (relative), ConvergenceFailure if the QL
// iteration exceeds 50n sweeps or a residual check fails.
EigenPairs top_k_eigen(const Matrix& m, int k);

// Read-only tolerances shared with tests.
namespace spectral_tol {
inline constexpr double symmetry = 1e-10;
inline constexpr double residual = 1e-8;       // * ||M||
inline constexpr double orthonormality = 1e-10;
inline constexpr long sweep_factor = 50;       // * n
}  // namespace spectral_tol

}  // namespace msl
