#include <doctest.h>

#include <cmath>

#include "msl/spectral.hpp"
#include "oracles.hpp"

using namespace msl;

TEST_CASE("top_k_eigen identity") {
    Matrix m = Matrix::Identity(2, 2);
    auto pairs = top_k_eigen(m, 2);
    CHECK(pairs.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pairs.values(1) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix gram = pairs.vectors.transpose() * pairs.vectors;
    CHECK(max_abs(gram - Matrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("top_k_eigen 2x2 swap matrix") {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    auto pairs = top_k_eigen(m, 2);
    CHECK(pairs.values(0) == doctest::Approx(1.0));
    CHECK(pairs.values(1) == doctest::Approx(-1.0));
    const double s = 1.0 / std::sqrt(2.0);
    // Sign conventions: first vector sum-positive, second largest-entry
    // positive with ties broken at the lowest index.
    CHECK(pairs.vectors(0, 0) == doctest::Approx(s));
    CHECK(pairs.vectors(1, 0) == doctest::Approx(s));
    CHECK(pairs.vectors(0, 1) == doctest::Approx(s));
    CHECK(pairs.vectors(1, 1) == doctest::Approx(-s));
}

TEST_CASE("top_k_eigen matches cubic characteristic roots on random 3x3") {
    RngStream rng(2024, 7);
    for (int rep = 0; rep < 50; ++rep) {
        Matrix m = oracle::random_symmetric(3, rng);
        auto pairs = top_k_eigen(m, 3);
        auto roots = oracle::cubic_eigenvalues(m);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(pairs.values(j) - roots[j]) < 1e-10);
    }
}

TEST_CASE("top_k_eigen residual and orthonormality on random matrices") {
    RngStream rng(11, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 20 + 37 * rep;
        Matrix m = oracle::random_symmetric(n, rng);
        const int k = (rep % 3 == 0) ? n : std::min(4, n);
        auto pairs = top_k_eigen(m, k);
        const double norm = pairs.values.cwiseAbs().maxCoeff();
        for (int j = 0; j < k; ++j) {
            const double res = (m * pairs.vectors.col(j) - pairs.values(j) * pairs.vectors.col(j)).norm();
            CHECK(res <= 1e-8 * std::max(norm, 1e-300));
        }
        Matrix gram = pairs.vectors.transpose() * pairs.vectors;
        CHECK(max_abs(gram - Matrix::Identity(k, k)) <= 1e-10);
    }
}

TEST_CASE("top_k_eigen frobenius inequality and equality at k = n") {
    RngStream rng(5, 5);
    Matrix m = oracle::random_symmetric(30, rng);
    const double fro2 = m.squaredNorm();
    auto partial = top_k_eigen(m, 7);
    CHECK(partial.values.squaredNorm() <= fro2 + 1e-9 * fro2);
    auto full = top_k_eigen(m, 30);
    CHECK(full.values.squaredNorm() == doctest::Approx(fro2).epsilon(1e-10));
}

TEST_CASE("top_k_eigen both vector paths agree on eigenvalues") {
    RngStream rng(99, 1);
    Matrix m = oracle::random_symmetric(120, rng);
    auto few = top_k_eigen(m, 3);    // inverse-iteration path (8k < n)
    auto many = top_k_eigen(m, 40);  // accumulation path
    for (int j = 0; j < 3; ++j)
        CHECK(few.values(j) == doctest::Approx(many.values(j)).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) {
        const double overlap = std::abs(few.vectors.col(j).dot(many.vectors.col(j)));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("top_k_eigen rejects asymmetric input") {
    Matrix m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(top_k_eigen(m, 1), NotSymmetric);
}

TEST_CASE("regularized_laplacian hand-computed 2-node example") {
    Matrix edges(2, 2);
    edges << 0, 1, 1, 0;
    auto a = AdjacencyMatrix::from_edges(edges);
    Matrix l = regularized_laplacian(a, LaplacianConfig{1.0});
    CHECK(l(0, 0) == doctest::Approx(0.0));
    CHECK(l(0, 1) == doctest::Approx(0.5));
    CHECK(l(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("regularized_laplacian tau = 0 on a regular graph is A/r") {
    // 4-cycle: 2-regular.
    Matrix edges = Matrix::Zero(4, 4);
    auto link = [&](int i, int j) { edges(i, j) = edges(j, i) = 1.0; };
    link(0, 1); link(1, 2); link(2, 3); link(3, 0);
    auto a = AdjacencyMatrix::from_edges(edges);
    Matrix l = regularized_laplacian(a, LaplacianConfig{0.0});
    CHECK(max_abs(l - a.edges / 2.0) < 1e-14);
}

TEST_CASE("regularized_laplacian empty graph throws") {
    auto a = AdjacencyMatrix::from_edges(Matrix::Zero(3, 3));
    CHECK_THROWS_AS(regularized_laplacian(a, LaplacianConfig{1.0}), EmptyGraph);
}

TEST_CASE("laplacian norm stays below 1.5 for tau >= 1") {
    RngStream rng(21, 3);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 40;
        Matrix edges = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < j; ++i)
                if (rng.bernoulli(0.1)) edges(i, j) = edges(j, i) = 1.0;
        if (edges.sum() == 0.0) continue;
        auto a = AdjacencyMatrix::from_edges(edges);
        Matrix l = regularized_laplacian(a, LaplacianConfig{1.0});
        auto top = top_k_eigen(l, 1);
        CHECK(std::abs(top.values(0)) <= 1.5);
    }
}

TEST_CASE("perron vector of a connected graph is strictly positive") {
    // Path graph on 6 nodes.
    Matrix edges = Matrix::Zero(6, 6);
    for (int i = 0; i + 1 < 6; ++i) edges(i, i + 1) = edges(i + 1, i) = 1.0;
    auto a = AdjacencyMatrix::from_edges(edges);
    Matrix l = regularized_laplacian(a, LaplacianConfig{1.0});
    auto pairs = top_k_eigen(l, 2);
    CHECK((pairs.vectors.col(0).array() > 0.0).all());
}

TEST_CASE("population_laplacian 2-node example keeps the diagonal") {
    ExpectedAdjacency om;
    om.omega = Matrix(2, 2);
    const double p = 0.3;
    om.omega << 0.2, p, p, 0.2;
    Matrix l0 = population_laplacian(om, LaplacianConfig{1.0});
    // H0 = diag(p + p, p + p) = diag(2p, 2p); off-diagonal p / (2p) = 1/2.
    CHECK(l0(0, 1) == doctest::Approx(0.5));
    CHECK(l0(0, 0) == doctest::Approx(0.2 / (2.0 * p)));
}

TEST_CASE("population_laplacian is invariant to scaling omega") {
    RngStream rng(3, 9);
    ExpectedAdjacency om;
    om.omega = oracle::random_symmetric(8, rng).cwiseAbs();
    ExpectedAdjacency scaled;
    scaled.omega = 3.7 * om.omega;
    Matrix a = population_laplacian(om, LaplacianConfig{1.0});
    Matrix b = population_laplacian(scaled, LaplacianConfig{1.0});
    CHECK(max_abs(a - b) < 1e-12);
}
