#include "msl/population.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace msl {

PopulationGeometry population_pipeline(const DegreeParams& theta, const MembershipMatrix& pi,
                                       const MixingMatrix& p, double tau) {
    const int n = theta.n();
    const int k = pi.k();
    pi.validate();
    const auto pure = pi.pure_node_per_community();
    for (int c = 0; c < k; ++c) {
        if (pure[c] < 0) {
            std::ostringstream os;
            os << "community " << c << " has no pure node";
            throw MissingPureNode(os.str());
        }
    }

    auto omega = build_omega(theta, pi, p);
    Matrix l0 = population_laplacian(omega, LaplacianConfig{tau});
    Vector h0 = expected_h0(omega, tau);

    PopulationGeometry geom;
    geom.eigen = top_k_eigen(l0, k);

    const Vector& xi1 = geom.eigen.vectors.col(0);
    if ((xi1.array() <= 0.0).any())
        throw Error("population_pipeline: xi_1 is not strictly positive");

    geom.r = Matrix(n, k - 1);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c + 1 < k; ++c) geom.r(i, c) = geom.eigen.vectors(i, c + 1) / xi1(i);

    geom.vertex_nodes.assign(pure.begin(), pure.end());
    geom.vertices = Matrix(k, k - 1);
    for (int c = 0; c < k; ++c) geom.vertices.row(c) = geom.r.row(pure[c]);

    geom.b1 = Vector(k);
    const Vector lambda_tail = geom.eigen.values.tail(k - 1);
    for (int c = 0; c < k; ++c) {
        const Vector v = geom.vertices.row(c).transpose();
        const double arg = geom.eigen.values(0) + v.dot(lambda_tail.asDiagonal() * v);
        if (arg <= 0.0) throw Error("population_pipeline: lambda_1 + v'Lambda_1 v not positive");
        geom.b1(c) = 1.0 / std::sqrt(arg);
    }

    geom.w = Matrix(n, k);
    for (int i = 0; i < n; ++i) {
        Vector wi = pi.pi.row(i).transpose().cwiseProduct(geom.b1);
        geom.w.row(i) = (wi / wi.lpNorm<1>()).transpose();
    }

    // Independent vertex route: solve Xi = H0^{-1/2} Theta Pi B for B, then
    // v_k(l) = B(k, l+1) / B(k, 0).
    Matrix scaled = (theta.theta.array() * h0.array().rsqrt()).matrix().asDiagonal() * pi.pi;
    Matrix b = scaled.colPivHouseholderQr().solve(geom.eigen.vectors);
    geom.vertices_from_b = Matrix(k, k - 1);
    for (int c = 0; c < k; ++c)
        for (int l = 0; l + 1 < k; ++l) geom.vertices_from_b(c, l) = b(c, l + 1) / b(c, 0);

    return geom;
}

double hull_residual(const Matrix& vertices, const Vector& point) {
    const int k = static_cast<int>(vertices.rows());
    const int dim = static_cast<int>(vertices.cols());
    double best = std::numeric_limits<double>::infinity();
    // Exhaust the active sets: for each nonempty subset of free weights solve
    // the equality-constrained least squares and keep feasible solutions.
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<int> free_idx;
        for (int c = 0; c < k; ++c)
            if (mask & (1u << c)) free_idx.push_back(c);
        const int m = static_cast<int>(free_idx.size());
        // minimize ||A w - point||^2 s.t. 1'w = 1 via KKT.
        Matrix a(dim, m);
        for (int j = 0; j < m; ++j) a.col(j) = vertices.row(free_idx[j]).transpose();
        Matrix kkt = Matrix::Zero(m + 1, m + 1);
        kkt.topLeftCorner(m, m) = 2.0 * a.transpose() * a;
        kkt.topRightCorner(m, 1).setOnes();
        kkt.bottomLeftCorner(1, m).setOnes();
        Vector rhs = Vector::Zero(m + 1);
        rhs.head(m) = 2.0 * a.transpose() * point;
        rhs(m) = 1.0;
        Eigen::FullPivLU<Matrix> lu(kkt);
        if (!lu.isInvertible()) continue;
        Vector sol = lu.solve(rhs);
        bool feasible = true;
        for (int j = 0; j < m; ++j) feasible &= (sol(j) >= -1e-12);
        if (!feasible) continue;
        const double res = (a * sol.head(m) - point).norm();
        best = std::min(best, res);
    }
    return best;
}

MembershipEstimate population_closed_loop(const PopulationGeometry& geom) {
    const int n = static_cast<int>(geom.r.rows());
    const int k = static_cast<int>(geom.vertices.rows());
    ScoreEmbedding emb;
    emb.eigen = geom.eigen;
    emb.r_hat = geom.r;
    const auto& lam = geom.eigen.values;
    emb.delta_hat = std::max(0.0, std::min(std::sqrt(static_cast<double>(k)) * (lam(0) - lam(1)),
                                           k * std::abs(lam(k - 1))));
    emb.degenerate.assign(n, 0);

    TrimSets trims;
    trims.keep.resize(n);
    for (int i = 0; i < n; ++i) trims.keep[i] = i;
    trims.vh = trims.keep;

    SimplexEstimate simplex;
    simplex.vertices = geom.vertices;
    simplex.vertex_indices = geom.vertex_nodes;
    return reconstruct_memberships(emb, simplex, trims);
}

bool SimplexReport::within(double tol) const {
    return max_vertex_deviation <= tol && max_hull_residual <= tol &&
           max_membership_error <= tol && max_vertex_route_mismatch <= tol;
}

std::string SimplexReport::summary() const {
    std::ostringstream os;
    os << "max vertex deviation (pure nodes): " << max_vertex_deviation << "\n"
       << "max hull residual (mixed nodes):   " << max_hull_residual << "\n"
       << "max membership recovery error:     " << max_membership_error << "\n"
       << "vertex route mismatch (B-based):   " << max_vertex_route_mismatch;
    return os.str();
}

SimplexReport verify_simplex(const PopulationGeometry& geom, const MembershipMatrix& pi,
                             double tol) {
    SimplexReport rep;
    const int n = pi.n();
    const int k = pi.k();

    for (int i = 0; i < n; ++i) {
        int pure_comm = -1;
        for (int c = 0; c < k; ++c)
            if (pi.pi(i, c) == 1.0) pure_comm = c;
        const Vector ri = geom.r.row(i).transpose();
        if (pure_comm >= 0) {
            const double dev = (ri - geom.vertices.row(pure_comm).transpose()).norm();
            rep.max_vertex_deviation = std::max(rep.max_vertex_deviation, dev);
        } else {
            rep.max_hull_residual = std::max(rep.max_hull_residual, hull_residual(geom.vertices, ri));
        }
    }

    auto est = population_closed_loop(geom);
    // The closed loop recovers columns in vertex order; compare after aligning
    // columns by the vertex communities.
    Matrix aligned(n, k);
    for (int c = 0; c < k; ++c) {
        int comm = -1;
        for (int cc = 0; cc < k; ++cc)
            if (pi.pi(geom.vertex_nodes[c], cc) == 1.0) comm = cc;
        aligned.col(comm >= 0 ? comm : c) = est.pi_hat.col(c);
    }
    for (int i = 0; i < n; ++i) {
        const double err = (aligned.row(i) - pi.pi.row(i)).cwiseAbs().sum();
        rep.max_membership_error = std::max(rep.max_membership_error, err);
    }

    rep.max_vertex_route_mismatch = max_abs(geom.vertices - geom.vertices_from_b);
    (void)tol;
    return rep;
}

}  // namespace msl
