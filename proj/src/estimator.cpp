#include "msl/estimator.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msl {

namespace {

ScoreEmbedding embed_matrix(const Matrix& s, int k) {
    ScoreEmbedding emb;
    emb.eigen = top_k_eigen(s, k);
    const auto& lam = emb.eigen.values;
    const double sqrt_k = std::sqrt(static_cast<double>(k));
    emb.delta_hat = std::max(0.0, std::min(sqrt_k * (lam(0) - lam(1)),
                                           k * std::abs(lam(k - 1))));

    const int n = static_cast<int>(s.rows());
    const Vector& xi1 = emb.eigen.vectors.col(0);
    const double cutoff = estimator_tol::degenerate_xi1 * xi1.cwiseAbs().maxCoeff();
    emb.degenerate.assign(n, 0);
    emb.r_hat = Matrix::Zero(n, k - 1);
    for (int i = 0; i < n; ++i) {
        if (std::abs(xi1(i)) < cutoff) {
            emb.degenerate[i] = 1;
            continue;
        }
        for (int c = 0; c + 1 < k; ++c) emb.r_hat(i, c) = emb.eigen.vectors(i, c + 1) / xi1(i);
    }
    return emb;
}

TrimSets trim_by_degrees(const Vector& degrees, double dbar, double delta_hat, double c,
                         double gamma, int k) {
    const int n = static_cast<int>(degrees.size());
    TrimSets out;
    const double threshold = c * std::pow(static_cast<double>(k), 3) * std::log(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        if (degrees(i) * delta_hat * delta_hat >= threshold) {
            out.keep.push_back(i);
            if (degrees(i) >= gamma * dbar) out.vh.push_back(i);
        }
    }
    if (!out.keep.empty() && static_cast<int>(out.vh.size()) < k) {
        std::ostringstream os;
        os << "vertex hunting set has " << out.vh.size() << " nodes, need K = " << k;
        throw VertexHuntingStarved(os.str());
    }
    return out;
}

MembershipEstimate all_uniform(const ScoreEmbedding& emb, int n, int k) {
    MembershipEstimate est;
    est.pi_hat = Matrix::Constant(n, k, 1.0 / k);
    est.flags.assign(n, NodeFlag::TrimmedUniform);
    for (int i = 0; i < n; ++i)
        if (emb.degenerate[i]) est.flags[i] = NodeFlag::DegenerateXi1;
    return est;
}

MembershipEstimate run_steps(const ScoreEmbedding& emb, const Vector& degrees, double dbar,
                             int k, double c, double gamma, bool trimming) {
    const int n = static_cast<int>(degrees.size());

    TrimSets trims;
    try {
        if (trimming) {
            trims = trim_by_degrees(degrees, dbar, emb.delta_hat, c, gamma, k);
        } else {
            trims.keep.resize(n);
            for (int i = 0; i < n; ++i) trims.keep[i] = i;
            trims.vh = trims.keep;
        }
    } catch (const Error& e) {
        throw PipelineError("trim_sets", e.what());
    }

    if (trims.keep.empty()) return all_uniform(emb, n, k);

    std::vector<int> candidates;
    for (int i : trims.vh)
        if (!emb.degenerate[i]) candidates.push_back(i);
    if (static_cast<int>(candidates.size()) < k) {
        std::ostringstream os;
        os << "only " << candidates.size() << " non-degenerate vertex-hunting candidates for K = "
           << k;
        throw PipelineError("vertex_hunting", VertexHuntingStarved(os.str()).what());
    }

    SimplexEstimate simplex;
    try {
        simplex = successive_projection(emb.r_hat, candidates, k);
    } catch (const Error& e) {
        throw PipelineError("successive_projection", e.what());
    }
    try {
        return reconstruct_memberships(emb, simplex, trims);
    } catch (const Error& e) {
        throw PipelineError("reconstruct_memberships", e.what());
    }
}

}  // namespace

ScoreEmbedding score_embedding(const AdjacencyMatrix& a, int k, const PrePcaMode& mode) {
    if (k < 2) throw Error("score_embedding: K must be at least 2");
    if (a.dbar <= 0.0) throw EmptyGraph("score_embedding: graph has no edges");
    if (mode.kind == PrePcaMode::Kind::Laplacian) {
        return embed_matrix(regularized_laplacian(a, LaplacianConfig{mode.tau}), k);
    }
    return embed_matrix(a.edges, k);
}

TrimSets trim_sets(const AdjacencyMatrix& a, double delta_hat, double c, double gamma, int k) {
    if (c <= 0.0) throw Error("trim_sets: c must be positive");
    if (gamma <= 0.0 || gamma >= 1.0) throw Error("trim_sets: gamma must lie in (0,1)");
    return trim_by_degrees(a.degrees, a.dbar, delta_hat, c, gamma, k);
}

SimplexEstimate successive_projection(const Matrix& points, const std::vector<int>& candidates,
                                      int k) {
    const int dim = static_cast<int>(points.cols());
    if (dim + 1 < k) throw Error("successive_projection: points have too few coordinates");
    if (static_cast<int>(candidates.size()) < k)
        throw Error("successive_projection: fewer candidates than K");
    std::vector<int> cand = candidates;
    std::sort(cand.begin(), cand.end());
    for (int i : cand) {
        if (i < 0 || i >= points.rows()) throw Error("successive_projection: candidate out of range");
        if (!points.row(i).allFinite()) throw Error("successive_projection: non-finite point");
    }

    // Affine augmentation: work with y_i = (1, r_i).
    Matrix basis(dim + 1, k);  // orthonormal basis of the chosen augmented vertices
    SimplexEstimate out;
    out.vertices = Matrix(k, dim);
    out.vertex_indices.resize(k);

    Vector y(dim + 1), resid(dim + 1);
    for (int pick = 0; pick < k; ++pick) {
        double best = -1.0;
        int best_idx = -1;
        Vector best_resid(dim + 1);
        for (int i : cand) {
            bool taken = false;
            for (int t = 0; t < pick; ++t) taken |= (out.vertex_indices[t] == i);
            if (taken) continue;
            y(0) = 1.0;
            y.tail(dim) = points.row(i).transpose();
            resid = y;
            for (int t = 0; t < pick; ++t) resid -= basis.col(t).dot(resid) * basis.col(t);
            const double norm = resid.norm();
            if (norm > best) {  // strict: ties keep the lowest index
                best = norm;
                best_idx = i;
                best_resid = resid;
            }
        }
        if (best < 1e-12) {
            std::ostringstream os;
            os << "residual " << best << " below 1e-12 at pick " << pick + 1 << " of " << k;
            throw RankDeficient(os.str());
        }
        out.vertex_indices[pick] = best_idx;
        out.vertices.row(pick) = points.row(best_idx);
        basis.col(pick) = best_resid / best;
    }
    return out;
}

MembershipEstimate reconstruct_memberships(const ScoreEmbedding& emb, SimplexEstimate& simplex,
                                           const TrimSets& trims) {
    const int k = static_cast<int>(emb.eigen.values.size());
    const int n = static_cast<int>(emb.r_hat.rows());

    // Barycentric system: row 0 enforces sum(w) = 1, the rest matches r-hat.
    Matrix sys(k, k);
    sys.row(0).setOnes();
    for (int c = 0; c < k; ++c) sys.col(c).tail(k - 1) = simplex.vertices.row(c).transpose();
    {
        Eigen::JacobiSVD<Matrix> svd(sys);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / std::max(sv(k - 1), 1e-300);
        if (cond >= estimator_tol::simplex_condition) {
            std::ostringstream os;
            os << "barycentric system condition number " << cond;
            throw IllConditionedSimplex(os.str());
        }
    }
    Eigen::PartialPivLU<Matrix> lu(sys);

    // b1(k) = [l1 + v_k' diag(l2..lK) v_k]^{-1/2}, argument floored at 1e-8.
    simplex.b1_hat = Vector(k);
    simplex.b1_clamped = false;
    const Vector lambda_tail = emb.eigen.values.tail(k - 1);
    for (int c = 0; c < k; ++c) {
        const Vector v = simplex.vertices.row(c).transpose();
        double arg = emb.eigen.values(0) + v.dot(lambda_tail.asDiagonal() * v);
        if (arg < estimator_tol::b1_floor) {
            arg = estimator_tol::b1_floor;
            simplex.b1_clamped = true;
        }
        simplex.b1_hat(c) = 1.0 / std::sqrt(arg);
    }

    MembershipEstimate est;
    est.pi_hat = Matrix::Constant(n, k, 1.0 / k);
    est.flags.assign(n, NodeFlag::TrimmedUniform);
    est.b1_clamped = simplex.b1_clamped;

    Vector rhs(k), pi_star(k);
    for (int i : trims.keep) {
        if (emb.degenerate[i]) {
            est.flags[i] = NodeFlag::DegenerateXi1;
            continue;
        }
        rhs(0) = 1.0;
        rhs.tail(k - 1) = emb.r_hat.row(i).transpose();
        const Vector w = lu.solve(rhs);
        for (int c = 0; c < k; ++c) pi_star(c) = std::max(w(c) / simplex.b1_hat(c), 0.0);
        const double sum = pi_star.sum();
        if (sum <= 0.0) {
            ++est.clipped_to_zero;  // fall back to uniform, flagged via counter
        } else {
            est.pi_hat.row(i) = (pi_star / sum).transpose();
        }
        est.flags[i] = NodeFlag::Estimated;
    }
    for (int i = 0; i < n; ++i) {
        if (emb.degenerate[i] && est.flags[i] == NodeFlag::TrimmedUniform)
            est.flags[i] = NodeFlag::DegenerateXi1;
    }
    return est;
}

MembershipEstimate mixed_score_laplacian(const AdjacencyMatrix& a, int k, double c, double gamma,
                                         double tau) {
    ScoreEmbedding emb;
    try {
        emb = score_embedding(a, k, PrePcaMode::laplacian(tau));
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError("score_embedding", e.what());
    }
    if (c <= 0.0) throw PipelineError("trim_sets", "c must be positive");
    if (gamma <= 0.0 || gamma >= 1.0) throw PipelineError("trim_sets", "gamma must lie in (0,1)");
    return run_steps(emb, a.degrees, a.dbar, k, c, gamma, /*trimming=*/true);
}

MembershipEstimate orthodox_mixed_score(const AdjacencyMatrix& a, int k,
                                        const OrthodoxOptions& options) {
    ScoreEmbedding emb;
    try {
        emb = score_embedding(a, k, PrePcaMode::identity());
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError("score_embedding", e.what());
    }
    return run_steps(emb, a.degrees, a.dbar, k, options.c, options.gamma, options.trimming);
}

MembershipEstimate estimate_from_expected(const ExpectedAdjacency& omega, int k, double c,
                                          double gamma, double tau) {
    const int n = omega.n();
    ScoreEmbedding emb;
    Vector exp_deg(n);
    try {
        Matrix l0 = population_laplacian(omega, LaplacianConfig{tau});
        emb = embed_matrix(l0, k);
        for (int i = 0; i < n; ++i) exp_deg(i) = omega.omega.row(i).sum() - omega.omega(i, i);
    } catch (const Error& e) {
        throw PipelineError("score_embedding", e.what());
    }
    return run_steps(emb, exp_deg, exp_deg.mean(), k, c, gamma, /*trimming=*/true);
}

}  // namespace msl
