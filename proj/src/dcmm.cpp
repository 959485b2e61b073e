#include "msl/dcmm.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace msl {

namespace {
constexpr double kSumTol = 1e-12;
}

DegreeParams DegreeParams::from(Vector theta) {
    if (theta.size() == 0) throw Error("DegreeParams: empty theta");
    if ((theta.array() <= 0.0).any()) throw Error("DegreeParams: theta entries must be strictly positive");
    DegreeParams out;
    out.theta_bar = theta.mean();
    out.theta = std::move(theta);
    return out;
}

void MembershipMatrix::validate(bool require_pure_rows) const {
    const int nn = n(), kk = k();
    if (nn == 0 || kk == 0) throw Error("MembershipMatrix: empty");
    for (int i = 0; i < nn; ++i) {
        double sum = 0.0;
        for (int c = 0; c < kk; ++c) {
            const double v = pi(i, c);
            if (v < 0.0 || v > 1.0) {
                std::ostringstream os;
                os << "MembershipMatrix: entry (" << i << "," << c << ") = " << v << " outside [0,1]";
                throw Error(os.str());
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSumTol) {
            std::ostringstream os;
            os << "MembershipMatrix: row " << i << " sums to " << sum;
            throw Error(os.str());
        }
    }
    if (require_pure_rows) {
        for (int c : pure_node_per_community()) {
            if (c < 0) throw Error("MembershipMatrix: some community has no pure node");
        }
    }
}

std::vector<int> MembershipMatrix::pure_node_per_community() const {
    std::vector<int> first(k(), -1);
    for (int i = 0; i < n(); ++i) {
        for (int c = 0; c < k(); ++c) {
            if (pi(i, c) == 1.0 && first[c] < 0) first[c] = i;
        }
    }
    return first;
}

std::string IdentifiabilityReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail")
       << " (symmetric=" << symmetric
       << ", unit_diagonal=" << unit_diagonal
       << " [max dev " << max_diag_deviation << "]"
       << ", nonsingular=" << nonsingular
       << " [sv ratio " << singular_value_ratio << "])";
    return os.str();
}

IdentifiabilityReport validate_identifiability(const MixingMatrix& p) {
    IdentifiabilityReport rep;
    const auto& m = p.p;
    if (m.rows() != m.cols() || m.rows() == 0) return rep;
    rep.symmetric = max_asymmetry(m) <= 1e-12 * std::max(1.0, max_abs(m));
    rep.max_diag_deviation = (m.diagonal().array() - 1.0).abs().maxCoeff();
    rep.unit_diagonal = rep.max_diag_deviation <= 1e-12;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    rep.singular_value_ratio = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
    rep.nonsingular = sv(sv.size() - 1) > 1e-10 * sv(0);
    rep.pass = rep.symmetric && rep.unit_diagonal && rep.nonsingular;
    return rep;
}

namespace {

ExpectedAdjacency build_omega_impl(const DegreeParams& theta, const MembershipMatrix& pi,
                                   const MixingMatrix& p, bool clip) {
    const int n = theta.n();
    if (pi.n() != n) throw Error("build_omega: theta/pi dimension mismatch");
    if (pi.k() != p.k()) throw Error("build_omega: pi/p dimension mismatch");
    if ((p.p.array() < 0.0).any()) throw Error("build_omega: P has negative entries");
    const auto rep = validate_identifiability(p);
    if (!rep.pass) throw Error("build_omega: P fails identifiability: " + rep.summary());

    Matrix tp = theta.theta.asDiagonal() * pi.pi;  // n x K
    Matrix omega = tp * p.p * tp.transpose();

    ExpectedAdjacency out;
    out.omega = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            double v = omega(i, j);
            if (i != j && v > 1.0) {
                if (clip) {
                    v = 1.0;
                    ++out.clipped;
                } else {
                    std::ostringstream os;
                    os << "Omega(" << i << "," << j << ") = " << v << " exceeds 1";
                    throw OmegaOutOfRange(os.str());
                }
            }
            out.omega(i, j) = v;
            out.omega(j, i) = v;
        }
    }
    return out;
}

}  // namespace

ExpectedAdjacency build_omega(const DegreeParams& theta, const MembershipMatrix& pi,
                              const MixingMatrix& p) {
    return build_omega_impl(theta, pi, p, false);
}

ExpectedAdjacency build_omega_clipped(const DegreeParams& theta, const MembershipMatrix& pi,
                                      const MixingMatrix& p) {
    return build_omega_impl(theta, pi, p, true);
}

AdjacencyMatrix AdjacencyMatrix::from_edges(Matrix edges) {
    const int n = static_cast<int>(edges.rows());
    if (edges.cols() != n) throw Error("AdjacencyMatrix: not square");
    AdjacencyMatrix a;
    a.n = n;
    a.degrees = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
        if (edges(j, j) != 0.0) throw Error("AdjacencyMatrix: nonzero diagonal");
        for (int i = 0; i < j; ++i) {
            const double v = edges(i, j);
            if (v != 0.0 && v != 1.0) throw Error("AdjacencyMatrix: entries must be 0/1");
            if (v != edges(j, i)) throw Error("AdjacencyMatrix: not symmetric");
            a.degrees(i) += v;
            a.degrees(j) += v;
        }
    }
    a.dbar = a.degrees.mean();
    a.edges = std::move(edges);
    return a;
}

AdjacencyMatrix sample_adjacency(const ExpectedAdjacency& omega, RandomSeed seed) {
    const int n = omega.n();
    RngStream rng(seed);
    Matrix edges = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const double p = omega.omega(i, j);
            if (p < 0.0 || p > 1.0) throw Error("sample_adjacency: Omega entry outside [0,1]");
            const double v = rng.bernoulli(p) ? 1.0 : 0.0;
            edges(i, j) = v;
            edges(j, i) = v;
        }
    }
    return AdjacencyMatrix::from_edges(std::move(edges));
}

MembershipMatrix generate_membership(int n, int k, double pure_frac, RandomSeed seed) {
    if (n <= 0 || k <= 0) throw Error("generate_membership: n and k must be positive");
    if (pure_frac < 0.0 || static_cast<double>(k) * pure_frac > 1.0) {
        std::ostringstream os;
        os << "generate_membership: K*pure_frac = " << k * pure_frac << " exceeds 1";
        throw InvalidFraction(os.str());
    }
    const int per_comm = static_cast<int>(std::floor(pure_frac * n));
    RngStream rng(seed);

    MembershipMatrix out;
    out.pi = Matrix::Zero(n, k);
    int row = 0;
    for (int c = 0; c < k; ++c)
        for (int j = 0; j < per_comm; ++j) out.pi(row++, c) = 1.0;

    for (; row < n; ++row) {
        if (k == 1) {
            out.pi(row, 0) = 1.0;
        } else if (k == 2) {
            const double t = rng.uniform01();
            out.pi(row, 0) = t;
            out.pi(row, 1) = 1.0 - t;
        } else {
            // Symmetric Dirichlet(1): normalized Exp(1) draws, last coordinate
            // closed so the row sums to 1 exactly.
            Vector g(k);
            for (int c = 0; c < k; ++c) g(c) = -std::log(rng.uniform01_open_low());
            g /= g.sum();
            double partial = 0.0;
            for (int c = 0; c < k - 1; ++c) {
                out.pi(row, c) = g(c);
                partial += g(c);
            }
            out.pi(row, k - 1) = 1.0 - partial;
        }
    }
    return out;
}

}  // namespace msl
