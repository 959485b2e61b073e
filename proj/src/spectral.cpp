#include "msl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace msl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// ---------------------------------------------------------------------------
// Householder tridiagonalization. Works on the full symmetric matrix so every
// inner loop runs down contiguous columns. On exit d holds the diagonal, e the
// subdiagonal (e(i) couples i-1 and i, e(0) = 0), and the step-i reflector v
// lives in a(0..i-1, i) with h = v'v/2 in hs(i); hs(i) == 0 marks a skipped
// step.
// ---------------------------------------------------------------------------
void householder_tridiagonalize(Matrix& a, Vector& d, Vector& e, Vector& hs) {
    const int n = static_cast<int>(a.rows());
    d.resize(n);
    e = Vector::Zero(n);
    hs = Vector::Zero(n);

    Vector p(n), q(n);
    for (int i = n - 1; i >= 2; --i) {
        const int l = i - 1;
        double scale = 0.0;
        for (int k = 0; k <= l; ++k) scale += std::abs(a(k, i));
        if (scale == 0.0) {
            e(i) = 0.0;
            continue;
        }
        double h = 0.0;
        const double inv_scale = 1.0 / scale;
        for (int k = 0; k <= l; ++k) {
            const double t = a(k, i) * inv_scale;
            a(k, i) = t;
            h += t * t;
        }
        const double f = a(l, i);
        const double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e(i) = scale * g;
        h -= f * g;  // v'v / 2
        a(l, i) = f - g;
        hs(i) = h;

        // p = A v / h over the leading i x i block, accumulated column-wise.
        p.head(i).setZero();
        for (int c = 0; c <= l; ++c) {
            const double vc = a(c, i);
            if (vc != 0.0) p.head(i) += vc * a.col(c).head(i);
        }
        p.head(i) /= h;
        const double kc = 0.5 * p.head(i).dot(a.col(i).head(i)) / h;
        q.head(i) = p.head(i) - kc * a.col(i).head(i);

        // A <- A - v q' - q v' on the leading block (rank-2, symmetric).
        for (int c = 0; c <= l; ++c) {
            const double vc = a(c, i);
            const double qc = q(c);
            a.col(c).head(i) -= qc * a.col(i).head(i) + vc * q.head(i);
        }
    }
    if (n > 1) e(1) = a(0, 1);
    for (int i = 0; i < n; ++i) d(i) = a(i, i);
}

// Applies Q (the product of stored reflectors) to the columns of z in place.
void apply_q(const Matrix& a, const Vector& hs, Matrix& z) {
    const int n = static_cast<int>(a.rows());
    for (int i = 2; i <= n - 1; ++i) {
        if (hs(i) == 0.0) continue;
        const auto v = a.col(i).head(i);
        Eigen::RowVectorXd w = (v.transpose() * z.topRows(i)) / hs(i);
        z.topRows(i).noalias() -= v * w;
    }
}

// ---------------------------------------------------------------------------
// Implicit-shift QL on a tridiagonal (d, ee); ee(i) couples i and i+1. When z
// is non-null the rotations are accumulated into its columns. The total sweep
// budget is shared across eigenvalues.
// ---------------------------------------------------------------------------
void ql_implicit_shift(Vector& d, Vector& ee, Matrix* z, long max_sweeps) {
    const int n = static_cast<int>(d.size());
    long sweeps = 0;
    for (int l = 0; l < n; ++l) {
        for (;;) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d(m)) + std::abs(d(m + 1));
                if (std::abs(ee(m)) <= kEps * dd + std::numeric_limits<double>::min()) break;
            }
            if (m == l) break;
            if (++sweeps > max_sweeps) {
                std::ostringstream os;
                os << "QL iteration exceeded " << max_sweeps << " sweeps";
                throw ConvergenceFailure(os.str());
            }
            double g = (d(l + 1) - d(l)) / (2.0 * ee(l));
            double r = std::hypot(g, 1.0);
            g = d(m) - d(l) + ee(l) / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * ee(i);
                const double b = c * ee(i);
                r = std::hypot(f, g);
                ee(i + 1) = r;
                if (r == 0.0) {
                    d(i + 1) -= p;
                    ee(m) = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d(i + 1) - p;
                r = (d(i) - g) * s + 2.0 * c * b;
                p = s * r;
                d(i + 1) = g + p;
                g = c * r - b;
                if (z) {
                    for (int k = 0; k < z->rows(); ++k) {
                        f = (*z)(k, i + 1);
                        (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
                        (*z)(k, i) = c * (*z)(k, i) - s * f;
                    }
                }
            }
            if (underflow) continue;
            d(l) -= p;
            ee(l) = g;
            ee(m) = 0.0;
        }
    }
}

// ---------------------------------------------------------------------------
// Shifted tridiagonal solve via LU with partial pivoting (dgttrf/dgtts2
// layout). Tiny pivots are floored so inverse iteration can run at a shift
// equal to an eigenvalue.
// ---------------------------------------------------------------------------
struct ShiftedTridiagonalLu {
    int n = 0;
    Vector dl, dd, du, du2;
    std::vector<int> swapped;

    ShiftedTridiagonalLu(const Vector& diag, const Vector& off, double shift, double piv_floor) {
        n = static_cast<int>(diag.size());
        dd = diag.array() - shift;
        dl = Vector(std::max(n - 1, 0));
        du = Vector(std::max(n - 1, 0));
        for (int i = 0; i + 1 < n; ++i) {
            dl(i) = off(i);
            du(i) = off(i);
        }
        du2 = Vector::Zero(std::max(n - 2, 0));
        swapped.assign(std::max(n - 1, 0), 0);

        for (int i = 0; i + 1 < n; ++i) {
            const bool last = (i + 2 == n);
            if (std::abs(dd(i)) >= std::abs(dl(i))) {
                if (dd(i) == 0.0) dd(i) = piv_floor;
                const double fact = dl(i) / dd(i);
                dl(i) = fact;
                dd(i + 1) -= fact * du(i);
            } else {
                const double fact = dd(i) / dl(i);
                dd(i) = dl(i);
                dl(i) = fact;
                const double temp = du(i);
                du(i) = dd(i + 1);
                dd(i + 1) = temp - fact * dd(i + 1);
                if (!last) {
                    du2(i) = du(i + 1);
                    du(i + 1) = -fact * du(i + 1);
                }
                swapped[i] = 1;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (std::abs(dd(i)) < piv_floor) dd(i) = (dd(i) < 0.0) ? -piv_floor : piv_floor;
        }
    }

    void solve_in_place(Vector& b) const {
        for (int i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b(i + 1) -= dl(i) * b(i);
            } else {
                const double temp = b(i);
                b(i) = b(i + 1);
                b(i + 1) = temp - dl(i) * b(i);
            }
        }
        b(n - 1) /= dd(n - 1);
        if (n > 1) b(n - 2) = (b(n - 2) - du(n - 2) * b(n - 1)) / dd(n - 2);
        for (int i = n - 3; i >= 0; --i)
            b(i) = (b(i) - du(i) * b(i + 1) - du2(i) * b(i + 2)) / dd(i);
    }
};

// Deterministic start vectors for inverse iteration.
double xorshift_unit(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
}

// Eigenvectors of the tridiagonal (d, ee) for the selected eigenvalues, by
// inverse iteration. Selected values must be passed in the order the caller
// wants the columns; near-equal shifts are perturbed apart and orthogonalized
// during the iteration.
Matrix tridiagonal_vectors_inverse_iteration(const Vector& d, const Vector& ee,
                                             const std::vector<double>& lambdas) {
    const int n = static_cast<int>(d.size());
    const int k = static_cast<int>(lambdas.size());
    const double tnorm = std::max(d.cwiseAbs().maxCoeff() + (n > 1 ? ee.cwiseAbs().maxCoeff() : 0.0),
                                  std::numeric_limits<double>::min());
    const double piv_floor = kEps * tnorm;
    const double cluster_tol = 1e-10 * tnorm;

    Matrix vecs(n, k);
    Vector x(n);
    for (int j = 0; j < k; ++j) {
        // Count how many previous shifts sit within the cluster tolerance and
        // nudge this shift apart from them.
        int in_cluster = 0;
        for (int t = 0; t < j; ++t)
            if (std::abs(lambdas[t] - lambdas[j]) <= cluster_tol) ++in_cluster;
        const double shift = lambdas[j] + in_cluster * 10.0 * piv_floor;

        ShiftedTridiagonalLu lu(d, ee, shift, piv_floor);
        std::uint64_t state = 0x9E3779B97F4A7C15ULL + 0x100000001ULL * (j + 1);
        for (int i = 0; i < n; ++i) x(i) = xorshift_unit(state);
        x.normalize();

        for (int iter = 0; iter < 3; ++iter) {
            lu.solve_in_place(x);
            for (int t = 0; t < j; ++t) {
                if (std::abs(lambdas[t] - lambdas[j]) <= cluster_tol)
                    x -= vecs.col(t).dot(x) * vecs.col(t);
            }
            const double nx = x.norm();
            if (nx == 0.0 || !std::isfinite(nx)) {
                for (int i = 0; i < n; ++i) x(i) = xorshift_unit(state);
            }
            x.normalize();
        }
        vecs.col(j) = x;
    }

    // Two rounds of modified Gram-Schmidt pin global orthonormality without
    // disturbing the residuals (the mixing coefficients scale as eps/gap).
    for (int round = 0; round < 2; ++round) {
        for (int j = 0; j < k; ++j) {
            for (int t = 0; t < j; ++t) vecs.col(j) -= vecs.col(t).dot(vecs.col(j)) * vecs.col(t);
            const double nj = vecs.col(j).norm();
            if (nj > 0.0) vecs.col(j) /= nj;
        }
    }
    return vecs;
}

struct EigenOrder {
    double value;
    int position;
};

bool magnitude_order(const EigenOrder& a, const EigenOrder& b) {
    const double ma = std::abs(a.value), mb = std::abs(b.value);
    if (ma != mb) return ma > mb;
    if (a.value != b.value) return a.value > b.value;
    return a.position < b.position;
}

void fix_signs(Matrix& vectors) {
    for (int j = 0; j < vectors.cols(); ++j) {
        auto col = vectors.col(j);
        bool flip = false;
        if (j == 0) {
            const double sum = col.sum();
            if (sum != 0.0) {
                flip = sum < 0.0;
            } else {
                int arg = 0;
                col.cwiseAbs().maxCoeff(&arg);
                flip = col(arg) < 0.0;
            }
        } else {
            int arg = 0;
            col.cwiseAbs().maxCoeff(&arg);
            flip = col(arg) < 0.0;
        }
        if (flip) col = -col;
    }
}

void verify_pairs(const Matrix& s, const EigenPairs& pairs, double norm_bound) {
    const int k = static_cast<int>(pairs.values.size());
    for (int j = 0; j < k; ++j) {
        const double res = (s * pairs.vectors.col(j) - pairs.values(j) * pairs.vectors.col(j)).norm();
        if (res > spectral_tol::residual * std::max(norm_bound, std::numeric_limits<double>::min())) {
            std::ostringstream os;
            os << "eigenpair " << j << " residual " << res << " exceeds " << spectral_tol::residual
               << " * " << norm_bound;
            throw ConvergenceFailure(os.str());
        }
    }
    Matrix gram = pairs.vectors.transpose() * pairs.vectors;
    gram.diagonal().array() -= 1.0;
    if (max_abs(gram) > spectral_tol::orthonormality) {
        std::ostringstream os;
        os << "eigenvector orthonormality defect " << max_abs(gram);
        throw ConvergenceFailure(os.str());
    }
}

}  // namespace

Matrix regularized_laplacian(const AdjacencyMatrix& a, const LaplacianConfig& cfg) {
    if (a.n < 2) throw Error("regularized_laplacian: need n >= 2");
    if (cfg.tau < 0.0) throw Error("regularized_laplacian: tau must be nonnegative");
    Vector h = a.degrees.array() + cfg.tau * a.dbar;
    if ((h.array() <= 0.0).any()) {
        throw EmptyGraph("regularized_laplacian: H has a zero diagonal entry (empty graph or "
                         "isolated node with tau = 0)");
    }
    Vector w = h.array().rsqrt();
    Matrix l(a.n, a.n);
    for (int j = 0; j < a.n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double v = a.edges(i, j) * w(i) * w(j);
            l(i, j) = v;
            l(j, i) = v;
        }
    }
    return l;
}

Vector expected_h0(const ExpectedAdjacency& omega, double tau) {
    const int n = omega.n();
    Vector exp_deg(n);
    for (int i = 0; i < n; ++i) exp_deg(i) = omega.omega.row(i).sum() - omega.omega(i, i);
    const double exp_dbar = exp_deg.mean();
    return exp_deg.array() + tau * exp_dbar;
}

Matrix population_laplacian(const ExpectedAdjacency& omega, const LaplacianConfig& cfg) {
    const int n = omega.n();
    if (n < 2) throw Error("population_laplacian: need n >= 2");
    Vector h0 = expected_h0(omega, cfg.tau);
    if ((h0.array() <= 0.0).any())
        throw EmptyGraph("population_laplacian: H0 has a zero diagonal entry");
    Vector w = h0.array().rsqrt();
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double v = omega.omega(i, j) * w(i) * w(j);
            l(i, j) = v;
            l(j, i) = v;
        }
    }
    return l;
}

EigenPairs top_k_eigen(const Matrix& m, int k) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n || n == 0) throw Error("top_k_eigen: matrix must be square and non-empty");
    if (k < 1 || k > n) throw Error("top_k_eigen: k out of range");
    const double scale = std::max(1.0, max_abs(m));
    if (max_asymmetry(m) > spectral_tol::symmetry * scale) {
        std::ostringstream os;
        os << "top_k_eigen: asymmetry " << max_asymmetry(m) << " exceeds tolerance";
        throw NotSymmetric(os.str());
    }
    Matrix s = 0.5 * (m + m.transpose());

    if (n == 1) {
        EigenPairs out;
        out.values = Vector::Constant(1, s(0, 0));
        out.vectors = Matrix::Constant(1, 1, 1.0);
        return out;
    }

    Matrix work = s;
    Vector d, e, hs;
    householder_tridiagonalize(work, d, e, hs);
    Vector ee = Vector::Zero(n);
    for (int i = 0; i + 1 < n; ++i) ee(i) = e(i + 1);

    const long max_sweeps = spectral_tol::sweep_factor * static_cast<long>(n);
    const bool accumulate = (n <= 64) || (8 * k >= n);

    EigenPairs out;
    out.values = Vector(k);
    if (accumulate) {
        Matrix z = Matrix::Identity(n, n);
        apply_q(work, hs, z);
        Vector dd = d, eew = ee;
        ql_implicit_shift(dd, eew, &z, max_sweeps);
        std::vector<EigenOrder> order(n);
        for (int i = 0; i < n; ++i) order[i] = {dd(i), i};
        std::sort(order.begin(), order.end(), magnitude_order);
        out.vectors = Matrix(n, k);
        for (int j = 0; j < k; ++j) {
            out.values(j) = order[j].value;
            out.vectors.col(j) = z.col(order[j].position);
        }
        fix_signs(out.vectors);
        verify_pairs(s, out, std::abs(order[0].value));
    } else {
        Vector dd = d, eew = ee;
        ql_implicit_shift(dd, eew, nullptr, max_sweeps);
        std::vector<EigenOrder> order(n);
        for (int i = 0; i < n; ++i) order[i] = {dd(i), i};
        std::sort(order.begin(), order.end(), magnitude_order);
        std::vector<double> selected(k);
        for (int j = 0; j < k; ++j) {
            selected[j] = order[j].value;
            out.values(j) = order[j].value;
        }
        Matrix vecs = tridiagonal_vectors_inverse_iteration(d, ee, selected);
        apply_q(work, hs, vecs);
        out.vectors = std::move(vecs);
        fix_signs(out.vectors);
        verify_pairs(s, out, std::abs(order[0].value));
    }
    return out;
}

}  // namespace msl
