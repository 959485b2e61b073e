#include "msl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace msl {

std::vector<int> hungarian_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n || n == 0) throw Error("hungarian_assignment: cost must be square");
    const double inf = std::numeric_limits<double>::infinity();
    // Potentials-based augmenting path method, 1-indexed with column 0 as the
    // virtual root.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_of_col(n);
    for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
    return row_of_col;
}

namespace {

Vector loss_weights(const Matrix& pi, const LossSpec& spec, const DegreeParams* theta) {
    const int n = static_cast<int>(pi.rows());
    if (spec.p == 0.0) return Vector::Ones(n);
    if (!theta) throw Error("loss: theta required when p > 0");
    if (theta->n() != n) throw Error("loss: theta length mismatch");
    return (theta->theta / theta->theta_bar).array().pow(spec.p);
}

double permutation_cost(const Matrix& pi_hat, const Matrix& pi, const Vector& w, double q,
                        const std::vector<int>& perm) {
    const int n = static_cast<int>(pi.rows());
    const int k = static_cast<int>(pi.cols());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int l = 0; l < k; ++l) row += std::pow(std::abs(pi_hat(i, perm[l]) - pi(i, l)), q);
        total += w(i) * row;
    }
    return total;
}

}  // namespace

std::vector<int> align_permutation(const Matrix& pi_hat, const Matrix& pi, const LossSpec& spec,
                                   const DegreeParams* theta) {
    if (pi_hat.rows() != pi.rows() || pi_hat.cols() != pi.cols())
        throw Error("align_permutation: shape mismatch");
    if (spec.q < 1.0) throw Error("align_permutation: q must be >= 1");
    const int k = static_cast<int>(pi.cols());
    const Vector w = loss_weights(pi, spec, theta);

    if (spec.q == 1.0) {
        Matrix cost(k, k);
        for (int kk = 0; kk < k; ++kk)
            for (int l = 0; l < k; ++l) {
                double c = 0.0;
                for (int i = 0; i < pi.rows(); ++i)
                    c += w(i) * std::abs(pi_hat(i, kk) - pi(i, l));
                cost(kk, l) = c;
            }
        return hungarian_assignment(cost);
    }

    if (k > 8)
        throw KTooLargeForExhaustive("align_permutation: q != 1 limited to K <= 8");
    std::vector<int> perm(k), best(k);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        const double c = permutation_cost(pi_hat, pi, w, spec.q, perm);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

AlignedLoss loss(const Matrix& pi_hat, const Matrix& pi, const DegreeParams* theta,
                 const LossSpec& spec) {
    AlignedLoss out;
    out.permutation = align_permutation(pi_hat, pi, spec, theta);
    const int n = static_cast<int>(pi.rows());
    const int k = static_cast<int>(pi.cols());
    const Vector w = loss_weights(pi, spec, theta);
    out.nodewise = Vector(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int l = 0; l < k; ++l)
            row += std::pow(std::abs(pi_hat(i, out.permutation[l]) - pi(i, l)), spec.q);
        out.nodewise(i) = row;
        total += w(i) * row;
    }
    out.value = std::pow(total / n, 1.0 / spec.q);
    return out;
}

std::vector<std::pair<double, double>> nodewise_errors(const AlignedLoss& aligned,
                                                       const DegreeParams& theta, bool cap) {
    if (aligned.nodewise.size() != theta.n())
        throw Error("nodewise_errors: theta length mismatch");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(theta.n());
    for (int i = 0; i < theta.n(); ++i) {
        if (cap && theta.theta(i) > theta.theta_bar) continue;
        pairs.emplace_back(theta.theta(i), aligned.nodewise(i));
    }
    return pairs;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs, int* excluded_zero) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0, excluded = 0;
    for (const auto& [t, e] : pairs) {
        if (e <= 0.0) {
            ++excluded;
            continue;
        }
        const double x = std::log(t), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (excluded_zero) *excluded_zero = excluded;
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (m * sxy - sx * sy) / denom;
}

}  // namespace msl
