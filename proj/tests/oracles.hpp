// Test-only oracles, kept independent of the library implementation paths they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "msl/linalg.hpp"
#include "msl/rng.hpp"

namespace oracle {

// All three roots of the characteristic polynomial of a real 3x3 matrix with a
// real spectrum, via Cardano's trigonometric form. No iteration involved.
inline std::vector<double> cubic_eigenvalues(const msl::Matrix& m) {
    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                          m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    // lambda^3 - tr lambda^2 + minors lambda - det = 0; depress with x = lambda - tr/3.
    const double p = minors - tr * tr / 3.0;
    const double q = -2.0 * tr * tr * tr / 27.0 + tr * minors / 3.0 - det;
    const double shift = tr / 3.0;
    std::vector<double> roots;
    if (std::abs(p) < 1e-14 * std::max(1.0, tr * tr)) {
        const double r = std::cbrt(-q);
        roots = {r + shift, r + shift, r + shift};
    } else {
        const double a = std::sqrt(-4.0 * p / 3.0);
        double cosarg = -4.0 * q / (a * a * a);
        cosarg = std::clamp(cosarg, -1.0, 1.0);
        const double phi = std::acos(cosarg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(a * std::cos(phi - 2.0 * M_PI * k / 3.0) + shift);
    }
    std::sort(roots.begin(), roots.end(),
              [](double x, double y) { return std::abs(x) > std::abs(y); });
    return roots;
}

// Random symmetric matrix with entries ~ Uniform(-1, 1).
inline msl::Matrix random_symmetric(int n, msl::RngStream& rng) {
    msl::Matrix m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            const double v = rng.uniform(-1.0, 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

// Minimum assignment cost by brute force over all K! permutations. The cost of
// a permutation is summed in column order so it is bitwise comparable with any
// other evaluation that does the same.
inline double brute_force_assignment(const msl::Matrix& cost, std::vector<int>* best_perm = nullptr) {
    const int k = static_cast<int>(cost.rows());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> arg = perm;
    do {
        double total = 0.0;
        for (int l = 0; l < k; ++l) total += cost(perm[l], l);
        if (total < best) {
            best = total;
            arg = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_perm) *best_perm = arg;
    return best;
}

}  // namespace oracle
