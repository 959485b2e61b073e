// Timing probe for the dense eigensolver at experiment scale.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "msl/spectral.hpp"
#include "msl/rng.hpp"

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
    const int k = argc > 2 ? std::atoi(argv[2]) : 2;
    msl::RngStream rng(1, 0);
    msl::Matrix m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);

    const auto t0 = std::chrono::steady_clock::now();
    auto pairs = msl::top_k_eigen(m, k);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
        const double res =
            (m * pairs.vectors.col(j) - pairs.values(j) * pairs.vectors.col(j)).norm();
        worst = std::max(worst, res);
    }
    std::printf("n=%d k=%d: %.2fs, lambda_1=%.6f, worst residual %.3e\n", n, k, secs,
                pairs.values(0), worst);
    return 0;
}
