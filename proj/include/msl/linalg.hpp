#pragma once

#include <Eigen/Dense>

namespace msl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_asymmetry(const Matrix& m) {
    double v = 0.0;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < j; ++i)
            v = std::max(v, std::abs(m(i, j) - m(j, i)));
    return v;
}

}  // namespace msl
