#pragma once

#include "orderdp/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace orderdp {

struct SpectralEstimate {
    double rho = 0.0;
    double lower = 0.0;  // Collatz-Wielandt bounds at the final iterate
    double upper = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Perron root of |K| by power iteration. The iteration runs on |K| + I so
/// periodic matrices still converge, and stops once the Collatz-Wielandt
/// bracket min_i (Mx)_i / x_i <= rho + 1 <= max_i (Mx)_i / x_i is narrower
/// than tol.
inline SpectralEstimate spectral_radius(const Eigen::MatrixXd& K, double tol = 1e-10, int max_iter = 100000) {
    if (K.rows() != K.cols()) throw DimensionError("spectral radius needs a square matrix");
    SpectralEstimate est;
    if (K.rows() == 0) {
        est.converged = true;
        return est;
    }
    const Eigen::MatrixXd A = K.cwiseAbs();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(K.rows());
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd y = A * x + x;
        const Eigen::ArrayXd ratio = y.array() / x.array();
        est.lower = ratio.minCoeff() - 1.0;
        est.upper = ratio.maxCoeff() - 1.0;
        est.rho = std::max(0.0, 0.5 * (est.lower + est.upper));
        est.iterations = it;
        if (est.upper - est.lower <= tol) {
            est.converged = true;
            return est;
        }
        x = y / y.maxCoeff();
        // Entries can underflow on reducible matrices; keep the bracket defined.
        x = x.cwiseMax(1e-300);
    }
    return est;
}

} // namespace orderdp
