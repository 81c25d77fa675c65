#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fris/grid.hpp"

namespace fris {

/// Zero-order spherical Bessel function of the first kind, j0(x) = sin(x)/x.
inline double sinc_j0(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        // series keeps full precision where sin(x)/x would cancel
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

/// Spatial correlation matrix of the element lattice together with its
/// symmetric PSD square root. Immutable after construction; safe to share
/// across threads.
struct correlation_model {
    Eigen::MatrixXd j;
    Eigen::MatrixXd j_sqrt;
    double eigen_floor = 0.0;
};

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// `eigen_floor` are clamped to it before taking the root, so the returned
/// R satisfies R*R = Q*clamp(L)*Q^T. Dense sub-half-wavelength grids make
/// the correlation matrix numerically rank-deficient; the default floor of
/// zero turns the tiny negative eigenvalues that result into exact zeros.
inline Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& j, double eigen_floor = 0.0) {
    if (j.rows() != j.cols())
        throw std::invalid_argument("matrix_sqrt: matrix must be square");
    if (!j.allFinite())
        throw std::invalid_argument("matrix_sqrt: matrix has non-finite entries");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
    if (eig.info() != Eigen::Success)
        throw std::invalid_argument("matrix_sqrt: eigendecomposition failed");

    Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(eigen_floor);
    return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

/// Jake's-model correlation: J[i][j] = j0(2*pi*d_ij / lambda).
inline correlation_model build_correlation(const surface_grid& grid,
                                           double eigen_floor = 0.0) {
    grid.validate();
    const int m = grid.element_count();
    const double k = 2.0 * M_PI / grid.wavelength_m;

    correlation_model model;
    model.eigen_floor = eigen_floor;
    model.j.resize(m, m);
    for (int a = 0; a < m; ++a) {
        model.j(a, a) = 1.0;
        for (int b = a + 1; b < m; ++b) {
            const double value = sinc_j0(k * pairwise_distance(a, b, grid));
            model.j(a, b) = value;
            model.j(b, a) = value;
        }
    }
    model.j_sqrt = matrix_sqrt(model.j, eigen_floor);
    return model;
}

} // namespace fris
