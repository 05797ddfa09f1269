#pragma once

// Dense helpers for symmetric matrices that annihilate the constant vector
// (Kuramoto Jacobians and their graphon discretisations).

#include <Eigen/Dense>

namespace gk::linalg {

/// Q^T M Q for an orthonormal basis Q of the mean-zero subspace, built from
/// the Householder reflector that maps 1/sqrt(n) to the last unit vector.
/// Returns the leading (n-1) x (n-1) block.
Eigen::MatrixXd restrict_to_mean_zero(const Eigen::MatrixXd& m);

/// Maps coordinates in that basis back to a mean-zero vector in R^n.
Eigen::VectorXd lift_from_mean_zero(const Eigen::VectorXd& y);

/// Ascending eigenvalues of a symmetric matrix (no eigenvectors).
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

/// Eigenpair of a symmetric matrix whose eigenvalue is closest to `target`:
/// eigenvalues first, then inverse iteration for the one vector needed.
struct Eigenpair {
    double value;
    Eigen::VectorXd vector;  // unit Euclidean norm
};
Eigenpair symmetric_eigenpair_near(const Eigen::MatrixXd& m, double target);

}  // namespace gk::linalg
