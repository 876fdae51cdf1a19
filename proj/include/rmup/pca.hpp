#pragma once

#include <Eigen/Dense>

namespace rmup {

struct PcaRotation {
    // Rows are unit-norm eigenvectors of the column covariance, ordered by
    // descending eigenvalue; sign fixed so each row's largest-magnitude entry
    // is positive. Rotating data is data * rotation.transpose().
    Eigen::MatrixXd rotation;
    Eigen::VectorXd eigenvalues;  // descending
    bool rank_deficient = false;
};

// Throws ValidationError when n_rows <= n_vars or data is non-finite.
// A rank-deficient covariance is not an error; it only sets the flag.
PcaRotation pca_rotation(const Eigen::MatrixXd& data);

// max |R R^T - I|, the orthonormality defect.
double orthonormality_defect(const Eigen::MatrixXd& r);

}  // namespace rmup
