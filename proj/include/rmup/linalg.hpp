#pragma once

#include <Eigen/Dense>

namespace rmup {

// Lower-triangular Cholesky factor of a symmetric PSD matrix. Retries with a
// growing diagonal jitter (starting at rel_jitter * mean diagonal) before
// giving up; throws NumericalError on persistent failure.
Eigen::MatrixXd chol_lower_with_jitter(Eigen::MatrixXd a, double rel_jitter = 1e-10);

// LLT factorization with the same jitter-retry policy, for repeated solves.
Eigen::LLT<Eigen::MatrixXd> llt_with_jitter(Eigen::MatrixXd a, double rel_jitter = 1e-10);

}  // namespace rmup
