#include "rmup/linalg.hpp"

#include "rmup/errors.hpp"

namespace rmup {

namespace {

double mean_diagonal(const Eigen::MatrixXd& a) {
    const double t = a.diagonal().sum();
    return t > 0.0 ? t / static_cast<double>(a.rows()) : 1.0;
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> llt_with_jitter(Eigen::MatrixXd a, double rel_jitter) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt;
    double jitter = rel_jitter * mean_diagonal(a);
    for (int attempt = 0; attempt < 6; ++attempt, jitter *= 100.0) {
        Eigen::MatrixXd b = a;
        b.diagonal().array() += jitter;
        llt.compute(b);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw NumericalError("Cholesky factorization failed even with diagonal jitter");
}

Eigen::MatrixXd chol_lower_with_jitter(Eigen::MatrixXd a, double rel_jitter) {
    return llt_with_jitter(std::move(a), rel_jitter).matrixL();
}

}  // namespace rmup
