#include "rmup/pca.hpp"

#include <cmath>

#include "rmup/errors.hpp"

namespace rmup {

PcaRotation pca_rotation(const Eigen::MatrixXd& data) {
    const Eigen::Index n = data.rows();
    const Eigen::Index v = data.cols();
    if (n <= v)
        throw ValidationError("pca_rotation: need more rows than variables");
    if (!data.allFinite())
        throw ValidationError("pca_rotation: non-finite data");

    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centred = data.rowwise() - mean;
    const Eigen::MatrixXd cov =
        (centred.transpose() * centred) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericalError("pca_rotation: eigendecomposition failed");

    PcaRotation out;
    out.rotation.resize(v, v);
    out.eigenvalues.resize(v);
    // Eigen returns eigenvalues ascending; emit them descending.
    for (Eigen::Index r = 0; r < v; ++r) {
        const Eigen::Index src = v - 1 - r;
        Eigen::VectorXd vec = solver.eigenvectors().col(src);
        Eigen::Index imax = 0;
        vec.cwiseAbs().maxCoeff(&imax);
        if (vec[imax] < 0.0) vec = -vec;
        out.rotation.row(r) = vec.transpose();
        out.eigenvalues[r] = solver.eigenvalues()[src];
    }
    const double trace = cov.trace();
    const double tol = 1e-12 * std::max(trace, 1.0);
    out.rank_deficient = out.eigenvalues[v - 1] <= tol;
    return out;
}

double orthonormality_defect(const Eigen::MatrixXd& r) {
    const Eigen::MatrixXd gram = r * r.transpose();
    return (gram - Eigen::MatrixXd::Identity(r.rows(), r.rows())).cwiseAbs().maxCoeff();
}

}  // namespace rmup
