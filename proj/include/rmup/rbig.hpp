#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmup/ensemble.hpp"
#include "rmup/marginal.hpp"
#include "rmup/observations.hpp"

namespace rmup {

struct RbigIteration {
    std::vector<MarginalMap> maps;  // one per variable
    Eigen::MatrixXd rotation;       // orthonormal, rows = principal directions
};

// Stored sequence of (marginal Gaussianisation, PCA rotation) pairs; applying
// it forward Gaussianises, walking it in reverse order inverts. Immutable
// after fit.
class RbigChain {
public:
    RbigChain() = default;
    RbigChain(std::vector<RbigIteration> iterations, long n_rows,
              std::vector<std::string> variable_names, bool rank_deficient);

    int n_iterations() const { return static_cast<int>(iterations_.size()); }
    int n_vars() const;
    long n_rows() const { return n_rows_; }
    const std::vector<std::string>& variable_names() const { return variable_names_; }
    bool rank_deficient() const { return rank_deficient_; }
    const std::vector<RbigIteration>& iterations() const { return iterations_; }

    // Apply the stored maps and rotations to new rows (n x n_vars).
    Eigen::MatrixXd forward(Eigen::MatrixXd data) const;
    // Reverse every iteration: rotate back, then invert the marginal maps.
    Eigen::MatrixXd inverse(Eigen::MatrixXd factors) const;

    // "RBIGCHAIN v1" text format, full (17 significant digit) precision.
    void save(const std::filesystem::path& path) const;
    static RbigChain load(const std::filesystem::path& path);

private:
    std::vector<RbigIteration> iterations_;
    long n_rows_ = 0;
    std::vector<std::string> variable_names_;
    bool rank_deficient_ = false;
};

struct RbigOptions {
    int n_iterations = 10;
    bool early_stop = false;
    double early_stop_threshold = 0.01;
    std::vector<std::string> variable_names;  // for diagnostics; defaults to v0..vN
};

struct RbigFitResult {
    Eigen::MatrixXd factors;
    RbigChain chain;
    // negentropy proxy (sum over variables of |skew| + |excess kurtosis|/4)
    // after each completed iteration
    std::vector<double> negentropy;
};

// Σ_vars |skewness| + |excess kurtosis|/4 of the columns.
double negentropy_proxy(const Eigen::MatrixXd& data);

// Alternate marginal Gaussianisation and PCA rotation. Requires
// n_rows > 10 * n_vars. Training factors use the despiked per-row scores.
RbigFitResult rbig_fit_forward(const Eigen::MatrixXd& data, const RbigOptions& options = {});

struct PooledFit {
    Eigen::MatrixXd realisation_factors;  // (n_blocks * n_real) x n_vars
    Eigen::MatrixXd observation_factors;  // n_obs x n_vars
    RbigChain chain;
};

// Stacks realisation rows (block-major: row = block * n_real + realisation)
// and observation rows, fits one chain on the pool, and returns both
// partitions transformed by it.
PooledFit fit_pooled(const Ensemble& neighbourhood,
                     const std::vector<ObservationRecord>& observations,
                     const RbigOptions& options = {});

}  // namespace rmup
