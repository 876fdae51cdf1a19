#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmup/ensemble.hpp"
#include "rmup/grid.hpp"
#include "rmup/observations.hpp"
#include "rmup/variogram.hpp"

namespace rmup {

// Strictly monotone marginal distortion y = offset + scale * base(x):
//   Identity: base(x) = x
//   Exp:      base(x) = exp(param * x)          (lognormal-like skew)
//   Power:    base(x) = sign(x) * |x|^param     (odd-power skew, param >= 1)
struct MarginalShape {
    enum class Type { Identity, Exp, Power };
    Type type = Type::Identity;
    double param = 1.0;
    double offset = 0.0;
    double scale = 1.0;

    double apply(double x) const;
    static MarginalShape parse(const std::string& text);
    std::string to_string() const;
};

struct SyntheticSpec {
    GridSpec grid;
    std::vector<std::string> variable_names;
    std::vector<VariogramModel> variograms;  // one per factor
    Eigen::MatrixXd mixing;                  // n_vars x n_vars, invertible
    std::vector<MarginalShape> marginals;    // one per variable
    std::uint64_t seed = 0;
    // Prior conditioning: convex blend toward the truth at a random subset of
    // blocks. blend_weight = 0 disables it.
    double blend_weight = 0.0;
    double blend_fraction = 0.05;

    int n_vars() const { return static_cast<int>(variable_names.size()); }
    void validate() const;
};

// One multivariate field: n_blocks x n_vars.
using Field = Eigen::MatrixXd;

// Independent standard-Gaussian spatial factors, one per variable slot, via
// dense covariance factorization. Streams are keyed per (seed, factor,
// realisation) so results do not depend on evaluation order.
Ensemble simulate_factors(const SyntheticSpec& spec, int n_real, std::uint64_t seed);

struct TruthAndPrior {
    Field truth;      // n_blocks x n_vars, original units
    Ensemble prior;   // same units
};

TruthAndPrior make_truth_and_prior(const SyntheticSpec& spec, int n_real,
                                   std::uint64_t truth_seed, std::uint64_t prior_seed);

// Disjoint per-period block sets drawn without replacement.
std::vector<std::vector<int>> make_period_plan(const GridSpec& grid, int n_periods,
                                               int obs_per_period, std::uint64_t seed);

// Noisy observations of the truth on a disjoint period plan. Relative noise
// keeps observations of non-negative truth values non-negative (resample up
// to 100 times, then clamp).
std::vector<ObservationSet> sample_observations(const Field& truth, const GridSpec& grid,
                                                const std::vector<std::vector<int>>& period_plan,
                                                const ErrorSpec& error_spec,
                                                std::uint64_t seed);

}  // namespace rmup
