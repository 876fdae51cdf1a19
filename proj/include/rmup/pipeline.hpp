#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmup/enkf.hpp"
#include "rmup/ensemble.hpp"
#include "rmup/grid.hpp"
#include "rmup/observations.hpp"

namespace rmup {

struct UpdateConfig {
    int neighborhood_radius_blocks = 3;
    double localization_radius_m = 30.0;
    MdaSchedule schedule = MdaSchedule::uniform(10);
    int rbig_iterations = 10;
    bool include_previous_observations = true;
    // Factor-space observation error variance: empty = derive from the error
    // spec (relative fraction squared against unit factor variance, or
    // normalised absolute sds); one entry = constant; n_vars entries =
    // per-factor values.
    std::vector<double> factor_error_variance;
    std::uint64_t master_seed = 0;

    // test hook: throw after the given stage (0-based) to exercise the
    // transactional guarantee; negative disables
    int fail_after_stage_for_tests = -1;

    void validate() const;
};

struct VariableMetrics {
    std::string variable;
    double mse_before = 0.0;
    double mse_after = 0.0;
    double mse_reduction_pct = 0.0;  // NaN when mse_before == 0
    double var_before = 0.0;         // mean ensemble variance at observed blocks
    double var_after = 0.0;
};

struct ScatterRow {
    std::string variable;
    double observed = 0.0;
    double predicted_prior = 0.0;
    double predicted_updated = 0.0;
};

struct PeriodReport {
    int period = 0;
    int n_observations = 0;
    int n_merged_observations = 0;
    int n_neighborhood_blocks = 0;
    int n_touched_blocks = 0;
    std::vector<VariableMetrics> variables;
    std::vector<double> factor_mse_before;  // factor-space diagnostics
    std::vector<double> factor_mse_after;
    double seconds_transform = 0.0;
    double seconds_assimilate = 0.0;
    double seconds_inverse = 0.0;
    std::vector<ScatterRow> scatter;
};

// Chebyshev-ball union around the observation blocks, clipped to the grid;
// sorted and unique. Throws on an empty observation list.
std::vector<int> select_neighborhood(const GridSpec& grid,
                                     std::span<const int> observation_blocks,
                                     int radius_blocks);

// Current records plus historical records falling inside the neighbourhood.
// Newest wins on block collisions; output is sorted by block index.
std::vector<ObservationRecord> merge_previous_observations(
    const ObservationSet& current, std::span<const ObservationSet> history,
    std::span<const int> neighborhood);

// Eq.-9 style percentage; throws on mse_before == 0.
double mse_reduction(double mse_before, double mse_after);

// One full period: neighbourhood -> merge -> extract -> pooled RBIG ->
// per-factor EnKF-MDA -> inverse -> insert, with metrics. The model is
// only mutated after every stage succeeded.
PeriodReport update_period(Ensemble& model, const GridSpec& grid,
                           const ObservationSet& current,
                           std::span<const ObservationSet> history,
                           const UpdateConfig& config);

struct SequentialResult {
    std::vector<PeriodReport> reports;
    bool completed = true;
    int failed_period = -1;
    std::string error;
};

// Folds update_period over the periods in order, threading history. Halts at
// the first failing period, keeping the reports of completed ones.
SequentialResult sequential_run(Ensemble& model, const GridSpec& grid,
                                std::span<const ObservationSet> periods,
                                const UpdateConfig& config);

// |delta Spearman rho| per variable pair, pooled over (realisation, block)
// rows; same-shape submodels required.
Eigen::MatrixXd correlation_preservation(const SubModel& before, const SubModel& after);

}  // namespace rmup
