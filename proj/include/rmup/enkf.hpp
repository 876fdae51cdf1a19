#pragma once

#include <cstdint>
#include <vector>

#include "rmup/grid.hpp"

namespace rmup {

// Single-value Gaspari-Cohn taper (the scalar reference path); 1 at d = 0,
// exactly 0 for d >= 2L. Throws ValidationError for d < 0 or L <= 0.
double gaspari_cohn(double d, double L);

// Assimilation count and error-inflation coefficients with sum(1/alpha) = 1.
class MdaSchedule {
public:
    explicit MdaSchedule(std::vector<double> alphas);
    static MdaSchedule uniform(int n_assimilations);

    int n_assimilations() const { return static_cast<int>(alphas_.size()); }
    const std::vector<double>& alphas() const { return alphas_; }

private:
    std::vector<double> alphas_;
};

struct LocalizationSpec {
    double radius_m;  // L > 0; taper support ends at 2L
};

// One factor's ensemble: n_blocks x n_real, each block's members contiguous.
struct FactorEnsemble {
    int n_blocks = 0;
    int n_real = 0;
    std::vector<double> values;

    FactorEnsemble() = default;
    FactorEnsemble(int blocks, int real)
        : n_blocks(blocks), n_real(real),
          values(static_cast<std::size_t>(blocks) * real, 0.0) {}

    double* row(int b) { return values.data() + static_cast<std::size_t>(b) * n_real; }
    const double* row(int b) const {
        return values.data() + static_cast<std::size_t>(b) * n_real;
    }
};

// Everything one factor-wise assimilation needs. Observations index state
// blocks directly (identity observation operator).
struct AssimilationState {
    FactorEnsemble factors;
    std::vector<double> obs;            // factor-space observed values (n_obs)
    std::vector<int> obs_block;         // state-block position per observation
    std::vector<double> obs_error_var;  // base (uninflated) variances (n_obs)
    std::vector<Vec3> centres;          // block centres, metres (n_blocks)

    void validate() const;
};

// Per-member observation perturbations, n_obs x n_real row-major. Entry noise
// is N(0, alpha * var[o]); the substream for observation o is keyed by
// (stream_key, o), so reruns reproduce and assimilations differ via the key.
std::vector<double> perturb_observations(const std::vector<double>& obs,
                                         const std::vector<double>& variances,
                                         double alpha, int n_real,
                                         std::uint64_t stream_key);

// Localized gain K = (rho_YD o C_YD) (rho_DD o C_DD + C_D)^-1, n_blocks x
// n_obs row-major. C_D is the diagonal of obs_error_var (already inflated by
// the caller). Solved with an SPD factorization, never an explicit inverse.
// Blocks whose taper row is all zero yield exactly-zero gain rows.
std::vector<double> kalman_gain(const FactorEnsemble& states,
                                const std::vector<double>& predictions,
                                const std::vector<double>& obs_error_var,
                                const std::vector<double>& loc_yd,
                                const std::vector<double>& loc_dd);

// Z <- Z + K (D - H), each member against its own perturbed observations.
// Zero gain rows leave the block's members bit-identical.
void update_ensemble(FactorEnsemble& states, const std::vector<double>& gain,
                     const std::vector<double>& perturbed,
                     const std::vector<double>& predictions);

struct AssimilationDiagnostic {
    int assimilation = 0;
    double mean_abs_innovation = 0.0;
    double mean_abs_gain = 0.0;
};

// Full EnKF-MDA sweep over the schedule, mutating state.factors in place.
// For each assimilation: predictions at observation blocks, alpha-inflated
// perturbation and C_D, localized gain, member update. One assimilation with
// alpha = 1 is a plain EnKF step.
std::vector<AssimilationDiagnostic> enkf_mda(AssimilationState& state,
                                             const MdaSchedule& schedule,
                                             const LocalizationSpec& localization,
                                             std::uint64_t seed);

}  // namespace rmup
