#include "rmup/enkf.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rmup/errors.hpp"
#include "rmup/kernels.hpp"
#include "rmup/linalg.hpp"
#include "rmup/rng.hpp"

namespace rmup {

namespace {

constexpr std::uint64_t kTagPerturb = 0x454e4b465f504552ull;

}  // namespace

double gaspari_cohn(double d, double L) {
    if (!(L > 0.0)) throw ValidationError("gaspari_cohn: localization radius must be > 0");
    if (d < 0.0) throw ValidationError("gaspari_cohn: distance must be >= 0");
    double w;
    kern::scalar_ops().gaspari_cohn(&d, 1, L, &w);
    return w;
}

MdaSchedule::MdaSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    if (alphas_.empty()) throw ValidationError("MdaSchedule: need at least one assimilation");
    double harmonic = 0.0;
    for (double a : alphas_) {
        if (!(a > 0.0)) throw ValidationError("MdaSchedule: coefficients must be > 0");
        harmonic += 1.0 / a;
    }
    if (std::abs(harmonic - 1.0) > 1e-12)
        throw ValidationError("MdaSchedule: sum of 1/alpha_i is " + std::to_string(harmonic) +
                              ", must equal 1");
}

MdaSchedule MdaSchedule::uniform(int n_assimilations) {
    if (n_assimilations < 1)
        throw ValidationError("MdaSchedule: need at least one assimilation");
    return MdaSchedule(
        std::vector<double>(static_cast<std::size_t>(n_assimilations),
                            static_cast<double>(n_assimilations)));
}

void AssimilationState::validate() const {
    if (factors.n_real < 2)
        throw ValidationError("AssimilationState: need at least 2 realisations");
    if (static_cast<int>(centres.size()) != factors.n_blocks)
        throw ValidationError("AssimilationState: one centre per block required");
    if (obs.size() != obs_block.size() || obs.size() != obs_error_var.size())
        throw ValidationError("AssimilationState: observation vectors must share length");
    for (int b : obs_block)
        if (b < 0 || b >= factors.n_blocks)
            throw ValidationError("AssimilationState: observation block outside state");
    for (double v : obs_error_var)
        if (v < 0.0) throw ValidationError("AssimilationState: negative error variance");
}

std::vector<double> perturb_observations(const std::vector<double>& obs,
                                         const std::vector<double>& variances,
                                         double alpha, int n_real,
                                         std::uint64_t stream_key) {
    if (obs.size() != variances.size())
        throw ValidationError("perturb_observations: obs/variance length mismatch");
    if (!(alpha > 0.0)) throw ValidationError("perturb_observations: alpha must be > 0");
    for (double v : variances)
        if (v < 0.0) throw ValidationError("perturb_observations: negative variance");

    const std::size_t n_obs = obs.size();
    std::vector<double> out(n_obs * static_cast<std::size_t>(n_real));
    for (std::size_t o = 0; o < n_obs; ++o) {
        double* row = out.data() + o * n_real;
        const double sd = std::sqrt(alpha * variances[o]);
        if (sd == 0.0) {
            for (int r = 0; r < n_real; ++r) row[r] = obs[o];
            continue;
        }
        RngStream stream(mix64(stream_key, o));
        for (int r = 0; r < n_real; ++r) row[r] = obs[o] + sd * stream.normal();
    }
    return out;
}

namespace {

// rows minus their means, row-major copies
std::vector<double> centred_rows(const double* data, int rows, int cols) {
    std::vector<double> out(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const double* src = data + static_cast<std::size_t>(i) * cols;
        double* dst = out.data() + static_cast<std::size_t>(i) * cols;
        const double mean = kern::sum(src, static_cast<std::size_t>(cols)) / cols;
        for (int j = 0; j < cols; ++j) dst[j] = src[j] - mean;
    }
    return out;
}

}  // namespace

std::vector<double> kalman_gain(const FactorEnsemble& states,
                                const std::vector<double>& predictions,
                                const std::vector<double>& obs_error_var,
                                const std::vector<double>& loc_yd,
                                const std::vector<double>& loc_dd) {
    const int nb = states.n_blocks;
    const int nr = states.n_real;
    const int no = static_cast<int>(obs_error_var.size());
    if (nr < 2) throw ValidationError("kalman_gain: need at least 2 realisations");
    if (predictions.size() != static_cast<std::size_t>(no) * nr ||
        loc_yd.size() != static_cast<std::size_t>(nb) * no ||
        loc_dd.size() != static_cast<std::size_t>(no) * no)
        throw ValidationError("kalman_gain: shape mismatch");

    const double inv_nm1 = 1.0 / static_cast<double>(nr - 1);
    const std::vector<double> zc = centred_rows(states.values.data(), nb, nr);
    const std::vector<double> hc = centred_rows(predictions.data(), no, nr);

    // innovation matrix A = rho_DD o C_DD + C_D
    Eigen::MatrixXd a(no, no);
    for (int o = 0; o < no; ++o) {
        for (int p = o; p < no; ++p) {
            const double taper = loc_dd[static_cast<std::size_t>(o) * no + p];
            double c = 0.0;
            if (taper != 0.0)
                c = taper * inv_nm1 *
                    kern::dot(hc.data() + static_cast<std::size_t>(o) * nr,
                              hc.data() + static_cast<std::size_t>(p) * nr,
                              static_cast<std::size_t>(nr));
            a(o, p) = c;
            a(p, o) = c;
        }
        a(o, o) += obs_error_var[static_cast<std::size_t>(o)];
    }

    // tapered cross-covariance, overwritten by the gain after the solve
    std::vector<double> gain(static_cast<std::size_t>(nb) * no, 0.0);
    std::vector<char> active(static_cast<std::size_t>(nb), 0);
    for (int b = 0; b < nb; ++b) {
        const double* taper_row = loc_yd.data() + static_cast<std::size_t>(b) * no;
        double* out_row = gain.data() + static_cast<std::size_t>(b) * no;
        for (int o = 0; o < no; ++o) {
            if (taper_row[o] == 0.0) continue;
            active[static_cast<std::size_t>(b)] = 1;
            out_row[o] = taper_row[o] * inv_nm1 *
                         kern::dot(zc.data() + static_cast<std::size_t>(b) * nr,
                                   hc.data() + static_cast<std::size_t>(o) * nr,
                                   static_cast<std::size_t>(nr));
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt = llt_with_jitter(std::move(a));

    // K = M A^-1 solved in chunks: A (K_chunk)^T = M_chunk^T
    constexpr int kChunk = 1024;
    Eigen::MatrixXd rhs(no, kChunk);
    for (int start = 0; start < nb; start += kChunk) {
        const int rows = std::min(kChunk, nb - start);
        bool any = false;
        for (int i = 0; i < rows; ++i) any = any || active[static_cast<std::size_t>(start + i)];
        if (!any) continue;
        for (int i = 0; i < rows; ++i)
            for (int o = 0; o < no; ++o)
                rhs(o, i) = gain[static_cast<std::size_t>(start + i) * no + o];
        auto block = rhs.leftCols(rows);
        llt.solveInPlace(block);
        for (int i = 0; i < rows; ++i) {
            if (!active[static_cast<std::size_t>(start + i)]) continue;  // keep exact zeros
            for (int o = 0; o < no; ++o)
                gain[static_cast<std::size_t>(start + i) * no + o] = rhs(o, i);
        }
    }
    return gain;
}

void update_ensemble(FactorEnsemble& states, const std::vector<double>& gain,
                     const std::vector<double>& perturbed,
                     const std::vector<double>& predictions) {
    const int nb = states.n_blocks;
    const int nr = states.n_real;
    const int no = nr == 0 ? 0 : static_cast<int>(perturbed.size()) / nr;
    if (perturbed.size() != predictions.size() ||
        perturbed.size() != static_cast<std::size_t>(no) * nr ||
        gain.size() != static_cast<std::size_t>(nb) * no)
        throw ValidationError("update_ensemble: shape mismatch");

    std::vector<double> innovation(perturbed.size());
    for (std::size_t i = 0; i < innovation.size(); ++i)
        innovation[i] = perturbed[i] - predictions[i];

    for (int b = 0; b < nb; ++b) {
        const double* gain_row = gain.data() + static_cast<std::size_t>(b) * no;
        double* z = states.row(b);
        for (int o = 0; o < no; ++o)
            if (gain_row[o] != 0.0)
                kern::axpy(gain_row[o], innovation.data() + static_cast<std::size_t>(o) * nr,
                           z, static_cast<std::size_t>(nr));
    }
}

std::vector<AssimilationDiagnostic> enkf_mda(AssimilationState& state,
                                             const MdaSchedule& schedule,
                                             const LocalizationSpec& localization,
                                             std::uint64_t seed) {
    state.validate();
    if (!(localization.radius_m > 0.0))
        throw ValidationError("enkf_mda: localization radius must be > 0");
    const int nb = state.factors.n_blocks;
    const int nr = state.factors.n_real;
    const int no = static_cast<int>(state.obs.size());
    if (no == 0) return {};

    // taper matrices are distance-only, shared by every assimilation
    std::vector<double> loc_yd(static_cast<std::size_t>(nb) * no);
    for (int b = 0; b < nb; ++b)
        for (int o = 0; o < no; ++o)
            loc_yd[static_cast<std::size_t>(b) * no + o] =
                distance(state.centres[static_cast<std::size_t>(b)],
                         state.centres[static_cast<std::size_t>(state.obs_block[o])]);
    kern::gaspari_cohn(loc_yd.data(), loc_yd.size(), localization.radius_m, loc_yd.data());

    std::vector<double> loc_dd(static_cast<std::size_t>(no) * no);
    for (int o = 0; o < no; ++o)
        for (int p = 0; p < no; ++p)
            loc_dd[static_cast<std::size_t>(o) * no + p] =
                distance(state.centres[static_cast<std::size_t>(state.obs_block[o])],
                         state.centres[static_cast<std::size_t>(state.obs_block[p])]);
    kern::gaspari_cohn(loc_dd.data(), loc_dd.size(), localization.radius_m, loc_dd.data());

    std::vector<AssimilationDiagnostic> diagnostics;
    std::vector<double> predictions(static_cast<std::size_t>(no) * nr);
    std::vector<double> scaled_var(static_cast<std::size_t>(no));

    for (int i = 0; i < schedule.n_assimilations(); ++i) {
        const double alpha = schedule.alphas()[static_cast<std::size_t>(i)];
        for (int o = 0; o < no; ++o) {
            const double* src = state.factors.row(state.obs_block[o]);
            std::copy(src, src + nr, predictions.begin() + static_cast<std::ptrdiff_t>(o) * nr);
            scaled_var[static_cast<std::size_t>(o)] =
                alpha * state.obs_error_var[static_cast<std::size_t>(o)];
        }
        const std::vector<double> perturbed = perturb_observations(
            state.obs, state.obs_error_var, alpha, nr,
            mix64(seed, kTagPerturb, static_cast<std::uint64_t>(i)));
        const std::vector<double> gain =
            kalman_gain(state.factors, predictions, scaled_var, loc_yd, loc_dd);
        update_ensemble(state.factors, gain, perturbed, predictions);

        AssimilationDiagnostic diag;
        diag.assimilation = i + 1;
        double innov = 0.0;
        for (int o = 0; o < no; ++o)
            for (int r = 0; r < nr; ++r)
                innov += std::abs(perturbed[static_cast<std::size_t>(o) * nr + r] -
                                  predictions[static_cast<std::size_t>(o) * nr + r]);
        diag.mean_abs_innovation = innov / (static_cast<double>(no) * nr);
        double gsum = 0.0;
        for (double g : gain) gsum += std::abs(g);
        diag.mean_abs_gain = gsum / static_cast<double>(gain.size());
        diagnostics.push_back(diag);
    }
    return diagnostics;
}

}  // namespace rmup
