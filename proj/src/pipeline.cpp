#include "rmup/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

#include "rmup/errors.hpp"
#include "rmup/rbig.hpp"
#include "rmup/rng.hpp"
#include "rmup/stats.hpp"

namespace rmup {

namespace {

constexpr std::uint64_t kTagPeriod = 0x504950455f504552ull;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void UpdateConfig::validate() const {
    if (neighborhood_radius_blocks < 1)
        throw ValidationError("UpdateConfig: neighbourhood radius must be >= 1");
    if (!(localization_radius_m > 0.0))
        throw ValidationError("UpdateConfig: localization radius must be > 0");
    if (rbig_iterations < 1)
        throw ValidationError("UpdateConfig: RBIG iterations must be >= 1");
    for (double v : factor_error_variance)
        if (!(v >= 0.0))
            throw ValidationError("UpdateConfig: factor error variance must be >= 0");
}

std::vector<int> select_neighborhood(const GridSpec& grid,
                                     std::span<const int> observation_blocks,
                                     int radius_blocks) {
    if (observation_blocks.empty())
        throw ValidationError("select_neighborhood: no observation blocks");
    if (radius_blocks < 1)
        throw ValidationError("select_neighborhood: radius must be >= 1");
    std::vector<char> in(static_cast<std::size_t>(grid.n_blocks()), 0);
    for (int b : observation_blocks) {
        const auto c = grid.ijk(b);
        const int ilo = std::max(0, c[0] - radius_blocks);
        const int ihi = std::min(grid.nx() - 1, c[0] + radius_blocks);
        const int jlo = std::max(0, c[1] - radius_blocks);
        const int jhi = std::min(grid.ny() - 1, c[1] + radius_blocks);
        const int klo = std::max(0, c[2] - radius_blocks);
        const int khi = std::min(grid.nz() - 1, c[2] + radius_blocks);
        for (int k = klo; k <= khi; ++k)
            for (int j = jlo; j <= jhi; ++j)
                for (int i = ilo; i <= ihi; ++i)
                    in[static_cast<std::size_t>(grid.block_index(i, j, k))] = 1;
    }
    std::vector<int> out;
    for (int b = 0; b < grid.n_blocks(); ++b)
        if (in[static_cast<std::size_t>(b)]) out.push_back(b);
    return out;
}

std::vector<ObservationRecord> merge_previous_observations(
    const ObservationSet& current, std::span<const ObservationSet> history,
    std::span<const int> neighborhood) {
    std::vector<char> in_neigh;
    int max_block = 0;
    for (int b : neighborhood) max_block = std::max(max_block, b);
    in_neigh.assign(static_cast<std::size_t>(max_block) + 1, 0);
    for (int b : neighborhood) in_neigh[static_cast<std::size_t>(b)] = 1;
    const auto inside = [&](int b) {
        return b >= 0 && b <= max_block && in_neigh[static_cast<std::size_t>(b)];
    };

    // later periods overwrite earlier ones, current overwrites everything
    std::map<int, const ObservationRecord*> by_block;
    std::vector<const ObservationSet*> ordered;
    for (const auto& set : history) ordered.push_back(&set);
    std::sort(ordered.begin(), ordered.end(),
              [](const ObservationSet* a, const ObservationSet* b) {
                  return a->period() < b->period();
              });
    for (const ObservationSet* set : ordered)
        for (const auto& rec : set->records())
            if (inside(rec.block_index)) by_block[rec.block_index] = &rec;
    for (const auto& rec : current.records()) by_block[rec.block_index] = &rec;

    std::vector<ObservationRecord> merged;
    merged.reserve(by_block.size());
    for (const auto& [block, rec] : by_block) merged.push_back(*rec);
    return merged;
}

double mse_reduction(double mse_before, double mse_after) {
    if (!(mse_before > 0.0))
        throw ValidationError("mse_reduction: undefined for mse_before == 0");
    return (mse_before - mse_after) / mse_before * 100.0;
}

namespace {

struct FactorErrors {
    std::vector<double> per_factor;  // one variance per factor column
};

FactorErrors derive_factor_errors(const UpdateConfig& config, const ObservationSet& current,
                                  const Ensemble& sub,
                                  std::span<const ObservationRecord> merged) {
    const int nv = sub.n_vars();
    FactorErrors out;
    if (!config.factor_error_variance.empty()) {
        if (config.factor_error_variance.size() == 1)
            out.per_factor.assign(static_cast<std::size_t>(nv),
                                  config.factor_error_variance.front());
        else if (static_cast<int>(config.factor_error_variance.size()) == nv)
            out.per_factor = config.factor_error_variance;
        else
            throw ValidationError("UpdateConfig: factor_error_variance needs 1 or n_vars entries");
        return out;
    }
    const ErrorSpec& spec = current.error_spec();
    if (spec.mode == ErrorSpec::Mode::Relative) {
        const double f = spec.relative_fraction;
        out.per_factor.assign(static_cast<std::size_t>(nv), f * f);
        return out;
    }
    // absolute sds normalised by the pooled per-variable spread
    if (static_cast<int>(spec.absolute_sd.size()) != nv)
        throw ValidationError("ErrorSpec: absolute mode needs one sd per variable");
    double accum = 0.0;
    for (int v = 0; v < nv; ++v) {
        std::vector<double> col;
        col.reserve(static_cast<std::size_t>(sub.n_blocks()) * sub.n_real() + merged.size());
        for (int b = 0; b < sub.n_blocks(); ++b) {
            const auto m = sub.members(v, b);
            col.insert(col.end(), m.begin(), m.end());
        }
        for (const auto& rec : merged) col.push_back(rec.values[static_cast<std::size_t>(v)]);
        const double sd = stats::stddev(col);
        const double normalised = sd > 0.0 ? spec.absolute_sd[static_cast<std::size_t>(v)] / sd : 1.0;
        accum += normalised * normalised;
    }
    out.per_factor.assign(static_cast<std::size_t>(nv), accum / nv);
    return out;
}

void maybe_inject_failure(const UpdateConfig& config, int stage) {
    if (config.fail_after_stage_for_tests == stage)
        throw NumericalError("injected failure after stage " + std::to_string(stage));
}

}  // namespace

PeriodReport update_period(Ensemble& model, const GridSpec& grid,
                           const ObservationSet& current,
                           std::span<const ObservationSet> history,
                           const UpdateConfig& config) {
    config.validate();
    current.validate(grid);
    if (current.records().empty())
        throw ValidationError("update_period: period " + std::to_string(current.period()) +
                              " has no observations");
    if (current.n_vars() != model.n_vars())
        throw ValidationError("update_period: observation/model variable count mismatch");
    if (model.n_blocks() != grid.n_blocks())
        throw ValidationError("update_period: model/grid block count mismatch");

    PeriodReport report;
    report.period = current.period();
    report.n_observations = static_cast<int>(current.records().size());

    // stage 0: neighbourhood selection
    std::vector<int> obs_blocks;
    for (const auto& rec : current.records()) obs_blocks.push_back(rec.block_index);
    const std::vector<int> neighborhood =
        select_neighborhood(grid, obs_blocks, config.neighborhood_radius_blocks);
    report.n_neighborhood_blocks = static_cast<int>(neighborhood.size());
    maybe_inject_failure(config, 0);

    // stage 1: previous-observation merge
    std::vector<ObservationRecord> merged;
    if (config.include_previous_observations)
        merged = merge_previous_observations(current, history, neighborhood);
    else {
        merged.assign(current.records().begin(), current.records().end());
        std::sort(merged.begin(), merged.end(),
                  [](const ObservationRecord& a, const ObservationRecord& b) {
                      return a.block_index < b.block_index;
                  });
    }
    report.n_merged_observations = static_cast<int>(merged.size());
    maybe_inject_failure(config, 1);

    // stage 2: extraction
    SubModel sub = extract_submodel(model, neighborhood);
    maybe_inject_failure(config, 2);

    const int nb = sub.ensemble.n_blocks();
    const int nr = sub.ensemble.n_real();
    const int nv = sub.ensemble.n_vars();
    std::unordered_map<int, int> block_pos;
    block_pos.reserve(sub.block_indices.size());
    for (int i = 0; i < nb; ++i) block_pos[sub.block_indices[static_cast<std::size_t>(i)]] = i;

    // stage 3: pooled RBIG fit
    const auto t_transform = std::chrono::steady_clock::now();
    RbigOptions rbig_opts;
    rbig_opts.n_iterations = config.rbig_iterations;
    rbig_opts.variable_names = model.variable_names();
    PooledFit fit = fit_pooled(sub.ensemble, merged, rbig_opts);
    report.seconds_transform = seconds_since(t_transform);
    maybe_inject_failure(config, 3);

    // stage 4: per-factor EnKF-MDA
    const auto t_assim = std::chrono::steady_clock::now();
    const FactorErrors errors = derive_factor_errors(config, current, sub.ensemble, merged);
    std::vector<Vec3> centres;
    centres.reserve(static_cast<std::size_t>(nb));
    for (int b : sub.block_indices) centres.push_back(grid.centre(b));
    std::vector<int> obs_pos;
    obs_pos.reserve(merged.size());
    for (const auto& rec : merged) obs_pos.push_back(block_pos.at(rec.block_index));

    report.factor_mse_before.resize(static_cast<std::size_t>(nv));
    report.factor_mse_after.resize(static_cast<std::size_t>(nv));
    for (int f = 0; f < nv; ++f) {
        AssimilationState state;
        state.factors = FactorEnsemble(nb, nr);
        for (int b = 0; b < nb; ++b)
            for (int r = 0; r < nr; ++r)
                state.factors.row(b)[r] =
                    fit.realisation_factors(static_cast<long>(b) * nr + r, f);
        state.obs.resize(merged.size());
        for (std::size_t o = 0; o < merged.size(); ++o)
            state.obs[o] = fit.observation_factors(static_cast<long>(o), f);
        state.obs_block = obs_pos;
        state.obs_error_var.assign(merged.size(), errors.per_factor[static_cast<std::size_t>(f)]);
        state.centres = centres;

        const auto factor_mse = [&]() {
            double acc = 0.0;
            for (std::size_t o = 0; o < merged.size(); ++o) {
                const double* row = state.factors.row(state.obs_block[o]);
                const double mean = kern_mean(row, nr);
                const double d = mean - state.obs[o];
                acc += d * d;
            }
            return acc / static_cast<double>(merged.size());
        };
        report.factor_mse_before[static_cast<std::size_t>(f)] = factor_mse();

        enkf_mda(state, config.schedule, {config.localization_radius_m},
                 mix64(config.master_seed, kTagPeriod,
                       static_cast<std::uint64_t>(current.period()),
                       static_cast<std::uint64_t>(f)));

        report.factor_mse_after[static_cast<std::size_t>(f)] = factor_mse();
        for (int b = 0; b < nb; ++b)
            for (int r = 0; r < nr; ++r)
                fit.realisation_factors(static_cast<long>(b) * nr + r, f) =
                    state.factors.row(b)[r];
    }
    report.seconds_assimilate = seconds_since(t_assim);
    maybe_inject_failure(config, 4);

    // stage 5: inverse transform of touched blocks only; blocks beyond 2L of
    // every observation keep their original bits
    const auto t_inverse = std::chrono::steady_clock::now();
    const double support = 2.0 * config.localization_radius_m;
    std::vector<int> touched;
    for (int b = 0; b < nb; ++b) {
        for (int pos : obs_pos) {
            if (distance(centres[static_cast<std::size_t>(b)],
                         centres[static_cast<std::size_t>(pos)]) < support) {
                touched.push_back(b);
                break;
            }
        }
    }
    report.n_touched_blocks = static_cast<int>(touched.size());

    Eigen::MatrixXd touched_factors(static_cast<long>(touched.size()) * nr, nv);
    for (std::size_t i = 0; i < touched.size(); ++i)
        for (int r = 0; r < nr; ++r)
            touched_factors.row(static_cast<long>(i) * nr + r) =
                fit.realisation_factors.row(static_cast<long>(touched[i]) * nr + r);
    const Eigen::MatrixXd restored = fit.chain.inverse(std::move(touched_factors));

    SubModel updated = sub;
    for (std::size_t i = 0; i < touched.size(); ++i)
        for (int v = 0; v < nv; ++v) {
            auto m = updated.ensemble.members(v, touched[i]);
            for (int r = 0; r < nr; ++r)
                m[static_cast<std::size_t>(r)] = restored(static_cast<long>(i) * nr + r, v);
        }
    report.seconds_inverse = seconds_since(t_inverse);
    maybe_inject_failure(config, 5);

    // metrics in original units at the current period's observed blocks
    report.variables.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        auto& metrics = report.variables[static_cast<std::size_t>(v)];
        metrics.variable = model.variable_names()[static_cast<std::size_t>(v)];
        double mse_b = 0.0, mse_a = 0.0, var_b = 0.0, var_a = 0.0;
        for (const auto& rec : current.records()) {
            const int pos = block_pos.at(rec.block_index);
            const double obs = rec.values[static_cast<std::size_t>(v)];
            const double prior_mean = sub.ensemble.block_mean(v, pos);
            const double updated_mean = updated.ensemble.block_mean(v, pos);
            mse_b += (prior_mean - obs) * (prior_mean - obs);
            mse_a += (updated_mean - obs) * (updated_mean - obs);
            var_b += sub.ensemble.block_variance(v, pos);
            var_a += updated.ensemble.block_variance(v, pos);
            report.scatter.push_back(
                {metrics.variable, obs, prior_mean, updated_mean});
        }
        const double n = static_cast<double>(current.records().size());
        metrics.mse_before = mse_b / n;
        metrics.mse_after = mse_a / n;
        metrics.var_before = var_b / n;
        metrics.var_after = var_a / n;
        metrics.mse_reduction_pct =
            metrics.mse_before > 0.0 ? mse_reduction(metrics.mse_before, metrics.mse_after)
                                     : std::numeric_limits<double>::quiet_NaN();
    }

    // commit
    insert_submodel(model, updated);
    return report;
}

SequentialResult sequential_run(Ensemble& model, const GridSpec& grid,
                                std::span<const ObservationSet> periods,
                                const UpdateConfig& config) {
    for (std::size_t i = 1; i < periods.size(); ++i)
        if (periods[i].period() <= periods[i - 1].period())
            throw ValidationError("sequential_run: periods must be strictly increasing");

    SequentialResult result;
    std::vector<ObservationSet> history;
    for (const auto& period : periods) {
        try {
            result.reports.push_back(
                update_period(model, grid, period, history, config));
        } catch (const std::exception& e) {
            result.completed = false;
            result.failed_period = period.period();
            result.error = e.what();
            return result;
        }
        history.push_back(period);
    }
    return result;
}

Eigen::MatrixXd correlation_preservation(const SubModel& before, const SubModel& after) {
    const Ensemble& a = before.ensemble;
    const Ensemble& b = after.ensemble;
    if (a.n_vars() != b.n_vars() || a.n_blocks() != b.n_blocks() ||
        a.n_real() != b.n_real())
        throw ValidationError("correlation_preservation: shape mismatch");
    const int nv = a.n_vars();
    const auto pooled_column = [](const Ensemble& e, int v) {
        std::vector<double> col;
        col.reserve(static_cast<std::size_t>(e.n_blocks()) * e.n_real());
        for (int blk = 0; blk < e.n_blocks(); ++blk) {
            const auto m = e.members(v, blk);
            col.insert(col.end(), m.begin(), m.end());
        }
        return col;
    };
    std::vector<std::vector<double>> cols_a, cols_b;
    for (int v = 0; v < nv; ++v) {
        cols_a.push_back(pooled_column(a, v));
        cols_b.push_back(pooled_column(b, v));
    }
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(nv, nv);
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j) {
            const double rho_a = stats::spearman(cols_a[static_cast<std::size_t>(i)],
                                                 cols_a[static_cast<std::size_t>(j)]);
            const double rho_b = stats::spearman(cols_b[static_cast<std::size_t>(i)],
                                                 cols_b[static_cast<std::size_t>(j)]);
            delta(i, j) = delta(j, i) = std::abs(rho_a - rho_b);
        }
    return delta;
}

}  // namespace rmup
