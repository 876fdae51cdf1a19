#include "rmup/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rmup/errors.hpp"
#include "rmup/io.hpp"
#include "rmup/linalg.hpp"
#include "rmup/rng.hpp"

namespace rmup {

namespace {

// stream-key tags per operation
constexpr std::uint64_t kTagFactors = 0x5f4143544f525330ull;
constexpr std::uint64_t kTagTruth = 0x5f54525554480000ull;
constexpr std::uint64_t kTagPrior = 0x5f5052494f520000ull;
constexpr std::uint64_t kTagDrill = 0x5f4452494c4c0000ull;
constexpr std::uint64_t kTagObs = 0x5f4f425300000000ull;
constexpr std::uint64_t kTagPlan = 0x5f504c414e000000ull;

}  // namespace

double MarginalShape::apply(double x) const {
    double base;
    switch (type) {
        case Type::Identity: base = x; break;
        case Type::Exp: base = std::exp(param * x); break;
        case Type::Power: base = std::copysign(std::pow(std::abs(x), param), x); break;
        default: base = x; break;
    }
    return offset + scale * base;
}

MarginalShape MarginalShape::parse(const std::string& text) {
    std::istringstream in(text);
    std::string type;
    in >> type;
    MarginalShape m;
    if (type == "identity") m.type = Type::Identity;
    else if (type == "exp") m.type = Type::Exp;
    else if (type == "power") m.type = Type::Power;
    else throw ValidationError("marginal shape '" + text + "': unknown type '" + type + "'");
    if (m.type != Type::Identity) {
        if (!(in >> m.param))
            throw ValidationError("marginal shape '" + text + "': missing parameter");
    }
    in >> m.scale >> m.offset;  // optional, keep defaults when absent
    return m;
}

std::string MarginalShape::to_string() const {
    std::ostringstream out;
    switch (type) {
        case Type::Identity: out << "identity"; break;
        case Type::Exp: out << "exp " << io::format_value(param); break;
        case Type::Power: out << "power " << io::format_value(param); break;
    }
    out << ' ' << io::format_value(scale) << ' ' << io::format_value(offset);
    return out.str();
}

void SyntheticSpec::validate() const {
    const int nv = n_vars();
    if (nv < 1) throw ValidationError("SyntheticSpec: need at least one variable");
    if (static_cast<int>(variograms.size()) != nv)
        throw ValidationError("SyntheticSpec: need one variogram per variable");
    if (static_cast<int>(marginals.size()) != nv)
        throw ValidationError("SyntheticSpec: need one marginal shape per variable");
    for (const auto& vg : variograms)
        if (std::abs(vg.total_sill() - 1.0) > 1e-6)
            throw ValidationError("SyntheticSpec: factor variogram '" + vg.to_string() +
                                  "' must have unit total sill");
    if (mixing.rows() != nv || mixing.cols() != nv)
        throw ValidationError("SyntheticSpec: mixing matrix must be n_vars x n_vars");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mixing);
    if (!lu.isInvertible())
        throw ValidationError("SyntheticSpec: mixing matrix is singular");
    for (const auto& m : marginals) {
        if (!(m.scale != 0.0))
            throw ValidationError("SyntheticSpec: marginal scale must be nonzero");
        if (m.type == MarginalShape::Type::Exp && m.param == 0.0)
            throw ValidationError("SyntheticSpec: exp marginal needs nonzero parameter");
        if (m.type == MarginalShape::Type::Power && !(m.param > 0.0))
            throw ValidationError("SyntheticSpec: power marginal needs positive exponent");
    }
    if (blend_weight < 0.0 || blend_weight > 1.0 || blend_fraction < 0.0 ||
        blend_fraction > 1.0)
        throw ValidationError("SyntheticSpec: blend parameters must lie in [0,1]");
}

namespace {

std::vector<Eigen::MatrixXd> factor_chol(const SyntheticSpec& spec) {
    std::vector<int> all(spec.grid.n_blocks());
    std::iota(all.begin(), all.end(), 0);
    std::vector<Eigen::MatrixXd> chol;
    chol.reserve(spec.variograms.size());
    for (const auto& vg : spec.variograms)
        chol.push_back(chol_lower_with_jitter(build_covariance(spec.grid, all, vg)));
    return chol;
}

Eigen::VectorXd draw_field(const Eigen::MatrixXd& chol_lower, RngStream& stream) {
    Eigen::VectorXd xi(chol_lower.rows());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = stream.normal();
    return chol_lower.template triangularView<Eigen::Lower>() * xi;
}

}  // namespace

Ensemble simulate_factors(const SyntheticSpec& spec, int n_real, std::uint64_t seed) {
    spec.validate();
    const auto chol = factor_chol(spec);
    const int nb = spec.grid.n_blocks();
    std::vector<std::string> names;
    for (const auto& n : spec.variable_names) names.push_back(n + "_factor");
    Ensemble out(n_real, nb, std::move(names), "factors");
    for (int v = 0; v < spec.n_vars(); ++v)
        for (int r = 0; r < n_real; ++r) {
            RngStream stream(mix64(seed, kTagFactors, static_cast<std::uint64_t>(v),
                                   static_cast<std::uint64_t>(r)));
            const Eigen::VectorXd z = draw_field(chol[v], stream);
            for (int b = 0; b < nb; ++b) out.at(r, b, v) = z[b];
        }
    return out;
}

TruthAndPrior make_truth_and_prior(const SyntheticSpec& spec, int n_real,
                                   std::uint64_t truth_seed, std::uint64_t prior_seed) {
    spec.validate();
    const auto chol = factor_chol(spec);
    const int nb = spec.grid.n_blocks();
    const int nv = spec.n_vars();

    Eigen::MatrixXd truth_factors(nb, nv);
    for (int v = 0; v < nv; ++v) {
        RngStream stream(mix64(truth_seed, kTagTruth, static_cast<std::uint64_t>(v)));
        truth_factors.col(v) = draw_field(chol[v], stream);
    }

    const auto distort = [&](const Eigen::MatrixXd& factors) {
        Eigen::MatrixXd mixed = factors * spec.mixing.transpose();
        for (int v = 0; v < nv; ++v)
            for (int b = 0; b < nb; ++b) mixed(b, v) = spec.marginals[v].apply(mixed(b, v));
        return mixed;
    };

    // pseudo-drillhole subset for optional prior conditioning
    std::vector<char> drilled(nb, 0);
    if (spec.blend_weight > 0.0) {
        RngStream stream(mix64(prior_seed, kTagDrill));
        for (int b = 0; b < nb; ++b) drilled[b] = stream.uniform() < spec.blend_fraction;
    }
    const double w = spec.blend_weight;
    const double wc = std::sqrt(1.0 - w * w);  // keeps unit factor variance

    Ensemble prior(n_real, nb, spec.variable_names, "prior");
    Eigen::MatrixXd factors(nb, nv);
    for (int r = 0; r < n_real; ++r) {
        for (int v = 0; v < nv; ++v) {
            RngStream stream(mix64(prior_seed, kTagPrior, static_cast<std::uint64_t>(v),
                                   static_cast<std::uint64_t>(r)));
            factors.col(v) = draw_field(chol[v], stream);
            if (w > 0.0)
                for (int b = 0; b < nb; ++b)
                    if (drilled[b])
                        factors(b, v) = w * truth_factors(b, v) + wc * factors(b, v);
        }
        const Eigen::MatrixXd values = distort(factors);
        for (int v = 0; v < nv; ++v)
            for (int b = 0; b < nb; ++b) prior.at(r, b, v) = values(b, v);
    }
    return {distort(truth_factors), std::move(prior)};
}

std::vector<std::vector<int>> make_period_plan(const GridSpec& grid, int n_periods,
                                               int obs_per_period, std::uint64_t seed) {
    const int nb = grid.n_blocks();
    if (n_periods < 1 || obs_per_period < 1)
        throw ValidationError("period plan: need at least one period and one observation");
    if (n_periods * obs_per_period > nb)
        throw ValidationError("period plan: " + std::to_string(n_periods * obs_per_period) +
                              " observations exceed " + std::to_string(nb) + " blocks");
    std::vector<int> blocks(nb);
    std::iota(blocks.begin(), blocks.end(), 0);
    RngStream stream(mix64(seed, kTagPlan));
    for (int i = nb - 1; i > 0; --i) {
        const int j = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(blocks[i], blocks[j]);
    }
    std::vector<std::vector<int>> plan(n_periods);
    int pos = 0;
    for (auto& period : plan) {
        period.assign(blocks.begin() + pos, blocks.begin() + pos + obs_per_period);
        std::sort(period.begin(), period.end());
        pos += obs_per_period;
    }
    return plan;
}

std::vector<ObservationSet> sample_observations(
    const Field& truth, const GridSpec& grid,
    const std::vector<std::vector<int>>& period_plan, const ErrorSpec& error_spec,
    std::uint64_t seed) {
    if (truth.rows() != grid.n_blocks())
        throw ValidationError("sample_observations: truth/grid size mismatch");
    const int nv = static_cast<int>(truth.cols());
    if (error_spec.mode == ErrorSpec::Mode::Absolute &&
        static_cast<int>(error_spec.absolute_sd.size()) != nv)
        throw ValidationError("sample_observations: absolute error spec needs one sd per variable");

    std::vector<char> used(grid.n_blocks(), 0);
    for (const auto& period : period_plan)
        for (int b : period) {
            if (b < 0 || b >= grid.n_blocks())
                throw ValidationError("period plan: block index outside grid");
            if (used[b])
                throw ValidationError("period plan: block " + std::to_string(b) +
                                      " appears in more than one period");
            used[b] = 1;
        }

    std::vector<ObservationSet> sets;
    sets.reserve(period_plan.size());
    for (std::size_t p = 0; p < period_plan.size(); ++p) {
        std::vector<ObservationRecord> records;
        records.reserve(period_plan[p].size());
        for (int b : period_plan[p]) {
            ObservationRecord rec;
            rec.block_index = b;
            rec.values.resize(nv);
            for (int v = 0; v < nv; ++v) {
                const double value = truth(b, v);
                const bool relative = error_spec.mode == ErrorSpec::Mode::Relative;
                const double sd = relative ? error_spec.relative_fraction * std::abs(value)
                                           : error_spec.absolute_sd[v];
                RngStream stream(mix64(mix64(seed, kTagObs, p, static_cast<std::uint64_t>(b)),
                                       static_cast<std::uint64_t>(v)));
                double obs = value + sd * stream.normal();
                if (relative && value >= 0.0 && obs < 0.0) {
                    for (int attempt = 0; attempt < 100 && obs < 0.0; ++attempt)
                        obs = value + sd * stream.normal();
                    if (obs < 0.0) obs = 0.0;
                }
                rec.values[v] = obs;
            }
            records.push_back(std::move(rec));
        }
        sets.emplace_back(static_cast<int>(p) + 1, std::move(records), error_spec);
    }
    return sets;
}

}  // namespace rmup
