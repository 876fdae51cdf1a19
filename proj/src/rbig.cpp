#include "rmup/rbig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rmup/errors.hpp"
#include "rmup/pca.hpp"
#include "rmup/stats.hpp"

namespace rmup {

RbigChain::RbigChain(std::vector<RbigIteration> iterations, long n_rows,
                     std::vector<std::string> variable_names, bool rank_deficient)
    : iterations_(std::move(iterations)), n_rows_(n_rows),
      variable_names_(std::move(variable_names)), rank_deficient_(rank_deficient) {}

int RbigChain::n_vars() const {
    return iterations_.empty() ? 0 : static_cast<int>(iterations_.front().maps.size());
}

Eigen::MatrixXd RbigChain::forward(Eigen::MatrixXd data) const {
    if (data.cols() != n_vars())
        throw ValidationError("RbigChain::forward: column count does not match chain");
    for (const auto& iter : iterations_) {
        for (Eigen::Index v = 0; v < data.cols(); ++v)
            for (Eigen::Index r = 0; r < data.rows(); ++r)
                data(r, v) = iter.maps[static_cast<std::size_t>(v)].forward(data(r, v));
        data = data * iter.rotation.transpose();
    }
    return data;
}

Eigen::MatrixXd RbigChain::inverse(Eigen::MatrixXd factors) const {
    if (factors.cols() != n_vars())
        throw ValidationError("RbigChain::inverse: column count does not match chain");
    for (auto it = iterations_.rbegin(); it != iterations_.rend(); ++it) {
        factors = factors * it->rotation;  // R^T applied to row vectors
        for (Eigen::Index v = 0; v < factors.cols(); ++v)
            for (Eigen::Index r = 0; r < factors.rows(); ++r)
                factors(r, v) = it->maps[static_cast<std::size_t>(v)].inverse(factors(r, v));
    }
    return factors;
}

double negentropy_proxy(const Eigen::MatrixXd& data) {
    double total = 0.0;
    for (Eigen::Index v = 0; v < data.cols(); ++v) {
        std::span<const double> col(data.col(v).data(), static_cast<std::size_t>(data.rows()));
        total += std::abs(stats::skewness(col)) + std::abs(stats::excess_kurtosis(col)) / 4.0;
    }
    return total;
}

RbigFitResult rbig_fit_forward(const Eigen::MatrixXd& data, const RbigOptions& options) {
    const Eigen::Index n = data.rows();
    const Eigen::Index nv = data.cols();
    if (options.n_iterations < 1)
        throw ValidationError("rbig_fit_forward: need at least one iteration");
    if (n <= 10 * nv)
        throw ValidationError("rbig_fit_forward: need more than 10 rows per variable");

    const auto var_name = [&](Eigen::Index v) {
        if (v < static_cast<Eigen::Index>(options.variable_names.size()))
            return options.variable_names[static_cast<std::size_t>(v)];
        return "v" + std::to_string(v);
    };

    RbigFitResult out;
    out.factors = data;
    std::vector<RbigIteration> iterations;
    bool rank_deficient = false;

    for (int it = 0; it < options.n_iterations; ++it) {
        RbigIteration stage;
        stage.maps.reserve(static_cast<std::size_t>(nv));
        for (Eigen::Index v = 0; v < nv; ++v) {
            std::span<const double> col(out.factors.col(v).data(), static_cast<std::size_t>(n));
            try {
                auto res = marginal_gaussianise(col, static_cast<std::uint64_t>(v));
                for (Eigen::Index r = 0; r < n; ++r)
                    out.factors(r, v) = res.scores[static_cast<std::size_t>(r)];
                stage.maps.push_back(std::move(res.map));
            } catch (const NumericalError& e) {
                throw NumericalError("rbig_fit_forward: variable '" + var_name(v) +
                                     "' degenerate at iteration " + std::to_string(it + 1) +
                                     ": " + e.what());
            }
        }
        PcaRotation pca = pca_rotation(out.factors);
        rank_deficient = rank_deficient || pca.rank_deficient;
        out.factors = out.factors * pca.rotation.transpose();
        stage.rotation = std::move(pca.rotation);
        iterations.push_back(std::move(stage));

        out.negentropy.push_back(negentropy_proxy(out.factors));
        if (options.early_stop && out.negentropy.back() < options.early_stop_threshold)
            break;
    }

    std::vector<std::string> names;
    for (Eigen::Index v = 0; v < nv; ++v) names.push_back(var_name(v));
    out.chain = RbigChain(std::move(iterations), n, std::move(names), rank_deficient);
    return out;
}

PooledFit fit_pooled(const Ensemble& neighbourhood,
                     const std::vector<ObservationRecord>& observations,
                     const RbigOptions& options) {
    if (observations.empty())
        throw ValidationError("fit_pooled: observations required for the pooled transform");
    const int nv = neighbourhood.n_vars();
    for (const auto& rec : observations)
        if (static_cast<int>(rec.values.size()) != nv)
            throw ValidationError("fit_pooled: observation record at block " +
                                  std::to_string(rec.block_index) + " carries " +
                                  std::to_string(rec.values.size()) + " variables, model has " +
                                  std::to_string(nv));

    const int nb = neighbourhood.n_blocks();
    const int nr = neighbourhood.n_real();
    const long n_real_rows = static_cast<long>(nb) * nr;
    const long n_rows = n_real_rows + static_cast<long>(observations.size());

    Eigen::MatrixXd pooled(n_rows, nv);
    for (int v = 0; v < nv; ++v)
        for (int b = 0; b < nb; ++b) {
            const auto m = neighbourhood.members(v, b);
            for (int r = 0; r < nr; ++r)
                pooled(static_cast<long>(b) * nr + r, v) = m[static_cast<std::size_t>(r)];
        }
    for (std::size_t o = 0; o < observations.size(); ++o)
        for (int v = 0; v < nv; ++v)
            pooled(n_real_rows + static_cast<long>(o), v) = observations[o].values[v];

    RbigOptions opts = options;
    if (opts.variable_names.empty()) opts.variable_names = neighbourhood.variable_names();
    RbigFitResult fit = rbig_fit_forward(pooled, opts);

    PooledFit out;
    out.realisation_factors = fit.factors.topRows(n_real_rows);
    out.observation_factors = fit.factors.bottomRows(static_cast<long>(observations.size()));
    out.chain = std::move(fit.chain);
    return out;
}

namespace {

void write_double(std::ofstream& f, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    f << buf;
}

}  // namespace

void RbigChain::save(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    const int nv = n_vars();
    f << "RBIGCHAIN v1\n";
    f << "n_iterations " << n_iterations() << "\n";
    f << "n_vars " << nv << "\n";
    f << "n_rows " << n_rows_ << "\n";
    f << "rank_deficient " << (rank_deficient_ ? 1 : 0) << "\n";
    f << "variables";
    for (const auto& name : variable_names_) f << ' ' << name;
    f << "\n";
    for (int i = 0; i < n_iterations(); ++i) {
        const auto& iter = iterations_[static_cast<std::size_t>(i)];
        f << "iteration " << i << "\n";
        f << "rotation\n";
        for (int r = 0; r < nv; ++r) {
            for (int c = 0; c < nv; ++c) {
                if (c) f << ' ';
                write_double(f, iter.rotation(r, c));
            }
            f << "\n";
        }
        for (int v = 0; v < nv; ++v) {
            const auto& map = iter.maps[static_cast<std::size_t>(v)];
            f << "map " << v << ' ' << map.n_anchors() << ' ';
            write_double(f, map.tail_slope_lo());
            f << ' ';
            write_double(f, map.tail_slope_hi());
            f << "\n";
            for (std::size_t a = 0; a < map.n_anchors(); ++a) {
                write_double(f, map.anchor_values()[a]);
                f << ' ';
                write_double(f, map.anchor_scores()[a]);
                f << "\n";
            }
        }
    }
    f << "END\n";
}

RbigChain RbigChain::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    long lineno = 0;
    const auto next_line = [&]() {
        if (!std::getline(f, line))
            throw ParseError(path.string(), lineno, "unexpected end of file");
        ++lineno;
        return std::istringstream(line);
    };

    {
        auto in = next_line();
        std::string magic, version;
        in >> magic >> version;
        if (magic != "RBIGCHAIN" || version != "v1")
            throw ParseError(path.string(), lineno, "not an RBIGCHAIN v1 file");
    }
    const auto read_kv = [&](const std::string& key) {
        auto in = next_line();
        std::string k;
        long v;
        if (!(in >> k >> v) || k != key)
            throw ParseError(path.string(), lineno, "expected '" + key + " <n>'");
        return v;
    };
    const long n_iterations = read_kv("n_iterations");
    const long nv = read_kv("n_vars");
    const long n_rows = read_kv("n_rows");
    const long rank_deficient = read_kv("rank_deficient");
    std::vector<std::string> names;
    {
        auto in = next_line();
        std::string k, name;
        in >> k;
        if (k != "variables") throw ParseError(path.string(), lineno, "expected 'variables'");
        while (in >> name) names.push_back(name);
    }

    std::vector<RbigIteration> iterations;
    for (long i = 0; i < n_iterations; ++i) {
        if (read_kv("iteration") != i)
            throw ParseError(path.string(), lineno, "iteration index out of order");
        {
            auto in = next_line();
            std::string k;
            in >> k;
            if (k != "rotation") throw ParseError(path.string(), lineno, "expected 'rotation'");
        }
        RbigIteration iter;
        iter.rotation.resize(nv, nv);
        for (long r = 0; r < nv; ++r) {
            auto in = next_line();
            for (long c = 0; c < nv; ++c)
                if (!(in >> iter.rotation(r, c)))
                    throw ParseError(path.string(), lineno, "bad rotation row");
        }
        for (long v = 0; v < nv; ++v) {
            auto in = next_line();
            std::string k;
            long vi, n_anchors;
            double slope_lo, slope_hi;
            if (!(in >> k >> vi >> n_anchors >> slope_lo >> slope_hi) || k != "map" || vi != v)
                throw ParseError(path.string(), lineno, "expected 'map <v> <n> <lo> <hi>'");
            std::vector<double> values(static_cast<std::size_t>(n_anchors));
            std::vector<double> scores(static_cast<std::size_t>(n_anchors));
            for (long a = 0; a < n_anchors; ++a) {
                auto ain = next_line();
                if (!(ain >> values[static_cast<std::size_t>(a)] >>
                      scores[static_cast<std::size_t>(a)]))
                    throw ParseError(path.string(), lineno, "bad anchor pair");
            }
            iter.maps.emplace_back(std::move(values), std::move(scores), slope_lo, slope_hi);
        }
        iterations.push_back(std::move(iter));
    }
    return RbigChain(std::move(iterations), n_rows, std::move(names), rank_deficient != 0);
}

}  // namespace rmup
