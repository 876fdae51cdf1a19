#include "rmup/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "rmup/errors.hpp"
#include "rmup/kernels.hpp"

namespace rmup {

Ensemble::Ensemble(int n_real, int n_blocks, std::vector<std::string> variable_names,
                   std::string id)
    : n_real_(n_real), n_blocks_(n_blocks), variable_names_(std::move(variable_names)),
      id_(std::move(id)) {
    if (n_real_ < 2)
        throw ValidationError("Ensemble: need at least 2 realisations");
    if (n_blocks_ < 1) throw ValidationError("Ensemble: need at least 1 block");
    if (variable_names_.empty())
        throw ValidationError("Ensemble: need at least 1 variable");
    values_.assign(static_cast<std::size_t>(n_real_) * n_blocks_ * n_vars(), 0.0);
}

double Ensemble::block_mean(int var, int block) const {
    const auto m = members(var, block);
    return kern::sum(m.data(), m.size()) / static_cast<double>(n_real_);
}

double Ensemble::block_variance(int var, int block) const {
    const auto m = members(var, block);
    const double mu = block_mean(var, block);
    double ss = 0.0;
    for (double v : m) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(n_real_ - 1);
}

void Ensemble::validate_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("Ensemble: non-finite value");
}

SubModel extract_submodel(const Ensemble& model, std::vector<int> block_indices) {
    if (block_indices.empty())
        throw ValidationError("extract_submodel: empty block selection");
    std::sort(block_indices.begin(), block_indices.end());
    if (std::adjacent_find(block_indices.begin(), block_indices.end()) !=
        block_indices.end())
        throw ValidationError("extract_submodel: duplicate block index");
    if (block_indices.front() < 0 || block_indices.back() >= model.n_blocks())
        throw ValidationError("extract_submodel: block index outside model");

    Ensemble sub(model.n_real(), static_cast<int>(block_indices.size()),
                 model.variable_names(), model.id() + "/sub");
    for (int v = 0; v < model.n_vars(); ++v)
        for (std::size_t b = 0; b < block_indices.size(); ++b) {
            const auto src = model.members(v, block_indices[b]);
            const auto dst = sub.members(v, static_cast<int>(b));
            std::copy(src.begin(), src.end(), dst.begin());
        }
    return {std::move(block_indices), std::move(sub), model.id()};
}

void insert_submodel(Ensemble& model, const SubModel& sub) {
    if (sub.parent_link != model.id())
        throw ValidationError("insert_submodel: parent link '" + sub.parent_link +
                              "' does not match model '" + model.id() + "'");
    if (sub.ensemble.n_real() != model.n_real() ||
        sub.ensemble.n_vars() != model.n_vars())
        throw ValidationError("insert_submodel: shape mismatch with parent");
    if (sub.ensemble.n_blocks() != static_cast<int>(sub.block_indices.size()))
        throw ValidationError("insert_submodel: index/ensemble size mismatch");
    for (int idx : sub.block_indices)
        if (idx < 0 || idx >= model.n_blocks())
            throw ValidationError("insert_submodel: block index outside model");

    for (int v = 0; v < model.n_vars(); ++v)
        for (std::size_t b = 0; b < sub.block_indices.size(); ++b) {
            const auto src = sub.ensemble.members(v, static_cast<int>(b));
            const auto dst = model.members(v, sub.block_indices[b]);
            std::copy(src.begin(), src.end(), dst.begin());
        }
}

}  // namespace rmup
