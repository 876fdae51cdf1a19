#pragma once

#include <span>
#include <string>
#include <vector>

namespace rmup {

// Realisation values for every block and variable. Storage is ordered
// variable -> block -> realisation, so the members of one (variable, block)
// pair are contiguous; that vector is the unit all ensemble statistics and
// updates operate on. Concurrent readers are safe; writers need exclusivity.
class Ensemble {
public:
    Ensemble(int n_real, int n_blocks, std::vector<std::string> variable_names,
             std::string id = "ensemble");

    int n_real() const { return n_real_; }
    int n_blocks() const { return n_blocks_; }
    int n_vars() const { return static_cast<int>(variable_names_.size()); }
    const std::vector<std::string>& variable_names() const { return variable_names_; }
    const std::string& id() const { return id_; }

    double at(int real, int block, int var) const {
        return values_[offset(var, block) + real];
    }
    double& at(int real, int block, int var) { return values_[offset(var, block) + real]; }

    std::span<const double> members(int var, int block) const {
        return {values_.data() + offset(var, block), static_cast<std::size_t>(n_real_)};
    }
    std::span<double> members(int var, int block) {
        return {values_.data() + offset(var, block), static_cast<std::size_t>(n_real_)};
    }

    std::span<const double> raw() const { return values_; }
    std::span<double> raw() { return values_; }

    // Per-block mean over realisations of one variable.
    double block_mean(int var, int block) const;
    // Per-block sample variance (n-1) over realisations of one variable.
    double block_variance(int var, int block) const;

    // Throws ValidationError if any value is non-finite.
    void validate_finite() const;

private:
    std::size_t offset(int var, int block) const {
        return (static_cast<std::size_t>(var) * n_blocks_ + block) * n_real_;
    }

    int n_real_;
    int n_blocks_;
    std::vector<std::string> variable_names_;
    std::string id_;
    std::vector<double> values_;
};

// Ensemble restricted to a sorted unique subset of a parent's blocks.
struct SubModel {
    std::vector<int> block_indices;
    Ensemble ensemble;
    std::string parent_link;
};

SubModel extract_submodel(const Ensemble& model, std::vector<int> block_indices);
void insert_submodel(Ensemble& model, const SubModel& sub);

}  // namespace rmup
