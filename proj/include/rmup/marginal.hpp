#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rmup {

// Monotone empirical-quantile map between a variable's values and standard
// normal scores. Anchors are the distinct training values; within the anchor
// range evaluation is piecewise linear, beyond it linear tails apply whose
// forward slope is floored at 10% of the interquartile slope.
class MarginalMap {
public:
    MarginalMap(std::vector<double> values, std::vector<double> scores,
                double tail_slope_lo, double tail_slope_hi);

    double forward(double value) const;   // value -> score
    double inverse(double score) const;   // score -> value

    std::size_t n_anchors() const { return values_.size(); }
    const std::vector<double>& anchor_values() const { return values_; }
    const std::vector<double>& anchor_scores() const { return scores_; }
    double tail_slope_lo() const { return slope_lo_; }
    double tail_slope_hi() const { return slope_hi_; }

private:
    std::vector<double> values_;  // strictly increasing
    std::vector<double> scores_;  // strictly increasing
    double slope_lo_;             // forward d(score)/d(value) below the range
    double slope_hi_;             // and above it
};

struct GaussianiseResult {
    std::vector<double> scores;  // per input row, despiked
    MarginalMap map;
};

// Normal scores by the (rank - 0.5)/n convention. Ties are despiked with a
// deterministic hash of (row index, variable index); the stored map carries
// one anchor per distinct value (mean score over its despiked run).
// Throws ValidationError for <10 or non-finite values, NumericalError for a
// constant column.
GaussianiseResult marginal_gaussianise(std::span<const double> column,
                                       std::uint64_t variable_index = 0);

}  // namespace rmup
