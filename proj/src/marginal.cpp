#include "rmup/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmup/errors.hpp"
#include "rmup/rng.hpp"
#include "rmup/stats.hpp"

namespace rmup {

MarginalMap::MarginalMap(std::vector<double> values, std::vector<double> scores,
                         double tail_slope_lo, double tail_slope_hi)
    : values_(std::move(values)), scores_(std::move(scores)),
      slope_lo_(tail_slope_lo), slope_hi_(tail_slope_hi) {
    if (values_.size() != scores_.size() || values_.size() < 2)
        throw ValidationError("MarginalMap: need >= 2 anchor pairs");
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (!(values_[i] > values_[i - 1]) || !(scores_[i] > scores_[i - 1]))
            throw ValidationError("MarginalMap: anchors must be strictly increasing");
    if (!(slope_lo_ > 0.0) || !(slope_hi_ > 0.0))
        throw ValidationError("MarginalMap: tail slopes must be positive");
}

double MarginalMap::forward(double value) const {
    if (value <= values_.front())
        return scores_.front() + (value - values_.front()) * slope_lo_;
    if (value >= values_.back())
        return scores_.back() + (value - values_.back()) * slope_hi_;
    const auto it = std::upper_bound(values_.begin(), values_.end(), value);
    const std::size_t i = static_cast<std::size_t>(it - values_.begin());
    const double t = (value - values_[i - 1]) / (values_[i] - values_[i - 1]);
    return scores_[i - 1] + t * (scores_[i] - scores_[i - 1]);
}

double MarginalMap::inverse(double score) const {
    if (score <= scores_.front())
        return values_.front() + (score - scores_.front()) / slope_lo_;
    if (score >= scores_.back())
        return values_.back() + (score - scores_.back()) / slope_hi_;
    const auto it = std::upper_bound(scores_.begin(), scores_.end(), score);
    const std::size_t i = static_cast<std::size_t>(it - scores_.begin());
    const double t = (score - scores_[i - 1]) / (scores_[i] - scores_[i - 1]);
    return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

GaussianiseResult marginal_gaussianise(std::span<const double> column,
                                       std::uint64_t variable_index) {
    const std::size_t n = column.size();
    if (n < 10)
        throw ValidationError("marginal_gaussianise: need at least 10 values");
    for (double v : column)
        if (!std::isfinite(v))
            throw ValidationError("marginal_gaussianise: non-finite value");

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (column[a] != column[b]) return column[a] < column[b];
        return mix64(a, variable_index) < mix64(b, variable_index);
    });
    if (column[order.front()] == column[order.back()])
        throw NumericalError("marginal_gaussianise: constant column (degenerate distribution)");

    std::vector<double> scores(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p)
        scores[order[p]] = stats::normal_quantile((static_cast<double>(p) + 0.5) * inv_n);

    // one anchor per distinct value; tied runs keep their mean score
    std::vector<double> anchor_values, anchor_scores;
    anchor_values.reserve(n);
    anchor_scores.reserve(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double acc = scores[order[i]];
        while (j + 1 < n && column[order[j + 1]] == column[order[i]]) {
            ++j;
            acc += scores[order[j]];
        }
        anchor_values.push_back(column[order[i]]);
        anchor_scores.push_back(acc / static_cast<double>(j - i + 1));
        i = j + 1;
    }

    const std::size_t m = anchor_values.size();
    double slope_lo, slope_hi;
    if (m >= 2) {
        slope_lo = (anchor_scores[1] - anchor_scores[0]) /
                   (anchor_values[1] - anchor_values[0]);
        slope_hi = (anchor_scores[m - 1] - anchor_scores[m - 2]) /
                   (anchor_values[m - 1] - anchor_values[m - 2]);
    } else {
        slope_lo = slope_hi = 1.0;
    }
    // interquartile forward slope as the floor reference
    {
        MarginalMap probe(anchor_values, anchor_scores, std::max(slope_lo, 1e-300),
                          std::max(slope_hi, 1e-300));
        const double q1 = stats::normal_quantile(0.25);
        const double q3 = stats::normal_quantile(0.75);
        const double v1 = probe.inverse(q1);
        const double v3 = probe.inverse(q3);
        double iqr_slope = (v3 > v1) ? (q3 - q1) / (v3 - v1)
                                     : (anchor_scores[m - 1] - anchor_scores[0]) /
                                           (anchor_values[m - 1] - anchor_values[0]);
        slope_lo = std::max(slope_lo, 0.1 * iqr_slope);
        slope_hi = std::max(slope_hi, 0.1 * iqr_slope);
    }

    return {std::move(scores),
            MarginalMap(std::move(anchor_values), std::move(anchor_scores), slope_lo,
                        slope_hi)};
}

}  // namespace rmup
