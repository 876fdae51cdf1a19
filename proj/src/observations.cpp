#include "rmup/observations.hpp"

#include <set>
#include <string>

#include "rmup/errors.hpp"

namespace rmup {

ObservationSet::ObservationSet(int period, std::vector<ObservationRecord> records,
                               ErrorSpec error)
    : period_(period), records_(std::move(records)), error_(std::move(error)) {
    if (!records_.empty()) {
        const std::size_t nv = records_.front().values.size();
        for (const auto& r : records_)
            if (r.values.size() != nv)
                throw ValidationError(
                    "ObservationSet: record at block " + std::to_string(r.block_index) +
                    " does not carry every variable (homotopic sampling required)");
    }
    std::set<int> seen;
    for (const auto& r : records_)
        if (!seen.insert(r.block_index).second)
            throw ValidationError("ObservationSet: duplicate block index " +
                                  std::to_string(r.block_index) + " in period " +
                                  std::to_string(period_));
}

int ObservationSet::n_vars() const {
    return records_.empty() ? 0 : static_cast<int>(records_.front().values.size());
}

void ObservationSet::validate(const GridSpec& grid) const {
    for (const auto& r : records_)
        if (!grid.valid_index(r.block_index))
            throw ValidationError("ObservationSet: block index " +
                                  std::to_string(r.block_index) + " outside grid");
}

}  // namespace rmup
