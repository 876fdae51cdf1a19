#pragma once

#include <vector>

#include "rmup/grid.hpp"

namespace rmup {

// Measurement error model attached to a set of observations.
struct ErrorSpec {
    enum class Mode { Relative, Absolute };
    Mode mode = Mode::Relative;
    double relative_fraction = 0.1;       // sd = fraction * |value|
    std::vector<double> absolute_sd;      // per-variable sd, Absolute mode
};

struct ObservationRecord {
    int block_index = 0;
    std::vector<double> values;  // one entry per variable (homotopic)
};

class ObservationSet {
public:
    ObservationSet(int period, std::vector<ObservationRecord> records, ErrorSpec error);

    int period() const { return period_; }
    const std::vector<ObservationRecord>& records() const { return records_; }
    const ErrorSpec& error_spec() const { return error_; }
    int n_vars() const;

    // Duplicate-block and grid-range validation; throws ValidationError.
    void validate(const GridSpec& grid) const;

private:
    int period_;
    std::vector<ObservationRecord> records_;
    ErrorSpec error_;
};

}  // namespace rmup
