#pragma once

#include <filesystem>
#include <vector>

#include "rmup/ensemble.hpp"
#include "rmup/grid.hpp"
#include "rmup/observations.hpp"

namespace rmup::io {

// Grid file: one key=value pair per line (nx, ny, nz, dx, dy, dz, x0, y0, z0).
void write_grid(const GridSpec& grid, const std::filesystem::path& path);
GridSpec read_grid(const std::filesystem::path& path);

// Ensemble CSV: header "block_index,realisation,<var1>,...,<varV>", one row
// per (block, realisation). Row order is not significant; every pair must
// appear exactly once. Values carry 12 significant digits.
void write_ensemble(const Ensemble& e, const std::filesystem::path& path);
Ensemble read_ensemble(const std::filesystem::path& path, const std::string& id = "ensemble");

// Observation CSV: header "period,block_index,<var1>,...,<varV>"; one file may
// hold several periods. Returned sets are sorted by period and all share the
// caller-supplied error spec.
void write_observations(const std::vector<ObservationSet>& sets,
                        const std::vector<std::string>& variable_names,
                        const std::filesystem::path& path);
std::vector<ObservationSet> read_observations(const std::filesystem::path& path,
                                              const ErrorSpec& error);

// "%.12g"-style numeric formatting shared by all writers.
std::string format_value(double v);

}  // namespace rmup::io
