#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmup/grid.hpp"

namespace rmup {

struct SphericalStructure {
    double sill;     // contribution c > 0
    double range_m;  // a > 0
};

// Isotropic nugget + sum-of-sphericals model, Table-2-style shape.
class VariogramModel {
public:
    VariogramModel(double nugget, std::vector<SphericalStructure> structures);

    // Accepts e.g. "0.28Nug + 0.33Sph(37m) + 0.39Sph(358m)".
    static VariogramModel parse(const std::string& text);

    double nugget() const { return nugget_; }
    const std::vector<SphericalStructure>& structures() const { return structures_; }
    double total_sill() const;
    double max_range() const;

    // gamma(h); throws ValidationError for h < 0.
    double value(double h) const;

    // Covariance between two distinct locations at distance d:
    // sum_s c_s * (1 - sph(d/a_s)); the nugget never contributes off-diagonal.
    double covariance(double d) const;

    std::string to_string() const;

private:
    double nugget_;
    std::vector<SphericalStructure> structures_;
};

inline constexpr int kMaxDenseBlocks = 4096;

// Dense block-to-block covariance over arbitrary points. Diagonal entries are
// the total sill. Capped at kMaxDenseBlocks points.
Eigen::MatrixXd build_covariance(const std::vector<Vec3>& points,
                                 const VariogramModel& model);
Eigen::MatrixXd build_covariance(const GridSpec& grid,
                                 const std::vector<int>& block_indices,
                                 const VariogramModel& model);

}  // namespace rmup
