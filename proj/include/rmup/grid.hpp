#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rmup {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Regular 3D block grid. Linear index runs i fastest, then j, then k
// (index = i + nx*(j + ny*k)), so one k-slice is contiguous.
class GridSpec {
public:
    GridSpec(int nx, int ny, int nz, double dx, double dy, double dz,
             Vec3 origin = {});

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double dz() const { return dz_; }
    const Vec3& origin() const { return origin_; }

    int n_blocks() const { return nx_ * ny_ * nz_; }

    // Throws ValidationError when (i,j,k) is outside the grid.
    int block_index(int i, int j, int k) const;
    std::array<int, 3> ijk(int index) const;
    Vec3 centre(int index) const;
    Vec3 centre(int i, int j, int k) const;

    bool valid_index(int index) const { return index >= 0 && index < n_blocks(); }

    // Nearest block centre; coordinate ties resolve toward the lower index.
    int snap_to_block(const Vec3& p) const;

    bool operator==(const GridSpec&) const = default;

private:
    int nx_, ny_, nz_;
    double dx_, dy_, dz_;
    Vec3 origin_;
};

}  // namespace rmup
