#include "rmup/grid.hpp"

#include <algorithm>
#include <string>

#include "rmup/errors.hpp"

namespace rmup {

GridSpec::GridSpec(int nx, int ny, int nz, double dx, double dy, double dz, Vec3 origin)
    : nx_(nx), ny_(ny), nz_(nz), dx_(dx), dy_(dy), dz_(dz), origin_(origin) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw ValidationError("GridSpec: block counts must be >= 1");
    if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0))
        throw ValidationError("GridSpec: block dimensions must be > 0");
}

int GridSpec::block_index(int i, int j, int k) const {
    if (i < 0 || i >= nx_ || j < 0 || j >= ny_ || k < 0 || k >= nz_)
        throw ValidationError("block_index: coordinates (" + std::to_string(i) + "," +
                              std::to_string(j) + "," + std::to_string(k) +
                              ") outside grid");
    return i + nx_ * (j + ny_ * k);
}

std::array<int, 3> GridSpec::ijk(int index) const {
    if (!valid_index(index))
        throw ValidationError("ijk: index " + std::to_string(index) + " outside grid");
    const int k = index / (nx_ * ny_);
    const int rem = index - k * nx_ * ny_;
    return {rem % nx_, rem / nx_, k};
}

Vec3 GridSpec::centre(int i, int j, int k) const {
    block_index(i, j, k);  // range check
    return {origin_.x + (i + 0.5) * dx_, origin_.y + (j + 0.5) * dy_,
            origin_.z + (k + 0.5) * dz_};
}

Vec3 GridSpec::centre(int index) const {
    const auto c = ijk(index);
    return centre(c[0], c[1], c[2]);
}

int GridSpec::snap_to_block(const Vec3& p) const {
    const auto axis = [](double v, double o, double d, int n) {
        const int i = static_cast<int>(std::floor((v - o) / d));
        return std::clamp(i, 0, n - 1);
    };
    int i = axis(p.x, origin_.x, dx_, nx_);
    int j = axis(p.y, origin_.y, dy_, ny_);
    int k = axis(p.z, origin_.z, dz_, nz_);
    // Points on a block face belong to the lower-index block.
    const auto on_face = [](double v, double o, double d, int i) {
        return i > 0 && v == o + i * d;
    };
    if (on_face(p.x, origin_.x, dx_, i)) --i;
    if (on_face(p.y, origin_.y, dy_, j)) --j;
    if (on_face(p.z, origin_.z, dz_, k)) --k;
    return block_index(i, j, k);
}

}  // namespace rmup
