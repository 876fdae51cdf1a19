#include "rmup/variogram.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "rmup/errors.hpp"
#include "rmup/io.hpp"

namespace rmup {

namespace {

double sph(double u) {
    if (u >= 1.0) return 1.0;
    return 1.5 * u - 0.5 * u * u * u;
}

}  // namespace

VariogramModel::VariogramModel(double nugget, std::vector<SphericalStructure> structures)
    : nugget_(nugget), structures_(std::move(structures)) {
    if (nugget_ < 0.0) throw ValidationError("VariogramModel: nugget must be >= 0");
    for (const auto& s : structures_) {
        if (!(s.sill > 0.0))
            throw ValidationError("VariogramModel: structure sill must be > 0");
        if (!(s.range_m > 0.0))
            throw ValidationError("VariogramModel: structure range must be > 0");
    }
    if (total_sill() <= 0.0)
        throw ValidationError("VariogramModel: total sill must be > 0");
}

double VariogramModel::total_sill() const {
    double t = nugget_;
    for (const auto& s : structures_) t += s.sill;
    return t;
}

double VariogramModel::max_range() const {
    double r = 0.0;
    for (const auto& s : structures_) r = std::max(r, s.range_m);
    return r;
}

double VariogramModel::value(double h) const {
    if (h < 0.0) throw ValidationError("variogram: lag distance must be >= 0");
    if (h == 0.0) return 0.0;
    double g = nugget_;
    for (const auto& s : structures_) g += s.sill * sph(h / s.range_m);
    return g;
}

double VariogramModel::covariance(double d) const {
    double c = 0.0;
    for (const auto& s : structures_) c += s.sill * (1.0 - sph(d / s.range_m));
    return c;
}

VariogramModel VariogramModel::parse(const std::string& text) {
    double nugget = 0.0;
    std::vector<SphericalStructure> structures;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);

    std::size_t pos = 0;
    const auto fail = [&](const std::string& msg) {
        throw ValidationError("variogram '" + text + "': " + msg);
    };
    const auto read_number = [&]() {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
        if (ec != std::errc{}) fail("expected a number at position " + std::to_string(pos));
        pos = static_cast<std::size_t>(ptr - s.data());
        return v;
    };
    const auto match = [&](std::string_view kw) {
        if (s.compare(pos, kw.size(), kw) == 0) {
            pos += kw.size();
            return true;
        }
        return false;
    };

    while (pos < s.size()) {
        const double c = read_number();
        if (match("Nug") || match("nug")) {
            nugget += c;
        } else if (match("Sph(") || match("sph(")) {
            const double a = read_number();
            match("m");
            if (!match(")")) fail("expected ')'");
            structures.push_back({c, a});
        } else {
            fail("expected Nug or Sph(...) at position " + std::to_string(pos));
        }
        if (pos < s.size() && !match("+")) fail("expected '+'");
    }
    return VariogramModel(nugget, std::move(structures));
}

std::string VariogramModel::to_string() const {
    std::ostringstream out;
    bool first = true;
    if (nugget_ > 0.0 || structures_.empty()) {
        out << io::format_value(nugget_) << "Nug";
        first = false;
    }
    for (const auto& s : structures_) {
        if (!first) out << " + ";
        out << io::format_value(s.sill) << "Sph(" << io::format_value(s.range_m) << "m)";
        first = false;
    }
    return out.str();
}

Eigen::MatrixXd build_covariance(const std::vector<Vec3>& points,
                                 const VariogramModel& model) {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n == 0) throw ValidationError("build_covariance: no points");
    if (n > kMaxDenseBlocks)
        throw ValidationError("build_covariance: " + std::to_string(n) +
                              " points exceed the dense limit of " +
                              std::to_string(kMaxDenseBlocks));
    const double total = model.total_sill();
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        cov(p, p) = total;
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const double c = model.covariance(distance(points[p], points[q]));
            cov(p, q) = c;
            cov(q, p) = c;
        }
    }
    return cov;
}

Eigen::MatrixXd build_covariance(const GridSpec& grid,
                                 const std::vector<int>& block_indices,
                                 const VariogramModel& model) {
    std::vector<Vec3> points;
    points.reserve(block_indices.size());
    for (int idx : block_indices) points.push_back(grid.centre(idx));
    return build_covariance(points, model);
}

}  // namespace rmup
