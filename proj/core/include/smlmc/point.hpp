#pragma once

#include <cmath>
#include <span>

namespace smlmc {

struct Point {
    double x_nm = 0.0;
    double y_nm = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept {
    return std::hypot(a.x_nm - b.x_nm, a.y_nm - b.y_nm);
}

using PointSet = std::span<const Point>;

}  // namespace smlmc
