// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/cost_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <span>

namespace croptrack {

/// Axis-aligned box in MOT-Challenge layout: left, top, width, height (pixels).
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    double area() const { return w * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
    bool valid() const { return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y); }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection over union. Boxes that only share an edge have IoU 0.
inline double iou(const Box& a, const Box& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

/// Entry (i, j) is 1 - iou(rows[i], cols[j]).
inline CostMatrix iou_distance_matrix(std::span<const Box> rows, std::span<const Box> cols) {
    CostMatrix m(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            m(i, j) = 1.0 - iou(rows[i], cols[j]);
        }
    }
    return m;
}

inline double center_distance(const Box& a, const Box& b) {
    return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

}  // namespace croptrack
