// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/tracker.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>

namespace croptrack {

// Stable, well-spread color per id (golden-angle hue walk).
inline void id_color(int id, int& r, int& g, int& b) {
    const double hue = std::fmod(static_cast<double>(id) * 137.508, 360.0);
    const double c = 0.8;
    const double x = c * (1.0 - std::abs(std::fmod(hue / 60.0, 2.0) - 1.0));
    double rf = 0, gf = 0, bf = 0;
    if (hue < 60) { rf = c; gf = x; }
    else if (hue < 120) { rf = x; gf = c; }
    else if (hue < 180) { gf = c; bf = x; }
    else if (hue < 240) { gf = x; bf = c; }
    else if (hue < 300) { rf = x; bf = c; }
    else { rf = c; bf = x; }
    r = static_cast<int>(std::lround((rf + 0.1) * 255.0 / 0.9));
    g = static_cast<int>(std::lround((gf + 0.1) * 255.0 / 0.9));
    b = static_cast<int>(std::lround((bf + 0.1) * 255.0 / 0.9));
}

/// One SVG document showing the frame's track boxes labeled by id.
inline void write_svg_overlay(std::ostream& os, const FrameResult& frame, double width, double height) {
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#202020\"/>\n";
    os << "  <text x=\"8\" y=\"24\" fill=\"#ffffff\" font-family=\"monospace\" font-size=\"20\">frame "
       << frame.frame << "</text>\n";
    for (const auto& e : frame.entries) {
        int r = 0, g = 0, b = 0;
        id_color(e.track_id, r, g, b);
        os << "  <g>\n"
           << "    <rect x=\"" << e.box.x << "\" y=\"" << e.box.y << "\" width=\"" << e.box.w << "\" height=\""
           << e.box.h << "\" fill=\"none\" stroke=\"rgb(" << r << ',' << g << ',' << b << ")\" stroke-width=\"2\"/>\n"
           << "    <text x=\"" << e.box.x << "\" y=\"" << e.box.y - 4.0 << "\" fill=\"rgb(" << r << ',' << g << ','
           << b << ")\" font-family=\"monospace\" font-size=\"14\">" << e.track_id << "</text>\n"
           << "  </g>\n";
    }
    os << "</svg>\n";
}

}  // namespace croptrack
