// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/cost_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace croptrack {

struct Match {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const Match&, const Match&) = default;
    friend auto operator<=>(const Match&, const Match&) = default;
};

/// Matches plus the leftovers of both index sets, each list in ascending order.
struct AssignmentResult {
    std::vector<Match> matches;
    std::vector<std::size_t> unmatched_rows;
    std::vector<std::size_t> unmatched_cols;

    double total_cost(const CostMatrix& costs) const {
        double total = 0.0;
        for (const auto& m : matches) {
            total += costs(m.row, m.col);
        }
        return total;
    }
};

/// One entry of the one-to-many candidate pool.
struct Candidate {
    std::size_t track = 0;
    std::size_t detection = 0;
    double cost = 0.0;
};

namespace detail {

inline AssignmentResult finish(std::vector<Match> matches, std::size_t rows, std::size_t cols) {
    AssignmentResult out;
    std::sort(matches.begin(), matches.end());
    std::vector<bool> row_used(rows, false);
    std::vector<bool> col_used(cols, false);
    for (const auto& m : matches) {
        row_used[m.row] = true;
        col_used[m.col] = true;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (!row_used[r]) out.unmatched_rows.push_back(r);
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) out.unmatched_cols.push_back(c);
    }
    out.matches = std::move(matches);
    return out;
}

// Shortest augmenting path with row/column potentials on a square n x n matrix.
// Returns row_to_col.
inline std::vector<std::size_t> solve_square(const std::vector<double>& a, std::size_t n) {
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0);  // p[j]: row (1-based) assigned to column j
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, none);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace detail

/**
 * Gated minimum-cost one-to-one assignment.
 *
 * Pairs with cost > gate (including +inf) are replaced by a sentinel larger than
 * any sum of admissible costs, so the solver first maximizes the number of
 * admissible matches and then minimizes their total cost. Sentinel matches are
 * stripped afterwards. Rectangular inputs are padded with zero-cost dummies.
 */
inline AssignmentResult hungarian(const CostMatrix& costs, double gate) {
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();
    if (rows == 0 || cols == 0) {
        return detail::finish({}, rows, cols);
    }
    const std::size_t n = std::max(rows, cols);

    double max_admissible = 0.0;
    bool any_admissible = false;
    for (double c : costs.values()) {
        if (c <= gate && std::isfinite(c)) {
            max_admissible = std::max(max_admissible, c);
            any_admissible = true;
        }
    }
    if (!any_admissible) {
        return detail::finish({}, rows, cols);
    }
    const double sentinel = (max_admissible + 1.0) * static_cast<double>(n + 1);

    std::vector<double> square(n * n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = costs(r, c);
            square[r * n + c] = (v <= gate && std::isfinite(v)) ? v : sentinel;
        }
    }

    const auto row_to_col = detail::solve_square(square, n);
    std::vector<Match> matches;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t c = row_to_col[r];
        if (c < cols) {
            const double v = costs(r, c);
            if (v <= gate && std::isfinite(v)) {
                matches.push_back({r, c});
            }
        }
    }
    return detail::finish(std::move(matches), rows, cols);
}

/**
 * Exhaustive reference solver: among all partial assignments of admissible
 * pairs (cost <= gate), picks the one with the most matches, then the lowest
 * total cost. Test oracle only; min(rows, cols) must not exceed 9.
 */
inline AssignmentResult brute_force_assignment(const CostMatrix& costs, double gate) {
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();
    if (std::min(rows, cols) > 9) {
        throw std::length_error("brute_force_assignment: min(rows, cols) must be <= 9");
    }
    const bool transposed = rows > cols;
    const std::size_t small = transposed ? cols : rows;
    const std::size_t large = transposed ? rows : cols;
    auto cost_at = [&](std::size_t s, std::size_t l) { return transposed ? costs(l, s) : costs(s, l); };
    auto admissible = [&](std::size_t s, std::size_t l) {
        const double v = cost_at(s, l);
        return v <= gate && std::isfinite(v);
    };

    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> current(small, none);
    std::vector<std::size_t> best(small, none);
    std::vector<bool> used(large, false);
    std::size_t best_count = 0;
    double best_cost = kInf;

    auto recurse = [&](auto&& self, std::size_t s, std::size_t count, double total) -> void {
        if (s == small) {
            if (count > best_count || (count == best_count && total < best_cost)) {
                best_count = count;
                best_cost = total;
                best = current;
            }
            return;
        }
        current[s] = none;
        self(self, s + 1, count, total);
        for (std::size_t l = 0; l < large; ++l) {
            if (used[l] || !admissible(s, l)) continue;
            used[l] = true;
            current[s] = l;
            self(self, s + 1, count + 1, total + cost_at(s, l));
            used[l] = false;
            current[s] = none;
        }
    };
    recurse(recurse, 0, 0, 0.0);

    std::vector<Match> matches;
    for (std::size_t s = 0; s < small; ++s) {
        if (best[s] == none) continue;
        matches.push_back(transposed ? Match{best[s], s} : Match{s, best[s]});
    }
    return detail::finish(std::move(matches), rows, cols);
}

/// Row-major list of (track, detection) pairs whose IoU distance is strictly below the gate.
inline std::vector<std::pair<std::size_t, std::size_t>> generate_candidates(const CostMatrix& iou_costs,
                                                                            double iou_gate) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < iou_costs.rows(); ++r) {
        for (std::size_t c = 0; c < iou_costs.cols(); ++c) {
            if (iou_costs(r, c) < iou_gate) {
                out.emplace_back(r, c);
            }
        }
    }
    return out;
}

/**
 * Greedy conflict resolution over a one-to-many candidate pool.
 *
 * Candidates are visited in ascending cost (ties by track, then detection);
 * a pair is accepted when neither endpoint is already taken. Infinite-cost
 * candidates are ignored. Index sets are sized from the largest index seen
 * unless explicit sizes are given.
 */
inline AssignmentResult greedy_resolve(std::vector<Candidate> candidates, std::size_t num_tracks = 0,
                                       std::size_t num_detections = 0) {
    for (const auto& c : candidates) {
        num_tracks = std::max(num_tracks, c.track + 1);
        num_detections = std::max(num_detections, c.detection + 1);
    }
    std::erase_if(candidates, [](const Candidate& c) { return !std::isfinite(c.cost); });
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.track != b.track) return a.track < b.track;
        return a.detection < b.detection;
    });

    std::vector<bool> track_taken(num_tracks, false);
    std::vector<bool> det_taken(num_detections, false);
    std::vector<Match> matches;
    for (const auto& c : candidates) {
        if (track_taken[c.track] || det_taken[c.detection]) continue;
        track_taken[c.track] = true;
        det_taken[c.detection] = true;
        matches.push_back({c.track, c.detection});
    }
    return detail::finish(std::move(matches), num_tracks, num_detections);
}

}  // namespace croptrack
