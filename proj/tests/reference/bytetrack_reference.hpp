#pragma once

// Minimal ByteTrack-semantics tracker written separately from the library's
// association code: exhaustive matching, own IoU, own bookkeeping. Only the
// Kalman filter is shared.

#include <croptrack/kalman.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace reference {

struct RefDet {
    double x, y, w, h, score;
};

struct RefOut {
    int id;
    double x, y, w, h;
};

inline double ref_iou(double ax, double ay, double aw, double ah, double bx, double by, double bw, double bh) {
    const double ix = std::min(ax + aw, bx + bw) - std::max(ax, bx);
    const double iy = std::min(ay + ah, by + bh) - std::max(ay, by);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    return inter / (aw * ah + bw * bh - inter);
}

// Exhaustive: most pairs with cost <= gate, ties broken by lowest total cost.
inline std::vector<std::pair<int, int>> exhaustive_match(const std::vector<std::vector<double>>& cost, double gate) {
    const int rows = static_cast<int>(cost.size());
    const int cols = rows ? static_cast<int>(cost[0].size()) : 0;
    std::vector<std::pair<int, int>> best, cur;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<bool> used(static_cast<std::size_t>(cols), false);
    std::function<void(int, double)> go = [&](int r, double total) {
        if (r == rows) {
            if (cur.size() > best.size() || (cur.size() == best.size() && total < best_cost)) {
                best = cur;
                best_cost = total;
            }
            return;
        }
        // prune: even matching every remaining row cannot beat the best count
        if (cur.size() + static_cast<std::size_t>(rows - r) < best.size()) return;
        go(r + 1, total);
        for (int c = 0; c < cols; ++c) {
            if (used[static_cast<std::size_t>(c)] || !(cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] <= gate)) continue;
            used[static_cast<std::size_t>(c)] = true;
            cur.push_back({r, c});
            go(r + 1, total + cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
            cur.pop_back();
            used[static_cast<std::size_t>(c)] = false;
        }
    };
    go(0, 0.0);
    return best;
}

class ByteTrackReference {
public:
    std::vector<RefOut> step(const std::vector<RefDet>& dets) {
        std::vector<RefDet> high, low;
        for (const auto& d : dets) (d.score > 0.6 ? high : low).push_back(d);

        for (auto& t : tracks_) {
            if (!t.tracked) t.state.mean(7) = 0.0;
            t.state = croptrack::predict(t.state);
            ++t.missed;
        }
        std::erase_if(tracks_, [](const T& t) { return !(t.state.mean(3) > 0.0) || !(t.state.mean(2) > 0.0); });

        std::vector<std::array<double, 4>> pred;
        for (const auto& t : tracks_) pred.push_back(box_of(t.state));

        auto costs = [&](const std::vector<std::size_t>& ts, const std::vector<RefDet>& ds) {
            std::vector<std::vector<double>> c(ts.size(), std::vector<double>(ds.size()));
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const auto& p = pred[ts[i]];
                for (std::size_t j = 0; j < ds.size(); ++j) {
                    c[i][j] = 1.0 - ref_iou(p[0], p[1], p[2], p[3], ds[j].x, ds[j].y, ds[j].w, ds[j].h);
                }
            }
            return c;
        };

        std::vector<std::size_t> all(tracks_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::vector<bool> matched_track(tracks_.size(), false);
        std::vector<bool> used_high(high.size(), false);
        for (auto [r, c] : exhaustive_match(costs(all, high), 0.8)) {
            absorb(tracks_[all[static_cast<std::size_t>(r)]], high[static_cast<std::size_t>(c)]);
            matched_track[all[static_cast<std::size_t>(r)]] = true;
            used_high[static_cast<std::size_t>(c)] = true;
        }
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (!matched_track[i]) rest.push_back(i);
        }
        for (auto [r, c] : exhaustive_match(costs(rest, low), 0.5)) {
            absorb(tracks_[rest[static_cast<std::size_t>(r)]], low[static_cast<std::size_t>(c)]);
            matched_track[rest[static_cast<std::size_t>(r)]] = true;
        }
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (matched_track[i]) continue;
            tracks_[i].tracked = false;
            if (tracks_[i].missed > 30) tracks_[i].dead = true;
        }
        std::erase_if(tracks_, [](const T& t) { return t.dead; });
        for (std::size_t j = 0; j < high.size(); ++j) {
            if (used_high[j]) continue;
            T t;
            t.id = next_id_++;
            t.state = croptrack::init_state({high[j].x, high[j].y, high[j].w, high[j].h});
            tracks_.push_back(t);
        }

        std::vector<RefOut> out;
        for (const auto& t : tracks_) {
            if (!t.tracked) continue;
            const auto b = box_of(t.state);
            out.push_back({t.id, b[0], b[1], b[2], b[3]});
        }
        std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.id < b.id; });
        return out;
    }

private:
    struct T {
        int id = 0;
        croptrack::KalmanState state;
        bool tracked = true;
        bool dead = false;
        int missed = 0;
    };

    static std::array<double, 4> box_of(const croptrack::KalmanState& s) {
        const double h = s.mean(3);
        const double w = s.mean(2) * h;
        return {s.mean(0) - w / 2.0, s.mean(1) - h / 2.0, w, h};
    }

    static void absorb(T& t, const RefDet& d) {
        t.state = croptrack::update(t.state, {d.x, d.y, d.w, d.h});
        t.tracked = true;
        t.missed = 0;
    }

    std::vector<T> tracks_;
    int next_id_ = 1;
};

}  // namespace reference
