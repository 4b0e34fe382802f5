// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/assignment.hpp>
#include <croptrack/geometry.hpp>
#include <croptrack/synth.hpp>

#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace croptrack {

/// Identity-focused tracking scores. Fractions are in [0, 1] except MOTA (may be negative).
struct MetricsReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
    long idsw = 0;
    long frag = 0;
    long gt_count = 0;
    long pred_count = 0;
    long tp_count = 0;
    long fp_count = 0;
    long fn_count = 0;
    long idtp = 0;
    long idfp = 0;
    long idfn = 0;
};

/// Ground-truth to prediction correspondence in one frame (indices into the frame lists).
struct FrameMatch {
    std::vector<Match> pairs;  // (gt index, pred index)
    std::vector<std::size_t> unmatched_gt;
    std::vector<std::size_t> unmatched_pred;
};

/**
 * Minimum-cost (1 - IoU) one-to-one matching restricted to IoU >= threshold.
 *
 * When `previous` maps gt id -> pred id from the last frame, pairs continuing
 * that mapping are preferred over any other pair (the number of matches is
 * still maximized first).
 */
inline FrameMatch match_frame(const std::vector<GtObject>& gt, const std::vector<GtObject>& pred, double iou_threshold,
                              const std::unordered_map<int, int>* previous = nullptr) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw std::invalid_argument("match_frame: threshold must lie in (0, 1]");
    }
    CostMatrix costs(gt.size(), pred.size(), kInf);
    for (std::size_t g = 0; g < gt.size(); ++g) {
        for (std::size_t p = 0; p < pred.size(); ++p) {
            const double overlap = iou(gt[g].box, pred[p].box);
            if (overlap < iou_threshold) continue;
            bool continues = false;
            if (previous != nullptr) {
                const auto it = previous->find(gt[g].id);
                continues = it != previous->end() && it->second == pred[p].id;
            }
            costs(g, p) = (1.0 - overlap) + (continues || previous == nullptr ? 0.0 : 2.0);
        }
    }
    const auto a = hungarian(costs, 3.0);
    return {a.matches, a.unmatched_rows, a.unmatched_cols};
}

/**
 * CLEAR and identity measures over a sequence.
 *
 * MOTA = 1 - (FN + FP + IDsw) / GT with per-frame continuity-aware matching.
 * An identity switch is counted when a ground-truth object is matched to a
 * different prediction id than at its last match. A fragmentation is counted
 * each time a ground-truth object is matched again after having been present
 * but unmatched, once it had been matched before. IDF1 / IDP / IDR come from
 * the global ground-truth-id to prediction-id matching that maximizes the
 * number of co-occurring frames with IoU >= threshold.
 */
inline MetricsReport evaluate(const GtSequence& gt, const GtSequence& pred, double iou_threshold = 0.5) {
    if (gt.size() != pred.size()) {
        throw std::invalid_argument("evaluate: ground truth has " + std::to_string(gt.size()) +
                                    " frames but predictions have " + std::to_string(pred.size()));
    }
    MetricsReport r;

    std::unordered_map<int, int> previous;     // gt id -> pred id in the previous frame
    std::unordered_map<int, int> last_match;   // gt id -> pred id at the last match ever
    std::unordered_map<int, bool> was_tracked; // gt id -> matched in its last present frame
    std::map<int, long> gt_frames;
    std::map<int, long> pred_frames;
    std::map<std::pair<int, int>, long> co_occurrence;

    for (std::size_t f = 0; f < gt.size(); ++f) {
        const auto& g = gt[f];
        const auto& p = pred[f];
        r.gt_count += static_cast<long>(g.size());
        r.pred_count += static_cast<long>(p.size());
        for (const auto& o : g) ++gt_frames[o.id];
        for (const auto& o : p) ++pred_frames[o.id];
        for (const auto& go : g) {
            for (const auto& po : p) {
                if (iou(go.box, po.box) >= iou_threshold) ++co_occurrence[{go.id, po.id}];
            }
        }

        const FrameMatch m = match_frame(g, p, iou_threshold, &previous);
        std::unordered_map<int, int> current;
        std::vector<bool> gt_matched(g.size(), false);
        for (const auto& pair : m.pairs) {
            const int gid = g[pair.row].id;
            const int pid = p[pair.col].id;
            current[gid] = pid;
            gt_matched[pair.row] = true;
            const auto last = last_match.find(gid);
            if (last != last_match.end()) {
                if (last->second != pid) ++r.idsw;
                const auto tracked = was_tracked.find(gid);
                if (tracked != was_tracked.end() && !tracked->second) ++r.frag;
            }
            last_match[gid] = pid;
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            const int gid = g[i].id;
            if (gt_matched[i]) {
                was_tracked[gid] = true;
            } else if (last_match.contains(gid)) {
                was_tracked[gid] = false;
            }
        }
        r.tp_count += static_cast<long>(m.pairs.size());
        r.fn_count += static_cast<long>(m.unmatched_gt.size());
        r.fp_count += static_cast<long>(m.unmatched_pred.size());
        previous = std::move(current);
    }

    r.mota = r.gt_count > 0 ? 1.0 - static_cast<double>(r.fn_count + r.fp_count + r.idsw) / static_cast<double>(r.gt_count)
                            : 0.0;

    // Global identity matching: maximize total co-occurrence.
    std::vector<int> gt_ids;
    std::vector<int> pred_ids;
    for (const auto& [id, n] : gt_frames) gt_ids.push_back(id);
    for (const auto& [id, n] : pred_frames) pred_ids.push_back(id);
    long best_overlap = 0;
    for (const auto& [key, n] : co_occurrence) best_overlap = std::max(best_overlap, n);
    CostMatrix costs(gt_ids.size(), pred_ids.size(), static_cast<double>(best_overlap));
    for (std::size_t i = 0; i < gt_ids.size(); ++i) {
        for (std::size_t j = 0; j < pred_ids.size(); ++j) {
            const auto it = co_occurrence.find({gt_ids[i], pred_ids[j]});
            if (it != co_occurrence.end()) costs(i, j) = static_cast<double>(best_overlap - it->second);
        }
    }
    const auto assignment = hungarian(costs, static_cast<double>(best_overlap));
    for (const auto& m : assignment.matches) {
        const auto it = co_occurrence.find({gt_ids[m.row], pred_ids[m.col]});
        if (it != co_occurrence.end()) r.idtp += it->second;
    }
    r.idfn = r.gt_count - r.idtp;
    r.idfp = r.pred_count - r.idtp;
    r.idp = r.pred_count > 0 ? static_cast<double>(r.idtp) / static_cast<double>(r.pred_count) : 0.0;
    r.idr = r.gt_count > 0 ? static_cast<double>(r.idtp) / static_cast<double>(r.gt_count) : 0.0;
    const long denom = r.gt_count + r.pred_count;
    r.idf1 = denom > 0 ? 2.0 * static_cast<double>(r.idtp) / static_cast<double>(denom) : 0.0;
    return r;
}

/// Pools several per-sequence reports: counts are summed and ratios recomputed from the sums.
inline MetricsReport combine(const std::vector<MetricsReport>& reports) {
    MetricsReport r;
    for (const auto& s : reports) {
        r.idsw += s.idsw;
        r.frag += s.frag;
        r.gt_count += s.gt_count;
        r.pred_count += s.pred_count;
        r.tp_count += s.tp_count;
        r.fp_count += s.fp_count;
        r.fn_count += s.fn_count;
        r.idtp += s.idtp;
        r.idfp += s.idfp;
        r.idfn += s.idfn;
    }
    const auto ratio = [](long num, long den) { return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0; };
    r.mota = r.gt_count > 0 ? 1.0 - ratio(r.fn_count + r.fp_count + r.idsw, r.gt_count) : 0.0;
    r.idp = ratio(r.idtp, r.pred_count);
    r.idr = ratio(r.idtp, r.gt_count);
    r.idf1 = ratio(2 * r.idtp, r.gt_count + r.pred_count);
    return r;
}

/// Converts tracker output to the same per-frame layout as ground truth.
inline GtSequence to_sequence(const std::vector<FrameResult>& results, std::size_t frame_count) {
    GtSequence out(frame_count);
    for (const auto& fr : results) {
        if (fr.frame < 1 || static_cast<std::size_t>(fr.frame) > frame_count) {
            throw std::out_of_range("to_sequence: frame " + std::to_string(fr.frame) + " outside the sequence");
        }
        for (const auto& e : fr.entries) out[static_cast<std::size_t>(fr.frame - 1)].push_back({e.track_id, e.box});
    }
    return out;
}

inline void print_report(std::ostream& os, const MetricsReport& r) {
    os << "MOTA  " << r.mota << "\n"
       << "IDF1  " << r.idf1 << "\n"
       << "IDP   " << r.idp << "\n"
       << "IDR   " << r.idr << "\n"
       << "IDsw  " << r.idsw << "\n"
       << "Frag  " << r.frag << "\n"
       << "GT    " << r.gt_count << "\n"
       << "FP    " << r.fp_count << "\n"
       << "FN    " << r.fn_count << "\n";
}

inline void write_report_csv(std::ostream& os, const MetricsReport& r) {
    os << "mota,idf1,idp,idr,idsw,frag,gt,fp,fn,idtp,idfp,idfn\n"
       << r.mota << ',' << r.idf1 << ',' << r.idp << ',' << r.idr << ',' << r.idsw << ',' << r.frag << ','
       << r.gt_count << ',' << r.fp_count << ',' << r.fn_count << ',' << r.idtp << ',' << r.idfp << ',' << r.idfn
       << '\n';
}

}  // namespace croptrack
