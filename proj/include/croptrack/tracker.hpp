// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/assignment.hpp>
#include <croptrack/feature_bank.hpp>
#include <croptrack/geometry.hpp>
#include <croptrack/kalman.hpp>
#include <croptrack/rerank.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace croptrack {

enum class TrackStatus { Tentative, Tracked, Lost, Removed };

inline std::string_view to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Tracked: return "tracked";
        case TrackStatus::Lost: return "lost";
        case TrackStatus::Removed: return "removed";
    }
    return "unknown";
}

struct Detection {
    Box box;
    double score = 1.0;
    Embedding embedding;  // may be empty (dim 0) when appearance is unused
};

struct Track {
    int id = 0;
    KalmanState state;
    PrototypeBank bank;
    TrackStatus status = TrackStatus::Tracked;
    Box last_box;
    int frames_since_update = 0;
    double score = 0.0;
};

/// Toggles for the ablation ladder. All off is the ByteTrack baseline.
struct AblationFlags {
    bool use_nsa = true;
    bool use_reid = true;
    bool use_reranking = true;
    bool use_greedy_one_to_many = true;
};

struct TrackerConfig {
    double tau = 0.6;                  // high/low detection split (strict >)
    double iou_candidate_gate = 0.98;  // one-to-many pool: IoU distance strictly below
    double iou_match_gate = 0.2;       // minimum IoU for motion-based acceptance
    double low_score_gate = 0.5;       // IoU-distance gate of the low-score stage
    double appearance_gate = 0.45;     // appearance cost admitting a pair without overlap
    double lambda_fusion = 0.75;       // C = lambda * C_a + (1 - lambda) * C_m
    int retention_frames = 30;
    RerankParams rerank{};
    std::vector<double> prototype_alphas = default_prototype_alphas();
    AblationFlags flags{};
    KalmanNoise noise{};

    void validate() const {
        if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("TrackerConfig: tau must lie in (0, 1)");
        if (!(lambda_fusion >= 0.0 && lambda_fusion <= 1.0)) {
            throw std::invalid_argument("TrackerConfig: lambda_fusion must lie in [0, 1]");
        }
        if (retention_frames < 0) throw std::invalid_argument("TrackerConfig: retention_frames must be >= 0");
        if (!(iou_match_gate >= 0.0 && iou_match_gate <= 1.0)) {
            throw std::invalid_argument("TrackerConfig: iou_match_gate must lie in [0, 1]");
        }
        if (prototype_alphas.empty()) throw std::invalid_argument("TrackerConfig: need at least one prototype alpha");
        rerank.validate();
    }
};

/// Named rows of the ablation ladder: bytetrack, +nsa, +reid, +rerank, croptrack.
inline TrackerConfig preset_config(std::string_view name) {
    TrackerConfig c;
    if (name == "bytetrack") {
        c.flags = {false, false, false, false};
    } else if (name == "+nsa") {
        c.flags = {true, false, false, false};
    } else if (name == "+reid") {
        c.flags = {true, true, false, false};
    } else if (name == "+rerank") {
        c.flags = {true, true, true, false};
    } else if (name == "croptrack") {
        c.flags = {true, true, true, true};
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

struct FrameEntry {
    int track_id = 0;
    Box box;
    double score = 0.0;
    friend bool operator==(const FrameEntry&, const FrameEntry&) = default;
};

struct FrameResult {
    int frame = 0;
    std::vector<FrameEntry> entries;  // ascending track id
    friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

/// Strict > partition; order is preserved inside each half.
inline std::pair<std::vector<Detection>, std::vector<Detection>> split_detections(std::span<const Detection> dets,
                                                                                  double tau) {
    std::pair<std::vector<Detection>, std::vector<Detection>> out;
    for (const auto& d : dets) {
        (d.score > tau ? out.first : out.second).push_back(d);
    }
    return out;
}

/// C = lambda * C_a + (1 - lambda) * C_m; the endpoints return one input verbatim.
inline CostMatrix fuse_costs(const CostMatrix& appearance, const CostMatrix& motion, double lambda) {
    if (appearance.rows() != motion.rows() || appearance.cols() != motion.cols()) {
        throw std::invalid_argument("fuse_costs: shape mismatch");
    }
    if (lambda == 0.0) return motion;
    if (lambda == 1.0) return appearance;
    CostMatrix out(motion.rows(), motion.cols());
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            out(r, c) = lambda * appearance(r, c) + (1.0 - lambda) * motion(r, c);
        }
    }
    return out;
}

/**
 * Gated appearance cost, rows = tracks, cols = detections.
 *
 * Detections are the queries and every prototype of every listed track is a
 * gallery entry. Distances are reranked (or plain cosine when reranking is
 * off), collapsed to one value per track by minimum over its prototypes, and
 * set to +inf where the detection center is not within delta of the track's
 * predicted center.
 */
inline CostMatrix appearance_cost_matrix(std::span<const Track> tracks, std::span<const Box> predicted,
                                         std::span<const Detection> dets, const TrackerConfig& config) {
    CostMatrix out(tracks.size(), dets.size(), kInf);
    if (tracks.empty() || dets.empty()) return out;

    std::vector<Embedding> queries;
    std::vector<Box> query_boxes;
    for (const auto& d : dets) {
        queries.push_back(d.embedding);
        query_boxes.push_back(d.box);
    }
    std::vector<Embedding> gallery;
    std::vector<Box> gallery_boxes;
    std::vector<std::size_t> owner;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
        for (const auto& p : tracks[t].bank.prototypes()) {
            gallery.push_back(p);
            gallery_boxes.push_back(predicted[t]);
            owner.push_back(t);
        }
    }
    if (gallery.empty()) return out;

    const CostMatrix raw = config.flags.use_reranking ? rerank_distance_matrix(queries, gallery, config.rerank)
                                                      : cosine_distance_matrix(queries, gallery);
    const CostMatrix gated = apply_spatial_gate(raw, query_boxes, gallery_boxes, config.rerank.delta);

    for (std::size_t d = 0; d < dets.size(); ++d) {
        const auto row = gated.row(d);
        std::size_t begin = 0;
        while (begin < row.size()) {
            std::size_t end = begin;
            while (end < row.size() && owner[end] == owner[begin]) ++end;
            out(owner[begin], d) = appearance_distance(row.subspan(begin, end - begin));
            begin = end;
        }
    }
    return out;
}

/// Indices of the tracks and detections that take part in one association stage.
struct StageInput {
    std::vector<std::size_t> tracks;
    std::vector<std::size_t> detections;
};

struct StageResult {
    std::vector<Match> matches;  // (track index, detection index) into the full lists
    std::vector<std::size_t> remaining_tracks;
    std::vector<std::size_t> remaining_detections;
};

namespace detail {

inline CostMatrix sub_matrix(const CostMatrix& full, std::span<const std::size_t> rows,
                             std::span<const std::size_t> cols) {
    CostMatrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = full(rows[r], cols[c]);
    }
    return out;
}

inline StageResult lift(const AssignmentResult& local, const StageInput& in) {
    StageResult out;
    for (const auto& m : local.matches) out.matches.push_back({in.tracks[m.row], in.detections[m.col]});
    for (std::size_t r : local.unmatched_rows) out.remaining_tracks.push_back(in.tracks[r]);
    for (std::size_t c : local.unmatched_cols) out.remaining_detections.push_back(in.detections[c]);
    return out;
}

}  // namespace detail

/**
 * Stage one over high-score detections.
 *
 * With the one-to-many flag: every pair whose IoU distance is below the
 * candidate gate enters the pool with the fused cost (or the IoU distance when
 * appearance is off); pairs with infinite cost are dropped and the pool is
 * resolved greedily. Without it: gated IoU Hungarian (IoU >= iou_match_gate).
 *
 * `iou_dist` and `appearance` are indexed by the full track/detection lists.
 */
inline StageResult first_association(const CostMatrix& iou_dist, const CostMatrix& appearance, const StageInput& in,
                                     const TrackerConfig& config) {
    const CostMatrix motion = detail::sub_matrix(iou_dist, in.tracks, in.detections);
    if (!config.flags.use_greedy_one_to_many) {
        return detail::lift(hungarian(motion, 1.0 - config.iou_match_gate), in);
    }
    std::vector<Candidate> pool;
    for (const auto& [t, d] : generate_candidates(motion, config.iou_candidate_gate)) {
        double cost = motion(t, d);
        if (config.flags.use_reid && config.lambda_fusion > 0.0) {
            const double app = appearance(in.tracks[t], in.detections[d]);
            if (!std::isfinite(app)) continue;
            cost = config.lambda_fusion * app + (1.0 - config.lambda_fusion) * motion(t, d);
        }
        pool.push_back({t, d, cost});
    }
    return detail::lift(greedy_resolve(std::move(pool), in.tracks.size(), in.detections.size()), in);
}

/**
 * Stage-two cost matrix over the stage inputs, before admissibility:
 * the fused appearance/motion cost.
 */
inline CostMatrix second_stage_costs(const CostMatrix& iou_dist, const CostMatrix& appearance, const StageInput& in,
                                     const TrackerConfig& config) {
    return fuse_costs(detail::sub_matrix(appearance, in.tracks, in.detections),
                      detail::sub_matrix(iou_dist, in.tracks, in.detections), config.lambda_fusion);
}

/**
 * Stage two: one-to-one Hungarian over the fused cost for stage-one leftovers.
 *
 * A pair is admissible when its appearance cost is finite and either the boxes
 * overlap with IoU >= iou_match_gate or the appearance cost alone is within
 * appearance_gate (re-identification across a drifted prediction). With
 * lambda = 0 only the IoU rule applies. Skipped entirely without appearance.
 */
inline StageResult second_association(const CostMatrix& iou_dist, const CostMatrix& appearance, const StageInput& in,
                                      const TrackerConfig& config) {
    if (!config.flags.use_reid || in.tracks.empty() || in.detections.empty()) {
        return {{}, in.tracks, in.detections};
    }
    CostMatrix fused = second_stage_costs(iou_dist, appearance, in, config);
    const CostMatrix motion = detail::sub_matrix(iou_dist, in.tracks, in.detections);
    const CostMatrix app = detail::sub_matrix(appearance, in.tracks, in.detections);
    const bool appearance_weighted = config.lambda_fusion > 0.0;
    for (std::size_t r = 0; r < fused.rows(); ++r) {
        for (std::size_t c = 0; c < fused.cols(); ++c) {
            const bool overlap_ok = motion(r, c) <= 1.0 - config.iou_match_gate;
            const bool finite_app = std::isfinite(app(r, c));
            const bool admissible = appearance_weighted
                                        ? finite_app && (overlap_ok || app(r, c) <= config.appearance_gate)
                                        : overlap_ok;
            if (!admissible) fused(r, c) = kInf;
        }
    }
    return detail::lift(hungarian(fused, std::numeric_limits<double>::max()), in);
}

/// Stage three: pure IoU Hungarian of the remaining tracks against low-score detections.
inline StageResult third_association(const CostMatrix& iou_dist, const StageInput& in, const TrackerConfig& config) {
    return detail::lift(hungarian(detail::sub_matrix(iou_dist, in.tracks, in.detections), config.low_score_gate), in);
}

/// Per-frame bookkeeping exposed for tests and diagnostics.
struct StepReport {
    std::size_t stage1 = 0;
    std::size_t stage2 = 0;
    std::size_t stage3 = 0;
    std::size_t spawned = 0;
    std::size_t discarded_low = 0;
};

/**
 * Online tracker: one call to step() per frame.
 *
 * Per frame: split detections at tau, predict every live track (lost ones
 * too), associate high-score detections in two appearance-aware stages and
 * low-score detections by IoU, then age unmatched tracks and spawn new tracks
 * from unmatched high-score detections.
 */
class Tracker {
public:
    explicit Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

    const TrackerConfig& config() const { return config_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    const StepReport& last_report() const { return report_; }

    FrameResult step(int frame, std::span<const Detection> frame_dets) {
        if (last_frame_ && frame <= *last_frame_) {
            throw std::invalid_argument("Tracker::step: frame index must increase (got " + std::to_string(frame) +
                                        " after " + std::to_string(*last_frame_) + ")");
        }
        last_frame_ = frame;
        report_ = {};

        const auto [high, low] = split_detections(frame_dets, config_.tau);
        predict_all();

        std::vector<Box> predicted;
        predicted.reserve(tracks_.size());
        for (const auto& t : tracks_) predicted.push_back(project_box(t.state));

        std::vector<Box> high_boxes;
        for (const auto& d : high) high_boxes.push_back(d.box);
        std::vector<Box> low_boxes;
        for (const auto& d : low) low_boxes.push_back(d.box);

        const CostMatrix iou_high = iou_distance_matrix(predicted, high_boxes);
        const CostMatrix appearance = config_.flags.use_reid
                                          ? appearance_cost_matrix(tracks_, predicted, high, config_)
                                          : CostMatrix(tracks_.size(), high.size(), kInf);

        StageInput s1;
        for (std::size_t t = 0; t < tracks_.size(); ++t) s1.tracks.push_back(t);
        for (std::size_t d = 0; d < high.size(); ++d) s1.detections.push_back(d);
        const StageResult r1 = first_association(iou_high, appearance, s1, config_);
        apply_matches(r1.matches, high);

        const StageResult r2 =
            second_association(iou_high, appearance, {r1.remaining_tracks, r1.remaining_detections}, config_);
        apply_matches(r2.matches, high);

        const CostMatrix iou_low = iou_distance_matrix(predicted, low_boxes);
        StageInput s3{r2.remaining_tracks, {}};
        for (std::size_t d = 0; d < low.size(); ++d) s3.detections.push_back(d);
        const StageResult r3 = third_association(iou_low, s3, config_);
        apply_matches(r3.matches, low);

        for (std::size_t t : r3.remaining_tracks) {
            auto& track = tracks_[t];
            track.status = track.frames_since_update > config_.retention_frames ? TrackStatus::Removed
                                                                                : TrackStatus::Lost;
        }
        std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Removed; });

        for (std::size_t d : r2.remaining_detections) spawn(high[d]);

        report_.stage1 = r1.matches.size();
        report_.stage2 = r2.matches.size();
        report_.stage3 = r3.matches.size();
        report_.spawned = r2.remaining_detections.size();
        report_.discarded_low = r3.remaining_detections.size();

        FrameResult result{frame, {}};
        for (const auto& t : tracks_) {
            if (t.status == TrackStatus::Tracked) result.entries.push_back({t.id, project_box(t.state), t.score});
        }
        return result;
    }

private:
    void predict_all() {
        for (auto& t : tracks_) {
            if (t.status != TrackStatus::Tracked) t.state.mean(7) = 0.0;  // freeze height drift while unseen
            t.state = predict(t.state, config_.noise);
            ++t.frames_since_update;
            const double h = t.state.mean(3);
            const double a = t.state.mean(2);
            if (!(h > 0.0) || !(a > 0.0)) t.status = TrackStatus::Removed;
        }
        std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Removed; });
    }

    void apply_matches(std::span<const Match> matches, std::span<const Detection> dets) {
        for (const auto& m : matches) {
            auto& track = tracks_[m.row];
            const auto& det = dets[m.col];
            const double confidence = config_.flags.use_nsa ? det.score : 0.0;
            track.state = update_nsa(track.state, det.box, confidence, config_.noise);
            if (det.embedding.dim() > 0 && det.embedding.dim() == track.bank.dim()) track.bank.update(det.embedding);
            track.status = TrackStatus::Tracked;
            track.frames_since_update = 0;
            track.last_box = det.box;
            track.score = det.score;
        }
    }

    void spawn(const Detection& det) {
        Track t;
        t.id = next_id_++;
        t.state = init_state(det.box, config_.noise);
        if (det.embedding.dim() > 0) t.bank = init_bank(det.embedding, config_.prototype_alphas);
        t.status = TrackStatus::Tracked;
        t.last_box = det.box;
        t.frames_since_update = 0;
        t.score = det.score;
        tracks_.push_back(std::move(t));
    }

    TrackerConfig config_;
    std::vector<Track> tracks_;
    std::optional<int> last_frame_;
    int next_id_ = 1;
    StepReport report_;
};

/// Runs a whole sequence; frame k of the input is reported as frame k + 1.
inline std::vector<FrameResult> run(std::span<const std::vector<Detection>> sequence, const TrackerConfig& config) {
    Tracker tracker(config);
    std::vector<FrameResult> out;
    out.reserve(sequence.size());
    for (std::size_t f = 0; f < sequence.size(); ++f) {
        out.push_back(tracker.step(static_cast<int>(f + 1), sequence[f]));
    }
    return out;
}

}  // namespace croptrack
