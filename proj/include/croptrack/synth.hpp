// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/geometry.hpp>
#include <croptrack/random.hpp>
#include <croptrack/rerank.hpp>
#include <croptrack/tracker.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace croptrack {

/// One annotated object in one frame.
struct GtObject {
    int id = 0;
    Box box;
    friend bool operator==(const GtObject&, const GtObject&) = default;
};

using GtSequence = std::vector<std::vector<GtObject>>;  // index = frame - 1

/// Detections and frame geometry for one sequence, with optional ground truth.
struct SequenceBundle {
    std::vector<std::vector<Detection>> detections;  // index = frame - 1
    double width = 0.0;
    double height = 0.0;
    std::optional<GtSequence> gt;

    int frame_count() const { return static_cast<int>(detections.size()); }
};

/**
 * Deterministic appearance model for synthetic identities.
 *
 * Every identity gets a base direction sqrt(s) * c + sqrt(1 - s) * u_id
 * (normalized) around a shared direction c, so two identities have cosine
 * similarity close to s. Observations add isotropic jitter of norm ~ `jitter`.
 */
class IdentityEmbedder {
public:
    IdentityEmbedder(std::size_t dim, double similarity, double jitter, std::uint64_t seed)
        : dim_(dim), similarity_(similarity), jitter_(jitter), seed_(seed) {
        if (dim == 0) throw std::invalid_argument("IdentityEmbedder: dimension must be positive");
        if (!(similarity >= 0.0 && similarity <= 1.0)) {
            throw std::invalid_argument("IdentityEmbedder: similarity must lie in [0, 1]");
        }
        Rng rng(Rng::derive_seed(seed_, 0xC0FFEEULL));
        common_ = random_direction(rng);
    }

    std::size_t dim() const { return dim_; }

    Embedding base(int id) const {
        Rng rng(Rng::derive_seed(seed_ ^ 0xB45Eu, static_cast<std::uint64_t>(id)));
        const std::vector<double> own = random_direction(rng);
        const double a = std::sqrt(similarity_);
        const double b = std::sqrt(1.0 - similarity_);
        std::vector<double> v(dim_);
        for (std::size_t i = 0; i < dim_; ++i) v[i] = a * common_[i] + b * own[i];
        return Embedding(std::move(v));
    }

    /// Jittered observation of identity `id` in `frame`; independent of call order.
    Embedding observe(int id, int frame) const {
        const Embedding b = base(id);
        if (jitter_ == 0.0) return b;
        Rng rng(Rng::derive_seed(seed_ ^ 0x0B5Eu, (static_cast<std::uint64_t>(id) << 32) ^ static_cast<std::uint32_t>(frame)));
        const double scale = jitter_ / std::sqrt(static_cast<double>(dim_));
        std::vector<double> v(dim_);
        for (std::size_t i = 0; i < dim_; ++i) v[i] = b[i] + scale * rng.normal();
        return Embedding(std::move(v));
    }

    /// Appearance of something that is not any identity (false positives).
    Embedding clutter(Rng& rng) const { return Embedding(random_direction(rng)); }

private:
    std::vector<double> random_direction(Rng& rng) const {
        std::vector<double> v(dim_);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& x : v) {
                x = rng.normal();
                norm += x * x;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        return v;
    }

    std::size_t dim_;
    double similarity_;
    double jitter_;
    std::uint64_t seed_;
    std::vector<double> common_;
};

/// Frames [start, start + length) of `object` emit nothing; on return the object is displaced by (dx, dy).
struct Occlusion {
    int object = 0;  // 0-based object index
    int start = 1;   // first hidden frame (1-based)
    int length = 0;
    double dx = 0.0;
    double dy = 0.0;
};

/// Explicitly placed object; the rest of the objects are sampled.
struct ScriptedObject {
    Box start;
    double vx = 0.0;
    double vy = 0.0;
};

struct ScenarioSpec {
    int objects = 5;
    int frames = 100;
    double width = 1920.0;
    double height = 1080.0;
    double min_size = 40.0;
    double max_size = 80.0;
    double max_speed = 4.0;  // px per frame, per axis
    double similarity = 0.5;
    std::size_t embedding_dim = 128;
    double embedding_jitter = 0.1;
    std::vector<ScriptedObject> scripted;
    std::vector<Occlusion> occlusions;
    int random_occlusions = 0;  // additional occlusions sampled per run
    int occlusion_length = 8;
    double occlusion_shift = 0.0;  // max displacement per axis for sampled occlusions
    double camera_shake = 0.0;     // std of the per-frame camera velocity innovation (px / frame)
    double camera_inertia = 0.8;   // AR(1) coefficient of the camera velocity, in [0, 1)
    double camera_spring = 0.02;   // pull of the camera offset back to the origin, per frame

    void validate() const {
        if (objects < 0 || frames < 0) throw std::invalid_argument("ScenarioSpec: negative object or frame count");
        if (!(width > 0.0 && height > 0.0)) throw std::invalid_argument("ScenarioSpec: frame size must be positive");
        if (!(min_size > 0.0) || max_size < min_size) throw std::invalid_argument("ScenarioSpec: bad size range");
        if (max_size >= width || max_size >= height) {
            throw std::invalid_argument("ScenarioSpec: objects larger than the frame");
        }
        for (const auto& s : scripted) {
            if (!s.start.valid() || s.start.w >= width || s.start.h >= height) {
                throw std::invalid_argument("ScenarioSpec: scripted object does not fit the frame");
            }
        }
        if (static_cast<int>(scripted.size()) > objects) {
            throw std::invalid_argument("ScenarioSpec: more scripted objects than objects");
        }
        for (const auto& o : occlusions) {
            if (o.object < 0 || o.object >= objects || o.length < 0) {
                throw std::invalid_argument("ScenarioSpec: occlusion refers to a missing object");
            }
        }
        if (!(similarity >= 0.0 && similarity <= 1.0)) throw std::invalid_argument("ScenarioSpec: similarity outside [0, 1]");
        if (camera_shake < 0.0 || !(camera_inertia >= 0.0 && camera_inertia < 1.0) ||
            !(camera_spring >= 0.0 && camera_spring < 1.0)) {
            throw std::invalid_argument("ScenarioSpec: bad camera shake parameters");
        }
    }
};

/**
 * Generates ground truth and detections for a scenario.
 *
 * Objects move with constant velocity and reflect off the frame border. An
 * optional camera shake adds an offset shared by all objects, driven by a
 * damped velocity v_t = inertia * v_{t-1} - spring * offset_{t-1} + N(0, shake),
 * so image-space motion is no longer constant-velocity. Objects reflect off
 * the visible frame border; any box still outside it is not visible. Occluded objects have neither ground truth nor detections. Detections are
 * the exact ground-truth boxes with score 1 and jittered identity embeddings.
 * Ground-truth ids are object index + 1.
 */
inline SequenceBundle synth_sequence(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const IdentityEmbedder embedder(spec.embedding_dim, spec.similarity, spec.embedding_jitter, seed);

    struct State {
        Box box;
        double vx;
        double vy;
    };
    std::vector<State> objects;
    for (int i = 0; i < spec.objects; ++i) {
        if (i < static_cast<int>(spec.scripted.size())) {
            const auto& s = spec.scripted[static_cast<std::size_t>(i)];
            objects.push_back({s.start, s.vx, s.vy});
            continue;
        }
        const double w = rng.uniform(spec.min_size, spec.max_size);
        const double h = rng.uniform(spec.min_size, spec.max_size);
        const double x = rng.uniform(0.0, spec.width - w);
        const double y = rng.uniform(0.0, spec.height - h);
        const double vx = rng.uniform(-spec.max_speed, spec.max_speed);
        const double vy = rng.uniform(-spec.max_speed, spec.max_speed);
        objects.push_back({{x, y, w, h}, vx, vy});
    }

    std::vector<Occlusion> occlusions = spec.occlusions;
    for (int k = 0; k < spec.random_occlusions && spec.objects > 0 && spec.frames > spec.occlusion_length + 2; ++k) {
        Occlusion o;
        o.object = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(spec.objects));
        o.start = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(spec.frames - spec.occlusion_length - 1));
        o.length = spec.occlusion_length;
        o.dx = rng.uniform(-spec.occlusion_shift, spec.occlusion_shift);
        o.dy = rng.uniform(-spec.occlusion_shift, spec.occlusion_shift);
        occlusions.push_back(o);
    }

    auto hidden = [&](int object, int frame) {
        for (const auto& o : occlusions) {
            if (o.object == object && frame >= o.start && frame < o.start + o.length) return true;
        }
        return false;
    };

    Rng camera_rng(Rng::derive_seed(seed, 0xCA3E7AULL));
    double cam_x = 0.0;
    double cam_y = 0.0;
    double cam_vx = 0.0;
    double cam_vy = 0.0;

    SequenceBundle bundle;
    bundle.width = spec.width;
    bundle.height = spec.height;
    bundle.gt = GtSequence{};
    for (int f = 1; f <= spec.frames; ++f) {
        if (f > 1 && spec.camera_shake > 0.0) {
            cam_vx = spec.camera_inertia * cam_vx - spec.camera_spring * cam_x + camera_rng.normal(0.0, spec.camera_shake);
            cam_vy = spec.camera_inertia * cam_vy - spec.camera_spring * cam_y + camera_rng.normal(0.0, spec.camera_shake);
            cam_x += cam_vx;
            cam_y += cam_vy;
        }
        if (f > 1) {
            for (int i = 0; i < spec.objects; ++i) {
                auto& s = objects[static_cast<std::size_t>(i)];
                s.box.x += s.vx;
                s.box.y += s.vy;
                for (const auto& o : occlusions) {
                    if (o.object == i && f == o.start + o.length) {
                        s.box.x += o.dx;
                        s.box.y += o.dy;
                    }
                }
                const double lo_x = -cam_x;
                const double hi_x = spec.width - cam_x;
                const double lo_y = -cam_y;
                const double hi_y = spec.height - cam_y;
                if (s.box.x < lo_x) { s.box.x = 2.0 * lo_x - s.box.x; s.vx = std::abs(s.vx); }
                if (s.box.right() > hi_x) { s.box.x -= 2.0 * (s.box.right() - hi_x); s.vx = -std::abs(s.vx); }
                if (s.box.y < lo_y) { s.box.y = 2.0 * lo_y - s.box.y; s.vy = std::abs(s.vy); }
                if (s.box.bottom() > hi_y) { s.box.y -= 2.0 * (s.box.bottom() - hi_y); s.vy = -std::abs(s.vy); }
            }
        }
        std::vector<GtObject> gt_frame;
        std::vector<Detection> det_frame;
        for (int i = 0; i < spec.objects; ++i) {
            if (hidden(i, f)) continue;
            Box b = objects[static_cast<std::size_t>(i)].box;
            b.x += cam_x;
            b.y += cam_y;
            if (b.x < 0.0 || b.y < 0.0 || b.right() > spec.width || b.bottom() > spec.height) continue;
            gt_frame.push_back({i + 1, b});
            det_frame.push_back({b, 1.0, embedder.observe(i + 1, f)});
        }
        bundle.gt->push_back(std::move(gt_frame));
        bundle.detections.push_back(std::move(det_frame));
    }
    return bundle;
}

/// Two objects crossing paths; the second one is hidden for `occlusion` frames around the crossing.
inline ScenarioSpec crossing_scenario(int frames = 60, int occlusion = 8) {
    ScenarioSpec s;
    s.objects = 2;
    s.frames = frames;
    s.width = 1280.0;
    s.height = 720.0;
    s.similarity = 0.5;
    s.embedding_jitter = 0.05;
    const double span = 3.0 * static_cast<double>(frames);
    s.scripted = {{{640.0 - span / 2.0 - 25.0, 300.0, 50.0, 50.0}, 3.0, 0.0},
                  {{640.0 + span / 2.0 - 25.0, 330.0, 50.0, 50.0}, -3.0, 0.0}};
    s.occlusions = {{1, frames / 2 - occlusion / 2, occlusion, 0.0, 0.0}};
    return s;
}

/**
 * Two well-separated objects with distinct, noise-free appearance. Object 0
 * is hidden for 8 frames and comes back displaced far enough that its track's
 * prediction no longer overlaps it, yet well inside the 600 px spatial gate.
 */
inline ScenarioSpec drift_occlusion_scenario() {
    ScenarioSpec s;
    s.objects = 2;
    s.frames = 60;
    s.width = 1280.0;
    s.height = 720.0;
    s.similarity = 0.0;
    s.embedding_jitter = 0.0;
    s.scripted = {{{200.0, 300.0, 50.0, 50.0}, 4.0, 0.0}, {{900.0, 150.0, 50.0, 50.0}, -2.0, 1.0}};
    s.occlusions = {{0, 25, 8, 0.0, 140.0}};
    return s;
}

/// Desk-scale stand-in for an orchard row: many look-alike objects with drift-inducing occlusions.
inline ScenarioSpec benchmark_scenario() {
    ScenarioSpec s;
    s.objects = 20;
    s.frames = 150;
    s.width = 1920.0;
    s.height = 1080.0;
    s.min_size = 50.0;
    s.max_size = 90.0;
    s.max_speed = 4.0;
    s.similarity = 0.95;
    s.embedding_dim = 128;
    s.embedding_jitter = 0.1;
    s.random_occlusions = 12;
    s.occlusion_length = 8;
    s.occlusion_shift = 120.0;
    s.camera_shake = 4.0;
    return s;
}

inline ScenarioSpec named_scenario(std::string_view name) {
    if (name == "benchmark") return benchmark_scenario();
    if (name == "crossing") return crossing_scenario();
    if (name == "drift-occlusion") return drift_occlusion_scenario();
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

}  // namespace croptrack
