// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/random.hpp>
#include <croptrack/synth.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace croptrack {

/// Detector-noise model applied to ground truth: localization noise, misses, spurious boxes.
struct NoiseParams {
    double ln_probability = 0.0;
    double ln_center_sigma = 0.1;  // center jitter std as a fraction of w (x) and h (y)
    double ln_scale_sigma = 0.1;   // std of the log scale factor applied to w and h
    double fn_rate = 0.0;
    double fp_rate = 0.0;          // expected spurious boxes per ground-truth box
    double fp_size_sigma = 0.3;    // log-normal spread of spurious box size around the median
    double fp_score_min = 0.6;     // spurious scores ~ U[fp_score_min, 1]
    double ln_score_floor = 0.65;  // score of a perturbed box: 1 - (1 - floor) * (1 - IoU(perturbed, original))
    std::uint64_t seed = 0;

    void validate() const {
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!unit(ln_probability) || !unit(fn_rate) || !unit(fp_rate) || !unit(fp_score_min) ||
            !unit(ln_score_floor)) {
            throw std::invalid_argument("NoiseParams: rates and probabilities must lie in [0, 1]");
        }
        if (ln_center_sigma < 0.0 || ln_scale_sigma < 0.0 || fp_size_sigma < 0.0) {
            throw std::invalid_argument("NoiseParams: negative noise scale");
        }
    }
};

/// Noise levels A (worst) to D (ground truth).
inline NoiseParams preset(std::string_view level) {
    NoiseParams p;
    if (level == "A") {
        p.ln_probability = 0.4;
        p.fn_rate = 0.2;
        p.fp_rate = 0.2;
    } else if (level == "B") {
        p.ln_probability = 0.4;
    } else if (level == "C") {
        p.ln_probability = 0.2;
    } else if (level == "D") {
        // passthrough
    } else {
        throw std::invalid_argument("unknown noise level '" + std::string(level) + "' (expected A, B, C or D)");
    }
    return p;
}

struct PerturbedBox {
    Box box;
    double score = 1.0;
    int source_id = -1;  // ground-truth id, -1 for spurious boxes
};

/**
 * Perturbs one frame of ground truth.
 *
 * Each box independently: with probability ln_probability its center moves by
 * N(0, sigma * w) / N(0, sigma * h) and w, h are multiplied by log-normal
 * factors; then it is dropped with probability fn_rate. Afterwards one
 * spurious box is drawn per ground-truth box with probability fp_rate, placed
 * uniformly inside the frame with a size log-normal around the frame's median
 * ground-truth size. Untouched boxes score 1; a perturbed box scores
 * 1 - (1 - ln_score_floor) * (1 - IoU with its original), so confidence falls
 * with localization error. Spurious boxes score U[fp_score_min, 1].
 */
inline std::vector<PerturbedBox> perturb_frame(const std::vector<GtObject>& gt, const NoiseParams& params, Rng& rng,
                                               double width, double height) {
    params.validate();
    std::vector<PerturbedBox> out;
    for (const auto& g : gt) {
        Box b = g.box;
        double score = 1.0;
        if (rng.bernoulli(params.ln_probability)) {
            const double cx = b.cx() + rng.normal(0.0, params.ln_center_sigma * b.w);
            const double cy = b.cy() + rng.normal(0.0, params.ln_center_sigma * b.h);
            const double w = b.w * std::exp(rng.normal(0.0, params.ln_scale_sigma));
            const double h = b.h * std::exp(rng.normal(0.0, params.ln_scale_sigma));
            b = {cx - w / 2.0, cy - h / 2.0, w, h};
            score = 1.0 - (1.0 - params.ln_score_floor) * (1.0 - iou(b, g.box));
        }
        if (rng.bernoulli(params.fn_rate)) continue;
        out.push_back({b, score, g.id});
    }

    if (params.fp_rate > 0.0 && !gt.empty()) {
        std::vector<double> ws;
        std::vector<double> hs;
        for (const auto& g : gt) {
            ws.push_back(g.box.w);
            hs.push_back(g.box.h);
        }
        std::nth_element(ws.begin(), ws.begin() + static_cast<std::ptrdiff_t>(ws.size() / 2), ws.end());
        std::nth_element(hs.begin(), hs.begin() + static_cast<std::ptrdiff_t>(hs.size() / 2), hs.end());
        const double med_w = ws[ws.size() / 2];
        const double med_h = hs[hs.size() / 2];
        for (std::size_t k = 0; k < gt.size(); ++k) {
            if (!rng.bernoulli(params.fp_rate)) continue;
            const double w = std::min(med_w * std::exp(rng.normal(0.0, params.fp_size_sigma)), 0.9 * width);
            const double h = std::min(med_h * std::exp(rng.normal(0.0, params.fp_size_sigma)), 0.9 * height);
            const double x = rng.uniform(0.0, width - w);
            const double y = rng.uniform(0.0, height - h);
            out.push_back({{x, y, w, h}, rng.uniform(params.fp_score_min, 1.0), -1});
        }
    }
    return out;
}

/// Perturbs a whole ground-truth sequence into detections with embeddings.
/// Frame f uses its own stream derived from params.seed, so frames are independent.
inline SequenceBundle perturb_sequence(const GtSequence& gt, const NoiseParams& params, double width, double height,
                                       const IdentityEmbedder& embedder) {
    SequenceBundle out;
    out.width = width;
    out.height = height;
    out.gt = gt;
    for (std::size_t f = 0; f < gt.size(); ++f) {
        const int frame = static_cast<int>(f + 1);
        Rng rng(Rng::derive_seed(params.seed, static_cast<std::uint64_t>(frame)));
        std::vector<Detection> dets;
        for (const auto& p : perturb_frame(gt[f], params, rng, width, height)) {
            Embedding e = p.source_id >= 0 ? embedder.observe(p.source_id, frame) : embedder.clutter(rng);
            dets.push_back({p.box, p.score, std::move(e)});
        }
        out.detections.push_back(std::move(dets));
    }
    return out;
}

/// Number of sequences in the fixed synthetic benchmark suite (sequence seeds 1..N).
inline constexpr int kBenchmarkSequences = 12;

/// Sequence `index` (1-based) of the benchmark suite under noise level `level`.
inline SequenceBundle benchmark_sequence(std::string_view level, int index) {
    const ScenarioSpec spec = benchmark_scenario();
    const auto seed = static_cast<std::uint64_t>(index);
    const SequenceBundle clean = synth_sequence(spec, seed);
    NoiseParams noise = preset(level);
    noise.seed = Rng::derive_seed(seed, 77);
    const IdentityEmbedder embedder(spec.embedding_dim, spec.similarity, spec.embedding_jitter, seed);
    return perturb_sequence(*clean.gt, noise, spec.width, spec.height, embedder);
}

}  // namespace croptrack
