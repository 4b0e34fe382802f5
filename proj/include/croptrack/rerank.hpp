// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/cost_matrix.hpp>
#include <croptrack/geometry.hpp>

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace croptrack {

/// Unit-norm appearance vector. Normalized on construction.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(std::vector<double> values) : values_(std::move(values)) {
        double norm = 0.0;
        for (double v : values_) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw std::invalid_argument("Embedding: cannot normalize a zero or non-finite vector");
        }
        for (double& v : values_) v /= norm;
    }

    std::size_t dim() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double dot(const Embedding& other) const {
        if (other.dim() != dim()) {
            throw std::invalid_argument("Embedding: dimension mismatch");
        }
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
        return s;
    }

    friend bool operator==(const Embedding&, const Embedding&) = default;

private:
    std::vector<double> values_;
};

/// k-reciprocal reranking hyperparameters plus the spatial gate radius.
struct RerankParams {
    std::size_t k1 = 20;
    std::size_t k2 = 6;
    double lambda_rr = 0.3;
    double delta = 600.0;

    void validate() const {
        if (k1 < 1 || k2 < 1 || k2 > k1) throw std::invalid_argument("RerankParams: need 1 <= k2 <= k1");
        if (!(lambda_rr >= 0.0 && lambda_rr <= 1.0)) throw std::invalid_argument("RerankParams: lambda_rr outside [0, 1]");
        if (!(delta > 0.0)) throw std::invalid_argument("RerankParams: delta must be positive");
    }
};

/// Entry (i, j) = 1 - <q_i, g_j>, clamped into [0, 2].
inline CostMatrix cosine_distance_matrix(std::span<const Embedding> queries, std::span<const Embedding> gallery) {
    CostMatrix m(queries.size(), gallery.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        for (std::size_t j = 0; j < gallery.size(); ++j) {
            m(i, j) = std::clamp(1.0 - queries[i].dot(gallery[j]), 0.0, 2.0);
        }
    }
    return m;
}

namespace detail {

// Row-wise ascending order, ties broken by index.
inline std::vector<std::vector<std::size_t>> rank_rows(const CostMatrix& dist) {
    const std::size_t n = dist.rows();
    std::vector<std::vector<std::size_t>> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = ranks[i];
        r.resize(n);
        std::iota(r.begin(), r.end(), std::size_t{0});
        std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) { return dist(i, a) < dist(i, b); });
    }
    return ranks;
}

// Forward k-NN of i (self included) filtered to those whose own k-NN contains i.
inline std::vector<std::size_t> reciprocal_set(const std::vector<std::vector<std::size_t>>& ranks, std::size_t i,
                                               std::size_t k) {
    const std::size_t n = ranks.size();
    const std::size_t width = std::min(k + 1, n);
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < width; ++f) {
        const std::size_t cand = ranks[i][f];
        const auto& back = ranks[cand];
        if (std::find(back.begin(), back.begin() + static_cast<std::ptrdiff_t>(width), i) !=
            back.begin() + static_cast<std::ptrdiff_t>(width)) {
            out.push_back(cand);
        }
    }
    return out;
}

inline std::size_t half_neighborhood(std::size_t k) {
    // round-half-to-even of k / 2
    return static_cast<std::size_t>(std::nearbyint(static_cast<double>(k) / 2.0));
}

// Reciprocal set of i grown by the half-size reciprocal sets of its members
// whenever more than two thirds of such a set already lies in the base set.
inline std::vector<std::size_t> expanded_reciprocal_set(const std::vector<std::vector<std::size_t>>& ranks,
                                                        std::size_t i, std::size_t k) {
    const auto base = reciprocal_set(ranks, i, k);
    std::vector<char> member(ranks.size(), 0);
    for (std::size_t b : base) member[b] = 1;
    std::vector<char> expanded = member;

    const std::size_t half = half_neighborhood(k);
    for (std::size_t cand : base) {
        const auto sub = reciprocal_set(ranks, cand, half);
        std::size_t overlap = 0;
        for (std::size_t s : sub) overlap += member[s] ? 1 : 0;
        if (3.0 * static_cast<double>(overlap) > 2.0 * static_cast<double>(sub.size())) {
            for (std::size_t s : sub) expanded[s] = 1;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < expanded.size(); ++j) {
        if (expanded[j]) out.push_back(j);
    }
    return out;
}

struct EffectiveParams {
    std::size_t k1;
    std::size_t k2;
    bool cosine_only;
};

inline EffectiveParams effective_params(const RerankParams& p, std::size_t gallery_size) {
    if (gallery_size <= 1) return {p.k1, p.k2, true};
    const std::size_t k1 = std::min(p.k1, gallery_size);
    return {k1, std::min(p.k2, k1), false};
}

}  // namespace detail

/**
 * k-reciprocal neighbors of `index` over a square distance matrix, including
 * the half-neighborhood expansion. The probe itself is not reported.
 */
inline std::vector<std::size_t> k_reciprocal_neighbors(std::size_t index, const CostMatrix& distances, std::size_t k) {
    if (distances.rows() != distances.cols()) {
        throw std::invalid_argument("k_reciprocal_neighbors: distance matrix must be square");
    }
    if (index >= distances.rows()) {
        throw std::out_of_range("k_reciprocal_neighbors: probe index out of range");
    }
    if (k < 1) throw std::invalid_argument("k_reciprocal_neighbors: k must be >= 1");
    k = std::min(k, distances.rows() - 1);
    const auto ranks = detail::rank_rows(distances);
    auto set = detail::expanded_reciprocal_set(ranks, index, k);
    std::erase(set, index);
    return set;
}

/**
 * Reranked query-to-gallery distance:
 *   d* = (1 - lambda_rr) * d_jaccard + lambda_rr * d_cosine
 *
 * Neighborhoods are built on the joint cosine distance over queries followed
 * by gallery. Each element is encoded as a Gaussian-weighted indicator of its
 * expanded k1-reciprocal set, averaged over its k2 nearest neighbors, and the
 * Jaccard distance compares those encodings. Galleries smaller than k1 clamp
 * k1 (and k2); a gallery of at most one element yields the cosine matrix.
 */
inline CostMatrix rerank_distance_matrix(std::span<const Embedding> queries, std::span<const Embedding> gallery,
                                         const RerankParams& params) {
    params.validate();
    if (gallery.empty()) {
        throw std::invalid_argument("rerank_distance_matrix: gallery must not be empty");
    }
    const CostMatrix original = cosine_distance_matrix(queries, gallery);
    if (params.lambda_rr == 1.0) return original;
    const auto eff = detail::effective_params(params, gallery.size());
    if (eff.cosine_only || queries.empty()) return original;

    const std::size_t nq = queries.size();
    const std::size_t n = nq + gallery.size();
    std::vector<Embedding> all;
    all.reserve(n);
    all.insert(all.end(), queries.begin(), queries.end());
    all.insert(all.end(), gallery.begin(), gallery.end());
    const CostMatrix joint = cosine_distance_matrix(all, all);
    const auto ranks = detail::rank_rows(joint);

    // Sparse encodings: per element, (index, weight) pairs.
    struct Entry {
        std::size_t index;
        double weight;
    };
    std::vector<std::vector<Entry>> encoding(n);
    const std::size_t k1 = std::min(eff.k1, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto members = detail::expanded_reciprocal_set(ranks, i, k1);
        double total = 0.0;
        for (std::size_t m : members) total += std::exp(-joint(i, m));
        for (std::size_t m : members) encoding[i].push_back({m, std::exp(-joint(i, m)) / total});
    }

    if (eff.k2 != 1) {
        std::vector<std::vector<Entry>> expanded(n);
        std::vector<double> acc(n, 0.0);
        const std::size_t width = std::min(eff.k2, n);
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t r = 0; r < width; ++r) {
                for (const auto& e : encoding[ranks[i][r]]) acc[e.index] += e.weight;
            }
            for (std::size_t m = 0; m < n; ++m) {
                if (acc[m] != 0.0) expanded[i].push_back({m, acc[m] / static_cast<double>(width)});
            }
        }
        encoding = std::move(expanded);
    }

    // Inverted index over gallery rows only; queries never appear as the second argument.
    std::vector<std::vector<Entry>> inverted(n);
    for (std::size_t g = nq; g < n; ++g) {
        for (const auto& e : encoding[g]) inverted[e.index].push_back({g, e.weight});
    }

    CostMatrix out(nq, gallery.size());
    std::vector<double> shared(n, 0.0);
    for (std::size_t q = 0; q < nq; ++q) {
        std::fill(shared.begin(), shared.end(), 0.0);
        for (const auto& e : encoding[q]) {
            for (const auto& g : inverted[e.index]) shared[g.index] += std::min(e.weight, g.weight);
        }
        for (std::size_t j = 0; j < gallery.size(); ++j) {
            const double s = shared[nq + j];
            const double jaccard = 1.0 - s / (2.0 - s);
            out(q, j) = (1.0 - params.lambda_rr) * jaccard + params.lambda_rr * original(q, j);
        }
    }
    return out;
}

/// Entries whose box centers are at least `delta` apart become +inf.
inline CostMatrix apply_spatial_gate(const CostMatrix& distances, std::span<const Box> query_boxes,
                                     std::span<const Box> gallery_boxes, double delta) {
    if (distances.rows() != query_boxes.size() || distances.cols() != gallery_boxes.size()) {
        throw std::invalid_argument("apply_spatial_gate: matrix shape does not match box lists");
    }
    CostMatrix out = distances;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            if (!(center_distance(query_boxes[i], gallery_boxes[j]) < delta)) {
                out(i, j) = kInf;
            }
        }
    }
    return out;
}

}  // namespace croptrack
