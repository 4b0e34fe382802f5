// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/rerank.hpp>

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace croptrack {

/// Default momenta: low, medium and high inertia.
inline const std::vector<double>& default_prototype_alphas() {
    static const std::vector<double> alphas{0.1, 0.5, 0.9};
    return alphas;
}

/**
 * Per-track appearance memory: P exponential-moving-average prototypes, each
 * with its own momentum alpha_p. Prototype p is updated as
 *   e_p <- alpha_p * e_p + (1 - alpha_p) * f
 * and re-normalized to unit length.
 */
class PrototypeBank {
public:
    PrototypeBank() = default;

    PrototypeBank(const Embedding& seed, std::vector<double> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.empty()) throw std::invalid_argument("PrototypeBank: need at least one prototype");
        for (double a : alphas_) {
            if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("PrototypeBank: alpha outside [0, 1]");
        }
        prototypes_.assign(alphas_.size(), seed);
    }

    std::size_t size() const { return prototypes_.size(); }
    std::size_t dim() const { return prototypes_.empty() ? 0 : prototypes_.front().dim(); }
    std::span<const Embedding> prototypes() const { return prototypes_; }
    std::span<const double> alphas() const { return alphas_; }

    void update(const Embedding& feature) {
        if (feature.dim() != dim()) throw std::invalid_argument("PrototypeBank::update: dimension mismatch");
        for (std::size_t p = 0; p < prototypes_.size(); ++p) {
            const double a = alphas_[p];
            const auto old = prototypes_[p].values();
            const auto fresh = feature.values();
            std::vector<double> mixed(old.size());
            double norm_sq = 0.0;
            for (std::size_t i = 0; i < mixed.size(); ++i) {
                mixed[i] = a * old[i] + (1.0 - a) * fresh[i];
                norm_sq += mixed[i] * mixed[i];
            }
            // Antipodal blend cancels out; the direction is undefined, take the new feature.
            prototypes_[p] = norm_sq > 1e-24 ? Embedding(std::move(mixed)) : feature;
        }
    }

private:
    std::vector<Embedding> prototypes_;
    std::vector<double> alphas_;
};

inline PrototypeBank init_bank(const Embedding& f, std::vector<double> alphas = default_prototype_alphas()) {
    return PrototypeBank(f, std::move(alphas));
}

inline PrototypeBank update(PrototypeBank bank, const Embedding& f) {
    bank.update(f);
    return bank;
}

/// Collapses a per-prototype distance row to one track cost (the minimum).
inline double appearance_distance(std::span<const double> row) {
    double best = kInf;
    for (double d : row) best = std::min(best, d);
    return best;
}

}  // namespace croptrack
