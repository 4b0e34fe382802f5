#pragma once

#include <croptrack/croptrack.hpp>

#include <vector>

namespace test_support {

inline croptrack::Box random_box(croptrack::Rng& rng, double extent = 500.0) {
    const double w = rng.uniform(10.0, 120.0);
    const double h = rng.uniform(10.0, 120.0);
    return {rng.uniform(0.0, extent), rng.uniform(0.0, extent), w, h};
}

inline croptrack::Embedding random_embedding(croptrack::Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    return croptrack::Embedding(std::move(v));
}

inline croptrack::Embedding axis(std::size_t dim, std::size_t k) {
    std::vector<double> v(dim, 0.0);
    v[k] = 1.0;
    return croptrack::Embedding(std::move(v));
}

}  // namespace test_support
