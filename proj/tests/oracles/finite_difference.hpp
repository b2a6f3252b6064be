#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "aid/rng.hpp"
#include "aid/synth/tiny_regressor.hpp"

// Central finite differences of the regressor loss, in double precision.

namespace oracle {

inline double central_difference(aid::synth::TinyRegressor<double>& model, std::span<const double> inputs,
                                 std::span<const double> targets, int batch, std::size_t index, double step) {
    auto p = model.parameters();
    const double saved = p[index];
    p[index] = saved + step;
    const double up = model.loss_and_gradient(inputs, targets, batch, {});
    p[index] = saved - step;
    const double down = model.loss_and_gradient(inputs, targets, batch, {});
    p[index] = saved;
    return (up - down) / (2.0 * step);
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Parameters for which every hidden pre-activation stays at least 0.3 away
// from the ReLU kink for inputs in [0, 1]: biases are +-0.5 (mostly positive)
// and each hidden layer's weighted sum is bounded by 0.2 in magnitude. A
// finite-difference step below 0.1 therefore never crosses a kink, while
// both ReLU branches are exercised.
inline void kink_free_parameters(aid::synth::TinyRegressor<double>& model, aid::Rng& rng) {
    const auto& s = model.shape();
    auto p = model.parameters();
    std::size_t at = 0;
    auto hidden = [&](std::size_t weights, int channels, double fan_in, double max_input) {
        const double a = 0.2 / (fan_in * max_input);
        for (std::size_t i = 0; i < weights; ++i) p[at++] = rng.uniform(-a, a);
        for (int c = 0; c < channels; ++c) p[at++] = rng.bernoulli(0.8) ? 0.5 : -0.5;
    };
    hidden(static_cast<std::size_t>(s.c1) * 25, s.c1, 25.0, 1.0);
    hidden(static_cast<std::size_t>(s.c2) * s.c1 * 9, s.c2, s.c1 * 9.0, 0.7);
    hidden(static_cast<std::size_t>(s.c3) * s.c2 * 9, s.c3, s.c2 * 9.0, 0.7);
    while (at < p.size()) p[at++] = rng.normal(0.0, 0.3);
}

}  // namespace oracle
