#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aid/image.hpp"
#include "aid/rng.hpp"

namespace aid::synth {

/// Layer sizes. Input is one channel, scaled to [0, 1].
///
///   conv1  5x5 stride 2, 1  -> c1, ReLU      (H/2)
///   conv2  3x3 stride 1, c1 -> c2, ReLU      (H/2)
///   avgpool 2x2                              (H/4)
///   conv3  3x3 stride 1, c2 -> c3, ReLU      (H/4)
///   deconv 4x4 stride 2, c3 -> K             (H/2), linear
struct RegressorShape {
    int input_width = 48;
    int input_height = 48;
    int num_keypoints = 5;
    int c1 = 8;
    int c2 = 16;
    int c3 = 24;

    int output_width() const noexcept { return input_width / 2; }
    int output_height() const noexcept { return input_height / 2; }
    /// Input pixels per output cell.
    static constexpr double output_stride = 2.0;

    bool operator==(const RegressorShape&) const = default;
};

void validate(const RegressorShape& shape);

/// Small fully convolutional heatmap regressor with hand-written backward
/// passes. `Real` is float for training and double for gradient checks.
template <typename Real>
class TinyRegressor {
public:
    explicit TinyRegressor(RegressorShape shape = {});

    const RegressorShape& shape() const noexcept { return shape_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }

    /// He-normal weights, zero biases.
    void initialize(Rng& rng);

    std::span<Real> parameters() noexcept { return params_; }
    std::span<const Real> parameters() const noexcept { return params_; }

    std::size_t input_size() const noexcept;
    std::size_t output_size() const noexcept;

    /// `inputs` holds `batch` images of input_size(); returns batch x
    /// output_size() heatmap values.
    std::vector<Real> forward(std::span<const Real> inputs, int batch) const;

    /// Mean squared error over every output element of the batch. When
    /// `grad` is non-empty (size parameter_count()) the gradient is written
    /// into it.
    Real loss_and_gradient(std::span<const Real> inputs, std::span<const Real> targets, int batch,
                           std::span<Real> grad) const;

    bool all_finite() const noexcept;

private:
    struct Layout {
        std::size_t w1, b1, w2, b2, w3, b3, w4, b4, total;
    };
    Layout layout() const noexcept;

    RegressorShape shape_;
    std::vector<Real> params_;
};

extern template class TinyRegressor<float>;
extern template class TinyRegressor<double>;

/// Converts an 8-bit single-channel image to the network input scale.
template <typename Real>
void image_to_input(const ImageBuffer& img, std::span<Real> out);

}  // namespace aid::synth
