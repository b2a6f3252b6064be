#include "aid/synth/tiny_regressor.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "aid/error.hpp"

namespace aid::synth {
namespace {

template <typename Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using CMap = Eigen::Map<const Mat<Real>>;
template <typename Real>
using MMap = Eigen::Map<Mat<Real>>;

struct Conv {
    int channels, height, width, kernel, stride, pad;
    int out_h() const { return (height + 2 * pad - kernel) / stride + 1; }
    int out_w() const { return (width + 2 * pad - kernel) / stride + 1; }
};

template <typename Real>
void im2col(const Real* x, const Conv& g, Mat<Real>& col) {
    const int ho = g.out_h(), wo = g.out_w();
    col.resize(static_cast<Eigen::Index>(g.channels) * g.kernel * g.kernel,
               static_cast<Eigen::Index>(ho) * wo);
    for (int c = 0; c < g.channels; ++c)
        for (int ky = 0; ky < g.kernel; ++ky)
            for (int kx = 0; kx < g.kernel; ++kx) {
                Real* row = col.row((c * g.kernel + ky) * g.kernel + kx).data();
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * g.stride - g.pad + ky;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * g.stride - g.pad + kx;
                        row[oy * wo + ox] = (iy >= 0 && iy < g.height && ix >= 0 && ix < g.width)
                                                ? x[(static_cast<std::size_t>(c) * g.height + iy) * g.width + ix]
                                                : Real(0);
                    }
                }
            }
}

template <typename Real>
void col2im(const Mat<Real>& col, const Conv& g, Real* x) {
    const int ho = g.out_h(), wo = g.out_w();
    std::fill(x, x + static_cast<std::size_t>(g.channels) * g.height * g.width, Real(0));
    for (int c = 0; c < g.channels; ++c)
        for (int ky = 0; ky < g.kernel; ++ky)
            for (int kx = 0; kx < g.kernel; ++kx) {
                const Real* row = col.row((c * g.kernel + ky) * g.kernel + kx).data();
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * g.stride - g.pad + ky;
                    if (iy < 0 || iy >= g.height) continue;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * g.stride - g.pad + kx;
                        if (ix < 0 || ix >= g.width) continue;
                        x[(static_cast<std::size_t>(c) * g.height + iy) * g.width + ix] += row[oy * wo + ox];
                    }
                }
            }
}

template <typename Real>
void avgpool2(const Mat<Real>& a, int h, int w, Mat<Real>& out) {
    const int ho = h / 2, wo = w / 2;
    out.resize(a.rows(), static_cast<Eigen::Index>(ho) * wo);
    for (Eigen::Index c = 0; c < a.rows(); ++c) {
        const Real* src = a.row(c).data();
        Real* dst = out.row(c).data();
        for (int y = 0; y < ho; ++y)
            for (int x = 0; x < wo; ++x)
                dst[y * wo + x] = Real(0.25) * (src[2 * y * w + 2 * x] + src[2 * y * w + 2 * x + 1] +
                                                src[(2 * y + 1) * w + 2 * x] + src[(2 * y + 1) * w + 2 * x + 1]);
    }
}

template <typename Real>
void avgpool2_backward(const Mat<Real>& d_out, int h, int w, Mat<Real>& d_in) {
    const int wo = w / 2;
    d_in.resize(d_out.rows(), static_cast<Eigen::Index>(h) * w);
    for (Eigen::Index c = 0; c < d_out.rows(); ++c) {
        const Real* src = d_out.row(c).data();
        Real* dst = d_in.row(c).data();
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) dst[y * w + x] = Real(0.25) * src[(y / 2) * wo + x / 2];
    }
}

template <typename Real>
struct Activations {
    Mat<Real> col1, z1, a1, col2, z2, a2, p2, col3, z3, a3, cols4;
};

}  // namespace

void validate(const RegressorShape& s) {
    AID_CHECK(s.input_width >= 8 && s.input_height >= 8, "regressor input must be at least 8 x 8");
    AID_CHECK(s.input_width % 4 == 0 && s.input_height % 4 == 0,
              "regressor input size must be a multiple of 4");
    AID_CHECK(s.num_keypoints >= 1, "regressor needs at least one keypoint");
    AID_CHECK(s.c1 >= 1 && s.c2 >= 1 && s.c3 >= 1, "regressor channel counts must be >= 1");
}

template <typename Real>
TinyRegressor<Real>::TinyRegressor(RegressorShape shape) : shape_(shape) {
    validate(shape_);
    params_.assign(layout().total, Real(0));
}

template <typename Real>
typename TinyRegressor<Real>::Layout TinyRegressor<Real>::layout() const noexcept {
    const auto& s = shape_;
    Layout l{};
    std::size_t off = 0;
    auto take = [&](std::size_t n) {
        const std::size_t at = off;
        off += n;
        return at;
    };
    l.w1 = take(static_cast<std::size_t>(s.c1) * 25);
    l.b1 = take(s.c1);
    l.w2 = take(static_cast<std::size_t>(s.c2) * s.c1 * 9);
    l.b2 = take(s.c2);
    l.w3 = take(static_cast<std::size_t>(s.c3) * s.c2 * 9);
    l.b3 = take(s.c3);
    l.w4 = take(static_cast<std::size_t>(s.c3) * s.num_keypoints * 16);
    l.b4 = take(s.num_keypoints);
    l.total = off;
    return l;
}

template <typename Real>
void TinyRegressor<Real>::initialize(Rng& rng) {
    const auto l = layout();
    const auto& s = shape_;
    std::fill(params_.begin(), params_.end(), Real(0));
    auto fill = [&](std::size_t at, std::size_t n, double fan_in) {
        const double sd = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < n; ++i) params_[at + i] = static_cast<Real>(rng.normal(0.0, sd));
    };
    fill(l.w1, l.b1 - l.w1, 25.0);
    fill(l.w2, l.b2 - l.w2, s.c1 * 9.0);
    fill(l.w3, l.b3 - l.w3, s.c2 * 9.0);
    fill(l.w4, l.b4 - l.w4, s.c3 * 8.0);
}

template <typename Real>
std::size_t TinyRegressor<Real>::input_size() const noexcept {
    return static_cast<std::size_t>(shape_.input_width) * shape_.input_height;
}

template <typename Real>
std::size_t TinyRegressor<Real>::output_size() const noexcept {
    return static_cast<std::size_t>(shape_.num_keypoints) * shape_.output_width() * shape_.output_height();
}

namespace {

template <typename Real>
struct Geometry {
    Conv c1, c2, c3, c4;
    int h2, w2;

    explicit Geometry(const RegressorShape& s) {
        const int h = s.input_height, w = s.input_width;
        c1 = {1, h, w, 5, 2, 2};
        c2 = {s.c1, h / 2, w / 2, 3, 1, 1};
        c3 = {s.c2, h / 4, w / 4, 3, 1, 1};
        // The deconvolution is the adjoint of this convolution over the output grid.
        c4 = {s.num_keypoints, h / 2, w / 2, 4, 2, 1};
        h2 = h / 2;
        w2 = w / 2;
    }
};

template <typename Real>
void relu_inplace(const Mat<Real>& z, Mat<Real>& a) {
    a = z.cwiseMax(Real(0));
}

}  // namespace

template <typename Real>
static void forward_one(const RegressorShape& s, const Real* params, const Real* input, Real* output,
                        Activations<Real>& act) {
    using std::size_t;
    const Geometry<Real> g(s);
    const auto l_w1 = size_t(0);
    const size_t l_b1 = l_w1 + size_t(s.c1) * 25;
    const size_t l_w2 = l_b1 + s.c1;
    const size_t l_b2 = l_w2 + size_t(s.c2) * s.c1 * 9;
    const size_t l_w3 = l_b2 + s.c2;
    const size_t l_b3 = l_w3 + size_t(s.c3) * s.c2 * 9;
    const size_t l_w4 = l_b3 + s.c3;
    const size_t l_b4 = l_w4 + size_t(s.c3) * s.num_keypoints * 16;

    CMap<Real> w1(params + l_w1, s.c1, 25);
    CMap<Real> w2(params + l_w2, s.c2, s.c1 * 9);
    CMap<Real> w3(params + l_w3, s.c3, s.c2 * 9);
    CMap<Real> w4(params + l_w4, s.c3, s.num_keypoints * 16);
    Eigen::Map<const Eigen::Matrix<Real, Eigen::Dynamic, 1>> b1(params + l_b1, s.c1), b2(params + l_b2, s.c2),
        b3(params + l_b3, s.c3), b4(params + l_b4, s.num_keypoints);

    im2col(input, g.c1, act.col1);
    act.z1.noalias() = w1 * act.col1;
    act.z1.colwise() += b1;
    relu_inplace(act.z1, act.a1);

    im2col(act.a1.data(), g.c2, act.col2);
    act.z2.noalias() = w2 * act.col2;
    act.z2.colwise() += b2;
    relu_inplace(act.z2, act.a2);
    avgpool2(act.a2, g.h2, g.w2, act.p2);

    im2col(act.p2.data(), g.c3, act.col3);
    act.z3.noalias() = w3 * act.col3;
    act.z3.colwise() += b3;
    relu_inplace(act.z3, act.a3);

    act.cols4.noalias() = w4.transpose() * act.a3;
    col2im(act.cols4, g.c4, output);
    const size_t plane = size_t(g.h2) * g.w2;
    for (int k = 0; k < s.num_keypoints; ++k)
        for (size_t i = 0; i < plane; ++i) output[k * plane + i] += b4[k];
}

template <typename Real>
std::vector<Real> TinyRegressor<Real>::forward(std::span<const Real> inputs, int batch) const {
    AID_CHECK(batch >= 0 && inputs.size() == input_size() * static_cast<std::size_t>(batch),
              "forward: input size does not match batch");
    std::vector<Real> out(output_size() * static_cast<std::size_t>(batch));
    Activations<Real> act;
    for (int b = 0; b < batch; ++b)
        forward_one(shape_, params_.data(), inputs.data() + b * input_size(), out.data() + b * output_size(), act);
    return out;
}

template <typename Real>
Real TinyRegressor<Real>::loss_and_gradient(std::span<const Real> inputs, std::span<const Real> targets,
                                            int batch, std::span<Real> grad) const {
    AID_CHECK(batch >= 1 && inputs.size() == input_size() * static_cast<std::size_t>(batch),
              "loss: input size does not match batch");
    AID_CHECK(targets.size() == output_size() * static_cast<std::size_t>(batch),
              "loss: target size does not match batch");
    const bool want_grad = !grad.empty();
    AID_CHECK(!want_grad || grad.size() == params_.size(), "loss: gradient buffer has the wrong size");

    const auto& s = shape_;
    const auto l = layout();
    const Geometry<Real> g(s);
    const double n = static_cast<double>(targets.size());
    if (want_grad) std::fill(grad.begin(), grad.end(), Real(0));

    CMap<Real> w2(params_.data() + l.w2, s.c2, s.c1 * 9);
    CMap<Real> w3(params_.data() + l.w3, s.c3, s.c2 * 9);
    CMap<Real> w4(params_.data() + l.w4, s.c3, s.num_keypoints * 16);

    Activations<Real> act;
    std::vector<Real> out(output_size());
    Mat<Real> dy, dcols4, da3, dcol3, dp2, da2, dcol2, da1;
    double total = 0.0;
    for (int b = 0; b < batch; ++b) {
        forward_one(s, params_.data(), inputs.data() + b * input_size(), out.data(), act);
        const Real* t = targets.data() + b * output_size();
        dy.resize(s.num_keypoints, static_cast<Eigen::Index>(g.h2) * g.w2);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = static_cast<double>(out[i]) - static_cast<double>(t[i]);
            total += d * d;
            dy.data()[i] = static_cast<Real>(2.0 * d / n);
        }
        if (!want_grad) continue;

        MMap<Real>(grad.data() + l.b4, s.num_keypoints, 1) += dy.rowwise().sum();
        im2col(dy.data(), g.c4, dcols4);
        MMap<Real>(grad.data() + l.w4, s.c3, s.num_keypoints * 16).noalias() += act.a3 * dcols4.transpose();
        da3.noalias() = w4 * dcols4;
        da3 = (act.z3.array() > Real(0)).select(da3, Real(0));
        MMap<Real>(grad.data() + l.w3, s.c3, s.c2 * 9).noalias() += da3 * act.col3.transpose();
        MMap<Real>(grad.data() + l.b3, s.c3, 1) += da3.rowwise().sum();

        dcol3.noalias() = w3.transpose() * da3;
        dp2.resize(s.c2, static_cast<Eigen::Index>(g.c3.height) * g.c3.width);
        col2im(dcol3, g.c3, dp2.data());
        avgpool2_backward(dp2, g.h2, g.w2, da2);
        da2 = (act.z2.array() > Real(0)).select(da2, Real(0));
        MMap<Real>(grad.data() + l.w2, s.c2, s.c1 * 9).noalias() += da2 * act.col2.transpose();
        MMap<Real>(grad.data() + l.b2, s.c2, 1) += da2.rowwise().sum();

        dcol2.noalias() = w2.transpose() * da2;
        da1.resize(s.c1, static_cast<Eigen::Index>(g.h2) * g.w2);
        col2im(dcol2, g.c2, da1.data());
        da1 = (act.z1.array() > Real(0)).select(da1, Real(0));
        MMap<Real>(grad.data() + l.w1, s.c1, 25).noalias() += da1 * act.col1.transpose();
        MMap<Real>(grad.data() + l.b1, s.c1, 1) += da1.rowwise().sum();
    }
    return static_cast<Real>(total / n);
}

template <typename Real>
bool TinyRegressor<Real>::all_finite() const noexcept {
    for (Real v : params_)
        if (!std::isfinite(v)) return false;
    return true;
}

template class TinyRegressor<float>;
template class TinyRegressor<double>;

template <typename Real>
void image_to_input(const ImageBuffer& img, std::span<Real> out) {
    AID_CHECK(img.channels() == 1, "regressor input must be single-channel");
    AID_CHECK(out.size() == static_cast<std::size_t>(img.width()) * img.height(),
              "regressor input buffer has the wrong size");
    const auto data = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Real>(data[i] / 255.0);
}

template void image_to_input<float>(const ImageBuffer&, std::span<float>);
template void image_to_input<double>(const ImageBuffer&, std::span<double>);

}  // namespace aid::synth
