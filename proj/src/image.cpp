#include "aid/image.hpp"

#include "aid/error.hpp"

namespace aid {

ImageBuffer::ImageBuffer(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    AID_CHECK(width >= 0 && height >= 0, "image dimensions must be non-negative");
    AID_CHECK(channels == 1 || channels == 3, "image must have 1 or 3 channels");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    AID_CHECK(width >= 0 && height >= 0, "image dimensions must be non-negative");
    AID_CHECK(channels == 1 || channels == 3, "image must have 1 or 3 channels");
    AID_CHECK(data_.size() == static_cast<std::size_t>(width) * height * channels,
              "image data length must equal width * height * channels");
}

std::vector<double> channel_mean(const ImageBuffer& img) {
    std::vector<double> sum(img.channels(), 0.0);
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) sum[i % img.channels()] += data[i];
    const double n = static_cast<double>(img.width()) * img.height();
    for (auto& s : sum) s = n > 0 ? s / n : 0.0;
    return sum;
}

}  // namespace aid
