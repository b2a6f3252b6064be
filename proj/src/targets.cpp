#include "aid/targets.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "aid/error.hpp"

namespace aid {

HeatmapStack::HeatmapStack(int num_maps, int height, int width, double stride, double sigma)
    : num_maps_(num_maps), height_(height), width_(width), stride_(stride), sigma_(sigma) {
    AID_CHECK(num_maps >= 0 && height >= 1 && width >= 1, "heatmap dimensions must be positive");
    AID_CHECK(stride > 0.0, "stride must be positive");
    AID_CHECK(sigma > 0.0, "sigma must be positive");
    values_.assign(static_cast<std::size_t>(num_maps) * height * width, 0.0);
}

std::span<double> HeatmapStack::map(int k) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(k) * height_ * width_,
                                              static_cast<std::size_t>(height_) * width_);
}

std::span<const double> HeatmapStack::map(int k) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(k) * height_ * width_,
                                                    static_cast<std::size_t>(height_) * width_);
}

HeatmapStack render_heatmaps(const KeypointInstance& instance, int out_height, int out_width,
                             double stride, double sigma) {
    HeatmapStack stack(static_cast<int>(instance.keypoints.size()), out_height, out_width, stride,
                       sigma);
    const double radius = kTruncationSigmas * sigma;
    const double r2 = radius * radius;
    const double denom = 2.0 * sigma * sigma;
    for (int k = 0; k < stack.num_maps(); ++k) {
        const auto& kp = instance.keypoints[k];
        if (!kp.labeled()) continue;
        const double cx = kp.x / stride;
        const double cy = kp.y / stride;
        const int u0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
        const int u1 = std::min(out_width - 1, static_cast<int>(std::ceil(cx + radius)));
        const int v0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
        const int v1 = std::min(out_height - 1, static_cast<int>(std::ceil(cy + radius)));
        for (int v = v0; v <= v1; ++v) {
            const double dy = v - cy;
            for (int u = u0; u <= u1; ++u) {
                const double dx = u - cx;
                const double d2 = dx * dx + dy * dy;
                if (d2 > r2) continue;
                stack.at(k, v, u) = std::exp(-d2 / denom);
            }
        }
    }
    return stack;
}

namespace {

template <typename Getter>
DecodedKeypoint decode_one(Getter&& at, int height, int width, double stride) {
    int best_u = 0;
    int best_v = 0;
    double best = at(0, 0);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u)
            if (at(v, u) > best) {
                best = at(v, u);
                best_u = u;
                best_v = v;
            }
    if (!(best > 0.0))
        return {(width - 1) / 2.0 * stride, (height - 1) / 2.0 * stride, 0.0};
    double x = best_u;
    double y = best_v;
    if (best_u > 0 && best_u < width - 1) {
        const double diff = at(best_v, best_u + 1) - at(best_v, best_u - 1);
        x += diff > 0 ? 0.25 : (diff < 0 ? -0.25 : 0.0);
    }
    if (best_v > 0 && best_v < height - 1) {
        const double diff = at(best_v + 1, best_u) - at(best_v - 1, best_u);
        y += diff > 0 ? 0.25 : (diff < 0 ? -0.25 : 0.0);
    }
    return {x * stride, y * stride, best};
}

}  // namespace

std::vector<DecodedKeypoint> decode_heatmaps(const HeatmapStack& stack) {
    std::vector<DecodedKeypoint> out;
    out.reserve(stack.num_maps());
    for (int k = 0; k < stack.num_maps(); ++k)
        out.push_back(decode_one([&](int v, int u) { return stack.at(k, v, u); }, stack.height(),
                                 stack.width(), stack.stride()));
    return out;
}

std::vector<DecodedKeypoint> decode_heatmaps(std::span<const float> values, int num_maps,
                                             int height, int width, double stride) {
    AID_CHECK(values.size() == static_cast<std::size_t>(num_maps) * height * width,
              "heatmap buffer size does not match its dimensions");
    std::vector<DecodedKeypoint> out;
    out.reserve(num_maps);
    for (int k = 0; k < num_maps; ++k) {
        const float* m = values.data() + static_cast<std::size_t>(k) * height * width;
        out.push_back(decode_one(
            [&](int v, int u) { return static_cast<double>(m[static_cast<std::size_t>(v) * width + u]); },
            height, width, stride));
    }
    return out;
}

void write_heatmap_file(const std::filesystem::path& path, const HeatmapStack& stack) {
    static_assert(std::endian::native == std::endian::little, "heatmap files are little-endian");
    nlohmann::json header = {{"format", "aid-heatmap"},
                             {"version", 1},
                             {"dtype", "float64"},
                             {"byte_order", "little"},
                             {"shape", {stack.num_maps(), stack.height(), stack.width()}},
                             {"stride", stack.stride()},
                             {"sigma", stack.sigma()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::string line = header.dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.write(reinterpret_cast<const char*>(stack.values().data()),
              static_cast<std::streamsize>(stack.values().size() * sizeof(double)));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

HeatmapStack read_heatmap_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("heatmap header: " + std::string(e.what()), e.byte);
    }
    if (header.value("format", "") != "aid-heatmap" || header.value("dtype", "") != "float64")
        throw SchemaError("'" + path.string() + "' is not an aid-heatmap float64 file");
    const auto shape = header.at("shape").get<std::vector<int>>();
    if (shape.size() != 3) throw SchemaError("heatmap header: shape must have three entries");
    HeatmapStack stack(shape[0], shape[1], shape[2], header.at("stride").get<double>(),
                       header.at("sigma").get<double>());
    std::vector<double> values(stack.values().size());
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double)))
        throw SchemaError("'" + path.string() + "': truncated heatmap payload");
    for (int k = 0; k < stack.num_maps(); ++k) {
        auto m = stack.map(k);
        std::memcpy(m.data(), values.data() + static_cast<std::size_t>(k) * m.size(),
                    m.size() * sizeof(double));
    }
    return stack;
}

}  // namespace aid
