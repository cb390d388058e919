#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "hsaug/image.hpp"

namespace hsaug {

struct TypeReport {
    int type_label = 0;
    int width = 0;
    int height = 0;
    std::size_t image_count = 0;
    std::vector<double> mean_image;  // row-major, width * height
    double mean_intensity = 0.0;
    std::array<std::uint64_t, 256> histogram{};

    ImageBuffer mean_image_u8() const {
        ImageBuffer out(width, height, 1);
        auto d = out.data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = quantize(mean_image[i]);
        return out;
    }
};

inline std::vector<TypeReport> analyze_types(const std::map<int, std::vector<ImageBuffer>>& groups) {
    std::vector<TypeReport> out;
    for (const auto& [type, images] : groups) {
        if (images.empty()) throw InvalidInput("analyze_types: type " + std::to_string(type) + " has no images");
        TypeReport r;
        r.type_label = type;
        r.width = images.front().width();
        r.height = images.front().height();
        r.image_count = images.size();
        std::vector<std::uint64_t> sum(static_cast<std::size_t>(r.width) * r.height, 0);
        for (const auto& img : images) {
            if (img.channels() != 1) throw InvalidInput("analyze_types: expected 1-channel images");
            if (img.width() != r.width || img.height() != r.height)
                throw InvalidInput("analyze_types: type " + std::to_string(type) + " mixes image dimensions");
            auto d = img.data();
            for (std::size_t i = 0; i < d.size(); ++i) {
                sum[i] += d[i];
                ++r.histogram[d[i]];
            }
        }
        r.mean_image.resize(sum.size());
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < sum.size(); ++i) {
            r.mean_image[i] = static_cast<double>(sum[i]) / static_cast<double>(images.size());
            total += sum[i];
        }
        r.mean_intensity = static_cast<double>(total) / static_cast<double>(sum.size() * images.size());
        out.push_back(std::move(r));
    }
    return out;
}

/// Bar chart of a 256-bin histogram: white background, black bars, 2 px per bin.
inline ImageBuffer render_histogram(const std::array<std::uint64_t, 256>& hist, int height = 200) {
    constexpr int kBar = 2;
    constexpr int kMargin = 10;
    const int width = 256 * kBar + 2 * kMargin;
    const int plot_h = height - 2 * kMargin;
    ImageBuffer img(width, height, 1, 255);
    const auto peak = *std::max_element(hist.begin(), hist.end());
    for (int x = kMargin - 1; x < width - kMargin + 1; ++x) img.at(x, height - kMargin) = 0;  // axis
    if (peak == 0) return img;
    for (int b = 0; b < 256; ++b) {
        const int bar = static_cast<int>((hist[b] * static_cast<std::uint64_t>(plot_h) + peak - 1) / peak);
        for (int k = 0; k < kBar; ++k)
            for (int y = 0; y < bar; ++y) img.at(kMargin + b * kBar + k, height - kMargin - 1 - y) = 0;
    }
    return img;
}

inline nlohmann::json to_json(const TypeReport& r) {
    return {{"type", r.type_label},
            {"images", r.image_count},
            {"width", r.width},
            {"height", r.height},
            {"mean_intensity", r.mean_intensity},
            {"histogram", r.histogram}};
}

}  // namespace hsaug
