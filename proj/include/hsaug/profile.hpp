#pragma once

// Detection of push-broom stripe artifacts in a single-band image.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <json.hpp>

#include "hsaug/image.hpp"

namespace hsaug {

struct ProfileOptions {
    double uniformity_threshold = 0.95;  // fraction of a column sharing its modal value
    double contrast_threshold = 8.0;     // grey levels vs. each adjacent column mean
    double row_factor = 4.0;             // row-difference outlier factor over the median
};

struct NoiseProfile {
    std::vector<int> vertical_columns;
    int spacing_min = 0;
    int spacing_max = 0;
    double spacing_mean = 0.0;
    std::vector<int> horizontal_rows;
};

inline NoiseProfile profile_noise(const ImageBuffer& img, const ProfileOptions& opts = {}) {
    if (img.channels() != 1) throw InvalidInput("profile_noise: expected a 1-channel image");
    const int w = img.width();
    const int h = img.height();

    std::vector<double> mean(w, 0.0);
    std::vector<int> modal(w, 0);
    for (int x = 0; x < w; ++x) {
        std::array<int, 256> hist{};
        long sum = 0;
        for (int y = 0; y < h; ++y) {
            const auto v = img.at(x, y);
            ++hist[v];
            sum += v;
        }
        mean[x] = static_cast<double>(sum) / h;
        modal[x] = *std::max_element(hist.begin(), hist.end());
    }

    NoiseProfile prof;
    for (int x = 0; x < w; ++x) {
        if (modal[x] < opts.uniformity_threshold * h) continue;
        const bool has_left = x > 0;
        const bool has_right = x + 1 < w;
        if (!has_left && !has_right) continue;
        if (has_left && std::abs(mean[x] - mean[x - 1]) < opts.contrast_threshold) continue;
        if (has_right && std::abs(mean[x] - mean[x + 1]) < opts.contrast_threshold) continue;
        prof.vertical_columns.push_back(x);
    }
    const auto& cols = prof.vertical_columns;
    if (cols.size() >= 2) {
        prof.spacing_min = cols[1] - cols[0];
        prof.spacing_max = prof.spacing_min;
        for (std::size_t i = 1; i < cols.size(); ++i) {
            const int s = cols[i] - cols[i - 1];
            prof.spacing_min = std::min(prof.spacing_min, s);
            prof.spacing_max = std::max(prof.spacing_max, s);
        }
        prof.spacing_mean = static_cast<double>(cols.back() - cols.front()) / static_cast<double>(cols.size() - 1);
    }

    // Row r is compared with row r-1.
    if (h >= 2) {
        std::vector<double> diff(h - 1);
        for (int y = 1; y < h; ++y) {
            auto a = img.row(y - 1);
            auto b = img.row(y);
            long s = 0;
            for (int x = 0; x < w; ++x) s += std::abs(static_cast<int>(b[x]) - static_cast<int>(a[x]));
            diff[y - 1] = static_cast<double>(s) / w;
        }
        auto sorted = diff;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (int y = 1; y < h; ++y)
            if (diff[y - 1] > opts.row_factor * median) prof.horizontal_rows.push_back(y);
    }
    return prof;
}

inline nlohmann::json to_json(const NoiseProfile& p) {
    return {{"vertical_columns", p.vertical_columns},
            {"vertical_count", p.vertical_columns.size()},
            {"spacing_min", p.spacing_min},
            {"spacing_max", p.spacing_max},
            {"spacing_mean", p.spacing_mean},
            {"horizontal_rows", p.horizontal_rows}};
}

}  // namespace hsaug
