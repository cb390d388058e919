#pragma once

// Push-broom instrumental noise: thin vertical stripes of a constant grey level
// plus horizontal scan-band events that drop rows and shift a slice sideways.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hsaug/image.hpp"
#include "hsaug/rng.hpp"

namespace hsaug {

struct NoiseParams {
    int n1 = 19;        // min vertical line count
    int n2 = 29;        // max vertical line count
    int sigma1 = 5;     // column jitter, +/- columns
    int c2 = 128;       // stripe / shift-fill grey level
    int r1 = 26;        // anchor row region
    int r2 = 32;
    int sigma2 = 3;     // anchor jitter, +/- rows
    int h1 = 15;        // slice height bounds
    int h2 = 30;
    int m = 2;          // max information loss, rows
    int d = 3;          // shift magnitude, columns
    int horizontal_events = 1;

    void validate() const {
        auto fail = [](const std::string& what) { throw InvalidParameter("noise params: " + what); };
        if (n1 < 1 || n1 > n2) fail("require 1 <= n1 <= n2");
        if (sigma1 < 0 || sigma2 < 0) fail("sigma1 and sigma2 must be >= 0");
        if (c2 < 0 || c2 > 255) fail("c2 must be in [0,255]");
        if (r1 < 0 || r1 > r2) fail("require 0 <= r1 <= r2");
        if (h1 < 1 || h1 > h2) fail("require 1 <= h1 <= h2");
        if (m < 0 || m >= h1) fail("require 0 <= m < h1");
        if (d < 0) fail("d must be >= 0");
        if (horizontal_events < 0) fail("horizontal_events must be >= 0");
    }

    friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct HorizontalEvent {
    int anchor_row = 0;
    int slice_height = 0;
    int loss_rows = 0;
    int shift_cols = 0;

    friend bool operator==(const HorizontalEvent&, const HorizontalEvent&) = default;
};

/// One replayable noise realization.
struct NoisePlan {
    std::vector<int> vertical_columns;  // strictly increasing
    std::vector<HorizontalEvent> horizontal_events;

    bool empty() const noexcept { return vertical_columns.empty() && horizontal_events.empty(); }

    void validate_for(int width, int height) const {
        for (std::size_t i = 0; i < vertical_columns.size(); ++i) {
            const int c = vertical_columns[i];
            if (c < 0 || c >= width)
                throw InvalidInput("noise plan: column " + std::to_string(c) + " outside image width");
            if (i > 0 && c <= vertical_columns[i - 1])
                throw InvalidInput("noise plan: columns must be strictly increasing");
        }
        for (const auto& e : horizontal_events) {
            if (e.anchor_row < 0 || e.slice_height < 1 || e.anchor_row + e.slice_height > height)
                throw InvalidInput("noise plan: event slice outside image height");
            if (e.loss_rows < 0 || e.loss_rows >= e.slice_height)
                throw InvalidInput("noise plan: loss rows must be in [0, slice height)");
            if (std::abs(e.shift_cols) >= width) throw InvalidInput("noise plan: shift exceeds image width");
        }
    }

    friend bool operator==(const NoisePlan&, const NoisePlan&) = default;
};

/// Draw order: line count, one jitter per line, then per event anchor, height,
/// loss and shift sign. Changing the order changes every stored plan.
inline NoisePlan plan_noise(const NoiseParams& params, int width, int height, Rng& rng) {
    params.validate();
    if (width <= params.n2)
        throw InvalidParameter("plan_noise: width " + std::to_string(width) + " leaves no room for " +
                               std::to_string(params.n2) + " distinct lines");
    if (params.horizontal_events > 0 && height < params.r2 + params.sigma2 + params.h2)
        throw InvalidParameter("plan_noise: height " + std::to_string(height) + " smaller than r2 + sigma2 + h2");

    NoisePlan plan;
    const auto n = static_cast<int>(rng.uniform_int(params.n1, params.n2));
    plan.vertical_columns.reserve(n);
    for (int k = 0; k < n; ++k) {
        // round((k+1) * width / (n+1)), half away from zero, in integers
        const std::int64_t num = static_cast<std::int64_t>(k + 1) * width;
        const std::int64_t nominal = (2 * num + (n + 1)) / (2 * (n + 1));
        const auto jitter = rng.uniform_int(-params.sigma1, params.sigma1);
        const auto col = static_cast<int>(std::clamp<std::int64_t>(nominal + jitter, 0, width - 1));
        plan.vertical_columns.push_back(col);
    }
    std::sort(plan.vertical_columns.begin(), plan.vertical_columns.end());
    plan.vertical_columns.erase(std::unique(plan.vertical_columns.begin(), plan.vertical_columns.end()),
                                plan.vertical_columns.end());

    for (int i = 0; i < params.horizontal_events; ++i) {
        HorizontalEvent e;
        const int lo = std::max(0, params.r1 - params.sigma2);
        e.anchor_row = static_cast<int>(rng.uniform_int(lo, params.r2 + params.sigma2));
        e.slice_height = static_cast<int>(rng.uniform_int(params.h1, params.h2));
        e.loss_rows = static_cast<int>(rng.uniform_int(0, params.m));
        e.shift_cols = rng.coin() ? params.d : -params.d;
        plan.horizontal_events.push_back(e);
    }
    return plan;
}

namespace detail {

// Drop the top `loss` rows of the slice, pull the rest up, replicate the last
// valid row into the freed bottom rows, then shift every slice row sideways.
template <typename Raster>
void apply_event(Raster& r, const HorizontalEvent& e, std::uint8_t fill) {
    const int w = r.width();
    const int top = e.anchor_row;
    const int h = e.slice_height;
    const int keep = h - e.loss_rows;
    for (int i = 0; i < keep; ++i) {
        auto dst = r.row(top + i);
        auto src = r.row(top + i + e.loss_rows);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    for (int i = keep; i < h; ++i) {
        auto dst = r.row(top + i);
        auto src = r.row(top + keep - 1);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    if (e.shift_cols == 0) return;
    std::vector<std::uint8_t> tmp(static_cast<std::size_t>(w));
    for (int i = 0; i < h; ++i) {
        auto row = r.row(top + i);
        for (int x = 0; x < w; ++x) {
            const int sx = x - e.shift_cols;
            tmp[x] = (sx >= 0 && sx < w) ? row[sx] : fill;
        }
        std::copy(tmp.begin(), tmp.end(), row.begin());
    }
}

}  // namespace detail

/// Scan-band events are applied first, then the vertical stripes, so every
/// planned column ends up fully at c2. Vertical stripes never touch the mask.
inline std::pair<ImageBuffer, LabelMask> apply_noise(const ImageBuffer& img, const LabelMask& mask,
                                                     const NoisePlan& plan, int c2) {
    if (img.channels() != 1) throw InvalidInput("apply_noise: expected a 1-channel image");
    if (!same_dims(img, mask)) throw InvalidInput("apply_noise: image and mask dimensions differ");
    if (c2 < 0 || c2 > 255) throw InvalidParameter("apply_noise: c2 must be in [0,255]");
    plan.validate_for(img.width(), img.height());

    ImageBuffer out_img = img;
    LabelMask out_mask = mask;
    for (const auto& e : plan.horizontal_events) {
        detail::apply_event(out_img, e, static_cast<std::uint8_t>(c2));
        detail::apply_event(out_mask, e, kBackground);
    }
    for (int col : plan.vertical_columns)
        for (int y = 0; y < out_img.height(); ++y) out_img.at(col, y) = static_cast<std::uint8_t>(c2);
    return {std::move(out_img), std::move(out_mask)};
}

}  // namespace hsaug
