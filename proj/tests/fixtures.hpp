#pragma once

// Synthetic inputs shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsaug/hsaug.hpp"

namespace hsaug::testing {

namespace fs = std::filesystem;

inline ImageBuffer random_gray(int w, int h, Rng& rng, int lo = 0, int hi = 255) {
    ImageBuffer img(w, h, 1);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
    return img;
}

inline LabelMask random_mask(int w, int h, Rng& rng, int classes = kNumClasses) {
    LabelMask m(w, h);
    for (auto& v : m.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, classes - 1));
    return m;
}

/// Stained-tissue look: pink background, purple blobs, per-pixel grain.
inline ImageBuffer textured_rgb(int w, int h, Rng& rng) {
    ImageBuffer img(w, h, 3);
    struct Blob { double x, y, r; };
    std::vector<Blob> blobs;
    const int n = 6 + static_cast<int>(rng.uniform_int(0, 6));
    for (int i = 0; i < n; ++i)
        blobs.push_back({static_cast<double>(rng.uniform_int(0, w - 1)), static_cast<double>(rng.uniform_int(0, h - 1)),
                         static_cast<double>(rng.uniform_int(h / 12, h / 5))});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double r = 225, g = 170, b = 200;
            for (const auto& bl : blobs) {
                const double d = std::hypot(x - bl.x, y - bl.y) / bl.r;
                if (d < 1.0) {
                    const double t = 1.0 - d * d;
                    r -= 90 * t;
                    g -= 110 * t;
                    b -= 40 * t;
                }
            }
            const int grain = static_cast<int>(rng.uniform_int(-25, 25));
            img.at(x, y, 0) = quantize(r + grain);
            img.at(x, y, 1) = quantize(g + grain);
            img.at(x, y, 2) = quantize(b + grain);
        }
    }
    return img;
}

/// Grey texture with no naturally uniform columns.
inline ImageBuffer textured_gray(int w, int h, Rng& rng) { return spectralize(textured_rgb(w, h, rng), {}); }

inline nlohmann::json polygon_shape(const std::string& label, const std::vector<std::pair<double, double>>& pts) {
    nlohmann::json points = nlohmann::json::array();
    for (auto [x, y] : pts) points.push_back({x, y});
    return {{"label", label}, {"points", points}, {"shape_type", "polygon"}, {"group_id", nullptr}, {"flags", {}}};
}

inline std::vector<std::pair<double, double>> regular_polygon(double cx, double cy, double r, int sides) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < sides; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / sides;
        pts.emplace_back(std::round(cx + r * std::cos(a)), std::round(cy + r * std::sin(a)));
    }
    return pts;
}

/// LabelMe document with a few cytoplasm regions holding nuclei, plus an RBC
/// and a fibroblast.
inline nlohmann::json labelme_doc(int w, int h, Rng& rng, const std::string& image_name) {
    nlohmann::json shapes = nlohmann::json::array();
    const int cells = 2 + static_cast<int>(rng.uniform_int(0, 3));
    for (int i = 0; i < cells; ++i) {
        const double cx = static_cast<double>(rng.uniform_int(w / 8, 7 * w / 8));
        const double cy = static_cast<double>(rng.uniform_int(h / 8, 7 * h / 8));
        const double r = static_cast<double>(rng.uniform_int(h / 10, h / 5));
        shapes.push_back(polygon_shape("cytoplasm", regular_polygon(cx, cy, r, 9)));
        shapes.push_back(polygon_shape("nuclear", regular_polygon(cx, cy, r / 3, 7)));
    }
    shapes.push_back(polygon_shape("rbc", regular_polygon(w / 10.0, h / 10.0, h / 20.0, 8)));
    shapes.push_back(polygon_shape("fibroblast", {{w * 0.7, h * 0.85}, {w * 0.95, h * 0.8}, {w * 0.9, h * 0.95}}));
    return {{"version", "5.2.1"},  {"flags", nlohmann::json::object()}, {"shapes", shapes},
            {"imagePath", image_name}, {"imageData", nullptr}, {"imageHeight", h}, {"imageWidth", w}};
}

inline LabelPalette default_palette() {
    LabelPalette p;
    p.add("background", 0);
    p.add("cytoplasm", 1);
    p.add("nuclear", 2);
    p.add("rbc", 3);
    p.add("fibroblast", 4);
    return p;
}

/// Even-odd inside test at the centre of pixel (x, y) for a polygon with
/// integer vertices, done in doubled integer coordinates (no rounding).
inline bool center_inside(const std::vector<std::pair<int, int>>& poly, int x, int y) {
    const long long xc = 2LL * x + 1, yc = 2LL * y + 1;
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const long long ax = 2LL * poly[j].first, ay = 2LL * poly[j].second;
        const long long bx = 2LL * poly[i].first, by = 2LL * poly[i].second;
        if ((ay > yc) == (by > yc)) continue;
        // crossing x <= xc  <=>  ax + (yc-ay)(bx-ax)/(by-ay) <= xc
        const long long num = (yc - ay) * (bx - ax);
        const long long den = by - ay;
        const long long lhs = num;
        const long long rhs = (xc - ax) * den;
        if (den > 0 ? lhs <= rhs : lhs >= rhs) inside = !inside;
    }
    return inside;
}

inline LabelMask oracle_mask(const std::vector<std::pair<int, int>>& poly, int w, int h, std::uint8_t label) {
    LabelMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (center_inside(poly, x, y)) m.at(x, y) = label;
    return m;
}

/// Random polygon with 3..12 integer vertices inside a w x h frame.
inline std::vector<std::pair<int, int>> random_polygon(int w, int h, Rng& rng) {
    const int n = static_cast<int>(rng.uniform_int(3, 12));
    std::vector<std::pair<int, int>> pts;
    for (int i = 0; i < n; ++i)
        pts.emplace_back(static_cast<int>(rng.uniform_int(0, w)), static_cast<int>(rng.uniform_int(0, h)));
    return pts;
}

inline nlohmann::json polygon_doc(const std::vector<std::pair<int, int>>& poly, int w, int h, const std::string& label) {
    std::vector<std::pair<double, double>> pts;
    for (auto [x, y] : poly) pts.emplace_back(x, y);
    return {{"shapes", nlohmann::json::array({polygon_shape(label, pts)})}, {"imageWidth", w}, {"imageHeight", h}};
}

struct FixtureLayout {
    fs::path sources;
    fs::path originals;
};

/// Writes `n_sources` RGB sources (+ LabelMe JSON) and `n_originals` single-band
/// originals (+ 3-class masks) under `root`. Types cycle through 1..7 and are
/// carried by the `t<k>_` filename prefix.
inline FixtureLayout write_fixture(const fs::path& root, int n_sources, int n_originals, std::uint64_t seed,
                                   int src_w = 704, int src_h = 528) {
    FixtureLayout f{root / "sources", root / "originals"};
    fs::create_directories(f.sources);
    fs::create_directories(f.originals / "images");
    fs::create_directories(f.originals / "masks");
    for (int i = 0; i < n_sources; ++i) {
        Rng rng(derive_seed(seed, "fixture-source", static_cast<std::uint64_t>(i), "make"));
        const std::string stem = "t" + std::to_string(i % 7 + 1) + "_src" + std::to_string(100 + i);
        write_png(f.sources / (stem + ".png"), textured_rgb(src_w, src_h, rng));
        std::ofstream(f.sources / (stem + ".json")) << labelme_doc(src_w, src_h, rng, stem + ".png").dump(2);
    }
    for (int i = 0; i < n_originals; ++i) {
        Rng rng(derive_seed(seed, "fixture-original", static_cast<std::uint64_t>(i), "make"));
        const std::string stem = "t" + std::to_string(i % 7 + 1) + "_hs" + std::to_string(100 + i);
        const int w = 640, h = 480;
        write_png(f.originals / "images" / (stem + ".png"), textured_gray(w, h, rng));
        LabelMask m(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) m.at(x, y) = static_cast<std::uint8_t>(((x / 80) + (y / 60)) % 3);
        write_mask_png(f.originals / "masks" / (stem + ".png"), m);
    }
    return f;
}

/// Fresh, empty scratch directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hsaug_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

inline std::vector<unsigned char> file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace hsaug::testing
