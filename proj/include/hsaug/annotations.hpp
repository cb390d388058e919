#pragma once

// LabelMe-style polygon annotations -> class-index masks.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsaug/image.hpp"

namespace hsaug {

struct ParseError : Error {
    using Error::Error;
};

/// Raised when annotation labels have no class in the palette.
struct LabelMappingError : Error {
    explicit LabelMappingError(std::vector<std::string> labels)
        : Error(make_message(labels)), unknown_labels(std::move(labels)) {}

    std::vector<std::string> unknown_labels;

private:
    static std::string make_message(const std::vector<std::string>& labels) {
        std::string msg = "unknown annotation label(s):";
        for (const auto& l : labels) msg += " \"" + l + "\"";
        return msg;
    }
};

/// Label text -> class index. Matching is case-insensitive on trimmed text.
class LabelPalette {
public:
    LabelPalette() = default;

    void add(std::string_view label, int class_index) {
        if (class_index < 0 || class_index >= kNumClasses)
            throw InvalidParameter("palette: class index " + std::to_string(class_index) + " out of range");
        map_[normalize(label)] = static_cast<std::uint8_t>(class_index);
    }

    std::optional<std::uint8_t> find(std::string_view label) const {
        auto it = map_.find(normalize(label));
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const noexcept { return map_.size(); }

    /// Flat text: one `label = index` per line, '#' starts a comment.
    static LabelPalette parse(std::string_view text, std::string_view origin = "<palette>") {
        LabelPalette p;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            const auto where = std::string(origin) + ":" + std::to_string(lineno);
            if (eq == std::string::npos) throw ParseError(where + ": expected 'label = index'");
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            int idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoi(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ParseError(where + ": class index '" + value + "' is not an integer");
            }
            if (key.empty()) throw ParseError(where + ": empty label");
            try {
                p.add(key, idx);
            } catch (const InvalidParameter& e) {
                throw ParseError(where + ": " + e.what());
            }
        }
        return p;
    }

    static LabelPalette load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open label palette '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

private:
    static std::string trim(std::string_view s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) return {};
        auto e = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(b, e - b + 1));
    }
    static std::string normalize(std::string_view s) {
        auto t = trim(s);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        return t;
    }

    std::map<std::string, std::uint8_t> map_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Shape {
    std::string label;
    std::vector<Point> points;
};

struct AnnotationDoc {
    int image_width = 0;
    int image_height = 0;
    std::vector<Shape> shapes;
};

/// Parses a LabelMe JSON document. Polygons need >= 3 vertices; rectangles
/// (two corners) are expanded to four. Vertices are clamped to the image. When
/// a palette is given every label must map, and all misses are reported at once.
inline AnnotationDoc parse_annotations(std::string_view text, const LabelPalette* palette = nullptr,
                                       std::string_view origin = "<annotation>") {
    const std::string where(origin);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(where + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }

    AnnotationDoc doc;
    try {
        if (!j.is_object()) throw ParseError(where + ": top level is not an object");
        if (!j.contains("imageWidth") || !j.contains("imageHeight"))
            throw ParseError(where + ": missing imageWidth/imageHeight");
        doc.image_width = j.at("imageWidth").get<int>();
        doc.image_height = j.at("imageHeight").get<int>();
        if (doc.image_width < 1 || doc.image_height < 1) throw ParseError(where + ": image dimensions must be >= 1");

        const auto shapes = j.value("shapes", nlohmann::json::array());
        if (!shapes.is_array()) throw ParseError(where + ": 'shapes' is not an array");
        std::vector<std::string> unknown;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            const auto& sj = shapes[i];
            const std::string at = where + ": shapes[" + std::to_string(i) + "]";
            if (!sj.is_object() || !sj.contains("label") || !sj.contains("points"))
                throw ParseError(at + ": expected an object with 'label' and 'points'");
            Shape s;
            s.label = sj.at("label").get<std::string>();
            const auto kind = sj.value("shape_type", std::string("polygon"));
            for (const auto& pj : sj.at("points")) {
                if (!pj.is_array() || pj.size() != 2) throw ParseError(at + ".points: each point must be [x, y]");
                const double x = std::clamp(pj[0].get<double>(), 0.0, static_cast<double>(doc.image_width));
                const double y = std::clamp(pj[1].get<double>(), 0.0, static_cast<double>(doc.image_height));
                s.points.push_back({x, y});
            }
            if (kind == "rectangle") {
                if (s.points.size() != 2) throw ParseError(at + ": rectangle needs exactly 2 points");
                const auto a = s.points[0];
                const auto b = s.points[1];
                s.points = {a, {b.x, a.y}, b, {a.x, b.y}};
            } else if (kind != "polygon") {
                throw ParseError(at + ": unsupported shape_type '" + kind + "'");
            }
            if (s.points.size() < 3) throw ParseError(at + ": polygon needs at least 3 vertices");
            if (palette && !palette->find(s.label) &&
                std::find(unknown.begin(), unknown.end(), s.label) == unknown.end())
                unknown.push_back(s.label);
            doc.shapes.push_back(std::move(s));
        }
        if (!unknown.empty()) throw LabelMappingError(std::move(unknown));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    return doc;
}

/// Even-odd scanline fill sampled at pixel centres. Shapes are painted in
/// document order; later shapes overwrite earlier ones.
inline LabelMask rasterize(const AnnotationDoc& doc, const LabelPalette& palette) {
    std::vector<std::uint8_t> classes;
    std::vector<std::string> unknown;
    for (const auto& s : doc.shapes) {
        if (auto c = palette.find(s.label)) {
            classes.push_back(*c);
        } else if (std::find(unknown.begin(), unknown.end(), s.label) == unknown.end()) {
            unknown.push_back(s.label);
        }
    }
    if (!unknown.empty()) throw LabelMappingError(std::move(unknown));

    LabelMask mask(doc.image_width, doc.image_height);
    std::vector<double> xs;
    for (std::size_t si = 0; si < doc.shapes.size(); ++si) {
        const auto& pts = doc.shapes[si].points;
        const std::size_t n = pts.size();
        for (int y = 0; y < mask.height(); ++y) {
            const double yc = y + 0.5;
            xs.clear();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const auto& a = pts[j];
                const auto& b = pts[i];
                // half-open in y so shared vertices are counted once
                if ((a.y > yc) != (b.y > yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            std::sort(xs.begin(), xs.end());
            auto row = mask.row(y);
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                // centres with xs[k] <= x + 0.5 < xs[k+1]
                const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
                const int x1 = std::min(mask.width(), static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
                for (int x = x0; x < x1; ++x) row[x] = classes[si];
            }
        }
    }
    return mask;
}

/// Embeds a {background, cytoplasm, nuclear} mask into the 5-class palette.
inline LabelMask harmonize_hyperspectral(const LabelMask& mask3) {
    for (auto l : mask3.data())
        if (l > 2) throw InvalidInput("harmonize_hyperspectral: label " + std::to_string(l) +
                                      " not allowed in a 3-class hyperspectral mask");
    return mask3;
}

}  // namespace hsaug
