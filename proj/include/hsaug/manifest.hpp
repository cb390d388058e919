#pragma once

// Newline-delimited JSON manifest. Line 1 is a header (schema, version, master
// seed, full config); every following line is one record.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsaug/annotations.hpp"
#include "hsaug/config.hpp"
#include "hsaug/geo.hpp"
#include "hsaug/noise.hpp"
#include "hsaug/png_io.hpp"

namespace hsaug {

inline constexpr const char* kManifestSchema = "hsaug-manifest";
inline constexpr int kManifestVersion = 1;

enum class RecordKind { Original, Pseudo, Geo };

inline std::string_view to_string(RecordKind k) {
    switch (k) {
        case RecordKind::Original: return "original";
        case RecordKind::Pseudo: return "pseudo";
        case RecordKind::Geo: return "geo";
    }
    return "unknown";
}

struct ManifestRecord {
    std::string id;
    RecordKind kind = RecordKind::Original;
    std::string source_id;
    int type_label = 1;
    std::string image_path;  // relative to the manifest directory
    std::string mask_path;
    int realization = 0;
    std::optional<NoisePlan> noise_plan;
    std::optional<TransformRecord> transform;
    std::uint64_t seed = 0;

    friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> config;  // AugmentConfig::to_map()
    std::vector<ManifestRecord> records;

    std::size_t count(RecordKind k) const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.kind == k;
        return n;
    }
};

// --- JSON mapping ------------------------------------------------------------

inline void to_json(nlohmann::json& j, const HorizontalEvent& e) {
    j = {{"anchor_row", e.anchor_row}, {"slice_height", e.slice_height}, {"loss_rows", e.loss_rows},
         {"shift_cols", e.shift_cols}};
}
inline void from_json(const nlohmann::json& j, HorizontalEvent& e) {
    j.at("anchor_row").get_to(e.anchor_row);
    j.at("slice_height").get_to(e.slice_height);
    j.at("loss_rows").get_to(e.loss_rows);
    j.at("shift_cols").get_to(e.shift_cols);
}

inline void to_json(nlohmann::json& j, const NoisePlan& p) {
    j = {{"vertical_columns", p.vertical_columns}, {"horizontal_events", p.horizontal_events}};
}
inline void from_json(const nlohmann::json& j, NoisePlan& p) {
    j.at("vertical_columns").get_to(p.vertical_columns);
    j.at("horizontal_events").get_to(p.horizontal_events);
}

inline void to_json(nlohmann::json& j, const TransformRecord& t) {
    j = {{"kind", std::string(to_string(t.kind))}};
    if (t.kind == TransformKind::Crop) j["rect"] = {t.rect.x, t.rect.y, t.rect.w, t.rect.h};
    if (t.kind == TransformKind::Translate) {
        j["dx"] = t.dx;
        j["dy"] = t.dy;
    }
}
inline void from_json(const nlohmann::json& j, TransformRecord& t) {
    const auto name = j.at("kind").get<std::string>();
    auto k = parse_transform_kind(name);
    if (!k) throw ParseError("unknown transform kind '" + name + "'");
    t = TransformRecord{};
    t.kind = *k;
    if (t.kind == TransformKind::Crop) {
        const auto& r = j.at("rect");
        if (!r.is_array() || r.size() != 4) throw ParseError("crop rect must be [x, y, w, h]");
        t.rect = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
    }
    if (t.kind == TransformKind::Translate) {
        j.at("dx").get_to(t.dx);
        j.at("dy").get_to(t.dy);
    }
}

inline nlohmann::json record_to_json(const ManifestRecord& r) {
    nlohmann::json j{{"id", r.id},
                     {"kind", std::string(to_string(r.kind))},
                     {"source_id", r.source_id},
                     {"type", r.type_label},
                     {"image", r.image_path},
                     {"mask", r.mask_path},
                     {"realization", r.realization},
                     {"seed", r.seed}};
    if (r.noise_plan) j["noise_plan"] = *r.noise_plan;
    if (r.transform) j["transform"] = *r.transform;
    return j;
}

inline ManifestRecord record_from_json(const nlohmann::json& j) {
    ManifestRecord r;
    j.at("id").get_to(r.id);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "original") r.kind = RecordKind::Original;
    else if (kind == "pseudo") r.kind = RecordKind::Pseudo;
    else if (kind == "geo") r.kind = RecordKind::Geo;
    else throw ParseError("record '" + r.id + "': unknown kind '" + kind + "'");
    j.at("source_id").get_to(r.source_id);
    j.at("type").get_to(r.type_label);
    j.at("image").get_to(r.image_path);
    j.at("mask").get_to(r.mask_path);
    r.realization = j.value("realization", 0);
    j.at("seed").get_to(r.seed);
    if (j.contains("noise_plan")) r.noise_plan = j.at("noise_plan").get<NoisePlan>();
    if (j.contains("transform")) r.transform = j.at("transform").get<TransformRecord>();
    if ((r.kind != RecordKind::Original) != r.noise_plan.has_value())
        throw ParseError("record '" + r.id + "': pseudo/geo records need a noise_plan, originals must not have one");
    if ((r.kind == RecordKind::Geo) != r.transform.has_value())
        throw ParseError("record '" + r.id + "': exactly the geo records carry a transform");
    return r;
}

inline std::string serialize_manifest(const DatasetManifest& m) {
    nlohmann::json header{{"schema", kManifestSchema},
                          {"version", kManifestVersion},
                          {"master_seed", m.master_seed},
                          {"records", m.records.size()},
                          {"config", m.config}};
    std::string out = header.dump() + "\n";
    for (const auto& r : m.records) out += record_to_json(r).dump() + "\n";
    return out;
}

inline DatasetManifest parse_manifest(std::istream& in, const std::string& name = "<manifest>") {
    DatasetManifest m;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto where = name + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(where + ": " + e.what());
        }
        try {
            if (!have_header) {
                if (j.value("schema", std::string()) != kManifestSchema)
                    throw ParseError("not an hsaug manifest header");
                if (j.value("version", 0) != kManifestVersion)
                    throw ParseError("unsupported manifest version");
                j.at("master_seed").get_to(m.master_seed);
                j.at("records").get_to(declared);
                m.config = j.value("config", std::map<std::string, std::string>{});
                have_header = true;
                continue;
            }
            m.records.push_back(record_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (!have_header) throw ParseError(name + ": empty manifest");
    if (m.records.size() != declared)
        throw ParseError(name + ": header declares " + std::to_string(declared) + " records, found " +
                         std::to_string(m.records.size()));
    return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest '" + path.string() + "'");
    return parse_manifest(f, path.string());
}

/// Written through a temp file and renamed, so a crash never leaves a
/// valid-looking manifest over partial data.
inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
    const auto text = serialize_manifest(m);
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace hsaug
