#pragma once

// End-to-end dataset generation:
//
//   RGB source -> spectralize -> p noise realizations -> (untouched + one per transform)
//
// plus optional pass-through of original single-band images. Every random draw
// comes from a seed derived from (master seed, source id, realization, stage),
// so output bytes do not depend on the number of workers or their scheduling.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hsaug/annotations.hpp"
#include "hsaug/config.hpp"
#include "hsaug/geo.hpp"
#include "hsaug/imaging.hpp"
#include "hsaug/manifest.hpp"
#include "hsaug/noise.hpp"
#include "hsaug/png_io.hpp"
#include "hsaug/rng.hpp"

namespace hsaug {

namespace fs = std::filesystem;

inline constexpr int kNumTypes = 7;

/// Raised when a run cannot proceed because of bad input data; collects every
/// offending file so one failed run reports all of them.
struct DataError : Error {
    explicit DataError(const std::vector<std::string>& problems) : Error(join(problems)), problems(problems) {}
    std::vector<std::string> problems;

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string s;
        for (const auto& x : p) s += (s.empty() ? "" : "\n") + x;
        return s;
    }
};

// --- type labels ---------------------------------------------------------------

/// Image stem -> cell-type label. A `types.csv` (`stem,type` per line) in the
/// input directory takes precedence; otherwise a `t<k>_` filename prefix is used.
class TypeTable {
public:
    static TypeTable load_dir(const fs::path& dir) {
        TypeTable t;
        const auto csv = dir / "types.csv";
        if (!fs::exists(csv)) return t;
        std::ifstream f(csv);
        if (!f) throw IoError("cannot open '" + csv.string() + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            const auto trimmed = detail::trim_copy(line);
            if (trimmed.empty() || trimmed[0] == '#') continue;
            const auto comma = trimmed.find(',');
            if (comma == std::string::npos)
                throw ParseError(csv.string() + ":" + std::to_string(lineno) + ": expected 'stem,type'");
            const auto stem = detail::trim_copy(trimmed.substr(0, comma));
            const auto value = detail::trim_copy(trimmed.substr(comma + 1));
            if (stem == "stem") continue;  // header row
            int type = 0;
            try {
                type = detail::parse_number<int>("type", value);
            } catch (const InvalidParameter&) {
                throw ParseError(csv.string() + ":" + std::to_string(lineno) + ": bad type '" + value + "'");
            }
            t.map_[stem] = type;
        }
        return t;
    }

    std::optional<int> lookup(const std::string& stem) const {
        if (auto it = map_.find(stem); it != map_.end()) return it->second;
        if (stem.size() >= 3 && stem[0] == 't' && stem[1] >= '1' && stem[1] <= '9' && stem[2] == '_')
            return stem[1] - '0';
        return std::nullopt;
    }

    void set(const std::string& stem, int type) { map_[stem] = type; }

private:
    std::map<std::string, int> map_;
};

// --- per-source generation -------------------------------------------------------

struct GeneratedSample {
    Sample sample;
    ManifestRecord record;
};

inline std::string pseudo_id(const std::string& source_id, int realization) {
    return source_id + "_p" + std::to_string(realization);
}

/// Spectralizes once, then draws `pseudo_per_source` independent noise plans.
inline std::vector<GeneratedSample> generate_pseudo(const ImageBuffer& rgb, const LabelMask& mask, int type_label,
                                                    const std::string& source_id, const AugmentConfig& cfg) {
    if (!same_dims(rgb, mask)) throw InvalidInput("source '" + source_id + "': mask not aligned with image");
    const auto spectral = spectralize(rgb, cfg.spectral);
    std::vector<GeneratedSample> out;
    out.reserve(static_cast<std::size_t>(cfg.pseudo_per_source));
    for (int r = 0; r < cfg.pseudo_per_source; ++r) {
        const auto seed = derive_seed(cfg.master_seed, source_id, static_cast<std::uint64_t>(r), "noise");
        Rng rng(seed);
        auto plan = plan_noise(cfg.noise, spectral.width(), spectral.height(), rng);
        auto [img, m] = apply_noise(spectral, mask, plan, cfg.noise.c2);

        GeneratedSample g{Sample{std::move(img), std::move(m), type_label, source_id}, {}};
        g.record.id = pseudo_id(source_id, r);
        g.record.kind = RecordKind::Pseudo;
        g.record.source_id = source_id;
        g.record.type_label = type_label;
        g.record.realization = r;
        g.record.noise_plan = std::move(plan);
        g.record.seed = seed;
        out.push_back(std::move(g));
    }
    return out;
}

/// Emits each pseudo sample (resized to the target) followed by one output per
/// configured transform: |pseudo| * (1 + |transforms|) samples.
inline std::vector<GeneratedSample> expand_geo(const std::vector<GeneratedSample>& pseudo, const AugmentConfig& cfg) {
    const auto& geo = cfg.geo;
    std::vector<GeneratedSample> out;
    out.reserve(pseudo.size() * (1 + geo.transforms.size()));
    for (const auto& p : pseudo) {
        out.push_back({fit_to_target(p.sample, geo.target_width, geo.target_height), p.record});
        for (std::size_t t = 0; t < geo.transforms.size(); ++t) {
            const auto kind = geo.transforms[t];
            const auto seed = derive_seed(cfg.master_seed, p.record.source_id,
                                          static_cast<std::uint64_t>(p.record.realization), "geo:" + std::to_string(t));
            Rng rng(seed);
            const auto rec = sample_transform(kind, geo, p.sample.image.width(), p.sample.image.height(), rng);
            auto s = fit_to_target(apply_transform(p.sample, rec, geo.target_width, geo.target_height),
                                   geo.target_width, geo.target_height);

            ManifestRecord r = p.record;
            r.id = p.record.id + "_g" + std::to_string(t) + "_" + std::string(to_string(kind));
            r.kind = RecordKind::Geo;
            r.transform = rec;
            r.seed = seed;
            out.push_back({std::move(s), std::move(r)});
        }
    }
    return out;
}

/// Regenerates a pseudo or geo output from its record and the source inputs.
inline Sample replay_record(const ManifestRecord& rec, const ImageBuffer& rgb, const LabelMask& mask,
                            const AugmentConfig& cfg) {
    if (rec.kind == RecordKind::Original) throw InvalidInput("replay_record: originals are copied, not generated");
    if (!rec.noise_plan) throw InvalidInput("record '" + rec.id + "' has no noise plan");
    const auto spectral = spectralize(rgb, cfg.spectral);
    auto [img, m] = apply_noise(spectral, mask, *rec.noise_plan, cfg.noise.c2);
    Sample s{std::move(img), std::move(m), rec.type_label, rec.source_id};
    const int tw = cfg.geo.target_width;
    const int th = cfg.geo.target_height;
    if (rec.kind == RecordKind::Geo) {
        if (!rec.transform) throw InvalidInput("geo record '" + rec.id + "' has no transform");
        s = apply_transform(s, *rec.transform, tw, th);
    }
    return fit_to_target(s, tw, th);
}

// --- inputs ------------------------------------------------------------------------

struct SourceInput {
    std::string id;  // file stem
    int type_label = 1;
    fs::path image;
    fs::path annotation;
};

struct OriginalInput {
    std::string id;
    int type_label = 1;
    fs::path image;
    fs::path mask;
};

namespace detail {

inline std::vector<fs::path> list_png(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline int checked_type(const TypeTable& types, const std::string& stem, std::vector<std::string>& problems,
                        const fs::path& file) {
    auto t = types.lookup(stem);
    if (!t) {
        problems.push_back(file.string() + ": no type label (add it to types.csv or use a t<k>_ prefix)");
        return 0;
    }
    if (*t < 1 || *t > kNumTypes) {
        problems.push_back(file.string() + ": type " + std::to_string(*t) + " outside 1.." + std::to_string(kNumTypes));
        return 0;
    }
    return *t;
}

}  // namespace detail

/// RGB sources: `<dir>/<stem>.png` with a sibling `<dir>/<stem>.json`.
inline std::vector<SourceInput> discover_sources(const fs::path& dir) {
    const auto types = TypeTable::load_dir(dir);
    std::vector<SourceInput> out;
    std::vector<std::string> problems;
    for (const auto& img : detail::list_png(dir)) {
        SourceInput s;
        s.id = img.stem().string();
        s.image = img;
        s.annotation = fs::path(img).replace_extension(".json");
        if (!fs::exists(s.annotation)) problems.push_back(img.string() + ": missing annotation " + s.annotation.string());
        s.type_label = detail::checked_type(types, s.id, problems, img);
        out.push_back(std::move(s));
    }
    if (!problems.empty()) throw DataError(problems);
    return out;
}

/// Originals: `<dir>/images/<stem>.png` with `<dir>/masks/<stem>.png`.
inline std::vector<OriginalInput> discover_originals(const fs::path& dir) {
    const auto types = TypeTable::load_dir(dir);
    std::vector<OriginalInput> out;
    std::vector<std::string> problems;
    for (const auto& img : detail::list_png(dir / "images")) {
        OriginalInput o;
        o.id = img.stem().string();
        o.image = img;
        o.mask = dir / "masks" / img.filename();
        if (!fs::exists(o.mask)) problems.push_back(img.string() + ": missing mask " + o.mask.string());
        o.type_label = detail::checked_type(types, o.id, problems, img);
        out.push_back(std::move(o));
    }
    if (!problems.empty()) throw DataError(problems);
    return out;
}

inline std::string read_text_file(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw IoError("cannot open '" + p.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Loads a source image and rasterizes its annotation.
inline std::pair<ImageBuffer, LabelMask> load_source(const SourceInput& src, const LabelPalette& palette) {
    auto rgb = read_png(src.image);
    if (rgb.channels() != 3) throw InvalidInput(src.image.string() + ": expected an RGB image");
    const auto doc = parse_annotations(read_text_file(src.annotation), &palette, src.annotation.string());
    if (doc.image_width != rgb.width() || doc.image_height != rgb.height())
        throw InvalidInput(src.annotation.string() + ": annotation is " + std::to_string(doc.image_width) + "x" +
                           std::to_string(doc.image_height) + " but image is " + std::to_string(rgb.width()) + "x" +
                           std::to_string(rgb.height()));
    return {std::move(rgb), rasterize(doc, palette)};
}

// --- orchestration -------------------------------------------------------------------

struct PipelineInputs {
    std::optional<fs::path> sources;
    std::optional<fs::path> originals;
    fs::path out_dir;
    int workers = 1;
};

namespace detail {

/// Runs fn(i) for i in [0, n) on `workers` threads. Exceptions are captured
/// per index and the lowest-index one is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(body);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline void write_sample(const fs::path& out_dir, ManifestRecord& rec, const Sample& s) {
    rec.image_path = "images/" + rec.id + ".png";
    rec.mask_path = "masks/" + rec.id + ".png";
    write_png(out_dir / rec.image_path, s.image);
    write_mask_png(out_dir / rec.mask_path, s.mask);
}

}  // namespace detail

/// Generates the whole dataset under `in.out_dir` and writes `manifest.jsonl`
/// last. Record order: originals, then per source (sorted by file name) its
/// generated outputs in generation order.
inline DatasetManifest run_pipeline(const AugmentConfig& cfg, const PipelineInputs& in, const LabelPalette& palette) {
    cfg.validate();
    std::vector<SourceInput> sources;
    std::vector<OriginalInput> originals;
    if (in.sources) sources = discover_sources(*in.sources);
    if (in.originals && cfg.include_originals) originals = discover_originals(*in.originals);

    // Every annotation is checked before anything is written.
    {
        std::vector<std::string> problems;
        for (const auto& s : sources) {
            try {
                parse_annotations(read_text_file(s.annotation), &palette, s.annotation.string());
            } catch (const LabelMappingError& e) {
                problems.push_back(s.annotation.string() + ": " + e.what());
            } catch (const Error& e) {
                problems.push_back(e.what());
            }
        }
        if (!problems.empty()) throw DataError(problems);
    }

    fs::create_directories(in.out_dir / "images");
    fs::create_directories(in.out_dir / "masks");
    const int tw = cfg.geo.target_width;
    const int th = cfg.geo.target_height;

    std::vector<std::vector<ManifestRecord>> original_records(originals.size());
    detail::parallel_for(originals.size(), in.workers, [&](std::size_t i) {
        const auto& o = originals[i];
        auto img = read_png(o.image);
        if (img.channels() != 1) throw InvalidInput(o.image.string() + ": expected a single-channel image");
        Sample s{std::move(img), harmonize_hyperspectral(read_mask_png(o.mask)), o.type_label, o.id};
        if (!same_dims(s.image, s.mask)) throw InvalidInput(o.mask.string() + ": mask not aligned with image");
        ManifestRecord r;
        r.id = "orig_" + o.id;
        r.kind = RecordKind::Original;
        r.source_id = o.id;
        r.type_label = o.type_label;
        r.seed = derive_seed(cfg.master_seed, o.id, 0, "original");
        detail::write_sample(in.out_dir, r, fit_to_target(s, tw, th));
        original_records[i].push_back(std::move(r));
    });

    std::vector<std::vector<ManifestRecord>> source_records(sources.size());
    detail::parallel_for(sources.size(), in.workers, [&](std::size_t i) {
        const auto& src = sources[i];
        auto [rgb, mask] = load_source(src, palette);
        auto outputs = expand_geo(generate_pseudo(rgb, mask, src.type_label, src.id, cfg), cfg);
        for (auto& g : outputs) {
            detail::write_sample(in.out_dir, g.record, g.sample);
            source_records[i].push_back(std::move(g.record));
        }
    });

    DatasetManifest m;
    m.master_seed = cfg.master_seed;
    m.config = cfg.to_map();
    for (auto& v : original_records) std::move(v.begin(), v.end(), std::back_inserter(m.records));
    for (auto& v : source_records) std::move(v.begin(), v.end(), std::back_inserter(m.records));
    write_manifest(in.out_dir / "manifest.jsonl", m);
    return m;
}

/// Count law: |originals| + |sources| * p * (1 + |transforms|).
inline std::size_t expected_record_count(std::size_t originals, std::size_t sources, const AugmentConfig& cfg) {
    return originals + sources * static_cast<std::size_t>(cfg.pseudo_per_source) * (1 + cfg.geo.transforms.size());
}

/// Exactly k records of every type 1..7, sampled without replacement. Output
/// is ordered by type, then by position in the input manifest.
inline DatasetManifest balanced_subset(const DatasetManifest& m, std::size_t k, Rng& rng) {
    std::map<int, std::vector<std::size_t>> by_type;
    for (std::size_t i = 0; i < m.records.size(); ++i) by_type[m.records[i].type_label].push_back(i);
    for (int t = 1; t <= kNumTypes; ++t) {
        const auto have = by_type.count(t) ? by_type[t].size() : 0;
        if (have < k)
            throw InvalidInput("balanced_subset: type " + std::to_string(t) + " has " + std::to_string(have) +
                               " records, need " + std::to_string(k));
    }
    DatasetManifest out;
    out.master_seed = m.master_seed;
    out.config = m.config;
    for (int t = 1; t <= kNumTypes; ++t) {
        auto idx = by_type[t];
        // partial Fisher-Yates: first k slots become the sample
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                                    static_cast<std::int64_t>(idx.size() - 1)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        for (auto i : idx) out.records.push_back(m.records[i]);
    }
    return out;
}

}  // namespace hsaug
