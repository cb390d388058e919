// hsaug: batch front end for dataset generation, evaluation and noise analysis.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsaug/hsaug.hpp"

namespace fs = std::filesystem;
using namespace hsaug;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : Error {
    using Error::Error;
};

struct Common {
    std::string config = "defaults";
    std::string out;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::vector<std::string> overrides;
    std::string format = "table";
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
    if (with_config) {
        cmd->add_option("--config", c.config, "Config file, or 'defaults' for the built-in values");
        cmd->add_option("--set", c.overrides, "Override one config key (key=value), repeatable");
        cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
    cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "table", "csv"}));
}

/// Config problems are usage errors; a missing config file is a data error.
AugmentConfig build_config(const Common& c) {
    try {
        AugmentConfig cfg = c.config == "defaults" ? AugmentConfig{} : AugmentConfig::load(c.config);
        for (const auto& kv : c.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (c.seed) cfg.master_seed = *c.seed;
        cfg.validate();
        return cfg;
    } catch (const UnknownConfigKey& e) {
        throw UsageError(e.what());
    } catch (const InvalidParameter& e) {
        throw UsageError(e.what());
    }
}

void emit(const std::string& text, const std::optional<fs::path>& file) {
    if (file) write_file_atomic(*file, text.data(), text.size());
    else std::cout << text;
}

// --- augment ---------------------------------------------------------------

struct AugmentArgs {
    Common common;
    std::string sources;
    std::string originals;
    std::string labels = HSAUG_DEFAULT_LABELS;
};

int run_augment(const AugmentArgs& a) {
    const auto cfg = build_config(a.common);
    if (a.common.out.empty()) throw UsageError("augment: --out is required");
    if (a.sources.empty() && a.originals.empty()) throw UsageError("augment: give --sources and/or --originals");
    const auto palette = LabelPalette::load(a.labels);
    PipelineInputs in;
    if (!a.sources.empty()) in.sources = a.sources;
    if (!a.originals.empty()) in.originals = a.originals;
    in.out_dir = a.common.out;
    in.workers = a.common.workers;
    const auto m = run_pipeline(cfg, in, palette);
    std::cerr << "augment: wrote " << m.records.size() << " records (" << m.count(RecordKind::Original)
              << " original, " << m.count(RecordKind::Pseudo) << " pseudo, " << m.count(RecordKind::Geo)
              << " geo) to " << (fs::path(a.common.out) / "manifest.jsonl").string() << "\n";
    return 0;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string pred;
    std::string gt;
    std::string manifest;
    int positive_class = kCytoplasm;
    bool skip_empty = false;
};

int run_evaluate(const EvaluateArgs& a) {
    if (a.pred.empty()) throw UsageError("evaluate: --pred is required");
    if (a.gt.empty() == a.manifest.empty()) throw UsageError("evaluate: give exactly one of --gt or --manifest");
    if (a.positive_class < 0 || a.positive_class >= kNumClasses) throw UsageError("evaluate: bad --positive-class");

    std::vector<EvalPair> pairs;
    std::vector<std::string> problems;
    auto add_pair = [&](const std::string& id, int type, const fs::path& gt_path) {
        const auto pred_path = fs::path(a.pred) / (id + ".png");
        if (!fs::exists(pred_path)) {
            problems.push_back("record '" + id + "': missing prediction " + pred_path.string());
            return;
        }
        try {
            pairs.push_back({read_mask_png(pred_path), read_mask_png(gt_path), id, type});
        } catch (const Error& e) {
            problems.push_back("record '" + id + "': " + e.what());
        }
    };
    if (!a.manifest.empty()) {
        const auto m = read_manifest(a.manifest);
        const auto base = fs::path(a.manifest).parent_path();
        for (const auto& r : m.records) add_pair(r.id, r.type_label, base / r.mask_path);
    } else {
        const auto types = TypeTable::load_dir(a.gt);
        for (const auto& p : detail::list_png(a.gt)) {
            const auto id = p.stem().string();
            add_pair(id, types.lookup(id).value_or(0), p);
        }
    }
    if (!problems.empty()) throw DataError(problems);

    EvalOptions opts;
    opts.positive_class = a.positive_class;
    opts.skip_empty = a.skip_empty;
    const auto report = evaluate(pairs, opts);

    if (!a.common.out.empty()) {
        const fs::path dir = a.common.out;
        fs::create_directories(dir);
        emit(to_json(report).dump(2) + "\n", dir / "eval.json");
        emit(format_table(report), dir / "eval.txt");
        emit(format_csv(report), dir / "eval.csv");
    }
    if (a.common.format == "json") std::cout << to_json(report).dump(2) << "\n";
    else if (a.common.format == "csv") std::cout << format_csv(report);
    else std::cout << format_table(report);
    return 0;
}

// --- profile -------------------------------------------------------------------

struct ProfileArgs {
    Common common;
    std::vector<std::string> images;
    ProfileOptions opts;
};

int run_profile(const ProfileArgs& a) {
    nlohmann::json all = nlohmann::json::array();
    std::string table = "image                                    lines  min  max   mean  rows\n";
    std::string csv = "image,lines,spacing_min,spacing_max,spacing_mean,horizontal_rows\n";
    for (const auto& path : a.images) {
        const auto img = read_png(path);
        const auto gray = img.channels() == 3 ? to_grayscale(img) : img;
        const auto p = profile_noise(gray, a.opts);
        auto j = to_json(p);
        j["image"] = path;
        all.push_back(j);
        char line[512];
        std::snprintf(line, sizeof line, "%-40s %5zu %4d %4d %6.2f %5zu\n", path.c_str(), p.vertical_columns.size(),
                      p.spacing_min, p.spacing_max, p.spacing_mean, p.horizontal_rows.size());
        table += line;
        csv += path + "," + std::to_string(p.vertical_columns.size()) + "," + std::to_string(p.spacing_min) + "," +
               std::to_string(p.spacing_max) + "," + std::to_string(p.spacing_mean) + "," +
               std::to_string(p.horizontal_rows.size()) + "\n";
    }
    if (!a.common.out.empty()) {
        fs::create_directories(a.common.out);
        emit(all.dump(2) + "\n", fs::path(a.common.out) / "profile.json");
    }
    if (a.common.format == "json") std::cout << all.dump(2) << "\n";
    else if (a.common.format == "csv") std::cout << csv;
    else std::cout << table;
    return 0;
}

// --- analyze-types ---------------------------------------------------------------

struct AnalyzeArgs {
    Common common;
    std::string images;
    std::string manifest;
};

int run_analyze(const AnalyzeArgs& a) {
    if (a.common.out.empty()) throw UsageError("analyze-types: --out is required");
    if (a.images.empty() == a.manifest.empty())
        throw UsageError("analyze-types: give exactly one of --images or --manifest");
    std::map<int, std::vector<ImageBuffer>> groups;
    std::vector<std::string> problems;
    auto add = [&](const fs::path& p, std::optional<int> type) {
        if (!type) {
            problems.push_back(p.string() + ": no type label");
            return;
        }
        auto img = read_png(p);
        groups[*type].push_back(img.channels() == 3 ? to_grayscale(img) : std::move(img));
    };
    if (!a.manifest.empty()) {
        const auto m = read_manifest(a.manifest);
        const auto base = fs::path(a.manifest).parent_path();
        for (const auto& r : m.records) add(base / r.image_path, r.type_label);
    } else {
        const auto types = TypeTable::load_dir(a.images);
        for (const auto& p : detail::list_png(a.images)) add(p, types.lookup(p.stem().string()));
    }
    if (!problems.empty()) throw DataError(problems);

    const auto reports = analyze_types(groups);
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    nlohmann::json all = nlohmann::json::array();
    std::string table = "type  images  mean intensity\n";
    for (const auto& r : reports) {
        const auto stem = "type_" + std::to_string(r.type_label);
        write_png(dir / (stem + "_mean.png"), r.mean_image_u8());
        write_png(dir / (stem + "_hist.png"), render_histogram(r.histogram));
        all.push_back(to_json(r));
        char line[128];
        std::snprintf(line, sizeof line, "%4d %7zu %15.3f\n", r.type_label, r.image_count, r.mean_intensity);
        table += line;
    }
    emit(all.dump(2) + "\n", dir / "types.json");
    if (a.common.format == "json") std::cout << all.dump(2) << "\n";
    else std::cout << table;
    return 0;
}

// --- subset ------------------------------------------------------------------------

struct SubsetArgs {
    Common common;
    std::string manifest;
    std::size_t k = 0;
};

int run_subset(const SubsetArgs& a) {
    if (a.common.out.empty()) throw UsageError("subset: --out is required");
    const auto m = read_manifest(a.manifest);
    const auto seed = a.common.seed.value_or(m.master_seed);
    Rng rng(derive_seed(seed, "subset", a.k, "balanced"));
    auto sub = balanced_subset(m, a.k, rng);
    // Paths stay valid when the subset is written next to the source manifest.
    const auto src_dir = fs::absolute(a.manifest).parent_path();
    const auto dst_dir = fs::absolute(a.common.out).parent_path();
    if (src_dir != dst_dir) {
        for (auto& r : sub.records) {
            r.image_path = fs::relative(src_dir / r.image_path, dst_dir).generic_string();
            r.mask_path = fs::relative(src_dir / r.mask_path, dst_dir).generic_string();
        }
    }
    write_manifest(a.common.out, sub);
    std::cerr << "subset: " << sub.records.size() << " records -> " << a.common.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hsaug: pseudo-hyperspectral training data synthesis and segmentation scoring"};
    app.require_subcommand(1);

    AugmentArgs aug;
    auto* augment = app.add_subcommand("augment", "Generate a training dataset and manifest");
    add_common(augment, aug.common, true);
    augment->add_option("--out", aug.common.out, "Output directory");
    augment->add_option("--sources", aug.sources, "Directory of RGB PNGs with sibling LabelMe JSON");
    augment->add_option("--originals", aug.originals, "Directory with images/ and masks/ of single-band originals");
    augment->add_option("--labels", aug.labels, "Label palette file")->capture_default_str();

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predicted masks against ground truth");
    add_common(evaluate_cmd, ev.common, false);
    evaluate_cmd->add_option("--out", ev.common.out, "Directory for eval.json / eval.txt / eval.csv");
    evaluate_cmd->add_option("--pred", ev.pred, "Directory of predicted mask PNGs named <id>.png");
    evaluate_cmd->add_option("--gt", ev.gt, "Directory of ground-truth mask PNGs");
    evaluate_cmd->add_option("--manifest", ev.manifest, "Manifest whose masks are the ground truth");
    evaluate_cmd->add_option("--positive-class", ev.positive_class, "Headline class index")->capture_default_str();
    evaluate_cmd->add_flag("--skip-empty", ev.skip_empty, "Exclude images where the class is absent from macro means");

    ProfileArgs pr;
    auto* profile = app.add_subcommand("profile", "Detect stripe artifacts in single-band images");
    add_common(profile, pr.common, false);
    profile->add_option("--out", pr.common.out, "Directory for profile.json");
    profile->add_option("images", pr.images, "Input PNGs")->required();
    profile->add_option("--uniformity", pr.opts.uniformity_threshold, "Column uniformity fraction")
        ->capture_default_str();
    profile->add_option("--contrast", pr.opts.contrast_threshold, "Column contrast in grey levels")
        ->capture_default_str();
    profile->add_option("--row-factor", pr.opts.row_factor, "Row outlier factor over the median")
        ->capture_default_str();

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze-types", "Mean images and histograms per cell type");
    add_common(analyze, an.common, false);
    analyze->add_option("--out", an.common.out, "Output directory");
    analyze->add_option("--images", an.images, "Directory of images (types.csv or t<k>_ prefixes)");
    analyze->add_option("--manifest", an.manifest, "Manifest whose images are grouped by type");

    SubsetArgs sb;
    auto* subset = app.add_subcommand("subset", "Sample k records of every type from a manifest");
    add_common(subset, sb.common, false);
    subset->add_option("--manifest", sb.manifest, "Input manifest")->required();
    subset->add_option("--k", sb.k, "Records per type")->required();
    subset->add_option("--out", sb.common.out, "Output manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (augment->parsed()) return run_augment(aug);
        if (evaluate_cmd->parsed()) return run_evaluate(ev);
        if (profile->parsed()) return run_profile(pr);
        if (analyze->parsed()) return run_analyze(an);
        if (subset->parsed()) return run_subset(sb);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
