#pragma once

// One-vs-rest confusion counting and overlap scores.
//
//   IoU  = TP / (TP + FN + FP)
//   Dice = 2 TP / (2 TP + FP + FN)
//
// Both are 1.0 when TP = FP = FN = 0: agreement that the class is absent.

#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsaug/image.hpp"

namespace hsaug {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    bool empty_case() const noexcept { return tp == 0 && fp == 0 && fn == 0; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const LabelMask& pred, const LabelMask& gt, int positive_class) {
    if (!same_dims(pred, gt))
        throw InvalidInput("confusion: prediction " + std::to_string(pred.width()) + "x" +
                           std::to_string(pred.height()) + " vs ground truth " + std::to_string(gt.width()) + "x" +
                           std::to_string(gt.height()));
    ConfusionCounts c;
    auto p = pred.data();
    auto g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool pp = p[i] == positive_class;
        const bool gp = g[i] == positive_class;
        if (pp && gp) ++c.tp;
        else if (pp) ++c.fp;
        else if (gp) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline double iou(const ConfusionCounts& c) {
    if (c.empty_case()) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn + c.fp);
}

inline double dice(const ConfusionCounts& c) {
    if (c.empty_case()) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

struct EvalPair {
    LabelMask pred;
    LabelMask gt;
    std::string id;
    int type_label = 0;
};

struct EvalOptions {
    int positive_class = kCytoplasm;
    std::vector<int> classes = {0, 1, 2, 3, 4};
    /// Leave images where the class is absent from both masks out of the macro means.
    bool skip_empty = false;
};

struct ImageScore {
    std::string id;
    int type_label = 0;
    int class_index = 0;
    ConfusionCounts counts;
    double iou = 0.0;
    double dice = 0.0;
};

/// Micro sums counts before dividing; macro averages per-image scores.
struct Aggregate {
    int class_index = 0;
    ConfusionCounts counts;
    double micro_iou = 0.0;
    double micro_dice = 0.0;
    double macro_iou = 0.0;
    double macro_dice = 0.0;
    std::size_t images = 0;        // images contributing to the macro mean
};

struct EvalReport {
    int positive_class = kCytoplasm;
    std::vector<ImageScore> per_image;                  // pair order, then class order
    std::vector<Aggregate> per_class;                   // option class order
    std::map<int, std::vector<Aggregate>> per_type;     // type -> class order

    const Aggregate& headline() const {
        for (const auto& a : per_class)
            if (a.class_index == positive_class) return a;
        throw InvalidInput("report has no aggregate for the positive class");
    }
};

namespace detail {

inline Aggregate aggregate(int cls, const std::vector<const ImageScore*>& rows, bool skip_empty) {
    Aggregate a;
    a.class_index = cls;
    double si = 0.0, sd = 0.0;
    for (const auto* r : rows) {
        a.counts += r->counts;
        if (skip_empty && r->counts.empty_case()) continue;
        si += r->iou;
        sd += r->dice;
        ++a.images;
    }
    a.micro_iou = iou(a.counts);
    a.micro_dice = dice(a.counts);
    a.macro_iou = a.images ? si / static_cast<double>(a.images) : 1.0;
    a.macro_dice = a.images ? sd / static_cast<double>(a.images) : 1.0;
    return a;
}

}  // namespace detail

inline EvalReport evaluate(const std::vector<EvalPair>& pairs, const EvalOptions& opts = {}) {
    EvalReport rep;
    rep.positive_class = opts.positive_class;
    for (const auto& p : pairs) {
        if (!same_dims(p.pred, p.gt))
            throw InvalidInput("record '" + p.id + "': prediction and ground-truth dimensions differ");
        for (int cls : opts.classes) {
            ImageScore s;
            s.id = p.id;
            s.type_label = p.type_label;
            s.class_index = cls;
            s.counts = confusion(p.pred, p.gt, cls);
            s.iou = iou(s.counts);
            s.dice = dice(s.counts);
            rep.per_image.push_back(std::move(s));
        }
    }
    for (int cls : opts.classes) {
        std::vector<const ImageScore*> all;
        std::map<int, std::vector<const ImageScore*>> by_type;
        for (const auto& s : rep.per_image) {
            if (s.class_index != cls) continue;
            all.push_back(&s);
            by_type[s.type_label].push_back(&s);
        }
        rep.per_class.push_back(detail::aggregate(cls, all, opts.skip_empty));
        for (const auto& [t, rows] : by_type) rep.per_type[t].push_back(detail::aggregate(cls, rows, opts.skip_empty));
    }
    return rep;
}

// --- report output -----------------------------------------------------------

inline nlohmann::json to_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

inline nlohmann::json to_json(const Aggregate& a) {
    return {{"class", a.class_index},
            {"class_name", class_name(a.class_index)},
            {"counts", to_json(a.counts)},
            {"micro", {{"iou", a.micro_iou}, {"dice", a.micro_dice}}},
            {"macro", {{"iou", a.macro_iou}, {"dice", a.macro_dice}, {"images", a.images}}}};
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["positive_class"] = r.positive_class;
    j["headline"] = to_json(r.headline());
    auto& per_image = j["per_image"] = nlohmann::json::array();
    for (const auto& s : r.per_image)
        per_image.push_back({{"id", s.id},
                             {"type", s.type_label},
                             {"class", s.class_index},
                             {"iou", s.iou},
                             {"dice", s.dice},
                             {"counts", to_json(s.counts)}});
    auto& per_class = j["per_class"] = nlohmann::json::array();
    for (const auto& a : r.per_class) per_class.push_back(to_json(a));
    auto& per_type = j["per_type"] = nlohmann::json::array();
    for (const auto& [t, aggs] : r.per_type) {
        nlohmann::json row{{"type", t}, {"classes", nlohmann::json::array()}};
        for (const auto& a : aggs) row["classes"].push_back(to_json(a));
        per_type.push_back(std::move(row));
    }
    return j;
}

inline std::string format_table(const EvalReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "class        micro IoU  micro Dice  macro IoU  macro Dice  images\n";
    for (const auto& a : r.per_class)
        os << std::left << std::setw(12) << class_name(a.class_index) << std::right << std::setw(10) << a.micro_iou
           << std::setw(12) << a.micro_dice << std::setw(11) << a.macro_iou << std::setw(12) << a.macro_dice
           << std::setw(8) << a.images << (a.class_index == r.positive_class ? "  *" : "") << '\n';
    os << "\nper type (" << class_name(r.positive_class) << ")\n";
    os << "type  micro IoU  micro Dice  macro IoU  macro Dice  images\n";
    for (const auto& [t, aggs] : r.per_type)
        for (const auto& a : aggs)
            if (a.class_index == r.positive_class)
                os << std::setw(4) << t << std::setw(11) << a.micro_iou << std::setw(12) << a.micro_dice
                   << std::setw(11) << a.macro_iou << std::setw(12) << a.macro_dice << std::setw(8) << a.images << '\n';
    return os.str();
}

inline std::string format_csv(const EvalReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "id,type,class,tp,fp,fn,tn,iou,dice\n";
    for (const auto& s : r.per_image)
        os << s.id << ',' << s.type_label << ',' << s.class_index << ',' << s.counts.tp << ',' << s.counts.fp << ','
           << s.counts.fn << ',' << s.counts.tn << ',' << s.iou << ',' << s.dice << '\n';
    return os.str();
}

}  // namespace hsaug
