#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hsaug/annotations.hpp"

namespace hsaug {
namespace {

using nlohmann::json;
using testing::default_palette;
using testing::polygon_shape;

json doc_with(json shapes, int w, int h) { return {{"shapes", shapes}, {"imageWidth", w}, {"imageHeight", h}}; }

LabelMask raster(const json& j) {
    const auto pal = default_palette();
    return rasterize(parse_annotations(j.dump(), &pal), pal);
}

int count_label(const LabelMask& m, int label) {
    int n = 0;
    for (auto v : m.data()) n += v == label;
    return n;
}

TEST(RasterizeTest, NoShapesGivesBackground) {
    const auto m = raster(doc_with(json::array(), 7, 5));
    EXPECT_EQ(m.width(), 7);
    EXPECT_EQ(m.height(), 5);
    EXPECT_EQ(count_label(m, 0), 35);
}

TEST(RasterizeTest, AxisAlignedSquareCoversNinePixels) {
    const auto m = raster(doc_with({polygon_shape("nuclear", {{1, 1}, {4, 1}, {4, 4}, {1, 4}})}, 6, 6));
    EXPECT_EQ(count_label(m, 2), 9);
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) EXPECT_EQ(m.at(x, y), 2);
}

TEST(RasterizeTest, TriangleCentres) {
    // right triangle (0,0),(4,0),(0,4): centre (x+.5, y+.5) inside iff x + y + 1 < 4
    const auto m = raster(doc_with({polygon_shape("rbc", {{0, 0}, {4, 0}, {0, 4}})}, 5, 5));
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) EXPECT_EQ(m.at(x, y), x + y + 1 < 4 ? 3 : 0) << x << "," << y;
}

TEST(RasterizeTest, LaterShapesPaintOver) {
    const auto m = raster(doc_with({polygon_shape("cytoplasm", {{0, 0}, {6, 0}, {6, 6}, {0, 6}}),
                                    polygon_shape("nuclear", {{2, 2}, {4, 2}, {4, 4}, {2, 4}})},
                                   6, 6));
    EXPECT_EQ(count_label(m, 2), 4);
    EXPECT_EQ(count_label(m, 1), 32);
    EXPECT_EQ(m.at(2, 2), 2);
    EXPECT_EQ(m.at(0, 0), 1);
}

TEST(RasterizeTest, RectangleShapeType) {
    json rect = {{"label", "fibroblast"}, {"points", {{1, 1}, {3, 4}}}, {"shape_type", "rectangle"}};
    const auto m = raster(doc_with({rect}, 5, 5));
    EXPECT_EQ(count_label(m, 4), 6);
}

TEST(RasterizeTest, MatchesExactOracleOnRandomPolygons) {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = static_cast<int>(rng.uniform_int(4, 64));
        const int h = static_cast<int>(rng.uniform_int(4, 64));
        const auto poly = testing::random_polygon(w, h, rng);
        const auto got = raster(testing::polygon_doc(poly, w, h, "cytoplasm"));
        ASSERT_EQ(got, testing::oracle_mask(poly, w, h, 1)) << "trial " << trial;
    }
}

TEST(ParseAnnotationsTest, UnknownLabelsAllReported) {
    const auto pal = default_palette();
    const auto j = doc_with({polygon_shape("mitochondria", {{0, 0}, {2, 0}, {2, 2}}),
                             polygon_shape("golgi", {{0, 0}, {2, 0}, {2, 2}}),
                             polygon_shape("mitochondria", {{0, 0}, {2, 0}, {2, 2}})},
                            4, 4);
    try {
        parse_annotations(j.dump(), &pal, "x.json");
        FAIL() << "expected LabelMappingError";
    } catch (const LabelMappingError& e) {
        EXPECT_EQ(e.unknown_labels, (std::vector<std::string>{"mitochondria", "golgi"}));
        EXPECT_NE(std::string(e.what()).find("mitochondria"), std::string::npos);
    }
    // without a palette parsing succeeds, rasterizing does not
    const auto doc = parse_annotations(j.dump());
    EXPECT_THROW(rasterize(doc, pal), LabelMappingError);
}

TEST(ParseAnnotationsTest, MalformedInputs) {
    EXPECT_THROW(parse_annotations("{ not json"), ParseError);
    EXPECT_THROW(parse_annotations("[]"), ParseError);
    EXPECT_THROW(parse_annotations(R"({"shapes": []})"), ParseError);
    EXPECT_THROW(parse_annotations(doc_with({polygon_shape("rbc", {{0, 0}, {1, 1}})}, 4, 4).dump()), ParseError);
    json circle = {{"label", "rbc"}, {"points", {{1, 1}, {2, 2}}}, {"shape_type", "circle"}};
    EXPECT_THROW(parse_annotations(doc_with({circle}, 4, 4).dump()), ParseError);
    try {
        parse_annotations(R"({"imageWidth": 3, "imageHeight": 3, "shapes": [{"label": "a", "points": [[1]]}]})", nullptr,
                          "f.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("f.json: shapes[0]"), std::string::npos) << e.what();
    }
}

TEST(ParseAnnotationsTest, ClampsVerticesAndMatchesLabelsLoosely) {
    const auto pal = default_palette();
    const auto doc = parse_annotations(
        doc_with({polygon_shape("  Cytoplasm ", {{-5, -5}, {20, -1}, {20, 20}, {-3, 20}})}, 4, 3).dump(), &pal);
    for (const auto& p : doc.shapes[0].points) {
        EXPECT_GE(p.x, 0);
        EXPECT_LE(p.x, 4);
        EXPECT_GE(p.y, 0);
        EXPECT_LE(p.y, 3);
    }
    EXPECT_EQ(count_label(rasterize(doc, pal), 1), 12);
}

TEST(HarmonizeTest, KeepsThreeClassLabelsAndRejectsOthers) {
    const LabelMask m(3, 1, std::vector<std::uint8_t>{0, 1, 2});
    EXPECT_EQ(harmonize_hyperspectral(m), m);
    EXPECT_THROW(harmonize_hyperspectral(LabelMask(2, 1, std::vector<std::uint8_t>{0, 3})), InvalidInput);
}

TEST(LabelPaletteTest, ParseFile) {
    const auto p = LabelPalette::parse("# classes\nbackground = 0\nCytoplasm=1  # main\n\nnucleus = 2\n");
    EXPECT_EQ(p.size(), 3u);
    EXPECT_EQ(p.find("cytoplasm"), std::optional<std::uint8_t>(1));
    EXPECT_EQ(p.find("NUCLEUS"), std::optional<std::uint8_t>(2));
    EXPECT_FALSE(p.find("rbc"));
    EXPECT_THROW(LabelPalette::parse("rbc 3"), ParseError);
    EXPECT_THROW(LabelPalette::parse("rbc = three"), ParseError);
    EXPECT_THROW(LabelPalette::parse("rbc = 5"), ParseError);
}

TEST(LabelPaletteTest, ShippedPaletteCoversFiveClasses) {
    const auto p = LabelPalette::load(HSAUG_DEFAULT_LABELS);
    EXPECT_EQ(p.find("background"), std::optional<std::uint8_t>(0));
    EXPECT_EQ(p.find("cytoplasm"), std::optional<std::uint8_t>(1));
    EXPECT_EQ(p.find("nuclear"), std::optional<std::uint8_t>(2));
    EXPECT_EQ(p.find("rbc"), std::optional<std::uint8_t>(3));
    EXPECT_EQ(p.find("fibroblast"), std::optional<std::uint8_t>(4));
    EXPECT_THROW(LabelPalette::load("/nonexistent/labels.conf"), IoError);
}

}  // namespace
}  // namespace hsaug
