#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "hsaug/imaging.hpp"

namespace hsaug {
namespace {

using testing::random_gray;

ImageBuffer gray(int w, int h, std::vector<std::uint8_t> px) { return ImageBuffer(w, h, 1, std::move(px)); }

ImageBuffer rgb_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return ImageBuffer(1, 1, 3, {r, g, b}); }

TEST(ImageBufferTest, RejectsBadShapes) {
    EXPECT_THROW(ImageBuffer(0, 4, 1), InvalidInput);
    EXPECT_THROW(ImageBuffer(4, 4, 2), InvalidInput);
    EXPECT_THROW(ImageBuffer(2, 2, 1, std::vector<std::uint8_t>(3)), InvalidInput);
    EXPECT_THROW(LabelMask(2, 1, std::vector<std::uint8_t>{0, 5}), InvalidInput);
}

TEST(GrayscaleTest, FixedPointsAndRed) {
    EXPECT_EQ(to_grayscale(rgb_pixel(0, 0, 0)).at(0, 0), 0);
    EXPECT_EQ(to_grayscale(rgb_pixel(255, 255, 255)).at(0, 0), 255);
    // 0.299 * 255 = 76.245
    EXPECT_EQ(to_grayscale(rgb_pixel(255, 0, 0)).at(0, 0), 76);
    // 0.587 * 255 = 149.685, 0.114 * 255 = 29.07
    EXPECT_EQ(to_grayscale(rgb_pixel(0, 255, 0)).at(0, 0), 150);
    EXPECT_EQ(to_grayscale(rgb_pixel(0, 0, 255)).at(0, 0), 29);
}

TEST(GrayscaleTest, RejectsSingleChannel) { EXPECT_THROW(to_grayscale(ImageBuffer(2, 2, 1)), InvalidInput); }

TEST(GammaTest, EndpointsAndMidpoint) {
    const auto out = gamma_correct(gray(3, 1, {0, 128, 255}), 0.3);
    EXPECT_EQ(out.at(0, 0), 0);
    // 255 * (128/255)^(10/3) = 25.631...
    EXPECT_EQ(out.at(1, 0), 26);
    EXPECT_EQ(out.at(2, 0), 255);
}

TEST(GammaTest, ReferenceValues) {
    // 255 * (v/255)^(1/0.3) evaluated in high precision:
    // 50 -> 1.1168, 100 -> 11.2566, 200 -> 113.4592
    const auto out = gamma_correct(gray(3, 1, {50, 100, 200}), 0.3);
    EXPECT_EQ(out.at(0, 0), 1);
    EXPECT_EQ(out.at(1, 0), 11);
    EXPECT_EQ(out.at(2, 0), 113);
}

TEST(GammaTest, RejectsNonPositive) {
    EXPECT_THROW(gamma_correct(gray(1, 1, {3}), 0.0), InvalidParameter);
    EXPECT_THROW(gamma_correct(gray(1, 1, {3}), -1.0), InvalidParameter);
}

TEST(GammaTest, MonotoneAndFixesEndpointsForManyGammas) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const double g = 0.05 + static_cast<double>(rng.uniform_int(0, 1000)) / 200.0;
        ImageBuffer ramp(256, 1, 1);
        for (int v = 0; v < 256; ++v) ramp.at(v, 0) = static_cast<std::uint8_t>(v);
        const auto out = gamma_correct(ramp, g);
        EXPECT_EQ(out.at(0, 0), 0);
        EXPECT_EQ(out.at(255, 0), 255);
        for (int v = 1; v < 256; ++v) EXPECT_LE(out.at(v - 1, 0), out.at(v, 0)) << "gamma " << g;
    }
}

TEST(EqualizeTest, ConstantImageUnchanged) {
    const ImageBuffer flat(5, 3, 1, 128);
    EXPECT_EQ(equalize_histogram(flat), flat);
}

TEST(EqualizeTest, FlatHistogramIsIdentity) {
    ImageBuffer img(16, 16, 1);
    for (int i = 0; i < 256; ++i) img.data()[i] = static_cast<std::uint8_t>(255 - i);
    EXPECT_EQ(equalize_histogram(img), img);
}

TEST(EqualizeTest, SmallWorkedExample) {
    // cdf = 2, 3, 4 at 50, 100, 200; (cdf - 2) / 2 * 255 -> 0, 127.5, 255
    EXPECT_EQ(equalize_histogram(gray(2, 2, {50, 50, 100, 200})).bytes(), (std::vector<std::uint8_t>{0, 0, 128, 255}));
}

TEST(EqualizeTest, BruteForceCdfOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto img = random_gray(9, 7, rng, 20, 90);
        const auto out = equalize_histogram(img);
        const auto px = img.bytes();
        const auto total = static_cast<double>(px.size());
        const auto min_v = *std::min_element(px.begin(), px.end());
        const auto cdf_min = static_cast<double>(std::count(px.begin(), px.end(), min_v));
        for (std::size_t i = 0; i < px.size(); ++i) {
            const auto cdf = static_cast<double>(std::count_if(px.begin(), px.end(), [&](auto v) { return v <= px[i]; }));
            EXPECT_EQ(out.bytes()[i], quantize((cdf - cdf_min) / (total - cdf_min) * 255.0));
        }
    }
}

TEST(EqualizeTest, NeverInvertsRankOrder) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto img = random_gray(13, 11, rng, static_cast<int>(rng.uniform_int(0, 100)), 255);
        const auto out = equalize_histogram(img);
        for (std::size_t i = 0; i < img.bytes().size(); ++i)
            for (std::size_t j = 0; j < img.bytes().size(); j += 7)
                if (img.bytes()[i] < img.bytes()[j]) {
                    EXPECT_LE(out.bytes()[i], out.bytes()[j]);
                }
    }
}

TEST(AddConstantTest, SaturatesAndNeverDecreases) {
    EXPECT_EQ(add_constant_saturating(gray(1, 1, {50}), 100).at(0, 0), 150);
    EXPECT_EQ(add_constant_saturating(gray(1, 1, {180}), 100).at(0, 0), 255);
    EXPECT_EQ(add_constant_saturating(gray(1, 1, {0}), 0).at(0, 0), 0);
    EXPECT_THROW(add_constant_saturating(gray(1, 1, {0}), 256), InvalidParameter);

    Rng rng(5);
    const auto img = random_gray(32, 32, rng);
    for (int c : {0, 1, 17, 100, 255}) {
        const auto out = add_constant_saturating(img, c);
        for (std::size_t i = 0; i < img.bytes().size(); ++i) EXPECT_GE(out.bytes()[i], img.bytes()[i]);
    }
}

TEST(SpectralizeTest, BlackAndWhite) {
    const SpectralParams p;  // gamma 0.3, c1 100
    const auto black = spectralize(ImageBuffer(4, 3, 3, 0), p);
    EXPECT_EQ(black.channels(), 1);
    for (auto v : black.data()) EXPECT_EQ(v, 100);
    const auto white = spectralize(ImageBuffer(4, 3, 3, 255), p);
    for (auto v : white.data()) EXPECT_EQ(v, 255);
}

TEST(SpectralizeTest, WorkedExample) {
    const ImageBuffer rgb(2, 2, 3, {50, 50, 50, 50, 50, 50, 100, 100, 100, 200, 200, 200});
    EXPECT_EQ(spectralize(rgb, {0.3, 100}).bytes(), (std::vector<std::uint8_t>{100, 100, 228, 255}));
}

TEST(SpectralizeTest, EveryPixelAtLeastC1AndDeterministic) {
    Rng rng(21);
    const auto rgb = testing::textured_rgb(64, 48, rng);
    const SpectralParams p{0.3, 100};
    const auto a = spectralize(rgb, p);
    const auto b = spectralize(rgb, p);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.width(), 64);
    EXPECT_EQ(a.height(), 48);
    for (auto v : a.data()) EXPECT_GE(v, 100);
}

TEST(SpectralizeTest, RejectsBadParams) {
    EXPECT_THROW(spectralize(ImageBuffer(1, 1, 3), {0.0, 100}), InvalidParameter);
    EXPECT_THROW(spectralize(ImageBuffer(1, 1, 3), {0.3, 300}), InvalidParameter);
    EXPECT_THROW(spectralize(ImageBuffer(1, 1, 1), {0.3, 100}), InvalidInput);
}

}  // namespace
}  // namespace hsaug
