#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "aid/error.hpp"
#include "aid/masking.hpp"
#include "aid/png_io.hpp"
#include "oracles/cutout_enumeration.hpp"

using namespace aid;

TEST(Cutout, DefaultHoleIsQuarterOfShortSide) {
    CutoutParams p;
    EXPECT_EQ(resolved_hole_w(p, 64, 48), 12);
    EXPECT_EQ(resolved_hole_h(p, 64, 48), 12);
}

TEST(Cutout, HoleClipsAtBorder) {
    BinaryMask m(10, 10);
    draw_cutout_hole(m, 0, 0, 4, 4);
    EXPECT_EQ(m.dropped_count(), 4u);
    EXPECT_TRUE(m.dropped(1, 1));
    EXPECT_FALSE(m.dropped(2, 2));
}

TEST(Cutout, HoleLargerThanImageDropsEverything) {
    Rng rng(1);
    CutoutParams p{1, 50, 50};
    const auto m = sample_cutout(rng, 20, 20, p);
    EXPECT_EQ(m.dropped_count(), 400u);
}

TEST(Cutout, KeypointDropRateMatchesEnumeration) {
    Rng rng(5);
    const int w = 32, h = 24, hw = 8, hh = 6, px = 2, py = 20;
    const double expected = oracle::cutout_cover_probability(w, h, hw, hh, px, py);
    const int n = 20000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += sample_cutout(rng, w, h, {1, hw, hh}).dropped(px, py);
    const double sd = std::sqrt(expected * (1 - expected) / n);
    EXPECT_NEAR(static_cast<double>(hits) / n, expected, 3 * sd);
}

TEST(Cutout, EnumerationOracleFrozen) {
    // Interior pixel: every centre whose hole covers it lies inside the image.
    EXPECT_DOUBLE_EQ(oracle::cutout_cover_probability(20, 20, 4, 4, 10, 10), 16.0 / 400.0);
    // Corner pixel: only centres (0..2, 0..2) cover (0, 0).
    EXPECT_DOUBLE_EQ(oracle::cutout_cover_probability(20, 20, 4, 4, 0, 0), 9.0 / 400.0);
}

TEST(RandomErase, AreaAlwaysInsideRange) {
    Rng rng(2);
    RandomEraseParams p;
    for (int i = 0; i < 2000; ++i) {
        const auto d = sample_random_erase(rng, 40, 30, p);
        if (!d.fitted) {
            EXPECT_EQ(d.mask.dropped_count(), 0u);
            continue;
        }
        EXPECT_GE(d.mask.drop_fraction(), p.area_min);
        EXPECT_LE(d.mask.drop_fraction(), p.area_max);
    }
}

TEST(RandomErase, ImpossibleRangeReturnsEmptyMask) {
    Rng rng(3);
    RandomEraseParams p{0.9, 1.0, 10.0, 20.0, 10};
    const auto d = sample_random_erase(rng, 10, 10, p);
    EXPECT_FALSE(d.fitted);
    EXPECT_EQ(d.mask.dropped_count(), 0u);
}

TEST(Has, ProbabilityEdges) {
    Rng rng(4);
    EXPECT_EQ(sample_has(rng, 17, 13, {4, 4, 0.0}).dropped_count(), 0u);
    EXPECT_EQ(sample_has(rng, 17, 13, {4, 4, 1.0}).dropped_count(), 17u * 13u);
}

TEST(Has, LastPatchAbsorbsRemainder) {
    Rng rng(5);
    // One row, two columns over 5 pixels: patches of width 2 and 3.
    std::set<std::size_t> counts;
    for (int i = 0; i < 200; ++i) counts.insert(sample_has(rng, 5, 1, {1, 2, 0.5}).dropped_count());
    EXPECT_EQ(counts, (std::set<std::size_t>{0, 2, 3, 5}));
}

TEST(Has, DroppedPatchCountIsBinomial) {
    Rng rng(6);
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_has(rng, 32, 32, {4, 4, 0.5}).dropped_count() / 64.0;
    const double sd = std::sqrt(16 * 0.25 / n);
    EXPECT_NEAR(sum / n, 8.0, 3 * sd);
}

TEST(Has, GridMustFit) {
    Rng rng(7);
    EXPECT_THROW(sample_has(rng, 3, 3, {4, 4, 0.5}), InvalidArgument);
}

TEST(GridMask, ZeroRatioKeepsAll) {
    Rng rng(8);
    GridMaskParams p;
    p.ratio = 0.0;
    EXPECT_EQ(sample_gridmask(rng, 64, 64, p).dropped_count(), 0u);
}

TEST(GridMask, ExactTilingAtZeroPhase) {
    const auto m = rasterize_gridmask(64, 64, 8, 4, 0, 0, 0.0);
    EXPECT_DOUBLE_EQ(m.drop_fraction(), 0.25);
    EXPECT_TRUE(m.dropped(0, 0));
    EXPECT_TRUE(m.dropped(3, 3));
    EXPECT_FALSE(m.dropped(4, 0));
    EXPECT_TRUE(m.dropped(8, 8));
}

TEST(GridMask, RotationKeepsFractionRoughly) {
    const auto m = rasterize_gridmask(128, 128, 16, 8, 0, 0, 30.0);
    EXPECT_NEAR(m.drop_fraction(), 0.25, 0.02);
}

TEST(GridMask, SideMustBeBelowPeriod) {
    EXPECT_THROW(rasterize_gridmask(8, 8, 4, 4, 0, 0, 0.0), InvalidArgument);
    Rng rng(9);
    GridMaskParams p{8, 8, 1.0, 0.0};
    EXPECT_THROW(sample_gridmask(rng, 32, 32, p), InvalidArgument);
}

TEST(GridMask, AutoPeriodRange) {
    const auto r = resolved_periods(GridMaskParams{}, 96, 64);
    EXPECT_EQ(r.lo, 8);
    EXPECT_EQ(r.hi, 16);
}

TEST(GridMask, FractionNearRatioSquared) {
    Rng rng(10);
    GridMaskParams p{8, 16, 0.4, 0.0};
    double sum = 0.0;
    for (int i = 0; i < 1000; ++i) sum += sample_gridmask(rng, 96, 96, p).drop_fraction();
    EXPECT_NEAR(sum / 1000, 0.16, 0.02);
}

TEST(AidMask, ApplyProbabilityEdges) {
    Rng rng(11);
    AidConfig c;
    c.apply_prob = 0.0;
    EXPECT_FALSE(sample_aid_mask(rng, 16, 16, c).has_value());
    c.apply_prob = 1.0;
    EXPECT_TRUE(sample_aid_mask(rng, 16, 16, c).has_value());
    c.method = DropMethod::none;
    EXPECT_FALSE(sample_aid_mask(rng, 16, 16, c).has_value());
}

TEST(AidMask, DeterministicPerStream) {
    AidConfig c;
    c.apply_prob = 1.0;
    for (const auto m : {DropMethod::cutout, DropMethod::random_erase, DropMethod::has, DropMethod::gridmask}) {
        c.method = m;
        Rng a(99, "s"), b(99, "s");
        EXPECT_EQ(sample_aid_mask(a, 40, 30, c), sample_aid_mask(b, 40, 30, c));
    }
}

TEST(ApplyMask, FillsOnlyDroppedPixels) {
    ImageBuffer img(4, 4, 3, 10);
    BinaryMask m(4, 4);
    m.drop_rect(0, 0, 2, 1);
    const auto out = apply_mask(img, m, FillPolicy::constant({1, 2, 3}));
    EXPECT_EQ(out.at(0, 0, 0), 1);
    EXPECT_EQ(out.at(1, 0, 2), 3);
    EXPECT_EQ(out.at(2, 0, 0), 10);
    EXPECT_EQ(out.at(3, 3, 1), 10);
}

TEST(ApplyMask, DimensionMismatchThrows) {
    EXPECT_THROW(apply_mask(ImageBuffer(4, 4, 1), BinaryMask(4, 5), FillPolicy{}), InvalidArgument);
}

TEST(ApplyMask, FillPolicies) {
    ImageBuffer img(2, 1, 1, std::vector<std::uint8_t>{0, 101});
    EXPECT_EQ(fill_values(FillPolicy::per_image_mean(), img), (std::vector<std::uint8_t>{51}));
    EXPECT_EQ(fill_values(FillPolicy::dataset_mean({12.4}), img), (std::vector<std::uint8_t>{12}));
    EXPECT_THROW(fill_values(FillPolicy::constant({300}), img), InvalidArgument);
    const auto mean = dataset_mean({ImageBuffer(1, 1, 1, 10), ImageBuffer(1, 1, 1, 20)});
    EXPECT_DOUBLE_EQ(mean[0], 15.0);
}

TEST(KeypointsDropped, UsesNearestPixel) {
    BinaryMask m(10, 10);
    m.drop_rect(2, 2, 4, 4);
    KeypointInstance inst;
    inst.keypoints = {{2.6, 3.4, Visibility::visible},
                      {4.6, 3.0, Visibility::visible},
                      {3.0, 3.0, Visibility::unlabeled},
                      {-5.0, 3.0, Visibility::invisible}};
    EXPECT_EQ(keypoints_dropped(inst, m), (std::vector<bool>{true, false, false, false}));
}

TEST(Masking, ParsersRoundTrip) {
    for (const auto m : {DropMethod::none, DropMethod::cutout, DropMethod::random_erase, DropMethod::has,
                         DropMethod::gridmask})
        EXPECT_EQ(parse_drop_method(to_string(m)), m);
    EXPECT_THROW(parse_drop_method("blur"), InvalidArgument);
}

TEST(MaskPng, RoundTrip) {
    Rng rng(12);
    const auto m = sample_has(rng, 13, 9, {3, 3, 0.5});
    const auto path = std::filesystem::temp_directory_path() / "aid_mask_roundtrip.png";
    write_mask_png(path, m);
    EXPECT_EQ(read_mask_png(path), m);
    std::filesystem::remove(path);
}
