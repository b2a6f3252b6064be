#include <gtest/gtest.h>

#include <cmath>

#include "aid/error.hpp"
#include "aid/oks_eval.hpp"
#include "oracles/coco_bruteforce.hpp"
#include "support/fixtures.hpp"

using namespace aid;

namespace {

void expect_same(const std::optional<double>& a, const std::optional<double>& b, const char* what, int fixture) {
    ASSERT_EQ(a.has_value(), b.has_value()) << what << " fixture " << fixture;
    if (a) EXPECT_NEAR(*a, *b, 1e-9) << what << " fixture " << fixture;
}

KeypointInstance person(std::int64_t image, std::vector<Keypoint> kps, double area) {
    KeypointInstance p;
    p.image_id = image;
    p.keypoints = std::move(kps);
    p.area = area;
    p.bbox = {0, 0, std::sqrt(area), std::sqrt(area)};
    return p;
}

}  // namespace

TEST(Oks, FrozenValue) {
    OksSigmas s{{1.0, 1.0}};
    const auto g = person(1, {{0, 0, Visibility::visible}, {5, 5, Visibility::unlabeled}}, 2.0);
    const auto d = person(1, {{1, 0, Visibility::visible}, {50, 50, Visibility::visible}}, 2.0);
    EXPECT_NEAR(*oks(d, g, s), std::exp(-0.25), 1e-15);
}

TEST(Oks, NoLabeledGtIsUndefined) {
    OksSigmas s{{1.0}};
    EXPECT_FALSE(oks(person(1, {{1, 1, Visibility::visible}}, 4), person(1, {{0, 0, Visibility::unlabeled}}, 4), s));
}

TEST(Oks, Coco17Constants) {
    const auto s = OksSigmas::coco17();
    ASSERT_EQ(s.k.size(), 17u);
    EXPECT_DOUBLE_EQ(s.k[0], 0.052);
    EXPECT_DOUBLE_EQ(s.k[16], 0.178);
    EXPECT_THROW(validate(OksSigmas{{0.1, -1.0}}), InvalidArgument);
}

TEST(Evaluate, PerfectDetectionsGiveOne) {
    Rng rng(1);
    auto f = fixture::random_eval_fixture(rng);
    std::vector<KeypointInstance> gt, dt;
    for (auto g : f.gt) {
        g.iscrowd = false;
        if (g.zero_labeled()) continue;
        gt.push_back(g);
    }
    for (const auto& g : gt) {
        auto d = g;
        d.score = 1.0;
        dt.push_back(d);
    }
    if (gt.empty()) GTEST_SKIP();
    const auto r = evaluate(gt, dt);
    EXPECT_DOUBLE_EQ(*r.ap, 1.0);
    EXPECT_DOUBLE_EQ(*r.ar, 1.0);
}

TEST(Evaluate, FalsePositiveAboveTruePositiveHalvesAp) {
    const std::vector<Keypoint> kps{{10, 10, Visibility::visible}, {20, 20, Visibility::visible}};
    EvalParams p = EvalParams::coco();
    p.sigmas = {{0.1, 0.1}};
    const auto g = person(1, kps, 2000);
    auto hit = g;
    hit.score = 0.5;
    auto miss = person(1, {{300, 300, Visibility::visible}, {310, 310, Visibility::visible}}, 100);
    miss.score = 0.9;
    const auto r = evaluate({g}, {hit, miss}, p);
    EXPECT_DOUBLE_EQ(*r.ap, 0.5);
    EXPECT_DOUBLE_EQ(*r.ap50, 0.5);
    EXPECT_DOUBLE_EQ(*r.ar, 1.0);
    EXPECT_FALSE(r.ap_large.has_value());
    EXPECT_TRUE(r.ap_medium.has_value());
}

TEST(Evaluate, NoGroundTruthIsUndefined) {
    auto d = person(1, {{1, 1, Visibility::visible}}, 10);
    d.score = 0.3;
    EvalParams p = EvalParams::coco();
    p.sigmas = {{0.1}};
    const auto r = evaluate({}, {d}, p);
    EXPECT_FALSE(r.ap.has_value());
    EXPECT_FALSE(r.ar.has_value());
}

TEST(Evaluate, EmptyDetectionsGiveZero) {
    EvalParams p = EvalParams::coco();
    p.sigmas = {{0.1}};
    const auto r = evaluate({person(1, {{1, 1, Visibility::visible}}, 10)}, {}, p);
    EXPECT_DOUBLE_EQ(*r.ap, 0.0);
    EXPECT_DOUBLE_EQ(*r.ar, 0.0);
}

TEST(Evaluate, MissingScoreOrWrongLengthThrows) {
    EvalParams p = EvalParams::coco();
    p.sigmas = {{0.1}};
    const auto g = person(1, {{1, 1, Visibility::visible}}, 10);
    EXPECT_THROW(evaluate({g}, {g}, p), InvalidArgument);
    auto d = person(1, {{1, 1, Visibility::visible}, {2, 2, Visibility::visible}}, 10);
    d.score = 1.0;
    EXPECT_THROW(evaluate({g}, {d}, p), InvalidArgument);
}

TEST(Evaluate, MatchesBruteForceOracle) {
    Rng rng(2024);
    const auto sig = OksSigmas::coco17();
    int compared = 0;
    for (int i = 0; i < 40; ++i) {
        const auto f = fixture::random_eval_fixture(rng);
        const auto r = evaluate(f.gt, f.dt);
        const auto b = oracle::brute_evaluate(f.gt, f.dt, sig.k);
        expect_same(r.ap, b.ap, "AP", i);
        expect_same(r.ap50, b.ap50, "AP50", i);
        expect_same(r.ap75, b.ap75, "AP75", i);
        expect_same(r.ap_medium, b.ap_m, "APm", i);
        expect_same(r.ap_large, b.ap_l, "APl", i);
        expect_same(r.ar, b.ar, "AR", i);
        const auto vis = oracle::brute_evaluate(oracle::keep_only(f.gt, Visibility::visible), f.dt, sig.k);
        const auto invis = oracle::brute_evaluate(oracle::keep_only(f.gt, Visibility::invisible), f.dt, sig.k);
        const auto splits = evaluate_splits(f.gt, f.dt);
        expect_same(splits.ap_vis, vis.ap, "AP-vis", i);
        expect_same(splits.ap_invis, invis.ap, "AP-invis", i);
        compared += r.ap.has_value();
    }
    EXPECT_GE(compared, 20);
}

TEST(Splits, EqualEvaluationOnDemotedGroundTruth) {
    Rng rng(7);
    const auto f = fixture::random_eval_fixture(rng);
    const auto split = split_by_visibility(f.gt);
    const auto s = evaluate_splits(f.gt, f.dt);
    EXPECT_EQ(evaluate(split.visible_only, f.dt).ap, s.ap_vis);
    EXPECT_EQ(evaluate(split.invisible_only, f.dt).ap, s.ap_invis);
}

TEST(Splits, VisibilitySplitDemotesOtherClass) {
    const auto g = person(1, {{1, 1, Visibility::visible}, {2, 2, Visibility::invisible}}, 10);
    const auto s = split_by_visibility({g});
    EXPECT_EQ(s.visible_only[0].keypoints[1].v, Visibility::unlabeled);
    EXPECT_EQ(s.invisible_only[0].keypoints[0].v, Visibility::unlabeled);
    EXPECT_EQ(s.invisible_only[0].keypoints[1].v, Visibility::invisible);
}

TEST(Report, JsonUsesNullForUndefined) {
    MetricsReport r;
    r.ap = 0.25;
    const auto j = report_to_json(r, -1);
    EXPECT_NE(j.find("\"AP\":0.25"), std::string::npos);
    EXPECT_NE(j.find("null"), std::string::npos);
    EXPECT_FALSE(report_to_text(r).empty());
}
