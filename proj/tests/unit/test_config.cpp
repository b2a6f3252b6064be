#include <gtest/gtest.h>

#include "aid/config.hpp"
#include "aid/error.hpp"

using namespace aid;

TEST(Config, EmptyDocumentGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.seed, 0u);
    EXPECT_EQ(c.aid, AidConfig{});
    EXPECT_EQ(c.geometry, GeomConfig{});
    EXPECT_EQ(c.targets, TargetParams{});
    EXPECT_EQ(c.bench.aid, synth::BenchConfig::defaults().aid);
}

TEST(Config, ParsesNestedValues) {
    const auto c = parse_config(R"(
seed: 42
aid:
  method: gridmask
  apply_prob: 0.7
  gridmask: {ratio: 0.55, period_min: 8, period_max: 12}
  fill: {mode: constant, values: [1, 2, 3]}
geometry: {flip_prob: 0.0, mode: bottom_up, aid_order: before_geometry}
schedule: {name: S3, aid_mode: off_then_on, scale: toy}
eval: {oks_k: [0.1, 0.2]}
)");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.aid.method, DropMethod::gridmask);
    EXPECT_DOUBLE_EQ(c.aid.apply_prob, 0.7);
    EXPECT_DOUBLE_EQ(c.aid.gridmask.ratio, 0.55);
    EXPECT_EQ(c.aid.gridmask.period_max, 12);
    EXPECT_EQ(c.aid.fill, FillPolicy::constant({1, 2, 3}));
    EXPECT_EQ(c.geometry.mode, CropMode::bottom_up);
    EXPECT_EQ(c.geometry.aid_order, AidOrder::before_geometry);
    EXPECT_EQ(c.schedule, ScheduleName::S3);
    EXPECT_EQ(c.schedule_scale, ScheduleScale::toy);
    EXPECT_EQ(c.oks_k, (std::vector<double>{0.1, 0.2}));
}

TEST(Config, UnknownKeyIsNamed) {
    try {
        parse_config("aid:\n  cutout:\n    hole_size: 3\n");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("aid.cutout.hole_size"), std::string::npos);
    }
    EXPECT_THROW(parse_config("colour: red\n"), SchemaError);
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_THROW(parse_config("aid: {apply_prob: 1.5}\n"), Error);
    EXPECT_THROW(parse_config("aid: {method: blur}\n"), Error);
    EXPECT_THROW(parse_config("seed: [1]\n"), Error);
    EXPECT_THROW(parse_config("aid: [\n"), Error);
}

TEST(Config, YamlRoundTrip) {
    auto c = parse_config("seed: 9\naid: {method: random_erase, apply_prob: 0.4}\nbench: {train_size: 64}\n");
    EXPECT_EQ(c.aid.apply_prob, 0.4);
    const auto text = config_to_yaml(c);
    EXPECT_EQ(text.find("0.40000000000000002"), std::string::npos);
    const auto back = parse_config(text);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.aid, c.aid);
    EXPECT_EQ(back.geometry, c.geometry);
    EXPECT_EQ(back.bench.train_size, 64);
    EXPECT_EQ(config_to_yaml(back), text);
}

TEST(Config, AidFragmentParsesBack) {
    AidConfig a;
    a.method = DropMethod::has;
    a.has.drop_prob = 0.123456789;
    const auto c = parse_config("aid:\n" + [&] {
        std::string out;
        const auto frag = aid_config_to_yaml(a);
        std::size_t start = 0;
        while (start < frag.size()) {
            const auto end = frag.find('\n', start);
            out += "  " + frag.substr(start, end - start) + "\n";
            if (end == std::string::npos) break;
            start = end + 1;
        }
        return out;
    }());
    EXPECT_EQ(c.aid, a);
}
