#include <gtest/gtest.h>

#include <cmath>

#include "aid/synth/calibrate.hpp"

using namespace aid;
using namespace aid::synth;

namespace {

AidConfig method(DropMethod m) {
    AidConfig c;
    c.method = m;
    c.apply_prob = 1.0;
    return c;
}

const LossProbe& shared_probe() {
    static const LossProbe probe{ProbeOptions{}};
    return probe;
}

}  // namespace

TEST(Knob, RoundTripThroughConfig) {
    for (const auto m : {DropMethod::cutout, DropMethod::random_erase, DropMethod::has, DropMethod::gridmask}) {
        const auto c = method(m);
        const auto r = knob_range(c, 48, 48);
        EXPECT_LT(r.lo, r.hi);
        const double mid = m == DropMethod::cutout ? std::round((r.lo + r.hi) / 2) : (r.lo + r.hi) / 2;
        EXPECT_NEAR(knob_value(with_knob(c, mid, 48, 48), 48, 48), mid, 1e-12);
        EXPECT_NO_THROW(validate(with_knob(c, r.lo, 48, 48)));
        EXPECT_NO_THROW(validate(with_knob(c, r.hi, 48, 48)));
    }
}

TEST(Probe, DeterministicAndMonotoneInHasProbability) {
    const auto& probe = shared_probe();
    auto has = method(DropMethod::has);
    EXPECT_EQ(probe.loss(has), probe.loss(has));
    has.has.drop_prob = 0.1;
    const double low = probe.loss(has);
    has.has.drop_prob = 0.6;
    EXPECT_GT(probe.loss(has), low);
    EXPECT_LT(probe.loss(method(DropMethod::none)), low);
}

TEST(Calibrate, ReferenceAgainstItselfIsUnchanged) {
    const auto& probe = shared_probe();
    const auto c = method(DropMethod::cutout);
    const auto r = calibrate({c, c}, probe);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].config, c);
    EXPECT_EQ(r[1].config, c);
    EXPECT_TRUE(r[1].reached);
}

TEST(Calibrate, HasMatchesCutoutWithinTolerance) {
    const auto& probe = shared_probe();
    const auto r = calibrate({method(DropMethod::cutout), method(DropMethod::has)}, probe);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(r[1].reached);
    EXPECT_LE(std::abs(r[1].loss / r[1].reference_loss - 1.0), 0.02);
    EXPECT_DOUBLE_EQ(probe.loss(r[1].config), r[1].loss);
}

TEST(Calibrate, NoDroppingReferenceIsUnreachable) {
    const auto& probe = shared_probe();
    const auto r = calibrate({method(DropMethod::none), method(DropMethod::has)}, probe);
    EXPECT_FALSE(r[1].reached);
    EXPECT_GT(r[1].loss, r[1].reference_loss);
}

TEST(Calibrate, QuantizedGridMaskReturnsNearestAttainableLoss) {
    const auto& probe = shared_probe();
    const auto reference = method(DropMethod::cutout);
    const auto grid = method(DropMethod::gridmask);
    const auto r = calibrate({reference, grid}, probe);
    const double ref = r[0].loss;
    const auto range = knob_range(grid, 48, 48);
    double nearest = 1e9;
    for (int i = 0; i <= 200; ++i) {
        const double knob = range.lo + (range.hi - range.lo) * i / 200.0;
        nearest = std::min(nearest, std::abs(probe.loss(with_knob(grid, knob, 48, 48)) / ref - 1.0));
    }
    const double gap = std::abs(r[1].loss / ref - 1.0);
    EXPECT_LE(gap, nearest + 1e-12);
    EXPECT_EQ(r[1].reached, gap <= probe.options().tolerance);
}
