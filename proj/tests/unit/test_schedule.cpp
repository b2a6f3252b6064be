#include <gtest/gtest.h>

#include "aid/error.hpp"
#include "aid/schedule.hpp"

using namespace aid;

namespace {

double full_s1(int e) { return e < 170 ? 1e-3 : (e < 200 ? 1e-4 : 1e-5); }
double full_s2(int e) { return e < 380 ? 1e-3 : (e < 410 ? 1e-4 : 1e-5); }
double toy_s1(int e) { return e < 24 ? 1e-3 : (e < 28 ? 1e-4 : 1e-5); }
double toy_s2(int e) { return e < 54 ? 1e-3 : (e < 58 ? 1e-4 : 1e-5); }

}  // namespace

TEST(Schedule, FullS1Table) {
    const auto p = build_schedule(ScheduleName::S1, AidMode::off);
    EXPECT_EQ(p.total_epochs, 210);
    for (int e = 0; e < 210; ++e) EXPECT_EQ(lr_at(p, e), full_s1(e)) << e;
    EXPECT_EQ(lr_at(p, 0), 1e-3);
    EXPECT_EQ(lr_at(p, 170), 1e-4);
    EXPECT_EQ(lr_at(p, 200), 1e-5);
}

TEST(Schedule, FullS2Table) {
    const auto p = build_schedule(ScheduleName::S2, AidMode::on);
    EXPECT_EQ(p.total_epochs, 420);
    for (int e = 0; e < 420; ++e) {
        EXPECT_EQ(lr_at(p, e), full_s2(e)) << e;
        EXPECT_TRUE(aid_at(p, e));
    }
    EXPECT_EQ(lr_at(p, 400), 1e-4);
}

TEST(Schedule, FullS3RepeatsS1) {
    const auto p = build_schedule(ScheduleName::S3, AidMode::off_then_on);
    EXPECT_EQ(p.total_epochs, 420);
    for (int e = 0; e < 420; ++e) {
        EXPECT_EQ(lr_at(p, e), full_s1(e % 210)) << e;
        EXPECT_EQ(aid_at(p, e), e >= 210) << e;
    }
}

TEST(Schedule, ToyTablesKeepProportions) {
    const auto s1 = build_schedule(ScheduleName::S1, AidMode::off, ScheduleScale::toy);
    const auto s2 = build_schedule(ScheduleName::S2, AidMode::off, ScheduleScale::toy);
    const auto s3 = build_schedule(ScheduleName::S3, AidMode::off_then_on, ScheduleScale::toy);
    EXPECT_EQ(s1.total_epochs, 30);
    EXPECT_EQ(s2.total_epochs, 60);
    EXPECT_EQ(s3.total_epochs, 60);
    for (int e = 0; e < 30; ++e) EXPECT_EQ(lr_at(s1, e), toy_s1(e));
    for (int e = 0; e < 60; ++e) {
        EXPECT_EQ(lr_at(s2, e), toy_s2(e));
        EXPECT_EQ(lr_at(s3, e), toy_s1(e % 30));
        EXPECT_EQ(aid_at(s3, e), e >= 30);
    }
    EXPECT_EQ(s1.name, "toy-S1");
}

TEST(Schedule, ModeConsistency) {
    EXPECT_THROW(build_schedule(ScheduleName::S3, AidMode::on), InvalidArgument);
    EXPECT_THROW(build_schedule(ScheduleName::S1, AidMode::off_then_on), InvalidArgument);
}

TEST(Schedule, OutOfRangeEpochThrows) {
    const auto p = build_schedule(ScheduleName::S1, AidMode::off);
    EXPECT_THROW(lr_at(p, 210), InvalidArgument);
    EXPECT_THROW(lr_at(p, -1), InvalidArgument);
    EXPECT_THROW(aid_at(p, 210), InvalidArgument);
}

TEST(Experiments, Table) {
    struct Row {
        ExperimentId id;
        int epochs;
    };
    for (const auto& [id, epochs] : {Row{ExperimentId::E1, 210}, Row{ExperimentId::E2, 210},
                                     Row{ExperimentId::E3, 420}, Row{ExperimentId::E4, 420},
                                     Row{ExperimentId::E5, 420}}) {
        const auto cfg = make_experiment(id);
        EXPECT_EQ(cfg.plan.total_epochs, epochs);
        for (int e = 0; e < epochs; ++e) {
            bool expected = false;
            switch (id) {
                case ExperimentId::E1:
                case ExperimentId::E3: expected = false; break;
                case ExperimentId::E2:
                case ExperimentId::E4: expected = true; break;
                case ExperimentId::E5: expected = e >= 210; break;
            }
            EXPECT_EQ(aid_active(cfg, e), expected);
        }
    }
    EXPECT_FALSE(aid_active(make_experiment(ExperimentId::E5), 100));
    EXPECT_THROW(aid_active(make_experiment(ExperimentId::E1), 210), InvalidArgument);
}

TEST(Validate, RejectsMalformedPlans) {
    SchedulePlan p{"x", 10, {{0, 1e-3}, {5, 1e-4}}, {{0, false}}};
    EXPECT_NO_THROW(validate(p));
    auto bad = p;
    bad.lr_segments[0].start_epoch = 1;
    EXPECT_THROW(validate(bad), InvalidArgument);
    bad = p;
    bad.lr_segments[1].start_epoch = 0;
    EXPECT_THROW(validate(bad), InvalidArgument);
    bad = p;
    bad.lr_segments[1].lr = 1e-2;
    EXPECT_THROW(validate(bad), InvalidArgument);
    bad = p;
    bad.lr_segments[1].start_epoch = 10;
    EXPECT_THROW(validate(bad), InvalidArgument);
    bad = p;
    bad.lr_segments[1].lr = 0.0;
    EXPECT_THROW(validate(bad), InvalidArgument);
    bad = p;
    bad.total_epochs = 0;
    EXPECT_THROW(validate(bad), InvalidArgument);
}

TEST(Json, RoundTrip) {
    for (const auto name : {ScheduleName::S1, ScheduleName::S2, ScheduleName::S3})
        for (const auto scale : {ScheduleScale::full, ScheduleScale::toy}) {
            const auto mode = name == ScheduleName::S3 ? AidMode::off_then_on : AidMode::on;
            const auto p = build_schedule(name, mode, scale);
            EXPECT_EQ(schedule_from_json(schedule_to_json(p)), p);
        }
}

TEST(Json, Errors) {
    EXPECT_THROW(schedule_from_json("{"), ParseError);
    EXPECT_THROW(schedule_from_json(R"({"name": "x"})"), SchemaError);
    EXPECT_THROW(schedule_from_json(
                     R"({"name":"x","total_epochs":5,"lr_segments":[{"start_epoch":1,"lr":0.1}],"aid_segments":[{"start_epoch":0,"aid_on":false}]})"),
                 Error);
}

TEST(Parsers, Names) {
    EXPECT_EQ(parse_schedule_name("S2"), ScheduleName::S2);
    EXPECT_EQ(parse_aid_mode(to_string(AidMode::off_then_on)), AidMode::off_then_on);
    EXPECT_EQ(parse_experiment_id("E5"), ExperimentId::E5);
    EXPECT_EQ(parse_schedule_scale("toy"), ScheduleScale::toy);
    EXPECT_THROW(parse_schedule_name("S4"), InvalidArgument);
    EXPECT_THROW(parse_experiment_id("E6"), InvalidArgument);
}
