#include "aid/schedule.hpp"

#include <algorithm>

#include "json.hpp"

#include "aid/error.hpp"

namespace aid {
namespace {

struct ScheduleTable {
    int total_epochs;
    std::vector<LrSegment> lr;
    std::vector<AidSegment> aid;  // only used for S3
};

// Full-length schedules: base 1e-3, dropped to 1e-4 and 1e-5 at epochs
// 170/200 (of 210) for S1 and 380/410 (of 420) for S2; S3 is S1 twice,
// the second pass with AID.
const ScheduleTable& table(ScheduleName name, ScheduleScale scale) {
    static const ScheduleTable full_s1{210, {{0, 1e-3}, {170, 1e-4}, {200, 1e-5}}, {}};
    static const ScheduleTable full_s2{420, {{0, 1e-3}, {380, 1e-4}, {410, 1e-5}}, {}};
    static const ScheduleTable full_s3{
        420,
        {{0, 1e-3}, {170, 1e-4}, {200, 1e-5}, {210, 1e-3}, {380, 1e-4}, {410, 1e-5}},
        {{0, false}, {210, true}}};
    // Desk-scale versions with the same proportions: 170/210 and 200/210 of
    // 30 epochs round down to 24 and 28.
    static const ScheduleTable toy_s1{30, {{0, 1e-3}, {24, 1e-4}, {28, 1e-5}}, {}};
    static const ScheduleTable toy_s2{60, {{0, 1e-3}, {54, 1e-4}, {58, 1e-5}}, {}};
    static const ScheduleTable toy_s3{
        60,
        {{0, 1e-3}, {24, 1e-4}, {28, 1e-5}, {30, 1e-3}, {54, 1e-4}, {58, 1e-5}},
        {{0, false}, {30, true}}};
    const bool toy = scale == ScheduleScale::toy;
    switch (name) {
        case ScheduleName::S1: return toy ? toy_s1 : full_s1;
        case ScheduleName::S2: return toy ? toy_s2 : full_s2;
        case ScheduleName::S3: return toy ? toy_s3 : full_s3;
    }
    throw InvalidArgument("unknown schedule");
}

template <typename Segment>
const Segment& segment_at(const std::vector<Segment>& segments, int epoch) {
    auto it = std::upper_bound(segments.begin(), segments.end(), epoch,
                               [](int e, const Segment& s) { return e < s.start_epoch; });
    return *std::prev(it);
}

void check_epoch(const SchedulePlan& plan, int epoch) {
    if (epoch < 0 || epoch >= plan.total_epochs)
        throw InvalidArgument("epoch " + std::to_string(epoch) + " outside [0, " +
                              std::to_string(plan.total_epochs) + ") of schedule " + plan.name);
}

}  // namespace

std::string_view to_string(ScheduleName name) {
    switch (name) {
        case ScheduleName::S1: return "S1";
        case ScheduleName::S2: return "S2";
        case ScheduleName::S3: return "S3";
    }
    return "?";
}

std::string_view to_string(AidMode mode) {
    switch (mode) {
        case AidMode::off: return "off";
        case AidMode::on: return "on";
        case AidMode::off_then_on: return "off-then-on";
    }
    return "?";
}

std::string_view to_string(ExperimentId id) {
    static constexpr std::string_view names[] = {"E1", "E2", "E3", "E4", "E5"};
    return names[static_cast<int>(id)];
}

std::string_view to_string(ScheduleScale scale) {
    return scale == ScheduleScale::full ? "full" : "toy";
}

ScheduleName parse_schedule_name(std::string_view text) {
    if (text == "S1") return ScheduleName::S1;
    if (text == "S2") return ScheduleName::S2;
    if (text == "S3") return ScheduleName::S3;
    throw InvalidArgument("unknown schedule '" + std::string(text) + "' (expected S1, S2 or S3)");
}

AidMode parse_aid_mode(std::string_view text) {
    if (text == "off") return AidMode::off;
    if (text == "on") return AidMode::on;
    if (text == "off-then-on" || text == "off_then_on" || text == "off/on") return AidMode::off_then_on;
    throw InvalidArgument("unknown aid mode '" + std::string(text) + "'");
}

ExperimentId parse_experiment_id(std::string_view text) {
    for (int i = 0; i < 5; ++i)
        if (text == to_string(static_cast<ExperimentId>(i))) return static_cast<ExperimentId>(i);
    throw InvalidArgument("unknown experiment '" + std::string(text) + "' (expected E1..E5)");
}

ScheduleScale parse_schedule_scale(std::string_view text) {
    if (text == "full") return ScheduleScale::full;
    if (text == "toy") return ScheduleScale::toy;
    throw InvalidArgument("unknown schedule scale '" + std::string(text) + "'");
}

void validate(const SchedulePlan& plan) {
    AID_CHECK(plan.total_epochs >= 1, "schedule must have at least one epoch");
    AID_CHECK(!plan.lr_segments.empty() && plan.lr_segments.front().start_epoch == 0,
              "lr segments must start at epoch 0");
    AID_CHECK(!plan.aid_segments.empty() && plan.aid_segments.front().start_epoch == 0,
              "aid segments must start at epoch 0");
    for (std::size_t i = 1; i < plan.aid_segments.size(); ++i)
        AID_CHECK(plan.aid_segments[i].start_epoch > plan.aid_segments[i - 1].start_epoch,
                  "aid segment starts must be strictly increasing");
    AID_CHECK(plan.aid_segments.back().start_epoch < plan.total_epochs,
              "aid segment starts beyond the schedule");
    for (std::size_t i = 0; i < plan.lr_segments.size(); ++i) {
        const auto& seg = plan.lr_segments[i];
        AID_CHECK(seg.lr > 0.0, "learning rates must be positive");
        AID_CHECK(seg.start_epoch < plan.total_epochs, "lr segment starts beyond the schedule");
        if (i == 0) continue;
        const auto& prev = plan.lr_segments[i - 1];
        AID_CHECK(seg.start_epoch > prev.start_epoch, "lr segment starts must be strictly increasing");
        const bool stage_start = std::any_of(
            plan.aid_segments.begin() + 1, plan.aid_segments.end(),
            [&](const AidSegment& a) { return a.start_epoch == seg.start_epoch; });
        AID_CHECK(seg.lr <= prev.lr || stage_start,
                  "learning rate may only increase where a new AID stage starts");
    }
}

SchedulePlan build_schedule(ScheduleName name, AidMode mode, ScheduleScale scale) {
    if (name == ScheduleName::S3 && mode != AidMode::off_then_on)
        throw InvalidArgument("schedule S3 trains without AID and then with AID (mode off-then-on)");
    if (name != ScheduleName::S3 && mode == AidMode::off_then_on)
        throw InvalidArgument("aid mode off-then-on is only defined for schedule S3");
    const ScheduleTable& t = table(name, scale);
    SchedulePlan plan;
    plan.name = std::string(scale == ScheduleScale::toy ? "toy-" : "") + std::string(to_string(name));
    plan.total_epochs = t.total_epochs;
    plan.lr_segments = t.lr;
    plan.aid_segments = name == ScheduleName::S3
                            ? t.aid
                            : std::vector<AidSegment>{{0, mode == AidMode::on}};
    validate(plan);
    return plan;
}

double lr_at(const SchedulePlan& plan, int epoch) {
    check_epoch(plan, epoch);
    return segment_at(plan.lr_segments, epoch).lr;
}

bool aid_at(const SchedulePlan& plan, int epoch) {
    check_epoch(plan, epoch);
    return segment_at(plan.aid_segments, epoch).aid_on;
}

ExperimentConfig make_experiment(ExperimentId id, ScheduleScale scale) {
    switch (id) {
        case ExperimentId::E1: return {id, build_schedule(ScheduleName::S1, AidMode::off, scale)};
        case ExperimentId::E2: return {id, build_schedule(ScheduleName::S1, AidMode::on, scale)};
        case ExperimentId::E3: return {id, build_schedule(ScheduleName::S2, AidMode::off, scale)};
        case ExperimentId::E4: return {id, build_schedule(ScheduleName::S2, AidMode::on, scale)};
        case ExperimentId::E5:
            return {id, build_schedule(ScheduleName::S3, AidMode::off_then_on, scale)};
    }
    throw InvalidArgument("unknown experiment");
}

bool aid_active(const ExperimentConfig& cfg, int epoch) {
    return aid_at(cfg.plan, epoch);
}

std::string schedule_to_json(const SchedulePlan& plan, int indent) {
    nlohmann::json doc;
    doc["name"] = plan.name;
    doc["total_epochs"] = plan.total_epochs;
    doc["lr_segments"] = nlohmann::json::array();
    for (const auto& s : plan.lr_segments)
        doc["lr_segments"].push_back({{"start_epoch", s.start_epoch}, {"lr", s.lr}});
    doc["aid_segments"] = nlohmann::json::array();
    for (const auto& s : plan.aid_segments)
        doc["aid_segments"].push_back({{"start_epoch", s.start_epoch}, {"aid_on", s.aid_on}});
    return doc.dump(indent);
}

SchedulePlan schedule_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("schedule JSON: ") + e.what(), e.byte);
    }
    SchedulePlan plan;
    try {
        plan.name = doc.value("name", std::string{});
        plan.total_epochs = doc.at("total_epochs").get<int>();
        for (const auto& s : doc.at("lr_segments"))
            plan.lr_segments.push_back({s.at("start_epoch").get<int>(), s.at("lr").get<double>()});
        for (const auto& s : doc.at("aid_segments"))
            plan.aid_segments.push_back({s.at("start_epoch").get<int>(), s.at("aid_on").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schedule JSON: ") + e.what());
    }
    validate(plan);
    return plan;
}

}  // namespace aid
