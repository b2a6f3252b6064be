#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aid {

enum class ScheduleName { S1, S2, S3 };
enum class AidMode { off, on, off_then_on };
enum class ExperimentId { E1, E2, E3, E4, E5 };
/// `full` is 210 / 420 epochs; `toy` keeps the same proportions at
/// 30 / 60 epochs.
enum class ScheduleScale { full, toy };

std::string_view to_string(ScheduleName name);
std::string_view to_string(AidMode mode);
std::string_view to_string(ExperimentId id);
std::string_view to_string(ScheduleScale scale);
ScheduleName parse_schedule_name(std::string_view text);
AidMode parse_aid_mode(std::string_view text);
ExperimentId parse_experiment_id(std::string_view text);
ScheduleScale parse_schedule_scale(std::string_view text);

struct LrSegment {
    int start_epoch = 0;
    double lr = 0.0;
    bool operator==(const LrSegment&) const = default;
};

struct AidSegment {
    int start_epoch = 0;
    bool aid_on = false;
    bool operator==(const AidSegment&) const = default;
};

/// Piecewise-constant learning rate and AID switch over whole epochs.
/// Epoch indices are 0-based: a drop "at epoch 170" makes epoch 170 the
/// first epoch at the lower rate.
struct SchedulePlan {
    std::string name;
    int total_epochs = 0;
    std::vector<LrSegment> lr_segments;
    std::vector<AidSegment> aid_segments;

    bool operator==(const SchedulePlan&) const = default;
};

/// Segments start at 0 with strictly increasing starts inside the plan;
/// rates are positive and non-increasing except where a new AID stage
/// begins (S3 restarts its rate profile there).
void validate(const SchedulePlan& plan);

SchedulePlan build_schedule(ScheduleName name, AidMode mode,
                            ScheduleScale scale = ScheduleScale::full);

double lr_at(const SchedulePlan& plan, int epoch);
bool aid_at(const SchedulePlan& plan, int epoch);

struct ExperimentConfig {
    ExperimentId id = ExperimentId::E1;
    SchedulePlan plan;
};

/// E1: S1/off, E2: S1/on, E3: S2/off, E4: S2/on, E5: S3/off-then-on.
ExperimentConfig make_experiment(ExperimentId id, ScheduleScale scale = ScheduleScale::full);

bool aid_active(const ExperimentConfig& cfg, int epoch);

std::string schedule_to_json(const SchedulePlan& plan, int indent = 2);
SchedulePlan schedule_from_json(std::string_view text);

}  // namespace aid
