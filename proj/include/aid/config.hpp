#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aid/geometry.hpp"
#include "aid/masking.hpp"
#include "aid/schedule.hpp"
#include "aid/synth/bench.hpp"
#include "aid/synth/calibrate.hpp"

namespace aid {

struct TargetParams {
    double stride = 4.0;
    double sigma = 2.0;  // output cells

    bool operator==(const TargetParams&) const = default;
};

/// Everything a subcommand can be configured with. Every field has a
/// default, so an empty document is a valid config.
struct CliConfig {
    std::uint64_t seed = 0;
    AidConfig aid;
    GeomConfig geometry;
    TargetParams targets;
    ScheduleName schedule = ScheduleName::S1;
    AidMode aid_mode = AidMode::off;
    ScheduleScale schedule_scale = ScheduleScale::full;
    std::string annotations;
    std::string images;
    /// Per-keypoint OKS falloff constants; empty means the COCO-17 values.
    std::vector<double> oks_k;
    synth::BenchConfig bench = synth::BenchConfig::defaults();
    synth::ProbeOptions probe;
};

/// YAML. Unknown keys anywhere in the document are rejected with a
/// SchemaError naming the key path.
CliConfig parse_config(std::string_view yaml_text);
CliConfig load_config(const std::filesystem::path& path);

/// Full document including defaults; parse_config(config_to_yaml(c)) == c.
std::string config_to_yaml(const CliConfig& cfg);
std::string aid_config_to_yaml(const AidConfig& aid);

void validate(const CliConfig& cfg);

}  // namespace aid
