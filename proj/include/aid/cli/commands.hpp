#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aid/config.hpp"
#include "aid/error.hpp"
#include "aid/oks_eval.hpp"
#include "aid/synth/bench.hpp"
#include "aid/synth/calibrate.hpp"

namespace aid::cli {

/// Bad command-line usage; the process exits with status 2.
class UsageError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "usage"; }
};

struct AugmentSummary {
    int samples = 0;
    int masked = 0;
};

/// Masks every image listed in the annotation file and writes
///   <out>/annotations.json       byte copy of the input file
///   <out>/images/<file_name>     masked image, or a byte copy when unmasked
///   <out>/masks/<stem>.png       one-bit mask, dropped pixels black
///   <out>/keypoints_dropped.json per-instance dropped flags
/// A dataset-mean fill is computed from the input images.
AugmentSummary cmd_augment(const CliConfig& cfg, const std::filesystem::path& annotations,
                           const std::filesystem::path& images, const std::filesystem::path& out_dir);

/// The first method is the reference. Each config is `cfg.aid` with its
/// method replaced.
std::vector<synth::CalibrationResult> cmd_calibrate(const CliConfig& cfg, const std::vector<DropMethod>& methods);
std::string calibration_to_json(const std::vector<synth::CalibrationResult>& results);
std::string calibration_to_yaml(const std::vector<synth::CalibrationResult>& results);

/// One heatmap file per annotation, named <annotation id>.heatmap. Returns
/// the number of files written.
int cmd_targets(const CliConfig& cfg, const std::filesystem::path& annotations,
                const std::filesystem::path& out_dir);

enum class EvalSplit { all, vis, invis, both };
EvalSplit parse_eval_split(std::string_view text);

MetricsReport cmd_eval(const CliConfig& cfg, const std::filesystem::path& gt, const std::filesystem::path& dt,
                       EvalSplit split);

std::string cmd_plan(ScheduleName name, AidMode mode, ScheduleScale scale);

/// Throws UsageError when either list is empty.
std::vector<synth::BenchRun> cmd_bench(const CliConfig& cfg, const std::vector<ExperimentId>& ids,
                                       const std::vector<std::uint64_t>& seeds);

/// Original plus one panel per masking method (each forced on), side by side.
ImageBuffer cmd_preview(const CliConfig& cfg, const ImageBuffer& image);

/// Writes a stick-figure dataset as PNG images plus a COCO annotation file.
void cmd_synth(const CliConfig& cfg, int count, double occlusion_rate, const std::filesystem::path& out_dir);

/// Full command-line entry point. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aid::cli
