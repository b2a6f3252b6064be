#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "aid/keypoints.hpp"

namespace aid {

/// Per-keypoint falloff constants k_i. The COCO defaults are twice the
/// COCO per-keypoint sigmas.
struct OksSigmas {
    std::vector<double> k;

    static OksSigmas coco17();
};

void validate(const OksSigmas& sigmas);

/// mean over labeled gt keypoints of exp(-d_i^2 / (2 * area * k_i^2)).
/// Prediction visibility is ignored. Returns nothing when the ground truth
/// has no labeled keypoint.
std::optional<double> oks(const KeypointInstance& pred, const KeypointInstance& gt,
                          const OksSigmas& sigmas);

struct AreaRange {
    double lo = 0.0;
    double hi = 1e10;
};

struct EvalParams {
    OksSigmas sigmas = OksSigmas::coco17();
    std::vector<double> oks_thresholds;  // default 0.50:0.05:0.95
    std::vector<double> recall_thresholds;  // default 0:0.01:1
    AreaRange area_all{0.0, 1e10};
    AreaRange area_medium{32.0 * 32.0, 96.0 * 96.0};
    AreaRange area_large{96.0 * 96.0, 1e10};
    int max_dets = 20;

    static EvalParams coco();
};

/// Metric values are absent when undefined (no non-ignored ground truth).
struct MetricsReport {
    std::optional<double> ap, ap50, ap75, ap_medium, ap_large;
    std::optional<double> ar, ar50, ar75, ar_medium, ar_large;
    std::optional<double> ap_vis, ap_invis;
};

/// COCO keypoint protocol. Ground truth with no labeled keypoint, crowd
/// annotations, and (per area range) out-of-range areas are ignore regions:
/// they are not positives and detections matched to them are not counted.
MetricsReport evaluate(const std::vector<KeypointInstance>& gt,
                       const std::vector<KeypointInstance>& dt,
                       const EvalParams& params = EvalParams::coco());

struct SplitMetrics {
    std::optional<double> ap_vis;
    std::optional<double> ap_invis;
};

SplitMetrics evaluate_splits(const std::vector<KeypointInstance>& gt,
                             const std::vector<KeypointInstance>& dt,
                             const EvalParams& params = EvalParams::coco());

std::string report_to_json(const MetricsReport& report, int indent = 2);
std::string report_to_text(const MetricsReport& report);

}  // namespace aid
