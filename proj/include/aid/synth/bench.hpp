#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aid/geometry.hpp"
#include "aid/masking.hpp"
#include "aid/schedule.hpp"
#include "aid/targets.hpp"
#include "aid/synth/stick_figure.hpp"
#include "aid/synth/tiny_regressor.hpp"

namespace aid::synth {

struct TrainOptions {
    int batch_size = 16;
    /// Schedule rates are multiplied by base_lr / 1e-3 (every schedule
    /// starts at 1e-3).
    double base_lr = 1e-3;
    double momentum = 0.9;
    double sigma = 1.5;  // output cells
    double pck_threshold = 0.1;
    RegressorShape shape;
};

struct RunCurves {
    std::vector<double> train_loss;
    std::vector<double> pck;
    std::vector<double> pck_occluded;

    bool operator==(const RunCurves&) const = default;
};

struct PckResult {
    double overall = 0.0;
    /// Absent when no keypoint is flagged occluded.
    std::optional<double> occluded;
};

/// Fraction of labeled keypoints whose prediction lies within
/// threshold_frac * image diagonal of the ground truth.
PckResult pck(const std::vector<std::vector<DecodedKeypoint>>& predictions,
              const std::vector<OccludedSample>& test_set, double threshold_frac);
PckResult pck(const TinyRegressor<float>& model, const std::vector<OccludedSample>& test_set,
              double threshold_frac);

std::vector<std::vector<DecodedKeypoint>> predict(const TinyRegressor<float>& model,
                                                  const std::vector<OccludedSample>& samples);

/// Rendered training targets for one sample, as float.
std::vector<float> training_targets(const KeypointInstance& instance, const RegressorShape& shape,
                                    double sigma);

struct TrainResult {
    TinyRegressor<float> model;
    RunCurves curves;
};

/// SGD with momentum on the heatmap MSE. Each epoch re-draws geometry and,
/// when aid_active(cfg, epoch), information-dropping masks. Uses the
/// streams `init`, `shuffle` and `augment` forked from `rng`.
TrainResult train(const ExperimentConfig& cfg, const std::vector<Sample>& data,
                  const std::vector<OccludedSample>& test_set, const AidConfig& aid,
                  const GeomConfig& geom, const Rng& rng, const TrainOptions& opts);

struct BenchConfig {
    StickFigureParams figure;
    int train_size = 384;
    int test_size = 256;
    double occlusion_rate = 0.5;
    AidConfig aid;
    GeomConfig geom;
    TrainOptions train;
    ScheduleScale scale = ScheduleScale::toy;

    /// Full-image bench defaults: HaS masks, flip-only geometry.
    static BenchConfig defaults();
};

struct BenchRun {
    ExperimentId id = ExperimentId::E1;
    std::uint64_t seed = 0;
    SchedulePlan plan;
    RunCurves curves;
};

/// All experiments with the same seed share data, initial weights and
/// batch order.
std::vector<BenchRun> run_bench(const std::vector<ExperimentId>& ids,
                                const std::vector<std::uint64_t>& seeds, const BenchConfig& cfg);

/// experiment,seed,epoch,lr,aid,train_loss,pck,pck_occluded
std::string curves_to_csv(const std::vector<BenchRun>& runs);
/// Two panels (loss, occluded PCK) with one mean-over-seeds line per experiment.
std::string curves_to_svg(const std::vector<BenchRun>& runs);

}  // namespace aid::synth
