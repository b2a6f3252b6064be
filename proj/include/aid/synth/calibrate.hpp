#pragma once

#include <optional>
#include <vector>

#include "aid/masking.hpp"
#include "aid/synth/stick_figure.hpp"
#include "aid/synth/tiny_regressor.hpp"

namespace aid::synth {

struct ProbeOptions {
    std::uint64_t seed = 17;
    int probe_size = 256;
    /// Epochs of plain training applied to the freshly initialised probe
    /// model before losses are measured.
    int warmup_epochs = 60;
    double base_lr = 1.0;
    int batch_size = 16;
    double sigma = 1.5;
    double tolerance = 0.02;
    int max_iterations = 40;
    RegressorShape shape;
    StickFigureParams figure;
};

/// Fixed model and data against which a config's loss is measured.
class LossProbe {
public:
    explicit LossProbe(const ProbeOptions& opts);

    /// Mean heatmap loss of the probe model over the probe set with masks
    /// drawn from `cfg` (same mask stream for every call).
    double loss(const AidConfig& cfg) const;

    const ProbeOptions& options() const noexcept { return opts_; }

private:
    ProbeOptions opts_;
    TinyRegressor<float> model_;
    std::vector<Sample> data_;
    std::vector<float> targets_;
    std::vector<double> fill_;
};

/// The knob searched for each method: Cutout hole side (px), RandomErase
/// area-range midpoint, HaS drop probability, GridMask ratio.
struct KnobRange {
    double lo = 0.0;
    double hi = 0.0;
};
KnobRange knob_range(const AidConfig& cfg, int width, int height);
double knob_value(const AidConfig& cfg, int width, int height);
AidConfig with_knob(const AidConfig& cfg, double value, int width, int height);

struct CalibrationResult {
    AidConfig config;
    double knob = 0.0;
    double loss = 0.0;
    double reference_loss = 0.0;
    /// |loss / reference_loss - 1| <= tolerance.
    bool reached = false;
};

/// The first config is the reference and is returned unchanged; each other
/// config's knob is bisected until its probe loss is within tolerance of
/// the reference loss. Unreachable targets return the nearest value seen.
std::vector<CalibrationResult> calibrate(const std::vector<AidConfig>& configs,
                                         const LossProbe& probe);

}  // namespace aid::synth
