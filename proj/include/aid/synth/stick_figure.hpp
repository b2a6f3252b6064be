#pragma once

#include <vector>

#include "aid/image.hpp"
#include "aid/keypoints.hpp"
#include "aid/rng.hpp"

namespace aid::synth {

/// Procedural upper-body stick figure: a neck anchor, a head, and two
/// two-segment arms. Blobs at the keypoints carry the appearance cue; the
/// rendered limbs and the shared arm lengths carry the constraint cue.
struct StickFigureParams {
    int image_width = 48;
    int image_height = 48;

    double neck_length_min = 5.0, neck_length_max = 7.0;
    double upper_arm_min = 8.0, upper_arm_max = 11.0;
    double forearm_min = 8.0, forearm_max = 11.0;

    double body_tilt_max = 0.3;        // rad
    double shoulder_spread = 1.0;      // rad around horizontal
    double elbow_bend_max = 1.3;       // rad
    double torso_length = 12.0;

    double background = 40.0;
    double limb_intensity = 110.0;
    double limb_half_width = 0.7;
    // head, elbows, hands
    double head_radius = 2.4, elbow_radius = 1.2, hand_radius = 1.8;
    double head_intensity = 230.0, elbow_intensity = 175.0, hand_intensity = 255.0;
    double noise_std = 6.0;

    double occluder_min = 7.0, occluder_max = 10.0;
    double occluder_value = 45.0;

    int max_attempts = 1000;
};

void validate(const StickFigureParams& p);

/// Keypoint order: head, left_elbow, right_elbow, left_hand, right_hand.
const KeypointLayout& stick_figure_layout();

struct Sample {
    ImageBuffer image;
    KeypointInstance instance;
};

/// Every keypoint is visible (v = 2). Throws when a figure cannot be placed
/// inside the image within `max_attempts`.
std::vector<Sample> generate_dataset(Rng& rng, int n, const StickFigureParams& p);

struct OccludedSample {
    ImageBuffer image;
    KeypointInstance instance;
    /// Keypoints that had an occluder pasted over them.
    std::vector<bool> occluded;
};

/// Pastes a square patch over each labeled keypoint with probability
/// `rate`; the patch always covers the keypoint's pixel. Annotations are
/// unchanged.
std::vector<OccludedSample> occlude_test_set(Rng& rng, const std::vector<Sample>& samples,
                                             double rate, const StickFigureParams& p);

}  // namespace aid::synth
