#include "aid/keypoints.hpp"

#include <algorithm>

#include "aid/error.hpp"

namespace aid {

KeypointLayout::KeypointLayout(std::vector<std::string> names, std::vector<int> flip_index,
                               std::vector<std::pair<int, int>> skeleton)
    : names_(std::move(names)), flip_index_(std::move(flip_index)), skeleton_(std::move(skeleton)) {
    const int n = static_cast<int>(names_.size());
    AID_CHECK(static_cast<int>(flip_index_.size()) == n,
              "flip index must have one entry per keypoint");
    for (int i = 0; i < n; ++i) {
        const int j = flip_index_[i];
        AID_CHECK(j >= 0 && j < n, "flip index out of range");
        AID_CHECK(flip_index_[j] == i, "flip index must be an involution");
    }
    for (auto [a, b] : skeleton_)
        AID_CHECK(a >= 0 && a < n && b >= 0 && b < n, "skeleton edge out of range");
}

KeypointLayout KeypointLayout::from_names(std::vector<std::string> names,
                                          std::vector<std::pair<int, int>> skeleton) {
    const int n = static_cast<int>(names.size());
    std::vector<int> flip(n);
    for (int i = 0; i < n; ++i) {
        flip[i] = i;
        const std::string& name = names[i];
        std::string partner;
        if (name.starts_with("left_")) partner = "right_" + name.substr(5);
        else if (name.starts_with("right_")) partner = "left_" + name.substr(6);
        if (partner.empty()) continue;
        const auto it = std::find(names.begin(), names.end(), partner);
        if (it != names.end()) flip[i] = static_cast<int>(it - names.begin());
    }
    return KeypointLayout(std::move(names), std::move(flip), std::move(skeleton));
}

const KeypointLayout& KeypointLayout::coco17() {
    static const KeypointLayout layout = KeypointLayout::from_names(
        {"nose", "left_eye", "right_eye", "left_ear", "right_ear", "left_shoulder",
         "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_hip",
         "right_hip", "left_knee", "right_knee", "left_ankle", "right_ankle"},
        {{15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6}, {5, 7},
         {6, 8}, {7, 9}, {8, 10}, {1, 2}, {0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6}});
    return layout;
}

std::size_t KeypointInstance::num_labeled() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        keypoints.begin(), keypoints.end(), [](const Keypoint& k) { return k.labeled(); }));
}

VisibilitySplit split_by_visibility(const std::vector<KeypointInstance>& instances) {
    VisibilitySplit out;
    out.visible_only = instances;
    out.invisible_only = instances;
    for (auto& inst : out.visible_only)
        for (auto& k : inst.keypoints)
            if (k.v == Visibility::invisible) k.v = Visibility::unlabeled;
    for (auto& inst : out.invisible_only)
        for (auto& k : inst.keypoints)
            if (k.v == Visibility::visible) k.v = Visibility::unlabeled;
    return out;
}

}  // namespace aid
