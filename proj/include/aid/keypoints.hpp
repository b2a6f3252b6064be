#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aid {

/// COCO visibility flags.
enum class Visibility : int {
    unlabeled = 0,
    invisible = 1,  // labeled but occluded
    visible = 2,
};

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    Visibility v = Visibility::unlabeled;

    bool labeled() const noexcept { return v != Visibility::unlabeled; }
    bool operator==(const Keypoint&) const = default;
};

/// Axis-aligned box, continuous pixel units: [x, x + w] x [y, y + h].
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const BoundingBox&) const = default;
};

/// Named keypoint schema with the left/right permutation used by flips.
class KeypointLayout {
public:
    KeypointLayout() = default;
    /// `flip_index[i]` is the mirror partner of keypoint i (i itself for
    /// centre-line keypoints). Throws unless it is an involution.
    KeypointLayout(std::vector<std::string> names, std::vector<int> flip_index,
                   std::vector<std::pair<int, int>> skeleton = {});

    /// Pairs `left_*` with `right_*` names; everything else maps to itself.
    static KeypointLayout from_names(std::vector<std::string> names,
                                     std::vector<std::pair<int, int>> skeleton = {});
    static const KeypointLayout& coco17();

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<int>& flip_index() const noexcept { return flip_index_; }
    const std::vector<std::pair<int, int>>& skeleton() const noexcept { return skeleton_; }

    bool operator==(const KeypointLayout&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<int> flip_index_;
    std::vector<std::pair<int, int>> skeleton_;
};

/// One annotated (or detected) person.
struct KeypointInstance {
    std::int64_t id = 0;
    std::int64_t image_id = 0;
    std::int64_t category_id = 1;
    std::vector<Keypoint> keypoints;
    BoundingBox bbox;
    double area = 0.0;
    bool iscrowd = false;
    /// Present on detections only.
    std::optional<double> score;

    std::size_t num_labeled() const noexcept;
    bool zero_labeled() const noexcept { return num_labeled() == 0; }

    bool operator==(const KeypointInstance&) const = default;
};

struct VisibilitySplit {
    std::vector<KeypointInstance> visible_only;
    std::vector<KeypointInstance> invisible_only;
};

/// Demotes invisible keypoints to unlabeled for the visible-only set and
/// visible keypoints for the invisible-only set. Instances are kept in both
/// sets even if nothing labeled remains; inputs are not modified.
VisibilitySplit split_by_visibility(const std::vector<KeypointInstance>& instances);

}  // namespace aid
