#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aid/keypoints.hpp"

namespace aid {

struct ImageRecord {
    std::int64_t id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;

    bool operator==(const ImageRecord&) const = default;
};

struct Category {
    std::int64_t id = 1;
    std::string name = "person";
    std::string supercategory;
    KeypointLayout layout;

    bool operator==(const Category&) const = default;
};

/// COCO-keypoints style annotation file contents.
struct CocoDataset {
    std::vector<ImageRecord> images;
    std::vector<Category> categories;
    std::vector<KeypointInstance> annotations;

    const Category* find_category(std::int64_t id) const;
    const ImageRecord* find_image(std::int64_t id) const;
    std::vector<const KeypointInstance*> instances_of(std::int64_t image_id) const;

    bool operator==(const CocoDataset&) const = default;
};

CocoDataset parse_coco_annotations(std::string_view json_text);
CocoDataset load_coco_annotations(const std::filesystem::path& path);

std::string serialize_coco_annotations(const CocoDataset& dataset, int indent = -1);
void save_coco_annotations(const CocoDataset& dataset, const std::filesystem::path& path);

/// Results format: a JSON list of {image_id, category_id, keypoints, score}.
/// Boxes and areas are derived from the keypoint extent.
std::vector<KeypointInstance> parse_coco_results(std::string_view json_text);
std::vector<KeypointInstance> load_coco_results(const std::filesystem::path& path);
std::string serialize_coco_results(const std::vector<KeypointInstance>& detections);

/// Tight box around the keypoints (all of them, labeled or not).
BoundingBox keypoint_extent(const std::vector<Keypoint>& keypoints);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace aid
