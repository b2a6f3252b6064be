#include <gtest/gtest.h>

#include <filesystem>

#include "aid/coco.hpp"
#include "aid/error.hpp"

using namespace aid;

namespace {

const char* kSmall = R"({
  "images": [{"id": 3, "file_name": "a.png", "width": 64, "height": 48}],
  "categories": [{"id": 1, "name": "person", "keypoints": ["nose", "left_eye", "right_eye"],
                  "skeleton": [[1, 2], [1, 3]]}],
  "annotations": [
    {"id": 10, "image_id": 3, "category_id": 1, "keypoints": [10, 11, 2, 20, 21, 1, 0, 0, 0],
     "bbox": [5, 6, 30, 20], "area": 500.5, "iscrowd": 0},
    {"id": 11, "image_id": 3, "category_id": 1, "keypoints": [1, 2, 2, 3, 9, 2, 0, 0, 0]}
  ]
})";

}  // namespace

TEST(Coco, ParsesAnnotations) {
    const auto ds = parse_coco_annotations(kSmall);
    ASSERT_EQ(ds.images.size(), 1u);
    EXPECT_EQ(ds.images[0].width, 64);
    ASSERT_EQ(ds.categories.size(), 1u);
    EXPECT_EQ(ds.categories[0].layout.flip_index(), (std::vector<int>{0, 2, 1}));
    EXPECT_EQ(ds.categories[0].layout.skeleton().front(), (std::pair<int, int>{0, 1}));
    ASSERT_EQ(ds.annotations.size(), 2u);
    const auto& a = ds.annotations[0];
    EXPECT_EQ(a.keypoints[1].v, Visibility::invisible);
    EXPECT_DOUBLE_EQ(a.area, 500.5);
    EXPECT_EQ(ds.instances_of(3).size(), 2u);
    EXPECT_EQ(ds.find_image(3)->file_name, "a.png");
    EXPECT_EQ(ds.find_image(4), nullptr);
}

TEST(Coco, DerivesBoxAndAreaWhenAbsent) {
    const auto ds = parse_coco_annotations(kSmall);
    const auto& b = ds.annotations[1];
    EXPECT_DOUBLE_EQ(b.bbox.x, 1.0);
    EXPECT_DOUBLE_EQ(b.bbox.y, 2.0);
    EXPECT_DOUBLE_EQ(b.bbox.w, 2.0);
    EXPECT_DOUBLE_EQ(b.bbox.h, 7.0);
    EXPECT_DOUBLE_EQ(b.area, 14.0);
}

TEST(Coco, RoundTripIsLossless) {
    const auto ds = parse_coco_annotations(kSmall);
    const auto text = serialize_coco_annotations(ds);
    EXPECT_EQ(parse_coco_annotations(text), ds);
    EXPECT_EQ(serialize_coco_annotations(parse_coco_annotations(text)), text);
}

TEST(Coco, MalformedJsonReportsOffset) {
    try {
        parse_coco_annotations("{\"annotations\": [1, 2,,]}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_GT(e.offset(), 0u);
    }
}

TEST(Coco, MissingKeypointsNamesAnnotation) {
    try {
        parse_coco_annotations(R"({"annotations": [{"id": 7, "image_id": 1}]})");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("annotation 7"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("keypoints"), std::string::npos);
    }
}

TEST(Coco, RejectsBadTriplets) {
    EXPECT_THROW(parse_coco_annotations(R"({"annotations": [{"id": 1, "image_id": 1, "keypoints": [1, 2]}]})"),
                 SchemaError);
    EXPECT_THROW(parse_coco_annotations(R"({"annotations": [{"id": 1, "image_id": 1, "keypoints": [1, 2, 2],
                  "area": 0}]})"),
                 SchemaError);
    EXPECT_THROW(parse_coco_annotations("[]"), SchemaError);
}

TEST(Coco, ResultsRoundTrip) {
    const auto dts = parse_coco_results(
        R"([{"image_id": 3, "category_id": 1, "keypoints": [10, 11, 1, 30, 41, 1, 20, 21, 1], "score": 0.75}])");
    ASSERT_EQ(dts.size(), 1u);
    EXPECT_DOUBLE_EQ(*dts[0].score, 0.75);
    EXPECT_DOUBLE_EQ(dts[0].bbox.w, 20.0);
    EXPECT_DOUBLE_EQ(dts[0].area, 600.0);
    EXPECT_EQ(parse_coco_results(serialize_coco_results(dts)), dts);
    EXPECT_THROW(parse_coco_results(R"([{"image_id": 3, "keypoints": [1, 1, 1]}])"), SchemaError);
}

TEST(Coco, FileIoErrorsCarryPath) {
    try {
        load_coco_annotations("/nonexistent/dir/gt.json");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/gt.json"), std::string::npos);
    }
}
