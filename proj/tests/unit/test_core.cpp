#include <gtest/gtest.h>

#include "aid/error.hpp"
#include "aid/image.hpp"
#include "aid/keypoints.hpp"
#include "aid/mask.hpp"
#include "aid/version.hpp"

using namespace aid;

TEST(Image, ConstructAndAccess) {
    ImageBuffer img(4, 3, 3, 7);
    EXPECT_EQ(img.data().size(), 36u);
    img.at(3, 2, 1) = 200;
    EXPECT_EQ(img.at(3, 2, 1), 200);
    EXPECT_EQ(img.data()[(2 * 4 + 3) * 3 + 1], 200);
}

TEST(Image, RejectsBadShapes) {
    EXPECT_THROW(ImageBuffer(4, 4, 2), InvalidArgument);
    EXPECT_THROW(ImageBuffer(-1, 4, 1), InvalidArgument);
    EXPECT_THROW(ImageBuffer(2, 2, 1, std::vector<std::uint8_t>(3)), InvalidArgument);
}

TEST(Image, ChannelMean) {
    ImageBuffer img(2, 1, 3, std::vector<std::uint8_t>{10, 20, 30, 30, 40, 50});
    const auto m = channel_mean(img);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_DOUBLE_EQ(m[0], 20.0);
    EXPECT_DOUBLE_EQ(m[1], 30.0);
    EXPECT_DOUBLE_EQ(m[2], 40.0);
}

TEST(Mask, DropRectClipsAndCounts) {
    BinaryMask m(10, 8);
    m.drop_rect(-3, -3, 2, 2);
    EXPECT_EQ(m.dropped_count(), 4u);
    m.drop_rect(8, 6, 20, 20);
    EXPECT_EQ(m.dropped_count(), 8u);
    EXPECT_TRUE(m.dropped(9, 7));
    EXPECT_FALSE(m.dropped(7, 7));
    EXPECT_DOUBLE_EQ(m.drop_fraction(), 8.0 / 80.0);
    m.drop_rect(5, 5, 5, 9);
    EXPECT_EQ(m.dropped_count(), 8u);
}

TEST(Keypoints, LayoutFromNamesPairsSides) {
    const auto layout = KeypointLayout::from_names({"nose", "left_eye", "right_eye", "left_ear", "right_ear"});
    EXPECT_EQ(layout.flip_index(), (std::vector<int>{0, 2, 1, 4, 3}));
}

TEST(Keypoints, LayoutRejectsNonInvolution) {
    EXPECT_THROW(KeypointLayout({"a", "b", "c"}, {1, 2, 0}), InvalidArgument);
    EXPECT_THROW(KeypointLayout({"a", "b"}, {0}), InvalidArgument);
}

TEST(Keypoints, Coco17Layout) {
    const auto& l = KeypointLayout::coco17();
    ASSERT_EQ(l.size(), 17u);
    EXPECT_EQ(l.names()[0], "nose");
    for (std::size_t i = 0; i < l.size(); ++i) EXPECT_EQ(l.flip_index()[l.flip_index()[i]], static_cast<int>(i));
    EXPECT_EQ(l.flip_index()[5], 6);
}

TEST(Keypoints, SplitByVisibilityDemotesAndKeeps) {
    KeypointInstance a;
    a.keypoints = {{1, 1, Visibility::visible}, {2, 2, Visibility::invisible}, {0, 0, Visibility::unlabeled}};
    KeypointInstance b;
    b.keypoints = {{1, 1, Visibility::visible}, {2, 2, Visibility::visible}, {3, 3, Visibility::visible}};
    const auto s = split_by_visibility({a, b});
    ASSERT_EQ(s.visible_only.size(), 2u);
    ASSERT_EQ(s.invisible_only.size(), 2u);
    EXPECT_EQ(s.visible_only[0].num_labeled(), 1u);
    EXPECT_EQ(s.invisible_only[0].num_labeled(), 1u);
    EXPECT_EQ(s.invisible_only[0].keypoints[1].v, Visibility::invisible);
    EXPECT_TRUE(s.invisible_only[1].zero_labeled());
    EXPECT_EQ(a.num_labeled(), 2u);
}

TEST(Version, MatchesSemver) {
    const auto v = version();
    EXPECT_FALSE(v.empty());
    EXPECT_EQ(std::count(v.begin(), v.end(), '.'), 2);
}
