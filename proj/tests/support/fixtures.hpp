#pragma once

#include <cmath>
#include <vector>

#include "aid/keypoints.hpp"
#include "aid/rng.hpp"

namespace fixture {

struct EvalFixture {
    std::vector<aid::KeypointInstance> gt;
    std::vector<aid::KeypointInstance> dt;
};

// Random COCO-style keypoint fixture: up to 5 images with up to 5 people
// each, mixed visibilities, some crowd and zero-labeled people, detections
// that are noisy copies plus false positives, and deliberately tied scores.
inline EvalFixture random_eval_fixture(aid::Rng& rng, int num_keypoints = 17) {
    EvalFixture f;
    const int images = static_cast<int>(rng.uniform_int(1, 5));
    std::int64_t next_id = 1;
    for (int img = 1; img <= images; ++img) {
        const int people = static_cast<int>(rng.uniform_int(0, 5));
        for (int p = 0; p < people; ++p) {
            aid::KeypointInstance g;
            g.id = next_id++;
            g.image_id = img;
            const double side = rng.uniform(20.0, 160.0);
            const double x0 = rng.uniform(0.0, 400.0), y0 = rng.uniform(0.0, 400.0);
            g.bbox = {x0, y0, side, side * rng.uniform(0.6, 1.6)};
            g.area = g.bbox.w * g.bbox.h * rng.uniform(0.5, 0.9);
            g.iscrowd = rng.bernoulli(0.08);
            const bool empty = rng.bernoulli(0.1);
            for (int k = 0; k < num_keypoints; ++k) {
                aid::Keypoint kp{x0 + rng.uniform(0.0, g.bbox.w), y0 + rng.uniform(0.0, g.bbox.h), aid::Visibility::unlabeled};
                if (!empty) {
                    const double u = rng.uniform();
                    kp.v = u < 0.2 ? aid::Visibility::unlabeled
                                   : (u < 0.45 ? aid::Visibility::invisible : aid::Visibility::visible);
                }
                if (kp.v == aid::Visibility::unlabeled) kp.x = kp.y = 0.0;
                g.keypoints.push_back(kp);
            }
            f.gt.push_back(g);

            const int copies = static_cast<int>(rng.uniform_int(0, 2));
            for (int c = 0; c < copies; ++c) {
                aid::KeypointInstance d;
                d.image_id = img;
                const double noise = rng.uniform(0.0, 0.12) * std::sqrt(g.area);
                for (int k = 0; k < num_keypoints; ++k) {
                    const auto& src = g.keypoints[k];
                    const double bx = src.labeled() ? src.x : x0 + rng.uniform(0.0, g.bbox.w);
                    const double by = src.labeled() ? src.y : y0 + rng.uniform(0.0, g.bbox.h);
                    d.keypoints.push_back({bx + rng.normal(0.0, noise), by + rng.normal(0.0, noise), aid::Visibility::visible});
                }
                d.score = std::round(rng.uniform() * 10.0) / 10.0;
                f.dt.push_back(d);
            }
        }
        const int false_pos = static_cast<int>(rng.uniform_int(0, 2));
        for (int q = 0; q < false_pos; ++q) {
            aid::KeypointInstance d;
            d.image_id = img;
            const double x0 = rng.uniform(0.0, 400.0), y0 = rng.uniform(0.0, 400.0);
            const double side = rng.uniform(20.0, 160.0);
            for (int k = 0; k < num_keypoints; ++k)
                d.keypoints.push_back({x0 + rng.uniform(0.0, side), y0 + rng.uniform(0.0, side), aid::Visibility::visible});
            d.score = std::round(rng.uniform() * 10.0) / 10.0;
            f.dt.push_back(d);
        }
    }
    // Detection boxes and areas come from the keypoint extent, as for result files.
    for (auto& d : f.dt) {
        double lx = 1e18, ly = 1e18, hx = -1e18, hy = -1e18;
        for (const auto& k : d.keypoints) {
            lx = std::min(lx, k.x);
            ly = std::min(ly, k.y);
            hx = std::max(hx, k.x);
            hy = std::max(hy, k.y);
        }
        d.bbox = {lx, ly, hx - lx, hy - ly};
        d.area = d.bbox.w * d.bbox.h;
    }
    return f;
}

// A random person with every keypoint inside a w x h image.
inline aid::KeypointInstance random_instance(aid::Rng& rng, int w, int h, int num_keypoints) {
    aid::KeypointInstance inst;
    inst.id = 1;
    inst.image_id = 1;
    for (int k = 0; k < num_keypoints; ++k) {
        const double u = rng.uniform();
        const auto v = u < 0.15 ? aid::Visibility::unlabeled
                                : (u < 0.4 ? aid::Visibility::invisible : aid::Visibility::visible);
        inst.keypoints.push_back({rng.uniform(0.0, w - 1.0), rng.uniform(0.0, h - 1.0), v});
    }
    inst.bbox = {rng.uniform(0.0, w / 2.0), rng.uniform(0.0, h / 2.0), rng.uniform(4.0, w / 2.0), rng.uniform(4.0, h / 2.0)};
    inst.area = inst.bbox.w * inst.bbox.h;
    return inst;
}

}  // namespace fixture
