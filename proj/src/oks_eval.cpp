#include "aid/oks_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "json.hpp"

#include "aid/error.hpp"

namespace aid {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Per-keypoint error term exp(-e_i) as in the COCO keypoint evaluator.
double oks_term(double dx, double dy, double k, double area) {
    const double e = (dx * dx + dy * dy) / (k * k) / (area + kEps) / 2.0;
    return std::exp(-e);
}

// Similarity used for matching. Ground truth without labeled keypoints
// falls back to the distance from a box twice the size of the gt box.
double match_similarity(const KeypointInstance& dt, const KeypointInstance& gt,
                        const OksSigmas& sigmas) {
    const std::size_t n = gt.keypoints.size();
    AID_CHECK(dt.keypoints.size() == n, "detection and ground truth keypoint counts differ");
    AID_CHECK(sigmas.k.size() == n, "OKS constants do not match the keypoint count");
    const std::size_t labeled = gt.num_labeled();
    double sum = 0.0;
    if (labeled > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& g = gt.keypoints[i];
            if (!g.labeled()) continue;
            sum += oks_term(dt.keypoints[i].x - g.x, dt.keypoints[i].y - g.y, sigmas.k[i], gt.area);
        }
        return sum / static_cast<double>(labeled);
    }
    const auto& bb = gt.bbox;
    const double x0 = bb.x - bb.w, x1 = bb.x + 2.0 * bb.w;
    const double y0 = bb.y - bb.h, y1 = bb.y + 2.0 * bb.h;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& d = dt.keypoints[i];
        const double dx = std::max(0.0, x0 - d.x) + std::max(0.0, d.x - x1);
        const double dy = std::max(0.0, y0 - d.y) + std::max(0.0, d.y - y1);
        sum += oks_term(dx, dy, sigmas.k[i], gt.area);
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

struct ImageEval {
    std::vector<double> dt_scores;                 // sorted, truncated to max_dets
    std::vector<std::vector<char>> dt_matched;     // [threshold][det]
    std::vector<std::vector<char>> dt_ignore;      // [threshold][det]
    std::vector<char> gt_ignore;
};

using Key = std::pair<std::int64_t, std::int64_t>;  // (image, category)

struct Grouped {
    std::map<Key, std::vector<const KeypointInstance*>> gt;
    std::map<Key, std::vector<const KeypointInstance*>> dt;
    std::vector<std::int64_t> images;
    std::vector<std::int64_t> categories;
};

Grouped group(const std::vector<KeypointInstance>& gt, const std::vector<KeypointInstance>& dt) {
    Grouped g;
    std::set<std::int64_t> images, cats;
    for (const auto& a : gt) {
        g.gt[{a.image_id, a.category_id}].push_back(&a);
        images.insert(a.image_id);
        cats.insert(a.category_id);
    }
    for (const auto& d : dt) {
        AID_CHECK(d.score.has_value(), "detections must carry a score");
        g.dt[{d.image_id, d.category_id}].push_back(&d);
        images.insert(d.image_id);
    }
    // Highest score first; equal scores keep input order.
    for (auto& [key, list] : g.dt)
        std::stable_sort(list.begin(), list.end(), [](const KeypointInstance* a, const KeypointInstance* b) {
            return *a->score > *b->score;
        });
    g.images.assign(images.begin(), images.end());
    g.categories.assign(cats.begin(), cats.end());
    return g;
}

std::optional<ImageEval> evaluate_image(const std::vector<const KeypointInstance*>& gts,
                                        const std::vector<const KeypointInstance*>& dts_sorted,
                                        const AreaRange& range, const EvalParams& p) {
    if (gts.empty() && dts_sorted.empty()) return std::nullopt;

    // Non-ignored ground truth first, stable.
    std::vector<const KeypointInstance*> gt = gts;
    auto ignored = [&](const KeypointInstance* g) {
        return g->iscrowd || g->num_labeled() == 0 || g->area < range.lo || g->area > range.hi;
    };
    std::stable_sort(gt.begin(), gt.end(), [&](const KeypointInstance* a, const KeypointInstance* b) {
        return !ignored(a) && ignored(b);
    });
    const std::size_t nd = std::min<std::size_t>(dts_sorted.size(), static_cast<std::size_t>(p.max_dets));
    const std::size_t ng = gt.size();
    const std::size_t nt = p.oks_thresholds.size();

    std::vector<std::vector<double>> sim(nd, std::vector<double>(ng));
    for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t j = 0; j < ng; ++j) sim[d][j] = match_similarity(*dts_sorted[d], *gt[j], p.sigmas);

    ImageEval ev;
    ev.gt_ignore.resize(ng);
    for (std::size_t j = 0; j < ng; ++j) ev.gt_ignore[j] = ignored(gt[j]) ? 1 : 0;
    ev.dt_scores.resize(nd);
    for (std::size_t d = 0; d < nd; ++d) ev.dt_scores[d] = *dts_sorted[d]->score;
    ev.dt_matched.assign(nt, std::vector<char>(nd, 0));
    ev.dt_ignore.assign(nt, std::vector<char>(nd, 0));

    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<char> gt_taken(ng, 0);
        for (std::size_t d = 0; d < nd; ++d) {
            double best = std::min(p.oks_thresholds[t], 1.0 - 1e-10);
            long m = -1;
            for (std::size_t j = 0; j < ng; ++j) {
                if (gt_taken[j] && !gt[j]->iscrowd) continue;
                // Once matched to a real gt, stop at the first ignored one.
                if (m > -1 && !ev.gt_ignore[m] && ev.gt_ignore[j]) break;
                if (sim[d][j] < best) continue;
                best = sim[d][j];
                m = static_cast<long>(j);
            }
            if (m == -1) continue;
            ev.dt_ignore[t][d] = ev.gt_ignore[m];
            ev.dt_matched[t][d] = 1;
            gt_taken[m] = 1;
        }
        for (std::size_t d = 0; d < nd; ++d) {
            const double a = dts_sorted[d]->area;
            if (!ev.dt_matched[t][d] && (a < range.lo || a > range.hi)) ev.dt_ignore[t][d] = 1;
        }
    }
    return ev;
}

struct Accumulated {
    // [threshold][recall threshold], -1 when undefined
    std::vector<std::vector<double>> precision;
    std::vector<double> recall;
};

Accumulated accumulate(const std::vector<ImageEval>& evals, const EvalParams& p) {
    const std::size_t nt = p.oks_thresholds.size();
    const std::size_t nr = p.recall_thresholds.size();
    Accumulated acc;
    acc.precision.assign(nt, std::vector<double>(nr, -1.0));
    acc.recall.assign(nt, -1.0);

    std::vector<double> scores;
    std::vector<std::pair<std::size_t, std::size_t>> origin;  // (eval, det)
    std::size_t npig = 0;
    for (std::size_t e = 0; e < evals.size(); ++e) {
        for (std::size_t d = 0; d < evals[e].dt_scores.size(); ++d) {
            scores.push_back(evals[e].dt_scores[d]);
            origin.emplace_back(e, d);
        }
        npig += static_cast<std::size_t>(std::count(evals[e].gt_ignore.begin(), evals[e].gt_ignore.end(), 0));
    }
    if (npig == 0) return acc;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<double> rc, pr;
        double tp = 0.0, fp = 0.0;
        for (std::size_t idx : order) {
            const auto [e, d] = origin[idx];
            if (evals[e].dt_ignore[t][d]) {
                // Ignored detections still occupy a position in the ranking
                // without changing the counts.
            } else if (evals[e].dt_matched[t][d]) {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            rc.push_back(tp / static_cast<double>(npig));
            pr.push_back(tp / (fp + tp + kEps));
        }
        acc.recall[t] = rc.empty() ? 0.0 : rc.back();
        for (std::size_t i = pr.size(); i-- > 1;)
            if (pr[i] > pr[i - 1]) pr[i - 1] = pr[i];
        for (std::size_t r = 0; r < nr; ++r) {
            const auto it = std::lower_bound(rc.begin(), rc.end(), p.recall_thresholds[r]);
            acc.precision[t][r] = it == rc.end() ? 0.0 : pr[static_cast<std::size_t>(it - rc.begin())];
        }
    }
    return acc;
}

std::optional<double> mean_defined(const std::vector<double>& values) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values)
        if (v > -1.0) {
            sum += v;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::size_t threshold_index(const EvalParams& p, double value) {
    for (std::size_t t = 0; t < p.oks_thresholds.size(); ++t)
        if (std::fabs(p.oks_thresholds[t] - value) < 1e-12) return t;
    throw InvalidArgument(fmt::format("OKS threshold {} is not evaluated", value));
}

}  // namespace

OksSigmas OksSigmas::coco17() {
    static constexpr double sigmas[17] = {.26, .25, .25, .35, .35, .79, .79, .72, .72,
                                          .62, .62, 1.07, 1.07, .87, .87, .89, .89};
    OksSigmas s;
    for (double v : sigmas) s.k.push_back(2.0 * v / 10.0);
    return s;
}

void validate(const OksSigmas& sigmas) {
    AID_CHECK(!sigmas.k.empty(), "OKS constants must not be empty");
    for (double k : sigmas.k) AID_CHECK(k > 0.0, "OKS constants must be positive");
}

std::optional<double> oks(const KeypointInstance& pred, const KeypointInstance& gt,
                          const OksSigmas& sigmas) {
    if (gt.num_labeled() == 0) return std::nullopt;
    return match_similarity(pred, gt, sigmas);
}

EvalParams EvalParams::coco() {
    EvalParams p;
    // Same construction as numpy.linspace so threshold values match bit for bit.
    const double oks_step = (0.95 - 0.5) / 9.0;
    for (int i = 0; i < 9; ++i) p.oks_thresholds.push_back(i * oks_step + 0.5);
    p.oks_thresholds.push_back(0.95);
    const double rec_step = 1.0 / 100.0;
    for (int i = 0; i < 100; ++i) p.recall_thresholds.push_back(i * rec_step);
    p.recall_thresholds.push_back(1.0);
    return p;
}

MetricsReport evaluate(const std::vector<KeypointInstance>& gt,
                       const std::vector<KeypointInstance>& dt, const EvalParams& params) {
    validate(params.sigmas);
    AID_CHECK(!params.oks_thresholds.empty() && !params.recall_thresholds.empty(),
              "evaluation thresholds must not be empty");
    AID_CHECK(params.max_dets >= 1, "max_dets must be >= 1");

    const Grouped g = group(gt, dt);
    const AreaRange ranges[3] = {params.area_all, params.area_medium, params.area_large};
    static const std::vector<const KeypointInstance*> empty;

    // [area][category] -> accumulated curves
    std::vector<std::vector<Accumulated>> acc(3);
    for (int a = 0; a < 3; ++a) {
        for (std::int64_t cat : g.categories) {
            std::vector<ImageEval> evals;
            for (std::int64_t img : g.images) {
                const auto gi = g.gt.find({img, cat});
                const auto di = g.dt.find({img, cat});
                auto ev = evaluate_image(gi == g.gt.end() ? empty : gi->second,
                                         di == g.dt.end() ? empty : di->second, ranges[a], params);
                if (ev) evals.push_back(std::move(*ev));
            }
            acc[a].push_back(accumulate(evals, params));
        }
    }

    auto ap = [&](int area, std::optional<std::size_t> t) {
        std::vector<double> values;
        for (const auto& c : acc[area])
            for (std::size_t ti = 0; ti < c.precision.size(); ++ti)
                if (!t || ti == *t) values.insert(values.end(), c.precision[ti].begin(), c.precision[ti].end());
        return mean_defined(values);
    };
    auto ar = [&](int area, std::optional<std::size_t> t) {
        std::vector<double> values;
        for (const auto& c : acc[area])
            for (std::size_t ti = 0; ti < c.recall.size(); ++ti)
                if (!t || ti == *t) values.push_back(c.recall[ti]);
        return mean_defined(values);
    };

    const auto t50 = threshold_index(params, 0.5);
    const auto t75 = threshold_index(params, 0.75);
    MetricsReport r;
    r.ap = ap(0, std::nullopt);
    r.ap50 = ap(0, t50);
    r.ap75 = ap(0, t75);
    r.ap_medium = ap(1, std::nullopt);
    r.ap_large = ap(2, std::nullopt);
    r.ar = ar(0, std::nullopt);
    r.ar50 = ar(0, t50);
    r.ar75 = ar(0, t75);
    r.ar_medium = ar(1, std::nullopt);
    r.ar_large = ar(2, std::nullopt);
    return r;
}

SplitMetrics evaluate_splits(const std::vector<KeypointInstance>& gt,
                             const std::vector<KeypointInstance>& dt, const EvalParams& params) {
    const VisibilitySplit split = split_by_visibility(gt);
    return {evaluate(split.visible_only, dt, params).ap, evaluate(split.invisible_only, dt, params).ap};
}

std::string report_to_json(const MetricsReport& r, int indent) {
    nlohmann::json doc = nlohmann::json::object();
    auto put = [&](const char* key, const std::optional<double>& v) {
        doc[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put("AP", r.ap);
    put("AP50", r.ap50);
    put("AP75", r.ap75);
    put("AP_M", r.ap_medium);
    put("AP_L", r.ap_large);
    put("AR", r.ar);
    put("AR50", r.ar50);
    put("AR75", r.ar75);
    put("AR_M", r.ar_medium);
    put("AR_L", r.ar_large);
    if (r.ap_vis || r.ap_invis) {
        put("AP_vis", r.ap_vis);
        put("AP_invis", r.ap_invis);
    }
    return doc.dump(indent);
}

std::string report_to_text(const MetricsReport& r) {
    auto fmt_value = [](const std::optional<double>& v) {
        return v ? fmt::format("{:.3f}", *v) : std::string("   -");
    };
    struct Row {
        const char* label;
        const char* iou;
        const char* area;
        const std::optional<double>* value;
    };
    const Row rows[] = {
        {"Average Precision  (AP)", "0.50:0.95", "   all", &r.ap},
        {"Average Precision  (AP)", "0.50     ", "   all", &r.ap50},
        {"Average Precision  (AP)", "0.75     ", "   all", &r.ap75},
        {"Average Precision  (AP)", "0.50:0.95", "medium", &r.ap_medium},
        {"Average Precision  (AP)", "0.50:0.95", " large", &r.ap_large},
        {"Average Recall     (AR)", "0.50:0.95", "   all", &r.ar},
        {"Average Recall     (AR)", "0.50     ", "   all", &r.ar50},
        {"Average Recall     (AR)", "0.75     ", "   all", &r.ar75},
        {"Average Recall     (AR)", "0.50:0.95", "medium", &r.ar_medium},
        {"Average Recall     (AR)", "0.50:0.95", " large", &r.ar_large},
    };
    std::string out;
    for (const auto& row : rows)
        out += fmt::format(" {} @[ OKS={} | area={} | maxDets= 20 ] = {}\n", row.label, row.iou,
                           row.area, fmt_value(*row.value));
    if (r.ap_vis || r.ap_invis) {
        out += fmt::format(" Average Precision  (AP) @[ visible keypoints only   ] = {}\n", fmt_value(r.ap_vis));
        out += fmt::format(" Average Precision  (AP) @[ invisible keypoints only ] = {}\n", fmt_value(r.ap_invis));
    }
    return out;
}

}  // namespace aid
