#include "aid/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "aid/coco.hpp"
#include "aid/error.hpp"
#include "aid/png_io.hpp"
#include "aid/targets.hpp"
#include "aid/version.hpp"
#include "json.hpp"

namespace aid::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_parent(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
}

void copy_bytes(const fs::path& from, const fs::path& to) {
    ensure_parent(to);
    std::error_code ec;
    fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy '" + from.string() + "' to '" + to.string() + "': " + ec.message());
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

OksSigmas sigmas_for(const CliConfig& cfg, std::size_t num_keypoints) {
    if (!cfg.oks_k.empty()) {
        OksSigmas s{cfg.oks_k};
        if (s.k.size() != num_keypoints)
            throw InvalidArgument(fmt::format("eval.oks_k has {} entries but the data has {} keypoints", s.k.size(),
                                              num_keypoints));
        return s;
    }
    if (num_keypoints == 17) return OksSigmas::coco17();
    throw InvalidArgument(fmt::format("no OKS constants for {} keypoints; set eval.oks_k in the config", num_keypoints));
}

}  // namespace

AugmentSummary cmd_augment(const CliConfig& cfg, const fs::path& annotations, const fs::path& images,
                           const fs::path& out_dir) {
    validate(cfg.aid);
    const auto dataset = load_coco_annotations(annotations);
    copy_bytes(annotations, out_dir / "annotations.json");

    std::vector<ImageBuffer> loaded;
    loaded.reserve(dataset.images.size());
    for (const auto& rec : dataset.images) loaded.push_back(read_png(images / rec.file_name));

    AidConfig aid = cfg.aid;
    if (aid.fill.mode == FillPolicy::Mode::dataset_mean && !loaded.empty()) aid.fill.values = dataset_mean(loaded);

    const Rng root = Rng(cfg.seed).fork("augment");
    AugmentSummary summary;
    ordered_json report;
    report["seed"] = cfg.seed;
    report["method"] = std::string(to_string(aid.method));
    report["samples"] = ordered_json::array();
    for (std::size_t i = 0; i < dataset.images.size(); ++i) {
        const auto& rec = dataset.images[i];
        const auto& img = loaded[i];
        Rng rng = root.fork(static_cast<std::uint64_t>(rec.id));
        const auto mask = sample_aid_mask(rng, img.width(), img.height(), aid);
        const fs::path dst = out_dir / "images" / rec.file_name;
        ordered_json entry;
        entry["image_id"] = rec.id;
        entry["file_name"] = rec.file_name;
        entry["masked"] = mask.has_value();
        entry["dropped_fraction"] = mask ? mask->drop_fraction() : 0.0;
        entry["annotations"] = ordered_json::array();
        if (mask) {
            ensure_parent(dst);
            write_png(dst, apply_mask(img, *mask, aid.fill));
            fs::path mask_path = out_dir / "masks" / rec.file_name;
            mask_path.replace_extension(".png");
            ensure_parent(mask_path);
            write_mask_png(mask_path, *mask);
            ++summary.masked;
        } else {
            copy_bytes(images / rec.file_name, dst);
        }
        for (const auto* inst : dataset.instances_of(rec.id)) {
            ordered_json a;
            a["id"] = inst->id;
            a["keypoints_dropped"] = mask ? keypoints_dropped(*inst, *mask)
                                          : std::vector<bool>(inst->keypoints.size(), false);
            entry["annotations"].push_back(std::move(a));
        }
        report["samples"].push_back(std::move(entry));
        ++summary.samples;
    }
    write_text_file(out_dir / "keypoints_dropped.json", report.dump(2) + "\n");
    return summary;
}

std::vector<synth::CalibrationResult> cmd_calibrate(const CliConfig& cfg, const std::vector<DropMethod>& methods) {
    if (methods.empty()) throw UsageError("calibrate needs at least one method");
    std::vector<AidConfig> configs;
    for (const auto m : methods) {
        AidConfig c = cfg.aid;
        c.method = m;
        configs.push_back(c);
    }
    synth::ProbeOptions probe_opts = cfg.probe;
    probe_opts.shape.input_width = probe_opts.figure.image_width;
    probe_opts.shape.input_height = probe_opts.figure.image_height;
    const synth::LossProbe probe(probe_opts);
    return synth::calibrate(configs, probe);
}

std::string calibration_to_json(const std::vector<synth::CalibrationResult>& results) {
    ordered_json out = ordered_json::array();
    for (const auto& r : results) {
        ordered_json j;
        j["method"] = std::string(to_string(r.config.method));
        j["knob"] = r.knob;
        j["loss"] = r.loss;
        j["reference_loss"] = r.reference_loss;
        j["relative_gap"] = r.loss / r.reference_loss - 1.0;
        j["reached"] = r.reached;
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

std::string calibration_to_yaml(const std::vector<synth::CalibrationResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += "---\n";
        out += aid_config_to_yaml(r.config);
    }
    return out;
}

int cmd_targets(const CliConfig& cfg, const fs::path& annotations, const fs::path& out_dir) {
    const auto dataset = load_coco_annotations(annotations);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir.string() + "': " + ec.message());
    int written = 0;
    for (const auto& inst : dataset.annotations) {
        const auto* rec = dataset.find_image(inst.image_id);
        if (!rec)
            throw SchemaError(fmt::format("annotation {} refers to unknown image {}", inst.id, inst.image_id));
        const int w = static_cast<int>(std::ceil(rec->width / cfg.targets.stride));
        const int h = static_cast<int>(std::ceil(rec->height / cfg.targets.stride));
        const auto stack = render_heatmaps(inst, h, w, cfg.targets.stride, cfg.targets.sigma);
        write_heatmap_file(out_dir / fmt::format("{}.heatmap", inst.id), stack);
        ++written;
    }
    return written;
}

EvalSplit parse_eval_split(std::string_view text) {
    if (text == "all") return EvalSplit::all;
    if (text == "vis") return EvalSplit::vis;
    if (text == "invis") return EvalSplit::invis;
    if (text == "both") return EvalSplit::both;
    throw UsageError("unknown split '" + std::string(text) + "' (expected all, vis, invis or both)");
}

MetricsReport cmd_eval(const CliConfig& cfg, const fs::path& gt_path, const fs::path& dt_path, EvalSplit split) {
    const auto gt = load_coco_annotations(gt_path);
    const auto dt = load_coco_results(dt_path);
    std::size_t k = 0;
    if (!gt.categories.empty()) k = gt.categories.front().layout.size();
    if (k == 0 && !gt.annotations.empty()) k = gt.annotations.front().keypoints.size();
    EvalParams params = EvalParams::coco();
    params.sigmas = sigmas_for(cfg, k);

    if (split == EvalSplit::vis || split == EvalSplit::invis) {
        const auto parts = split_by_visibility(gt.annotations);
        MetricsReport r = evaluate(split == EvalSplit::vis ? parts.visible_only : parts.invisible_only, dt, params);
        (split == EvalSplit::vis ? r.ap_vis : r.ap_invis) = r.ap;
        return r;
    }
    MetricsReport r = evaluate(gt.annotations, dt, params);
    if (split == EvalSplit::both) {
        const auto s = evaluate_splits(gt.annotations, dt, params);
        r.ap_vis = s.ap_vis;
        r.ap_invis = s.ap_invis;
    }
    return r;
}

std::string cmd_plan(ScheduleName name, AidMode mode, ScheduleScale scale) {
    return schedule_to_json(build_schedule(name, mode, scale)) + "\n";
}

std::vector<synth::BenchRun> cmd_bench(const CliConfig& cfg, const std::vector<ExperimentId>& ids,
                                       const std::vector<std::uint64_t>& seeds) {
    if (ids.empty()) throw UsageError("bench needs at least one experiment id");
    if (seeds.empty()) throw UsageError("bench needs at least one seed");
    return synth::run_bench(ids, seeds, cfg.bench);
}

ImageBuffer cmd_preview(const CliConfig& cfg, const ImageBuffer& image) {
    constexpr int kGap = 4;
    const DropMethod methods[] = {DropMethod::cutout, DropMethod::random_erase, DropMethod::has, DropMethod::gridmask};
    AidConfig base = cfg.aid;
    base.apply_prob = 1.0;
    if (base.fill.mode == FillPolicy::Mode::dataset_mean) base.fill = FillPolicy::per_image_mean();

    std::vector<ImageBuffer> panels{image};
    const Rng root = Rng(cfg.seed).fork("preview");
    for (const auto m : methods) {
        AidConfig c = base;
        c.method = m;
        Rng rng = root.fork(to_string(m));
        const auto mask = sample_aid_mask(rng, image.width(), image.height(), c);
        panels.push_back(mask ? apply_mask(image, *mask, c.fill) : image);
    }
    const int n = static_cast<int>(panels.size());
    ImageBuffer out(n * image.width() + (n - 1) * kGap, image.height(), image.channels(), 255);
    for (int p = 0; p < n; ++p)
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x)
                for (int c = 0; c < image.channels(); ++c)
                    out.at(p * (image.width() + kGap) + x, y, c) = panels[p].at(x, y, c);
    return out;
}

void cmd_synth(const CliConfig& cfg, int count, double occlusion_rate, const fs::path& out_dir) {
    const auto& figure = cfg.bench.figure;
    const Rng root(cfg.seed);
    Rng data_rng = root.fork("data");
    const auto samples = synth::generate_dataset(data_rng, count, figure);
    Rng occ_rng = root.fork("occlude");
    const auto occluded = synth::occlude_test_set(occ_rng, samples, occlusion_rate, figure);

    CocoDataset ds;
    Category cat;
    cat.id = 1;
    cat.name = "stick_figure";
    cat.supercategory = "synthetic";
    cat.layout = synth::stick_figure_layout();
    ds.categories.push_back(cat);
    for (const auto& s : occluded) {
        const auto id = s.instance.image_id;
        const std::string name = fmt::format("{:06d}.png", id);
        ds.images.push_back({id, name, s.image.width(), s.image.height()});
        KeypointInstance inst = s.instance;
        for (std::size_t k = 0; k < inst.keypoints.size(); ++k)
            if (s.occluded[k]) inst.keypoints[k].v = Visibility::invisible;
        ds.annotations.push_back(std::move(inst));
        ensure_parent(out_dir / "images" / name);
        write_png(out_dir / "images" / name, s.image);
    }
    save_coco_annotations(ds, out_dir / "annotations.json");
}

namespace {

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    err << j.dump() << "\n";
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(parse(item));
    return out;
}

std::uint64_t parse_seed(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("seed '" + text + "' is not a non-negative integer");
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Keypoint augmentation by information dropping: masks, targets, schedules, evaluation"};
    app.name("aid");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(version()));

    std::string config_path;
    std::string seed_text;
    app.add_option("-c,--config", config_path, "YAML config file (flags override its values)");
    app.add_option("--seed", seed_text, "Seed for every random stream");

    std::string method, fill_mode;
    double apply_prob = -1.0;
    auto add_aid_flags = [&](CLI::App* sub) {
        sub->add_option("--method", method, "none, cutout, random-erase, has or gridmask");
        sub->add_option("--apply-prob", apply_prob, "Probability of masking a sample");
        sub->add_option("--fill", fill_mode, "constant, dataset-mean or per-image-mean");
    };

    std::string annotations, images, out_dir;
    auto* augment = app.add_subcommand("augment", "Mask every image of a COCO keypoint dataset");
    augment->add_option("--annotations", annotations, "COCO keypoint annotation file");
    augment->add_option("--images", images, "Directory holding the image files");
    augment->add_option("--out", out_dir, "Output directory")->required();
    add_aid_flags(augment);

    std::string methods_text = "cutout,random-erase,has,gridmask";
    std::string calib_out;
    auto* calibrate = app.add_subcommand("calibrate", "Match the probe loss of several masking methods");
    calibrate->add_option("--methods", methods_text, "Comma-separated methods; the first is the reference");
    calibrate->add_option("--out", calib_out, "Write the adjusted configs here as YAML documents");

    double stride = -1.0, sigma = -1.0;
    auto* targets = app.add_subcommand("targets", "Render heatmap targets for every annotation");
    targets->add_option("--annotations", annotations, "COCO keypoint annotation file");
    targets->add_option("--out", out_dir, "Output directory")->required();
    targets->add_option("--stride", stride, "Input pixels per heatmap cell");
    targets->add_option("--sigma", sigma, "Gaussian sigma in heatmap cells");

    std::string gt_path, dt_path, split_text = "both", json_out;
    auto* eval = app.add_subcommand("eval", "OKS-based AP/AR of detections against ground truth");
    eval->add_option("--gt", gt_path, "COCO keypoint annotation file")->required();
    eval->add_option("--dt", dt_path, "COCO results file")->required();
    eval->add_option("--split", split_text, "all, vis, invis or both");
    eval->add_option("--json", json_out, "Also write the report as JSON here");

    std::string schedule_text, aid_mode_text, scale_text;
    auto* plan = app.add_subcommand("plan", "Print a training schedule as JSON");
    plan->add_option("schedule", schedule_text, "S1, S2 or S3");
    plan->add_option("aid", aid_mode_text, "off, on or off-then-on");
    plan->add_option("--scale", scale_text, "full or toy");

    std::string ids_text = "E1,E2,E3,E4,E5", seeds_text, csv_out = "bench.csv", svg_out = "bench.svg";
    int num_seeds = -1;
    auto* bench = app.add_subcommand("bench", "Train the synthetic benchmark and write loss/PCK curves");
    bench->add_option("--experiments", ids_text, "Comma-separated experiment ids (E1..E5)");
    auto* seeds_opt = bench->add_option("--seeds", seeds_text, "Comma-separated seeds");
    bench->add_option("--num-seeds", num_seeds, "Use seeds 1..N")->excludes(seeds_opt);
    bench->add_option("--csv", csv_out, "CSV output path");
    bench->add_option("--svg", svg_out, "SVG output path");

    std::string image_path, preview_out;
    auto* preview = app.add_subcommand("preview", "Side-by-side panels of each masking method on one image");
    preview->add_option("--image", image_path, "Input PNG (default: a synthetic stick figure)");
    preview->add_option("--out", preview_out, "Output PNG")->required();
    add_aid_flags(preview);

    int synth_count = 64;
    double synth_occlusion = 0.0;
    auto* synth = app.add_subcommand("synth", "Write a stick-figure dataset (PNG + COCO annotations)");
    synth->add_option("--count", synth_count, "Number of images");
    synth->add_option("--occlusion-rate", synth_occlusion, "Fraction of keypoints covered by an occluder");
    synth->add_option("--out", out_dir, "Output directory")->required();

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        return 2;
    }

    try {
        CliConfig cfg = config_path.empty() ? CliConfig{} : load_config(config_path);
        if (!seed_text.empty()) cfg.seed = parse_seed(seed_text);
        if (!method.empty()) cfg.aid.method = parse_drop_method(method);
        if (apply_prob >= 0.0) cfg.aid.apply_prob = apply_prob;
        if (!fill_mode.empty()) cfg.aid.fill.mode = parse_fill_mode(fill_mode);
        if (stride > 0.0) cfg.targets.stride = stride;
        if (sigma > 0.0) cfg.targets.sigma = sigma;
        if (!annotations.empty()) cfg.annotations = annotations;
        if (!images.empty()) cfg.images = images;
        validate(cfg);

        if (*augment) {
            if (cfg.annotations.empty()) throw UsageError("augment needs --annotations or data.annotations");
            fs::path img_dir = cfg.images;
            if (img_dir.empty()) {
                const fs::path base = fs::path(cfg.annotations).parent_path();
                img_dir = fs::is_directory(base / "images") ? base / "images" : base;
            }
            const auto s = cmd_augment(cfg, cfg.annotations, img_dir, out_dir);
            out << fmt::format("{} samples, {} masked\n", s.samples, s.masked);
        } else if (*calibrate) {
            const auto methods = parse_list<DropMethod>(methods_text, parse_drop_method);
            const auto results = cmd_calibrate(cfg, methods);
            out << calibration_to_json(results);
            if (!calib_out.empty()) write_text_file(calib_out, calibration_to_yaml(results));
            for (const auto& r : results)
                if (!r.reached)
                    err << fmt::format("warning: {} cannot match the reference loss; nearest knob {} gives {:+.2f}%\n",
                                       to_string(r.config.method), r.knob, 100.0 * (r.loss / r.reference_loss - 1.0));
        } else if (*targets) {
            if (cfg.annotations.empty()) throw UsageError("targets needs --annotations or data.annotations");
            out << fmt::format("{} heatmap files written\n", cmd_targets(cfg, cfg.annotations, out_dir));
        } else if (*eval) {
            const auto report = cmd_eval(cfg, gt_path, dt_path, parse_eval_split(split_text));
            out << report_to_text(report);
            if (!json_out.empty()) write_text_file(json_out, report_to_json(report) + "\n");
        } else if (*plan) {
            const auto name = schedule_text.empty() ? cfg.schedule : parse_schedule_name(schedule_text);
            const auto mode = aid_mode_text.empty() ? cfg.aid_mode : parse_aid_mode(aid_mode_text);
            const auto scale = scale_text.empty() ? cfg.schedule_scale : parse_schedule_scale(scale_text);
            out << cmd_plan(name, mode, scale);
        } else if (*bench) {
            const auto ids = parse_list<ExperimentId>(ids_text, parse_experiment_id);
            std::vector<std::uint64_t> seeds;
            if (num_seeds >= 0)
                for (int s = 1; s <= num_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
            else
                seeds = parse_list<std::uint64_t>(seeds_text, parse_seed);
            const auto runs = cmd_bench(cfg, ids, seeds);
            write_text_file(csv_out, synth::curves_to_csv(runs));
            write_text_file(svg_out, synth::curves_to_svg(runs));
            for (const auto& r : runs)
                out << fmt::format("{} seed {}: final loss {:.5f}, PCK {:.3f}, occluded PCK {:.3f}\n", to_string(r.id),
                                   r.seed, r.curves.train_loss.back(), r.curves.pck.back(),
                                   r.curves.pck_occluded.back());
        } else if (*preview) {
            ImageBuffer img;
            if (image_path.empty()) {
                Rng rng = Rng(cfg.seed).fork("preview-figure");
                img = synth::generate_dataset(rng, 1, cfg.bench.figure).front().image;
            } else {
                img = read_png(image_path);
            }
            write_png(preview_out, cmd_preview(cfg, img));
        } else if (*synth) {
            cmd_synth(cfg, synth_count, synth_occlusion, out_dir);
        }
        return 0;
    } catch (const UsageError& e) {
        print_error(err, e.kind(), e.what());
        return 2;
    } catch (const Error& e) {
        print_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return 1;
    }
}

}  // namespace aid::cli
