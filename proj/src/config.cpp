#include "aid/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <initializer_list>
#include <set>

#include "aid/coco.hpp"
#include "aid/error.hpp"
#include "aid/oks_eval.hpp"

namespace aid {
namespace {

class Reader {
public:
    Reader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw SchemaError(label() + " must be a mapping");
    }

    void allow(std::initializer_list<std::string_view> keys) const {
        if (!node_ || node_.IsNull()) return;
        const std::set<std::string_view> allowed(keys);
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw SchemaError("unknown config key '" + join(key) + "'");
        }
    }

    template <typename T>
    void get(std::string_view key, T& out) const {
        const auto child = lookup(key);
        if (!child || child.IsNull()) return;
        try {
            out = child.template as<T>();
        } catch (const YAML::Exception&) {
            throw SchemaError("config key '" + join(key) + "' has the wrong type");
        }
    }

    template <typename Enum, typename Parse>
    void get_enum(std::string_view key, Enum& out, Parse parse) const {
        std::string text;
        get(key, text);
        if (text.empty()) return;
        try {
            out = parse(text);
        } catch (const InvalidArgument& e) {
            throw SchemaError("config key '" + join(key) + "': " + e.what());
        }
    }

    Reader child(std::string_view key) const { return Reader(lookup(key), join(key)); }

private:
    YAML::Node lookup(std::string_view key) const {
        if (!node_ || node_.IsNull()) return YAML::Node();
        const auto c = node_[std::string(key)];
        return c && !c.IsNull() ? c : YAML::Node();
    }
    std::string join(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
    std::string label() const { return path_.empty() ? "config document" : "config key '" + path_ + "'"; }

    YAML::Node node_;
    std::string path_;
};

void read_aid(const Reader& r, AidConfig& a) {
    r.allow({"method", "apply_prob", "fill", "cutout", "random_erase", "has", "gridmask"});
    r.get_enum("method", a.method, parse_drop_method);
    r.get("apply_prob", a.apply_prob);
    const auto f = r.child("fill");
    f.allow({"mode", "values"});
    f.get_enum("mode", a.fill.mode, parse_fill_mode);
    f.get("values", a.fill.values);
    const auto c = r.child("cutout");
    c.allow({"num_holes", "hole_w", "hole_h"});
    c.get("num_holes", a.cutout.num_holes);
    c.get("hole_w", a.cutout.hole_w);
    c.get("hole_h", a.cutout.hole_h);
    const auto e = r.child("random_erase");
    e.allow({"area_min", "area_max", "aspect_min", "aspect_max", "max_attempts"});
    e.get("area_min", a.random_erase.area_min);
    e.get("area_max", a.random_erase.area_max);
    e.get("aspect_min", a.random_erase.aspect_min);
    e.get("aspect_max", a.random_erase.aspect_max);
    e.get("max_attempts", a.random_erase.max_attempts);
    const auto h = r.child("has");
    h.allow({"grid_rows", "grid_cols", "drop_prob"});
    h.get("grid_rows", a.has.grid_rows);
    h.get("grid_cols", a.has.grid_cols);
    h.get("drop_prob", a.has.drop_prob);
    const auto g = r.child("gridmask");
    g.allow({"period_min", "period_max", "ratio", "rotate_max_deg"});
    g.get("period_min", a.gridmask.period_min);
    g.get("period_max", a.gridmask.period_max);
    g.get("ratio", a.gridmask.ratio);
    g.get("rotate_max_deg", a.gridmask.rotate_max_deg);
}

void read_geometry(const Reader& r, GeomConfig& g) {
    r.allow({"flip_prob", "scale_min", "scale_max", "rotation_max_deg", "output_width", "output_height",
             "aid_order", "mode"});
    r.get("flip_prob", g.flip_prob);
    r.get("scale_min", g.scale_min);
    r.get("scale_max", g.scale_max);
    r.get("rotation_max_deg", g.rotation_max_deg);
    r.get("output_width", g.output_width);
    r.get("output_height", g.output_height);
    r.get_enum("aid_order", g.aid_order, parse_aid_order);
    r.get_enum("mode", g.mode, parse_crop_mode);
}

// Shortest text that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }

std::vector<std::string> nums(const std::vector<double>& v) {
    std::vector<std::string> out;
    for (double x : v) out.push_back(num(x));
    return out;
}

void emit_aid(YAML::Emitter& y, const AidConfig& a) {
    y << YAML::BeginMap;
    y << YAML::Key << "method" << YAML::Value << std::string(to_string(a.method));
    y << YAML::Key << "apply_prob" << YAML::Value << num(a.apply_prob);
    y << YAML::Key << "fill" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "mode" << YAML::Value << std::string(to_string(a.fill.mode));
    y << YAML::Key << "values" << YAML::Value << YAML::Flow << nums(a.fill.values);
    y << YAML::EndMap;
    y << YAML::Key << "cutout" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "num_holes" << YAML::Value << a.cutout.num_holes;
    y << YAML::Key << "hole_w" << YAML::Value << a.cutout.hole_w;
    y << YAML::Key << "hole_h" << YAML::Value << a.cutout.hole_h;
    y << YAML::EndMap;
    y << YAML::Key << "random_erase" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "area_min" << YAML::Value << num(a.random_erase.area_min);
    y << YAML::Key << "area_max" << YAML::Value << num(a.random_erase.area_max);
    y << YAML::Key << "aspect_min" << YAML::Value << num(a.random_erase.aspect_min);
    y << YAML::Key << "aspect_max" << YAML::Value << num(a.random_erase.aspect_max);
    y << YAML::Key << "max_attempts" << YAML::Value << a.random_erase.max_attempts;
    y << YAML::EndMap;
    y << YAML::Key << "has" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "grid_rows" << YAML::Value << a.has.grid_rows;
    y << YAML::Key << "grid_cols" << YAML::Value << a.has.grid_cols;
    y << YAML::Key << "drop_prob" << YAML::Value << num(a.has.drop_prob);
    y << YAML::EndMap;
    y << YAML::Key << "gridmask" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "period_min" << YAML::Value << a.gridmask.period_min;
    y << YAML::Key << "period_max" << YAML::Value << a.gridmask.period_max;
    y << YAML::Key << "ratio" << YAML::Value << num(a.gridmask.ratio);
    y << YAML::Key << "rotate_max_deg" << YAML::Value << num(a.gridmask.rotate_max_deg);
    y << YAML::EndMap;
    y << YAML::EndMap;
}

void emit_geometry(YAML::Emitter& y, const GeomConfig& g) {
    y << YAML::BeginMap;
    y << YAML::Key << "flip_prob" << YAML::Value << num(g.flip_prob);
    y << YAML::Key << "scale_min" << YAML::Value << num(g.scale_min);
    y << YAML::Key << "scale_max" << YAML::Value << num(g.scale_max);
    y << YAML::Key << "rotation_max_deg" << YAML::Value << num(g.rotation_max_deg);
    y << YAML::Key << "output_width" << YAML::Value << g.output_width;
    y << YAML::Key << "output_height" << YAML::Value << g.output_height;
    y << YAML::Key << "aid_order" << YAML::Value << std::string(to_string(g.aid_order));
    y << YAML::Key << "mode" << YAML::Value << std::string(to_string(g.mode));
    y << YAML::EndMap;
}

}  // namespace

CliConfig parse_config(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(std::string("config is not valid YAML: ") + e.what(),
                         static_cast<std::size_t>(e.mark.pos < 0 ? 0 : e.mark.pos));
    }
    CliConfig cfg;
    const Reader r(root, "");
    r.allow({"seed", "aid", "geometry", "targets", "schedule", "data", "eval", "bench", "probe"});
    r.get("seed", cfg.seed);
    read_aid(r.child("aid"), cfg.aid);
    read_geometry(r.child("geometry"), cfg.geometry);

    const auto t = r.child("targets");
    t.allow({"stride", "sigma"});
    t.get("stride", cfg.targets.stride);
    t.get("sigma", cfg.targets.sigma);

    const auto s = r.child("schedule");
    s.allow({"name", "aid_mode", "scale"});
    s.get_enum("name", cfg.schedule, parse_schedule_name);
    s.get_enum("aid_mode", cfg.aid_mode, parse_aid_mode);
    s.get_enum("scale", cfg.schedule_scale, parse_schedule_scale);

    const auto d = r.child("data");
    d.allow({"annotations", "images"});
    d.get("annotations", cfg.annotations);
    d.get("images", cfg.images);

    const auto e = r.child("eval");
    e.allow({"oks_k"});
    e.get("oks_k", cfg.oks_k);

    const auto b = r.child("bench");
    b.allow({"train_size", "test_size", "occlusion_rate", "scale", "aid", "batch_size", "base_lr", "momentum",
             "sigma", "pck_threshold"});
    b.get("train_size", cfg.bench.train_size);
    b.get("test_size", cfg.bench.test_size);
    b.get("occlusion_rate", cfg.bench.occlusion_rate);
    b.get_enum("scale", cfg.bench.scale, parse_schedule_scale);
    read_aid(b.child("aid"), cfg.bench.aid);
    b.get("batch_size", cfg.bench.train.batch_size);
    b.get("base_lr", cfg.bench.train.base_lr);
    b.get("momentum", cfg.bench.train.momentum);
    b.get("sigma", cfg.bench.train.sigma);
    b.get("pck_threshold", cfg.bench.train.pck_threshold);

    const auto p = r.child("probe");
    p.allow({"seed", "probe_size", "warmup_epochs", "base_lr", "batch_size", "tolerance", "max_iterations"});
    p.get("seed", cfg.probe.seed);
    p.get("probe_size", cfg.probe.probe_size);
    p.get("warmup_epochs", cfg.probe.warmup_epochs);
    p.get("base_lr", cfg.probe.base_lr);
    p.get("batch_size", cfg.probe.batch_size);
    p.get("tolerance", cfg.probe.tolerance);
    p.get("max_iterations", cfg.probe.max_iterations);

    try {
        validate(cfg);
    } catch (const InvalidArgument& ex) {
        throw SchemaError(std::string("invalid config: ") + ex.what());
    }
    return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

std::string aid_config_to_yaml(const AidConfig& aid) {
    YAML::Emitter y;
    emit_aid(y, aid);
    return std::string(y.c_str()) + "\n";
}

std::string config_to_yaml(const CliConfig& c) {
    YAML::Emitter y;
    y << YAML::BeginMap;
    y << YAML::Key << "seed" << YAML::Value << c.seed;
    y << YAML::Key << "aid" << YAML::Value;
    emit_aid(y, c.aid);
    y << YAML::Key << "geometry" << YAML::Value;
    emit_geometry(y, c.geometry);
    y << YAML::Key << "targets" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "stride" << YAML::Value << num(c.targets.stride);
    y << YAML::Key << "sigma" << YAML::Value << num(c.targets.sigma);
    y << YAML::EndMap;
    y << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "name" << YAML::Value << std::string(to_string(c.schedule));
    y << YAML::Key << "aid_mode" << YAML::Value << std::string(to_string(c.aid_mode));
    y << YAML::Key << "scale" << YAML::Value << std::string(to_string(c.schedule_scale));
    y << YAML::EndMap;
    y << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "annotations" << YAML::Value << c.annotations;
    y << YAML::Key << "images" << YAML::Value << c.images;
    y << YAML::EndMap;
    y << YAML::Key << "eval" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "oks_k" << YAML::Value << YAML::Flow << nums(c.oks_k);
    y << YAML::EndMap;
    y << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "train_size" << YAML::Value << c.bench.train_size;
    y << YAML::Key << "test_size" << YAML::Value << c.bench.test_size;
    y << YAML::Key << "occlusion_rate" << YAML::Value << num(c.bench.occlusion_rate);
    y << YAML::Key << "scale" << YAML::Value << std::string(to_string(c.bench.scale));
    y << YAML::Key << "aid" << YAML::Value;
    emit_aid(y, c.bench.aid);
    y << YAML::Key << "batch_size" << YAML::Value << c.bench.train.batch_size;
    y << YAML::Key << "base_lr" << YAML::Value << num(c.bench.train.base_lr);
    y << YAML::Key << "momentum" << YAML::Value << num(c.bench.train.momentum);
    y << YAML::Key << "sigma" << YAML::Value << num(c.bench.train.sigma);
    y << YAML::Key << "pck_threshold" << YAML::Value << num(c.bench.train.pck_threshold);
    y << YAML::EndMap;
    y << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "seed" << YAML::Value << c.probe.seed;
    y << YAML::Key << "probe_size" << YAML::Value << c.probe.probe_size;
    y << YAML::Key << "warmup_epochs" << YAML::Value << c.probe.warmup_epochs;
    y << YAML::Key << "base_lr" << YAML::Value << num(c.probe.base_lr);
    y << YAML::Key << "batch_size" << YAML::Value << c.probe.batch_size;
    y << YAML::Key << "tolerance" << YAML::Value << num(c.probe.tolerance);
    y << YAML::Key << "max_iterations" << YAML::Value << c.probe.max_iterations;
    y << YAML::EndMap;
    y << YAML::EndMap;
    return std::string(y.c_str()) + "\n";
}

void validate(const CliConfig& c) {
    validate(c.aid);
    validate(c.geometry);
    AID_CHECK(c.targets.stride > 0.0, "targets.stride must be > 0");
    AID_CHECK(c.targets.sigma > 0.0, "targets.sigma must be > 0");
    if (!c.oks_k.empty()) validate(OksSigmas{c.oks_k});
    validate(c.bench.aid);
    AID_CHECK(c.bench.train_size >= 1 && c.bench.test_size >= 1, "bench sizes must be >= 1");
    AID_CHECK(c.bench.occlusion_rate >= 0.0 && c.bench.occlusion_rate <= 1.0, "bench.occlusion_rate must lie in [0, 1]");
    AID_CHECK(c.bench.train.batch_size >= 1, "bench.batch_size must be >= 1");
    AID_CHECK(c.bench.train.base_lr >= 0.0, "bench.base_lr must be >= 0");
    AID_CHECK(c.bench.train.sigma > 0.0, "bench.sigma must be > 0");
    AID_CHECK(c.probe.probe_size >= 1, "probe.probe_size must be >= 1");
    AID_CHECK(c.probe.warmup_epochs >= 0, "probe.warmup_epochs must be >= 0");
    AID_CHECK(c.probe.tolerance > 0.0, "probe.tolerance must be > 0");
}

}  // namespace aid
