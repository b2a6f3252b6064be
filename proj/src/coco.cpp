#include "aid/coco.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "aid/error.hpp"

namespace aid {
namespace {

using nlohmann::json;

json number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15)
        return json(static_cast<std::int64_t>(v));
    return json(v);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& context) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(context + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw SchemaError(context + ": field '" + key + "' has the wrong type");
    }
}

std::vector<Keypoint> parse_keypoint_triplets(const json& arr, const std::string& context) {
    if (!arr.is_array() || arr.size() % 3 != 0)
        throw SchemaError(context + ": 'keypoints' must be a flat list of (x, y, v) triplets");
    std::vector<Keypoint> out(arr.size() / 3);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& x = arr[3 * i];
        const auto& y = arr[3 * i + 1];
        const auto& v = arr[3 * i + 2];
        if (!x.is_number() || !y.is_number() || !v.is_number())
            throw SchemaError(context + ": keypoint values must be numbers");
        out[i].x = x.get<double>();
        out[i].y = y.get<double>();
        const double vf = v.get<double>();
        const int vi = vf <= 0.0 ? 0 : (vf >= 2.0 ? 2 : static_cast<int>(std::lround(vf)));
        out[i].v = static_cast<Visibility>(vi);
    }
    return out;
}

json keypoint_triplets(const std::vector<Keypoint>& kps) {
    json arr = json::array();
    for (const auto& k : kps) {
        arr.push_back(number(k.x));
        arr.push_back(number(k.y));
        arr.push_back(static_cast<int>(k.v));
    }
    return arr;
}

}  // namespace

BoundingBox keypoint_extent(const std::vector<Keypoint>& keypoints) {
    if (keypoints.empty()) return {};
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (const auto& k : keypoints) {
        x0 = std::min(x0, k.x);
        x1 = std::max(x1, k.x);
        y0 = std::min(y0, k.y);
        y1 = std::max(y1, k.y);
    }
    return {x0, y0, x1 - x0, y1 - y0};
}

const Category* CocoDataset::find_category(std::int64_t id) const {
    const auto it = std::find_if(categories.begin(), categories.end(),
                                 [id](const Category& c) { return c.id == id; });
    return it == categories.end() ? nullptr : &*it;
}

const ImageRecord* CocoDataset::find_image(std::int64_t id) const {
    const auto it = std::find_if(images.begin(), images.end(),
                                 [id](const ImageRecord& r) { return r.id == id; });
    return it == images.end() ? nullptr : &*it;
}

std::vector<const KeypointInstance*> CocoDataset::instances_of(std::int64_t image_id) const {
    std::vector<const KeypointInstance*> out;
    for (const auto& a : annotations)
        if (a.image_id == image_id) out.push_back(&a);
    return out;
}

CocoDataset parse_coco_annotations(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object()) throw SchemaError("COCO annotations: top level must be an object");

    CocoDataset ds;
    if (const auto it = doc.find("categories"); it != doc.end()) {
        for (const auto& c : *it) {
            Category cat;
            cat.id = get_field<std::int64_t>(c, "id", "category");
            const std::string ctx = "category " + std::to_string(cat.id);
            cat.name = c.value("name", std::string{});
            cat.supercategory = c.value("supercategory", std::string{});
            std::vector<std::pair<int, int>> skeleton;
            if (const auto sk = c.find("skeleton"); sk != c.end()) {
                for (const auto& edge : *sk) {
                    if (!edge.is_array() || edge.size() != 2)
                        throw SchemaError(ctx + ": skeleton edges must be pairs");
                    // COCO skeletons are 1-based.
                    skeleton.emplace_back(edge[0].get<int>() - 1, edge[1].get<int>() - 1);
                }
            }
            auto names = get_field<std::vector<std::string>>(c, "keypoints", ctx);
            try {
                cat.layout = KeypointLayout::from_names(std::move(names), std::move(skeleton));
            } catch (const InvalidArgument& e) {
                throw SchemaError(ctx + ": " + e.what());
            }
            ds.categories.push_back(std::move(cat));
        }
    }

    if (const auto it = doc.find("images"); it != doc.end()) {
        for (const auto& im : *it) {
            ImageRecord rec;
            rec.id = get_field<std::int64_t>(im, "id", "image");
            const std::string ctx = "image " + std::to_string(rec.id);
            rec.file_name = im.value("file_name", std::string{});
            rec.width = im.value("width", 0);
            rec.height = im.value("height", 0);
            ds.images.push_back(std::move(rec));
        }
    }

    const auto anns = doc.find("annotations");
    if (anns == doc.end() || !anns->is_array())
        throw SchemaError("COCO annotations: missing 'annotations' list");
    for (const auto& a : *anns) {
        KeypointInstance inst;
        inst.id = get_field<std::int64_t>(a, "id", "annotation");
        const std::string ctx = "annotation " + std::to_string(inst.id);
        inst.image_id = get_field<std::int64_t>(a, "image_id", ctx);
        inst.category_id = a.value("category_id", std::int64_t{1});
        const auto kp = a.find("keypoints");
        if (kp == a.end()) throw SchemaError(ctx + ": missing field 'keypoints'");
        inst.keypoints = parse_keypoint_triplets(*kp, ctx);
        if (const Category* cat = ds.find_category(inst.category_id);
            cat != nullptr && cat->layout.size() != inst.keypoints.size())
            throw SchemaError(ctx + ": keypoint count does not match category " +
                              std::to_string(inst.category_id));
        if (const auto bb = a.find("bbox"); bb != a.end()) {
            const auto v = bb->get<std::vector<double>>();
            if (v.size() != 4) throw SchemaError(ctx + ": 'bbox' must have four numbers");
            inst.bbox = {v[0], v[1], v[2], v[3]};
        } else {
            std::vector<Keypoint> labeled;
            for (const auto& k : inst.keypoints)
                if (k.labeled()) labeled.push_back(k);
            inst.bbox = keypoint_extent(labeled);
        }
        inst.area = a.contains("area") ? get_field<double>(a, "area", ctx) : inst.bbox.w * inst.bbox.h;
        inst.iscrowd = a.value("iscrowd", 0) != 0;
        if (inst.num_labeled() > 0 && !(inst.area > 0.0))
            throw SchemaError(ctx + ": area must be positive when keypoints are labeled");
        if (const auto s = a.find("score"); s != a.end()) inst.score = s->get<double>();
        ds.annotations.push_back(std::move(inst));
    }
    return ds;
}

CocoDataset load_coco_annotations(const std::filesystem::path& path) {
    return parse_coco_annotations(read_text_file(path));
}

std::string serialize_coco_annotations(const CocoDataset& ds, int indent) {
    json doc;
    doc["images"] = json::array();
    for (const auto& im : ds.images)
        doc["images"].push_back(
            {{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
    doc["categories"] = json::array();
    for (const auto& c : ds.categories) {
        json cat = {{"id", c.id}, {"name", c.name}, {"keypoints", c.layout.names()}};
        if (!c.supercategory.empty()) cat["supercategory"] = c.supercategory;
        json skeleton = json::array();
        for (auto [a, b] : c.layout.skeleton()) skeleton.push_back({a + 1, b + 1});
        cat["skeleton"] = skeleton;
        doc["categories"].push_back(std::move(cat));
    }
    doc["annotations"] = json::array();
    for (const auto& a : ds.annotations) {
        json ann = {{"id", a.id},
                    {"image_id", a.image_id},
                    {"category_id", a.category_id},
                    {"keypoints", keypoint_triplets(a.keypoints)},
                    {"num_keypoints", a.num_labeled()},
                    {"bbox", {number(a.bbox.x), number(a.bbox.y), number(a.bbox.w), number(a.bbox.h)}},
                    {"area", number(a.area)},
                    {"iscrowd", a.iscrowd ? 1 : 0}};
        if (a.score) ann["score"] = *a.score;
        doc["annotations"].push_back(std::move(ann));
    }
    return doc.dump(indent);
}

void save_coco_annotations(const CocoDataset& ds, const std::filesystem::path& path) {
    write_text_file(path, serialize_coco_annotations(ds, 2));
}

std::vector<KeypointInstance> parse_coco_results(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_array()) throw SchemaError("COCO results: top level must be a list");
    std::vector<KeypointInstance> out;
    std::int64_t next_id = 1;
    for (const auto& r : doc) {
        KeypointInstance inst;
        inst.id = r.value("id", next_id);
        ++next_id;
        const std::string ctx = "result " + std::to_string(out.size());
        inst.image_id = get_field<std::int64_t>(r, "image_id", ctx);
        inst.category_id = r.value("category_id", std::int64_t{1});
        const auto kp = r.find("keypoints");
        if (kp == r.end()) throw SchemaError(ctx + ": missing field 'keypoints'");
        inst.keypoints = parse_keypoint_triplets(*kp, ctx);
        inst.score = get_field<double>(r, "score", ctx);
        inst.bbox = keypoint_extent(inst.keypoints);
        inst.area = inst.bbox.w * inst.bbox.h;
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<KeypointInstance> load_coco_results(const std::filesystem::path& path) {
    return parse_coco_results(read_text_file(path));
}

std::string serialize_coco_results(const std::vector<KeypointInstance>& detections) {
    json doc = json::array();
    for (const auto& d : detections)
        doc.push_back({{"image_id", d.image_id},
                       {"category_id", d.category_id},
                       {"keypoints", keypoint_triplets(d.keypoints)},
                       {"score", d.score.value_or(1.0)}});
    return doc.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace aid
