#include "pwlip/model_io.hpp"

#include "pwlip/error.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pwlip {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    std::string bad;
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) bad += (bad.empty() ? "" : ", ") + key;
    }
    if (!bad.empty()) parse_error("unknown field(s) in " + where + ": " + bad);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) parse_error(where + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, where + " is not finite");
    return x;
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) parse_error(where + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Matrix matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) parse_error(where + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto r = numbers(v[static_cast<std::size_t>(i)], where + " row " + std::to_string(i));
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(r.size());
            if (cols == 0) parse_error(where + " has empty rows");
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(r.size()) != cols) {
            throw Error(ErrorKind::Dimension, where + " is ragged (row " + std::to_string(i) + ")");
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r[static_cast<std::size_t>(j)];
    }
    return m;
}

ActivationPtr activation(const json& node, const std::string& type, Eigen::Index width, const std::string& where) {
    if (type == "relu") {
        reject_unknown(node, {"type"}, where);
        return make_relu(width);
    }
    if (type == "leaky_relu") {
        reject_unknown(node, {"type", "slope"}, where);
        return make_leaky_relu(width, node.contains("slope") ? number(node["slope"], where + ".slope") : 0.01);
    }
    if (type == "prelu") {
        reject_unknown(node, {"type", "slopes"}, where);
        if (!node.contains("slopes")) parse_error(where + ": prelu needs \"slopes\"");
        auto slopes = numbers(node["slopes"], where + ".slopes");
        if (static_cast<Eigen::Index>(slopes.size()) != width) {
            throw Error(ErrorKind::Dimension, where + ": prelu has " + std::to_string(slopes.size()) +
                                                  " slopes for width " + std::to_string(width));
        }
        return make_prelu(slopes);
    }
    if (type == "spline") {
        reject_unknown(node, {"type", "breakpoints", "slopes", "intercepts"}, where);
        Spline s{numbers(node.value("breakpoints", json::array()), where + ".breakpoints"),
                 numbers(node.value("slopes", json::array()), where + ".slopes"),
                 numbers(node.value("intercepts", json::array()), where + ".intercepts")};
        return make_spline(width, std::move(s));
    }
    if (type == "groupsort") {
        reject_unknown(node, {"type", "group_size"}, where);
        if (!node.contains("group_size") || !node["group_size"].is_number_integer()) {
            parse_error(where + ": groupsort needs an integer \"group_size\"");
        }
        return make_groupsort(width, node["group_size"].get<Eigen::Index>());
    }
    if (type == "fullsort") {
        reject_unknown(node, {"type"}, where);
        return make_fullsort(width);
    }
    if (type == "maxmin") {
        reject_unknown(node, {"type"}, where);
        return make_maxmin(width);
    }
    if (type == "maxpool") {
        reject_unknown(node, {"type", "windows"}, where);
        if (!node.contains("windows") || !node["windows"].is_array()) parse_error(where + ": maxpool needs \"windows\"");
        std::vector<std::vector<Eigen::Index>> windows;
        for (const auto& win : node["windows"]) {
            if (!win.is_array()) parse_error(where + ": each maxpool window must be an array of indices");
            std::vector<Eigen::Index> idx;
            for (const auto& i : win) {
                if (!i.is_number_integer()) parse_error(where + ": maxpool window indices must be integers");
                idx.push_back(i.get<Eigen::Index>());
            }
            windows.push_back(std::move(idx));
        }
        return make_maxpool(width, std::move(windows));
    }
    if (type == "identity") {
        reject_unknown(node, {"type"}, where);
        return make_identity(width);
    }
    parse_error(where + ": unknown activation type '" + type + "'");
}

json vec_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json activation_json(const PwlActivation& act) {
    json j{{"type", to_string(act.kind())}};
    switch (act.kind()) {
        case ActivationKind::LeakyReLU:
            j["slope"] = static_cast<const ComponentwiseActivation&>(act).spline(0).slopes[0];
            break;
        case ActivationKind::PReLU: {
            const auto& c = static_cast<const ComponentwiseActivation&>(act);
            json slopes = json::array();
            for (Eigen::Index n = 0; n < act.output_width(); ++n) slopes.push_back(c.spline(n).slopes[0]);
            j["slopes"] = slopes;
            break;
        }
        case ActivationKind::Spline: {
            const Spline& s = static_cast<const ComponentwiseActivation&>(act).spline(0);
            j["breakpoints"] = s.breakpoints;
            j["slopes"] = s.slopes;
            j["intercepts"] = s.intercepts;
            break;
        }
        case ActivationKind::GroupSort:
            j["group_size"] = static_cast<const GroupSortActivation&>(act).group_size();
            break;
        case ActivationKind::MaxPool:
            j["windows"] = static_cast<const MaxPoolActivation&>(act).windows();
            break;
        default:
            break;
    }
    return j;
}

}  // namespace

Network parse_model(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        parse_error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) parse_error("model document must be a JSON object");
    reject_unknown(doc, {"layers"}, "model");
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
        parse_error("model needs a non-empty \"layers\" array");
    }

    std::vector<Layer> layers;
    Layer pending;
    bool have_affine = false;
    const json& entries = doc["layers"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const json& e = entries[i];
        const std::string where = "layers[" + std::to_string(i) + "]";
        if (!e.is_object() || !e.contains("type") || !e["type"].is_string()) {
            parse_error(where + " must be an object with a string \"type\"");
        }
        const std::string type = e["type"].get<std::string>();
        const std::string net_layer = "layer " + std::to_string(layers.size() + 1);
        if (type == "affine") {
            reject_unknown(e, {"type", "W", "b"}, where);
            if (have_affine) {
                pending.activation = make_identity(pending.W.rows());
                layers.push_back(std::move(pending));
            }
            pending = Layer{};
            pending.W = matrix(e.value("W", json()), net_layer + " W");
            if (e.contains("b")) {
                const auto b = numbers(e["b"], net_layer + " b");
                pending.w = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
            } else {
                pending.w = Vector::Zero(pending.W.rows());
            }
            if (pending.w.size() != pending.W.rows()) {
                throw Error(ErrorKind::Dimension, net_layer + ": bias length " + std::to_string(pending.w.size()) +
                                                      " does not match " + std::to_string(pending.W.rows()) + " rows");
            }
            have_affine = true;
            continue;
        }
        if (!have_affine) {
            if (layers.empty()) parse_error(where + ": the model must begin with an affine layer");
            const Eigen::Index w = layers.back().activation->output_width();
            pending = Layer{Matrix::Identity(w, w), Vector::Zero(w), nullptr};
        }
        pending.activation = activation(e, type, pending.W.rows(), where + " (" + net_layer + ")");
        layers.push_back(std::move(pending));
        pending = Layer{};
        have_affine = false;
    }
    if (have_affine) {
        pending.activation = make_identity(pending.W.rows());
        layers.push_back(std::move(pending));
    }
    return Network(std::move(layers));
}

Network load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) parse_error("cannot open model file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string model_to_json(const Network& net) {
    json layers = json::array();
    for (const Layer& ly : net.layers()) {
        json W = json::array();
        for (Eigen::Index i = 0; i < ly.W.rows(); ++i) W.push_back(vec_json(ly.W.row(i).transpose()));
        layers.push_back(json{{"type", "affine"}, {"W", W}, {"b", vec_json(ly.w)}});
        layers.push_back(activation_json(*ly.activation));
    }
    return json{{"layers", layers}}.dump();
}

}  // namespace pwlip
