#include "pwlip/region_io.hpp"

#include "pwlip/error.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pwlip {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    std::string bad;
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) bad += (bad.empty() ? "" : ", ") + key;
    }
    if (!bad.empty()) throw Error(ErrorKind::Parse, std::string("unknown field(s) in ") + where + ": " + bad);
}

Vector bound_vector(const json& arr, double missing, const char* what) {
    if (!arr.is_array()) throw Error(ErrorKind::Parse, std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (arr[i].is_null()) {
            v(i) = missing;
        } else if (arr[i].is_number()) {
            v(i) = arr[i].get<double>();
        } else {
            throw Error(ErrorKind::Parse, std::string(what) + " entries must be numbers or null");
        }
    }
    return v;
}

}  // namespace

Polyhedron parse_region(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("region file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Parse, "region document must be a JSON object");

    if (doc.contains("global")) {
        reject_unknown(doc, {"global"}, "region");
        if (!doc["global"].is_number_integer() || doc["global"].get<long>() <= 0) {
            throw Error(ErrorKind::Parse, "\"global\" must be a positive integer dimension");
        }
        return Polyhedron::unconstrained(doc["global"].get<long>());
    }
    if (doc.contains("box")) {
        reject_unknown(doc, {"box"}, "region");
        const json& box = doc["box"];
        if (!box.is_object() || !box.contains("lower") || !box.contains("upper")) {
            throw Error(ErrorKind::Parse, "\"box\" needs \"lower\" and \"upper\" arrays");
        }
        reject_unknown(box, {"lower", "upper"}, "box");
        constexpr double inf = std::numeric_limits<double>::infinity();
        const Vector lo = bound_vector(box["lower"], -inf, "box.lower");
        const Vector hi = bound_vector(box["upper"], inf, "box.upper");
        if (lo.size() == 0) throw Error(ErrorKind::Parse, "box must have positive dimension");
        if (lo.size() != hi.size()) throw Error(ErrorKind::Parse, "box.lower and box.upper differ in length");
        return Polyhedron::box(lo, hi);
    }
    reject_unknown(doc, {"dim", "C", "c"}, "region");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long>() <= 0) {
        throw Error(ErrorKind::Parse, "region needs a positive integer \"dim\" (or \"box\" / \"global\")");
    }
    const long d = doc["dim"].get<long>();
    const json rows = doc.value("C", json::array());
    const json bounds = doc.value("c", json::array());
    if (!rows.is_array() || !bounds.is_array() || rows.size() != bounds.size()) {
        throw Error(ErrorKind::Parse, "region \"C\" and \"c\" must be arrays with equal row counts");
    }
    if (rows.empty()) return Polyhedron::unconstrained(d);
    Matrix C(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vector r = bound_vector(rows[i], std::numeric_limits<double>::quiet_NaN(), "C row");
        if (r.size() != d) {
            std::ostringstream msg;
            msg << "region row " << i << " has " << r.size() << " entries, expected " << d;
            throw Error(ErrorKind::Parse, msg.str());
        }
        C.row(i) = r.transpose();
    }
    const Vector c = bound_vector(bounds, std::numeric_limits<double>::quiet_NaN(), "c");
    if (!C.allFinite() || !c.allFinite()) throw Error(ErrorKind::Parse, "region constraints must be finite numbers");
    return Polyhedron(std::move(C), c);
}

Polyhedron load_region(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open region file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_region(buf.str());
}

}  // namespace pwlip
