#pragma once

// Versioned CSV/JSON encodings of decay curves, classification results,
// generator descriptors and region descriptors.

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "errors.hpp"
#include "generators.hpp"
#include "signals.hpp"
#include "transform.hpp"

namespace bendlab {

using json = nlohmann::json;

inline constexpr const char* kDecaySchema = "bendlab.decay/1";
inline constexpr const char* kClassifySchema = "bendlab.classify/1";

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("invalid number '" + s + "'");
    return v;
}

// ---------------------------------------------------------------- generator

inline const char* to_string(WaveletCentering c) {
    return c == WaveletCentering::primitive_peak ? "primitive-peak" : "support-midpoint";
}

inline WaveletCentering parse_centering(const std::string& s) {
    if (s == "primitive-peak") return WaveletCentering::primitive_peak;
    if (s == "support-midpoint") return WaveletCentering::support_midpoint;
    throw ConfigError("unknown wavelet centering '" + s + "'");
}

inline json to_json(const GeneratorDescriptor& d) {
    return {{"wavelet", {{"M", d.M}, {"depth", d.depth}, {"width", d.wavelet_width}, {"center", to_string(d.centering)}}},
            {"window", {{"order", d.window_order}, {"width", d.window_width}}}};
}

inline GeneratorDescriptor generator_from_json(const json& j) {
    GeneratorDescriptor d;
    if (j.contains("wavelet")) {
        const auto& w = j.at("wavelet");
        d.M = w.value("M", d.M);
        d.depth = w.value("depth", d.depth);
        d.wavelet_width = w.value("width", d.wavelet_width);
        if (w.contains("center")) d.centering = parse_centering(w.at("center").get<std::string>());
    }
    if (j.contains("window")) {
        const auto& w = j.at("window");
        d.window_order = w.value("order", d.window_order);
        d.window_width = w.value("width", d.window_width);
    }
    return d;
}

// ------------------------------------------------------------------- region

inline json point_json(Point p) { return json::array({p.x1, p.x2}); }

inline Point point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("a point must be a two-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Region& r) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Plane>) {
                return {{"type", "plane"}};
            } else if constexpr (std::is_same_v<T, Disk>) {
                return {{"type", "disk"}, {"center", point_json(s.center)}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                return {{"type", "halfplane"}, {"slope", s.slope}, {"point", point_json(s.p)}, {"iota", s.iota}};
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                return {{"type", "graph"}, {"point", point_json(s.p)}, {"slope", s.slope}, {"bend", s.bend},
                        {"higher", s.higher}, {"iota", s.iota}};
            } else {
                return {{"type", "complement"}, {"inner", to_json(*s.inner)}};
            }
        },
        r.shape);
}

inline Region region_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    Region r;
    if (type == "plane") r = Region{Plane{}};
    else if (type == "disk") r = Region{Disk{point_from_json(j.value("center", json::array({0.0, 0.0}))), j.at("radius").get<double>()}};
    else if (type == "halfplane")
        r = Region{HalfPlane{j.value("slope", 0.0), point_from_json(j.value("point", json::array({0.0, 0.0}))), j.value("iota", 1)}};
    else if (type == "graph")
        r = Region{GraphRegion{point_from_json(j.value("point", json::array({0.0, 0.0}))), j.value("slope", 0.0),
                               j.value("bend", 0.0), j.value("higher", std::vector<double>{}), j.value("iota", 1)}};
    else if (type == "complement") r = make_complement(region_from_json(j.at("inner")));
    else throw ConfigError("unknown region type '" + type + "'");
    validate(r);
    return r;
}

// ------------------------------------------------------------ decay curves

/// Writes curves in the versioned decay CSV layout. Each curve contributes a
/// `# fit` comment with its slope (or `all-floored`); a single curve also gets
/// a plain `# slope=` line.
inline void write_decay_csv(std::ostream& os, const std::vector<DecayCurve>& curves) {
    os << "# schema=" << kDecaySchema << '\n';
    if (!curves.empty()) {
        const auto& g = curves.front().generator;
        os << "# alpha=" << format_double(curves.front().alpha) << " M=" << g.M << " depth=" << g.depth
           << " wavelet_width=" << format_double(g.wavelet_width) << " window_order=" << g.window_order
           << " window_width=" << format_double(g.window_width) << " center=" << to_string(g.centering) << '\n';
    }
    auto slope_text = [](const DecayCurve& c) -> std::string {
        try {
            const RateFit f = fit_rate(c);
            return f.status == RateFit::Status::all_floored ? std::string("all-floored") : format_double(f.slope);
        } catch (const FitError&) {
            return "unfit";
        }
    };
    if (curves.size() == 1) os << "# slope=" << slope_text(curves.front()) << '\n';
    for (const auto& c : curves)
        os << "# fit s=" << format_double(c.s) << " b=" << format_double(c.b) << " iota=" << c.iota
           << " slope=" << slope_text(c) << '\n';
    os << "j,a,s,b,t1,t2,iota,magnitude,floored\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.size(); ++i)
            os << c.j[i] << ',' << format_double(c.a[i]) << ',' << format_double(c.s) << ',' << format_double(c.b)
               << ',' << format_double(c.t.x1) << ',' << format_double(c.t.x2) << ',' << c.iota << ','
               << format_double(c.magnitude[i]) << ',' << (c.floored[i] ? 1 : 0) << '\n';
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Parses a decay CSV; rows are grouped into curves by (s, b, t, iota) in
/// order of first appearance. The signed coefficient is not part of the
/// schema; it is restored as the magnitude.
inline std::vector<DecayCurve> read_decay_csv(std::istream& is) {
    std::string line;
    bool schema_seen = false, header_seen = false;
    std::vector<DecayCurve> curves;
    std::map<std::tuple<double, double, double, double, int>, std::size_t> index;
    double alpha = 0.335;
    GeneratorDescriptor gen;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# schema=", 0) == 0) {
                const std::string tag = line.substr(9);
                if (tag != kDecaySchema) throw SchemaError("unsupported decay schema '" + tag + "'");
                schema_seen = true;
            } else if (line.rfind("# alpha=", 0) == 0) {
                std::istringstream ks(line.substr(2));
                std::string kv;
                while (ks >> kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                    if (k == "alpha") alpha = parse_double(v);
                    else if (k == "M") gen.M = std::stoi(v);
                    else if (k == "depth") gen.depth = std::stoi(v);
                    else if (k == "wavelet_width") gen.wavelet_width = parse_double(v);
                    else if (k == "window_order") gen.window_order = std::stoi(v);
                    else if (k == "window_width") gen.window_width = parse_double(v);
                    else if (k == "center") gen.centering = parse_centering(v);
                }
            }
            continue;
        }
        if (!schema_seen) throw SchemaError("decay CSV lacks a schema tag");
        if (!header_seen) {
            if (line != "j,a,s,b,t1,t2,iota,magnitude,floored") throw SchemaError("unexpected decay CSV header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 9) throw IoError("decay CSV row with " + std::to_string(f.size()) + " fields");
        const double s = parse_double(f[2]), b = parse_double(f[3]);
        const Point t{parse_double(f[4]), parse_double(f[5])};
        const int iota = std::stoi(f[6]);
        const auto key = std::make_tuple(s, b, t.x1, t.x2, iota);
        auto it = index.find(key);
        if (it == index.end()) {
            DecayCurve c;
            c.s = s;
            c.b = b;
            c.t = t;
            c.iota = iota;
            c.alpha = alpha;
            c.generator = gen;
            curves.push_back(std::move(c));
            it = index.emplace(key, curves.size() - 1).first;
        }
        DecayCurve& c = curves[it->second];
        c.j.push_back(std::stoi(f[0]));
        c.a.push_back(parse_double(f[1]));
        const double m = parse_double(f[7]);
        c.magnitude.push_back(m);
        c.coefficient.push_back(m);
        c.floored.push_back(f[8] == "1");
    }
    if (!schema_seen) throw SchemaError("decay CSV lacks a schema tag");
    return curves;
}

inline json to_json(const DecayCurve& c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.size(); ++i)
        rows.push_back({{"j", c.j[i]}, {"a", c.a[i]}, {"coefficient", c.coefficient[i]}, {"magnitude", c.magnitude[i]},
                        {"floored", static_cast<bool>(c.floored[i])}});
    return {{"schema", kDecaySchema}, {"s", c.s}, {"b", c.b}, {"t", point_json(c.t)}, {"iota", c.iota},
            {"alpha", c.alpha}, {"generator", to_json(c.generator)}, {"points", rows}};
}

// ----------------------------------------------------------- classification

inline json to_json(const ClassificationResult& r, Point t) {
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j = {{"t", point_json(t)},
              {"case", to_string(r.label)},
              {"s", r.s},
              {"b", r.b},
              {"iota", r.iota},
              {"s_coarse", r.s_coarse},
              {"b_coarse", r.b_coarse},
              {"rate", num(r.rate)},
              {"residual", num(r.residual)},
              {"normal", r.has_geometry ? point_json(r.normal) : json(nullptr)},
              {"curvature", r.has_geometry ? json(r.curvature) : json(nullptr)},
              {"confidence", num(r.confidence)},
              {"unresolved", r.unresolved},
              {"warnings", r.warnings}};
    return j;
}

}  // namespace bendlab
