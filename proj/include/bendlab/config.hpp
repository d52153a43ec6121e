#pragma once

// Experiment configuration: everything a CLI run depends on, as one JSON
// document. emit -> parse -> emit is the identity.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "errors.hpp"
#include "generators.hpp"
#include "pgm.hpp"
#include "serialize.hpp"
#include "signals.hpp"
#include "transform.hpp"

namespace bendlab {

inline constexpr const char* kConfigSchema = "bendlab.config/1";

/// Either an explicit list of values or lo:step:hi.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;
    std::vector<double> explicit_values;

    std::vector<double> values() const { return explicit_values.empty() ? make_grid(lo, hi, step) : explicit_values; }
    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        if (!a.explicit_values.empty() || !b.explicit_values.empty()) return a.explicit_values == b.explicit_values;
        return a.lo == b.lo && a.hi == b.hi && a.step == b.step;
    }
};

struct ExperimentConfig {
    /// Region descriptor, or {"type":"pgm","path":...,"domain":[x1lo,x2lo,x1hi,x2hi]}.
    json signal = {{"type", "disk"}, {"center", {0.0, 0.0}}, {"radius", 0.25}};
    double gain = 1.0;
    /// > 0: rasterize an analytic signal at this resolution before use.
    int raster_resolution = 0;
    int supersample = 1;
    GeneratorDescriptor generator{};
    double alpha = 0.335;
    int j_min = 4;
    int j_max = 8;
    GridSpec s_grid{-1.0, 1.0, 0.05, {}};
    GridSpec b_grid{-5.0, 5.0, 0.1, {}};
    std::vector<int> cones{1, -1};
    bool refine = true;
    int refine_factor = 5;
    bool continuation = true;
    QuadratureSpec quad{};
    std::vector<Point> points;
    std::vector<double> radii{0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
    std::string out = "-";
    unsigned long long seed = 1;
    int threads = 0;

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
        return a.signal == b.signal && a.gain == b.gain && a.raster_resolution == b.raster_resolution &&
               a.supersample == b.supersample && a.generator == b.generator && a.alpha == b.alpha &&
               a.j_min == b.j_min && a.j_max == b.j_max && a.s_grid == b.s_grid && a.b_grid == b.b_grid &&
               a.cones == b.cones && a.refine == b.refine && a.refine_factor == b.refine_factor &&
               a.continuation == b.continuation && a.quad == b.quad &&
               a.points == b.points && a.radii == b.radii && a.out == b.out && a.seed == b.seed &&
               a.threads == b.threads;
    }

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
        if (j_min < 1 || !(j_min < j_max)) throw ConfigError("scale range needs 1 <= jmin < jmax");
        if (j_max > 30) throw ConfigError("jmax beyond 30 is not supported");
        if (supersample < 1) throw ConfigError("supersample must be positive");
        if (refine_factor < 1) throw ConfigError("refine_factor must be positive");
        if (cones.empty()) throw ConfigError("cone list is empty");
        for (int c : cones) cone_from_iota(c);
        quad.validate();
        if (!(gain > 0.0)) throw ConfigError("signal gain must be positive");
    }
};

namespace detail {

inline json grid_json(const GridSpec& g) {
    if (!g.explicit_values.empty()) return g.explicit_values;
    return {{"lo", g.lo}, {"hi", g.hi}, {"step", g.step}};
}

inline GridSpec grid_from_json(const json& j, GridSpec def) {
    if (j.is_array()) {
        GridSpec g;
        g.explicit_values = j.get<std::vector<double>>();
        if (g.explicit_values.empty()) throw ConfigError("explicit grid is empty");
        return g;
    }
    def.explicit_values.clear();
    def.lo = j.value("lo", def.lo);
    def.hi = j.value("hi", def.hi);
    def.step = j.value("step", def.step);
    return def;
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(point_json(p));
    return {{"schema", kConfigSchema},
            {"signal", c.signal},
            {"gain", c.gain},
            {"raster_resolution", c.raster_resolution},
            {"supersample", c.supersample},
            {"generator", to_json(c.generator)},
            {"alpha", c.alpha},
            {"scales", {{"jmin", c.j_min}, {"jmax", c.j_max}}},
            {"grids",
             {{"s", detail::grid_json(c.s_grid)},
              {"b", detail::grid_json(c.b_grid)},
              {"cones", c.cones},
              {"refine", c.refine},
              {"refine_factor", c.refine_factor},
              {"continuation", c.continuation}}},
            {"quadrature", {{"method", to_string(c.quad.method)}, {"q", c.quad.q}, {"tol", c.quad.tol},
                            {"max_panels", c.quad.max_panels}}},
            {"points", pts},
            {"radii", c.radii},
            {"out", c.out},
            {"seed", c.seed},
            {"threads", c.threads}};
}

inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("schema") && j.at("schema") != kConfigSchema)
        throw SchemaError("unsupported configuration schema '" + j.at("schema").dump() + "'");
    ExperimentConfig c;
    try {
        if (j.contains("signal")) c.signal = j.at("signal");
        c.gain = j.value("gain", c.gain);
        c.raster_resolution = j.value("raster_resolution", c.raster_resolution);
        c.supersample = j.value("supersample", c.supersample);
        if (j.contains("generator")) c.generator = generator_from_json(j.at("generator"));
        c.alpha = j.value("alpha", c.alpha);
        if (j.contains("scales")) {
            c.j_min = j.at("scales").value("jmin", c.j_min);
            c.j_max = j.at("scales").value("jmax", c.j_max);
        }
        if (j.contains("grids")) {
            const auto& g = j.at("grids");
            if (g.contains("s")) c.s_grid = detail::grid_from_json(g.at("s"), c.s_grid);
            if (g.contains("b")) c.b_grid = detail::grid_from_json(g.at("b"), c.b_grid);
            c.cones = g.value("cones", c.cones);
            c.refine = g.value("refine", c.refine);
            c.refine_factor = g.value("refine_factor", c.refine_factor);
            c.continuation = g.value("continuation", c.continuation);
        }
        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            if (q.contains("method")) c.quad.method = parse_method(q.at("method").get<std::string>());
            c.quad.q = q.value("q", c.quad.q);
            c.quad.tol = q.value("tol", c.quad.tol);
            c.quad.max_panels = q.value("max_panels", c.quad.max_panels);
        }
        if (j.contains("points")) {
            c.points.clear();
            for (const auto& p : j.at("points")) c.points.push_back(point_from_json(p));
        }
        c.radii = j.value("radii", c.radii);
        c.out = j.value("out", c.out);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    c.validate();
    return c;
}

inline std::string emit_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("cannot open configuration '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Signal described by the configuration (PGM images are loaded, analytic
/// regions optionally rasterized).
inline Signal make_signal(const ExperimentConfig& c) {
    const json& s = c.signal;
    Signal sig = [&]() -> Signal {
        try {
            if (s.at("type") == "pgm") {
                Box dom{{-1.0, -1.0}, {1.0, 1.0}};
                if (s.contains("domain")) {
                    const auto d = s.at("domain").get<std::vector<double>>();
                    if (d.size() != 4) throw ConfigError("raster domain must be [x1lo, x2lo, x1hi, x2hi]");
                    dom = {{d[0], d[1]}, {d[2], d[3]}};
                }
                return Signal(load_raster(s.at("path").get<std::string>(), dom));
            }
            Signal analytic(region_from_json(s));
            if (c.raster_resolution > 0)
                return Signal(rasterize(analytic, c.raster_resolution, {{-1.0, -1.0}, {1.0, 1.0}}, c.supersample));
            return analytic;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed signal descriptor: ") + e.what());
        }
    }();
    return c.gain == 1.0 ? sig : sig.scaled(c.gain);
}

inline ClassifyOptions classify_options(const ExperimentConfig& c) {
    ClassifyOptions o;
    o.alpha = c.alpha;
    o.cones.clear();
    for (int i : c.cones) o.cones.push_back(cone_from_iota(i));
    o.s_grid = c.s_grid.values();
    o.b_grid = c.b_grid.values();
    o.j_min = c.j_min;
    o.j_max = c.j_max;
    o.quad = c.quad;
    o.refine = c.refine;
    o.refine_factor = c.refine_factor;
    o.continuation = c.continuation;
    o.threads = resolve_threads(c.threads);
    return o;
}

}  // namespace bendlab
