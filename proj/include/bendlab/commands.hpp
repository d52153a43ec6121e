#pragma once

// Library side of the CLI subcommands. Every command writes its result to
// `out`, diagnostics to `err`, and returns a process exit code; library
// errors propagate as exceptions.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "selftest.hpp"
#include "serialize.hpp"
#include "transform.hpp"

namespace bendlab {

inline constexpr const char* kSweepSummarySchema = "bendlab.sweep-summary/1";

inline int cmd_coeff(const ExperimentConfig& cfg, const BendletParams& bp, std::ostream& out, std::ostream& err) {
    const Signal sig = make_signal(cfg);
    const GeneratorPair g = GeneratorPair::from_descriptor(cfg.generator);
    Diagnostics d;
    const double c = coefficient(sig, g, bp, cfg.alpha, cfg.quad, &d);
    for (const auto& w : d.warnings) err << "warning: " << w << '\n';
    out << format_double(c) << '\n';
    return 0;
}

inline int cmd_decay(const ExperimentConfig& cfg, double s, double b, Point t, Cone cone, std::ostream& out,
                     std::ostream&) {
    const Signal sig = make_signal(cfg);
    const GeneratorPair g = GeneratorPair::from_descriptor(cfg.generator);
    const DecayCurve c = decay_curve(sig, g, cfg.alpha, s, b, t, cone, cfg.j_min, cfg.j_max, cfg.quad);
    write_decay_csv(out, {c});
    return 0;
}

inline std::string classify_json(const ExperimentConfig& cfg, const std::vector<Point>& points) {
    const Signal sig = make_signal(cfg);
    const GeneratorPair g = GeneratorPair::from_descriptor(cfg.generator);
    const ClassifyOptions opt = classify_options(cfg);
    json results = json::array();
    for (const Point& t : points) results.push_back(to_json(classify_point(sig, g, t, opt), t));
    return json{{"schema", kClassifySchema}, {"results", results}}.dump(2) + "\n";
}

inline int cmd_classify(const ExperimentConfig& cfg, const std::vector<Point>& points, std::ostream& out,
                        std::ostream&) {
    out << classify_json(cfg, points);
    return 0;
}

struct SweepFigureRow {
    double radius;
    double b_coarse;
    double b_hat;
    double K_hat;
    double inv_r;
};

inline std::string radius_tag(double r) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << r;
    return ss.str();
}

/// Decay curves at the boundary point (r, 0) of Disk(0, r) for s = 0 and
/// every b of the configured grid, plus a refined grid around the coarse
/// winner; the winner is the curve with the largest magnitude at jmax.
inline std::vector<SweepFigureRow> sweep_figure(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                                std::ostream& err) {
    const GeneratorPair g = GeneratorPair::from_descriptor(cfg.generator);
    const auto b_grid = cfg.b_grid.values();
    const unsigned threads = resolve_threads(cfg.threads);
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::vector<SweepFigureRow> rows;
    auto best_of = [](const std::vector<DecayCurve>& cs) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cs.size(); ++i)
            if (cs[i].magnitude.back() > cs[best].magnitude.back()) best = i;
        return best;
    };
    for (double r : cfg.radii) {
        Signal sig(Region{Disk{{0.0, 0.0}, r}});
        if (cfg.raster_resolution > 0)
            sig = Signal(rasterize(sig, cfg.raster_resolution, {{-1.0, -1.0}, {1.0, 1.0}}, cfg.supersample));
        const Point t{r, 0.0};
        auto curves = sweep(sig, g, cfg.alpha, t, Cone::horizontal, {0.0}, b_grid, cfg.j_min, cfg.j_max, cfg.quad, threads);
        const double b_coarse = curves[best_of(curves)].b;
        double b_hat = b_coarse;
        if (cfg.refine && cfg.refine_factor > 1 && b_grid.size() > 1) {
            const auto local = detail::local_grid(b_coarse, detail::grid_step(b_grid), cfg.refine_factor,
                                                  -std::numeric_limits<double>::infinity(),
                                                  std::numeric_limits<double>::infinity());
            std::vector<double> extra;
            for (double b : local)
                if (std::find(b_grid.begin(), b_grid.end(), b) == b_grid.end()) extra.push_back(b);
            if (!extra.empty()) {
                auto more = sweep(sig, g, cfg.alpha, t, Cone::horizontal, {0.0}, extra, cfg.j_min, cfg.j_max, cfg.quad,
                                  threads);
                curves.insert(curves.end(), more.begin(), more.end());
            }
            std::stable_sort(curves.begin(), curves.end(), [](const auto& x, const auto& y) { return x.b < y.b; });
            b_hat = curves[best_of(curves)].b;
        }
        const double K = curvature_of({0.0, b_hat, 1, false});
        rows.push_back({r, b_coarse, b_hat, K, 1.0 / r});
        if (!dir.empty()) {
            std::ofstream f(dir / ("radius_" + radius_tag(r) + ".csv"));
            if (!f) throw IoError("cannot write into '" + dir.string() + "'");
            write_decay_csv(f, curves);
        }
        err << "radius " << radius_tag(r) << ": b_hat=" << format_double(b_hat) << " K_hat=" << format_double(K)
            << '\n';
    }
    return rows;
}

inline void write_sweep_summary(std::ostream& os, const std::vector<SweepFigureRow>& rows) {
    os << "# schema=" << kSweepSummarySchema << '\n';
    os << "radius,b_coarse,b_hat,K_hat,inv_r\n";
    for (const auto& r : rows)
        os << format_double(r.radius) << ',' << format_double(r.b_coarse) << ',' << format_double(r.b_hat) << ','
           << format_double(r.K_hat) << ',' << format_double(r.inv_r) << '\n';
}

inline int cmd_sweep_figure(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out,
                            std::ostream& err) {
    const auto rows = sweep_figure(cfg, dir, err);
    if (!dir.empty()) {
        std::ofstream f(dir / "summary.csv");
        if (!f) throw IoError("cannot write summary into '" + dir.string() + "'");
        write_sweep_summary(f, rows);
    }
    write_sweep_summary(out, rows);
    return 0;
}

inline int cmd_selftest(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
    const GeneratorPair g = GeneratorPair::from_descriptor(cfg.generator);
    return print_selftest(out, run_selftest(g, cfg.seed)) ? 0 : 1;
}

/// Re-fits every curve of a decay CSV.
inline int cmd_fit(std::istream& in, std::ostream& out, std::ostream&) {
    const auto curves = read_decay_csv(in);
    out << "s,b,iota,slope,intercept,residual,points_used,floored_excluded\n";
    for (const auto& c : curves) {
        const RateFit f = fit_rate(c);
        out << format_double(c.s) << ',' << format_double(c.b) << ',' << c.iota << ',' << format_double(f.slope) << ','
            << format_double(f.intercept) << ',' << format_double(f.residual) << ',' << f.points_used << ','
            << f.floored_excluded << '\n';
    }
    return 0;
}

}  // namespace bendlab
