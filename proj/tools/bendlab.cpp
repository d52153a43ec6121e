#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bendlab/bendlab.hpp"

namespace {

bendlab::Point parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw bendlab::ConfigError("point '" + s + "' must be written as x1,x2");
    return {bendlab::parse_double(s.substr(0, comma)), bendlab::parse_double(s.substr(comma + 1))};
}

struct Overrides {
    std::string config;
    std::optional<double> alpha, tol;
    std::optional<int> jmin, jmax, q, threads, supersample;
    std::optional<unsigned long long> seed;
    std::optional<std::string> out, method;
};

bendlab::ExperimentConfig effective_config(const Overrides& o) {
    bendlab::ExperimentConfig c = o.config.empty() ? bendlab::ExperimentConfig{} : bendlab::load_config(o.config);
    if (o.alpha) c.alpha = *o.alpha;
    if (o.tol) c.quad.tol = *o.tol;
    if (o.jmin) c.j_min = *o.jmin;
    if (o.jmax) c.j_max = *o.jmax;
    if (o.q) c.quad.q = *o.q;
    if (o.threads) c.threads = *o.threads;
    if (o.supersample) c.supersample = *o.supersample;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.method) c.quad.method = bendlab::parse_method(*o.method);
    c.validate();
    return c;
}

// Runs `fn` with the configured output stream ('-' is stdout).
template <class F>
int with_output(const std::string& path, F&& fn) {
    if (path.empty() || path == "-") return fn(std::cout);
    std::ofstream f(path);
    if (!f) throw bendlab::IoError("cannot write '" + path + "'");
    return fn(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bendlab: bendlet transform, decay sweeps and boundary classification"};
    app.require_subcommand(1);
    Overrides ov;
    app.add_option("--config", ov.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--alpha", ov.alpha, "anisotropy exponent alpha");
    app.add_option("--jmin", ov.jmin, "coarsest scale index");
    app.add_option("--jmax", ov.jmax, "finest scale index");
    app.add_option("--q", ov.q, "grid quadrature oversampling");
    app.add_option("--tol", ov.tol, "adaptive quadrature tolerance");
    app.add_option("--method", ov.method, "quadrature method (grid|adaptive)");
    app.add_option("--threads", ov.threads, "worker threads (default: BENDLAB_THREADS or all cores)");
    app.add_option("--out", ov.out, "output file ('-' for stdout); output directory for sweep-figure");
    app.add_option("--seed", ov.seed, "seed for randomized self-tests");
    app.add_option("--supersample", ov.supersample, "supersampling factor when rasterizing analytic signals");
    bool emit = false;
    app.add_flag("--emit-config", emit, "print the effective configuration before running");

    double a = 0.0625, s = 0.0, b = 0.0;
    std::vector<double> t{0.0, 0.0};
    int iota = 1;

    auto* coeff = app.add_subcommand("coeff", "print one transform coefficient");
    coeff->add_option("--a", a, "scale a in (0,1)");
    coeff->add_option("--s", s, "shear s in [-1,1]");
    coeff->add_option("--b", b, "bending b");
    coeff->add_option("--t", t, "translation x1 x2")->expected(2);
    coeff->add_option("--iota", iota, "cone index (+1 or -1)");

    auto* decay = app.add_subcommand("decay", "decay curve over jmin..jmax as CSV");
    decay->add_option("--s", s, "shear s in [-1,1]");
    decay->add_option("--b", b, "bending b");
    decay->add_option("--t", t, "translation x1 x2")->expected(2);
    decay->add_option("--iota", iota, "cone index (+1 or -1)");

    std::vector<std::string> points;
    auto* classify = app.add_subcommand("classify", "classify query points (JSON)");
    classify->add_option("--point", points, "query point x1,x2 (repeatable; default: config points)");

    auto* figure = app.add_subcommand("sweep-figure", "per-radius decay curves and curvature summary for circles");
    auto* selftest = app.add_subcommand("selftest", "run the structural invariant suite");
    std::string fit_path;
    auto* fit = app.add_subcommand("fit", "re-fit decay rates from a decay CSV");
    fit->add_option("csv", fit_path, "decay CSV ('-' for stdin)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const bendlab::ExperimentConfig cfg = effective_config(ov);
        if (emit) std::cerr << bendlab::emit_config(cfg);
        if (*coeff) {
            const bendlab::BendletParams bp{a, s, b, {t[0], t[1]}, bendlab::cone_from_iota(iota)};
            return with_output(cfg.out, [&](std::ostream& o) { return bendlab::cmd_coeff(cfg, bp, o, std::cerr); });
        }
        if (*decay) {
            return with_output(cfg.out, [&](std::ostream& o) {
                return bendlab::cmd_decay(cfg, s, b, {t[0], t[1]}, bendlab::cone_from_iota(iota), o, std::cerr);
            });
        }
        if (*classify) {
            std::vector<bendlab::Point> pts = cfg.points;
            if (!points.empty()) {
                pts.clear();
                for (const auto& p : points) pts.push_back(parse_point(p));
            }
            return with_output(cfg.out, [&](std::ostream& o) { return bendlab::cmd_classify(cfg, pts, o, std::cerr); });
        }
        if (*figure) {
            const std::string dir = cfg.out == "-" ? "" : cfg.out;
            return bendlab::cmd_sweep_figure(cfg, dir, std::cout, std::cerr);
        }
        if (*selftest) return bendlab::cmd_selftest(cfg, std::cout, std::cerr);
        if (*fit) {
            if (fit_path == "-") return bendlab::cmd_fit(std::cin, std::cout, std::cerr);
            std::ifstream in(fit_path);
            if (!in) throw bendlab::FileNotFoundError("cannot open '" + fit_path + "'");
            return bendlab::cmd_fit(in, std::cout, std::cerr);
        }
    } catch (const bendlab::ResolutionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const bendlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
