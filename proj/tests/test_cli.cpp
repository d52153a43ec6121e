#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bendlab/bendlab.hpp"

using namespace bendlab;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

// Runs the CLI; returns exit status and whatever `redirect` leaves on stdout.
Run run(const std::string& args, const std::string& env = "", const std::string& redirect = "2>/dev/null") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(BENDLAB_CLI_PATH) + " " + args + " " + redirect;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "bendlab_test_cli";
    fs::create_directories(d);
    return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallClassify = R"({
  "schema": "bendlab.config/1",
  "signal": {"type": "disk", "center": [0, 0], "radius": 0.25},
  "scales": {"jmin": 4, "jmax": 6},
  "grids": {"s": {"lo": -0.1, "hi": 0.1, "step": 0.1}, "b": [-2.5, -2.0, -1.5, 0.0], "refine_factor": 2},
  "points": [[0.25, 0.0], [0.9, 0.9], [0.0, 0.25]]
})";

}  // namespace

TEST_CASE("configuration round trip", "[cli]") {
    ExperimentConfig c;
    c.alpha = 0.34;
    c.j_max = 7;
    c.b_grid.explicit_values = {-2.0, -1.0};
    c.points = {{0.25, 0.0}, {0.1, -0.3}};
    c.quad.method = QuadratureSpec::Method::grid;
    c.quad.q = 24;
    c.generator.window_order = 12;
    c.signal = to_json(Region{HalfPlane{0.3, {0.0, 0.1}, -1}});
    c.continuation = false;
    const std::string once = emit_config(c);
    const ExperimentConfig back = parse_config(once);
    CHECK(back == c);
    CHECK(emit_config(back) == once);
    CHECK(emit_config(parse_config(emit_config(ExperimentConfig{}))) == emit_config(ExperimentConfig{}));

    SECTION("rejections") {
        CHECK_THROWS_AS(parse_config(R"({"schema": "bendlab.config/2"})"), SchemaError);
        CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"alpha": 2.0})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scales": {"jmin": 6, "jmax": 5}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"quadrature": {"method": "simpson"}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"grids": {"cones": [0]}})"), DomainError);
        CHECK_THROWS_AS(load_config(scratch_dir() / "missing.json"), FileNotFoundError);
        ExperimentConfig bad;
        bad.signal = {{"type", "hexagon"}};
        CHECK_THROWS_AS(make_signal(bad), ConfigError);
    }
    SECTION("region descriptors") {
        for (const Region& r : {Region{Plane{}}, Region{Disk{{0.1, 0.2}, 0.3}}, Region{HalfPlane{-0.4, {0.0, 1.0}, 1}},
                                Region{GraphRegion{{0.0, 0.0}, 0.1, -2.0, {0.5}, -1}},
                                make_complement(Region{Disk{{0.0, 0.0}, 0.5}})})
            CHECK(to_json(region_from_json(to_json(r))) == to_json(r));
    }
}

TEST_CASE("decay CSV", "[cli]") {
    const GeneratorPair g = GeneratorPair::make_default();
    const Signal disk(Region{Disk{{0.0, 0.0}, 0.25}});
    const auto c = decay_curve(disk, g, 0.335, 0.0, -2.0, {0.25, 0.0}, Cone::horizontal, 4, 8);
    std::stringstream ss;
    write_decay_csv(ss, {c});
    const std::string text = ss.str();
    CHECK(text.rfind("# schema=bendlab.decay/1\n", 0) == 0);
    CHECK(text.find("j,a,s,b,t1,t2,iota,magnitude,floored\n") != std::string::npos);
    const auto back = read_decay_csv(ss);
    REQUIRE(back.size() == 1);
    CHECK(back[0].magnitude == c.magnitude);
    CHECK(back[0].a == c.a);
    CHECK(back[0].generator == c.generator);
    CHECK(fit_rate(back[0]).slope == fit_rate(c).slope);

    std::istringstream wrong("# schema=bendlab.decay/9\nj,a,s,b,t1,t2,iota,magnitude,floored\n");
    CHECK_THROWS_AS(read_decay_csv(wrong), SchemaError);
    std::istringstream untagged("j,a,s,b,t1,t2,iota,magnitude,floored\n4,0.0625,0,0,0,0,1,1e-6,0\n");
    CHECK_THROWS_AS(read_decay_csv(untagged), SchemaError);

    CHECK(parse_double(format_double(0.1)) == 0.1);
    CHECK(parse_double(format_double(-1.2345678901234567e-300)) == -1.2345678901234567e-300);
    CHECK(std::isinf(parse_double(format_double(std::numeric_limits<double>::infinity()))));
}

TEST_CASE("CLI commands", "[cli][process]") {
    const fs::path disk_cfg = write_file("disk.json", R"({"signal": {"type": "disk", "center": [0, 0], "radius": 0.25}})");
    const fs::path plane_cfg = write_file("plane.json", R"({"signal": {"type": "plane"}})");

    SECTION("coeff") {
        const Run one = run("--config " + plane_cfg.string() + " coeff --a 0.03 --s 0.2 --b 1 --t 0.1 0.1");
        CHECK(one.status == 0);
        CHECK(std::abs(parse_double(one.out.substr(0, one.out.find('\n')))) < 1e-8);

        const Run off = run("--config " + disk_cfg.string() + " coeff --a 0.0625 --t 0.9 0.9");
        CHECK(off.status == 0);
        CHECK(parse_double(off.out.substr(0, off.out.find('\n'))) == 0.0);

        const Run on = run("--config " + disk_cfg.string() + " coeff --a 0.015625 --s 0 --b -2 --t 0.25 0");
        CHECK(on.status == 0);
        const double lib = coefficient(Signal(Region{Disk{{0.0, 0.0}, 0.25}}), GeneratorPair::make_default(),
                                       {0.015625, 0.0, -2.0, {0.25, 0.0}, Cone::horizontal}, 0.335);
        CHECK(on.out == format_double(lib) + "\n");
    }
    SECTION("decay and fit") {
        const fs::path csv = scratch_dir() / "decay.csv";
        const Run d = run("--config " + disk_cfg.string() + " --jmin 4 --jmax 9 --out " + csv.string() +
                          " decay --s 0 --b -2 --t 0.25 0");
        REQUIRE(d.status == 0);
        const std::string text = read_file(csv);
        const auto slope_at = text.find("# slope=");
        REQUIRE(slope_at != std::string::npos);
        const double slope = parse_double(text.substr(slope_at + 8, text.find('\n', slope_at) - slope_at - 8));
        CHECK(slope == Approx(0.6675).margin(0.1));

        const Run f = run("fit " + csv.string());
        REQUIRE(f.status == 0);
        std::istringstream lines(f.out);
        std::string header, row;
        std::getline(lines, header);
        std::getline(lines, row);
        const auto fields = split_csv(row);
        REQUIRE(fields.size() == 8);
        CHECK(parse_double(fields[3]) == slope);

        const Run off = run("--config " + disk_cfg.string() + " decay --s 0 --b 0 --t 0.9 0.9");
        CHECK(off.status == 0);
        CHECK(off.out.find("# slope=all-floored") != std::string::npos);
        CHECK(off.out.find(",0\n") == std::string::npos);
    }
    SECTION("classify") {
        const fs::path cfg = write_file("small.json", kSmallClassify);
        const Run a = run("--config " + cfg.string() + " --threads 1 classify");
        const Run b = run("--config " + cfg.string() + " --threads 3 classify");
        REQUIRE(a.status == 0);
        CHECK(a.out == b.out);
        const Run env = run("--config " + cfg.string() + " classify", "BENDLAB_THREADS=2");
        CHECK(env.out == a.out);
        const json j = json::parse(a.out);
        CHECK(j.at("schema") == kClassifySchema);
        REQUIRE(j.at("results").size() == 3);
        CHECK(j["results"][0]["case"] == "MATCHED");
        CHECK(j["results"][0]["curvature"].get<double>() == Approx(4.0).epsilon(0.02));
        CHECK(j["results"][1]["case"] == "OFF_BOUNDARY");
        CHECK(j["results"][1]["curvature"].is_null());
        CHECK(j["results"][2]["case"] == "MATCHED");
        CHECK(j["results"][2]["iota"] == -1);

        const fs::path empty = write_file("empty.json", R"({"scales": {"jmin": 4, "jmax": 6}})");
        const Run e = run("--config " + empty.string() + " classify");
        CHECK(e.status == 0);
        CHECK(json::parse(e.out).at("results").empty());

        const Run pt = run("--config " + cfg.string() + " classify --point 0.9,0.9");
        CHECK(json::parse(pt.out).at("results").size() == 1);
    }
    SECTION("sweep-figure") {
        const fs::path cfg = write_file("figure.json", R"({
          "scales": {"jmin": 4, "jmax": 7},
          "grids": {"b": {"lo": -6, "hi": 0, "step": 0.5}},
          "radii": [0.15, 0.25, 0.40]
        })");
        const fs::path dir = scratch_dir() / "figure";
        fs::remove_all(dir);
        const Run r = run("--config " + cfg.string() + " --out " + dir.string() + " sweep-figure");
        REQUIRE(r.status == 0);
        CHECK(fs::exists(dir / "radius_0.15.csv"));
        CHECK(fs::exists(dir / "radius_0.40.csv"));
        CHECK(read_file(dir / "summary.csv") == r.out);
        std::istringstream lines(r.out);
        std::string line;
        std::getline(lines, line);
        CHECK(line == "# schema=bendlab.sweep-summary/1");
        std::getline(lines, line);
        double prev = 1e9;
        int rows = 0;
        while (std::getline(lines, line)) {
            const auto f = split_csv(line);
            const double radius = parse_double(f[0]), b_hat = parse_double(f[2]);
            CHECK(b_hat == Approx(-1.0 / (2.0 * radius)).margin(0.1));
            CHECK(std::abs(b_hat) < prev);
            prev = std::abs(b_hat);
            ++rows;
        }
        CHECK(rows == 3);
        std::ifstream per(dir / "radius_0.25.csv");
        CHECK(read_decay_csv(per).size() > 13);
    }
    SECTION("selftest") {
        const Run r = run("selftest");
        CHECK(r.status == 0);
        CHECK(r.out.find("FAIL") == std::string::npos);
        CHECK(r.out.find("Q_p identity") != std::string::npos);
    }
    SECTION("raster input and errors") {
        const fs::path pgm = scratch_dir() / "disk.pgm";
        save_pgm(rasterize(Signal(Region{Disk{{0.0, 0.0}, 0.5}}), 64), pgm);
        const fs::path cfg = write_file("pgm.json", R"({"signal": {"type": "pgm", "path": ")" + pgm.string() +
                                                        R"(", "domain": [-1, -1, 1, 1]}})");
        CHECK(run("--config " + cfg.string() + " coeff --a 0.25 --t 0.5 0").status == 0);
        // 1/32 pixels cannot resolve a = 2^-6
        CHECK(run("--config " + cfg.string() + " coeff --a 0.015625 --t 0.5 0").status == 3);
        const fs::path missing = write_file("nopgm.json", R"({"signal": {"type": "pgm", "path": "/nonexistent.pgm"}})");
        CHECK(run("--config " + missing.string() + " coeff").status == 2);
        const fs::path badschema = write_file("schema.json", R"({"schema": "bendlab.config/0"})");
        CHECK(run("--config " + badschema.string() + " selftest").status == 2);
        CHECK(run("--config /nonexistent.json selftest").status != 0);
        CHECK(run("coeff --a 1.5").status == 2);
        CHECK(run("").status != 0);
        CHECK(run("fit /nonexistent.csv").status == 2);
    }
    SECTION("emit-config is parseable") {
        const Run r = run("--config " + disk_cfg.string() + " --alpha 0.34 --emit-config coeff --a 0.5", "", "2>&1 >/dev/null");
        CHECK(r.status == 0);
        const ExperimentConfig c = parse_config(r.out);
        CHECK(c.alpha == 0.34);
    }
}
