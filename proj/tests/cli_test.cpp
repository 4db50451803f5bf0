#include "mcgraph/catalog.hpp"
#include "mcgraph/cli.hpp"
#include "mcgraph/config.hpp"
#include "mcgraph/scenario.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace mcgraph;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mcgraph");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
    std::ofstream(name) << text;
    return name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int config_error_line(const std::string& text) {
    try {
        Config::parse(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

const char* kCapConfig = R"(# coarse cap
[domain]
shape = "disk"
radius = 1

[curvature]
value = 0.4

[reference]
name = "cap"

[grid]
h = 0.125, 0.0625
)";

} // namespace

TEST_CASE("config grammar") {
    const Config c = Config::parse("# top\n[a]\nx = 1.5\nname = \"disk \\\"one\\\"\"\nlist = 0.25, 0.5, 1\nwords = \"p\", \"q\"\n");
    CHECK(c.number("a", "x") == 1.5);
    CHECK(c.string("a", "name") == "disk \"one\"");
    CHECK(c.numbers("a", "list") == std::vector<double>{0.25, 0.5, 1.0});
    CHECK(c.strings("a", "words") == std::vector<std::string>{"p", "q"});
    CHECK(c.number("a", "missing", 7.0) == 7.0);
    CHECK(c.line("a", "list") == 5);
    CHECK_THROWS_AS(c.number("a", "name"), ConfigError);

    CHECK(config_error_line("[a]\nx = 1\nx = 2\n") == 3);
    CHECK(config_error_line("x = 1\n") == 1);
    CHECK(config_error_line("[a]\nx = 1,\n") == 2);
    CHECK(config_error_line("[a]\nx = disk\n") == 2);
    CHECK(config_error_line("[a]\nBadKey = 1\n") == 2);
    CHECK(config_error_line("[a]\n[a]\n") == 2);
    CHECK(config_error_line("[a]\nx = \"open\n") == 2);
}

TEST_CASE("config hash is FNV-1a over the canonical text") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    // Comments, spacing and order do not change the canonical form.
    const Config a = Config::parse("[s]\nx = 1\ny = 2\n");
    const Config b = Config::parse("# note\n[s]\ny=2\n\nx   = 1\n");
    CHECK(a.canonical() == b.canonical());
}

TEST_CASE("reference catalog entries pass their self-test") {
    for (const std::string& name : reference_names()) {
        const ReferenceSolution r = make_reference(name);
        CHECK_MESSAGE(r.self_test_ratio >= 2.5, name);
    }
    const ReferenceSolution cat = make_reference("catenoid_annulus");
    CHECK(cat.u({2.0, 0.0}) == doctest::Approx(oracle::kCatenoidAt).epsilon(1e-14));
    const ReferenceSolution cap = make_reference("cap", {{"radius", 2.5}, {"rim", 1.0}});
    CHECK(cap.H == 0.4);
    CHECK(cap.u({0.0, 0.0}) == doctest::Approx(oracle::kCapMin).epsilon(1e-14));
    CHECK_THROWS_AS(make_reference("helicoid"), Error);
    CHECK_THROWS_AS(make_reference("cap", {{"neck", 1.0}}), Error);
}

TEST_CASE("scenario loading reports the offending key") {
    auto error_of = [](const std::string& text) -> std::string {
        try {
            load_scenario(Config::parse(text));
        } catch (const ConfigError& e) {
            return e.key();
        }
        return "";
    };
    CHECK(error_of("[curvature]\nvalue = 0.4\n") == "domain");
    CHECK(error_of("[domain]\nshape = \"hexagon\"\n[curvature]\nvalue = 0\n") == "domain.shape");
    CHECK(error_of("[domain]\nshape = \"disk\"\n[curvature]\nvalue = 0\n[grid]\nh = 0.1, 0.2\n") == "grid.h");
    CHECK(error_of("[domain]\nshape = \"disk\"\n[curvature]\nvalue = 0\n[reference]\nname = \"nope\"\n") == "reference.name");
    CHECK(error_of("[domain]\nshape = \"disk\"\n[curvature]\nvalue = 0\n[solver]\ndamping = 3\n") == "solver.n");
    CHECK(error_of("[domain]\nshape = \"disk\"\nradus = 1\n[curvature]\nvalue = 0\n") == "domain.radus");
    // Bump data where the certificate does not apply needs an explicit radius.
    CHECK(error_of("[domain]\nshape = \"disk\"\n[curvature]\nvalue = 0.4\n[boundary]\nkind = \"bump\"\n") ==
          "boundary.radius_from_h");
}

TEST_CASE("check-serrin exit codes") {
    const CliResult ok = cli({"check-serrin", "--domain", "disk", "--H", "0.5"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("margin 0") != std::string::npos);
    const CliResult bad = cli({"check-serrin", "--domain", "disk", "--H", "0.55"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("margin -0.1") != std::string::npos);
    CHECK(cli({"check-serrin", "--domain", "dumbbell", "--H", "0"}).code == 1);
    CHECK(cli({"check-serrin", "--domain", "ellipse", "--set", "domain.a=2", "--H", "0.1"}).code == 0);
}

TEST_CASE("estimates prints the ledger or a refusal") {
    const std::string cfg = write_file("est.cfg", "[domain]\nshape = \"disk\"\n[curvature]\nvalue = 0.4\n[estimates]\nu_sup = 0.21\n");
    const CliResult r = cli({"estimates", "--config", cfg});
    CHECK(r.code == 0);
    for (const char* key : {"mu = ", "delta = ", "C = 44", "nu = ", "log_k = ", "a = ", "boundary_gradient_bound = "})
        CHECK_MESSAGE(r.out.find(key) != std::string::npos, key);
    const CliResult zero = cli({"estimates", "--config", cfg, "--set", "curvature.value=0"});
    CHECK(zero.out.find("limit = true") != std::string::npos);
    const CliResult refused = cli({"estimates", "--config", cfg, "--set", "curvature.value=0.55"});
    CHECK(refused.code == 3);
    CHECK(refused.out.find("Serrin condition") != std::string::npos);
}

TEST_CASE("run writes the artifacts and a deterministic report") {
    const std::string cfg = write_file("cap.cfg", kCapConfig);
    const CliResult a = cli({"run", "--config", cfg, "--out", "run_a", "--quiet"});
    CHECK(a.code == 0);
    for (const char* f : {"report.json", "traces.csv", "fields.csv", "heatmap.svg"})
        CHECK_MESSAGE(std::filesystem::exists(std::filesystem::path("run_a") / f), f);
    const CliResult b = cli({"run", "--config", cfg, "--out", "run_b", "--quiet"});
    CHECK(b.code == 0);
    const std::regex wall("\"wall_time\": [0-9.e+-]+");
    const std::string ra = std::regex_replace(slurp("run_a/report.json"), wall, "");
    const std::string rb = std::regex_replace(slurp("run_b/report.json"), wall, "");
    CHECK(ra == rb);
    const auto report = nlohmann::json::parse(slurp("run_a/report.json"));
    CHECK(report["schema"] == 1);
    CHECK(report["verdict"] == "converged");
    CHECK(report["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(report["ledger"].contains("height"));
    CHECK(report["ledger"].contains("boundary_gradient"));
    CHECK(report["reference"]["errors"].size() == 2);
    const std::string svg = slurp("run_a/heatmap.svg");
    CHECK(svg.find("max ") != std::string::npos);
    CHECK(svg.find("min ") != std::string::npos);
}

TEST_CASE("run and sweep exit codes") {
    const std::string missing = write_file("missing.cfg", "[curvature]\nvalue = 0.4\n");
    const CliResult r = cli({"run", "--config", missing});
    CHECK(r.code == 4);
    CHECK(r.err.find("domain") != std::string::npos);
    CHECK(cli({"run", "--config", "does_not_exist.cfg"}).code == 4);
    CHECK(cli({"run"}).code == 4);

    // Solver failure: curvature far beyond anything the disk admits.
    const std::string cap = write_file("cap2.cfg", kCapConfig);
    CHECK(cli({"run", "--config", cap, "--out", "run_fail", "--quiet", "--set", "curvature.value=1.5", "--set",
               "solver.max_iters=30", "--set", "solver.gradient_cap=50", "--grid-h", "0.125"})
              .code == 2);

    const std::string empty = write_file("empty_sweep.cfg", std::string(kCapConfig) + "[sweep]\n");
    CHECK(cli({"sweep", "--config", empty}).code == 4);

    const std::string sweep =
        write_file("sweep.cfg", std::string(kCapConfig) + "[sweep]\nspacings = 0.125, 0.0625, 0.03125\n");
    const CliResult s = cli({"sweep", "--config", sweep, "--out", "sweep_out", "--quiet"});
    CHECK(s.code == 0);
    const std::string csv = slurp("sweep_out/sweep.csv");
    CHECK(csv.rfind("label,H,h,verdict,exit_code,error,ratio", 0) == 0);
    CHECK(std::filesystem::exists("sweep_out/h_0.0625/report.json"));
}
