#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdk/experiment.hpp"
#include "doctest.h"

using namespace cdk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("cdk_cli_" + tag);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "clock", "model": "free-jacobi", "xi": 0.0,
            "index": [100, 400], "j_range": 3, "threshold": 0.05,
            "grid": [[0, 0], [1, 0.5]], "prefix": "p"})");
    CHECK(c.kind == "clock");
    CHECK(c.model == "free-jacobi");
    CHECK(c.xis == std::vector<double>{0.0});
    CHECK(c.indices == std::vector<double>{100.0, 400.0});
    CHECK(c.j_range == 3);
    CHECK(c.threshold == 0.05);
    CHECK(c.grid.size() == 2);
    CHECK(c.grid[1] == Complex(1.0, 0.5));
    CHECK(c.prefix == "p");

    // xi as a list
    ExperimentConfig multi = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "mfun", "model": "free-jacobi", "xi": [0, 3]})");
    CHECK(multi.xis == std::vector<double>{0.0, 3.0});

    // defaults
    CHECK(multi.prefix == "experiment");
    CHECK(multi.f == 0.0);
    CHECK(multi.g == 1.0);
    CHECK(multi.threshold == -1.0);
    CHECK_FALSE(multi.assert_decay);

    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("[1, 2]"), ConfigError);
    // missing / wrong schema version
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"kind": "mfun", "model": "free-jacobi", "xi": 0})"),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 2, "kind": "mfun", "model": "free-jacobi", "xi": 0})"),
        ConfigError);
    // unknown key rejected
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 1, "kind": "mfun", "model": "free-jacobi", "xi": 0,
                "extra": true})"),
        ConfigError);
    // unknown kind
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 1, "kind": "nope", "model": "free-jacobi", "xi": 0,
                "index": [1]})"),
        ConfigError);
    // empty index list
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 1, "kind": "clock", "model": "free-jacobi", "xi": 0,
                "index": []})"),
        ConfigError);
    // missing xi where required
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 1, "kind": "clock", "model": "free-jacobi",
                "index": [100]})"),
        ConfigError);
    // malformed grid entry
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(
            R"({"schema": 1, "kind": "mfun", "model": "free-jacobi", "xi": 0,
                "grid": [[1]]})"),
        ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/config.json"),
                    ConfigError);
}

TEST_CASE("mfun run reports non-convergence without failing") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "mfun", "model": "log-periodic", "xi": 0,
            "prefix": "lp"})");
    fs::path dir = temp_dir("mfun");
    CHECK(run_experiment(c, dir.string()) == 0);
    std::string report = slurp(dir / "lp_report.json");
    CHECK(report.find("\"converged\": false") != std::string::npos);
    CHECK(report.find("\"pass\": true") != std::string::npos);
    CHECK(fs::exists(dir / "lp_meta.txt"));
    fs::remove_all(dir);
}

TEST_CASE("threshold failures return nonzero") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "clock", "model": "free-jacobi", "xi": 0,
            "index": [200], "threshold": 1e-12, "prefix": "cl"})");
    fs::path dir = temp_dir("clockfail");
    CHECK(run_experiment(c, dir.string()) == 1);
    CHECK(slurp(dir / "cl_report.json").find("\"pass\": false") !=
          std::string::npos);
    fs::remove_all(dir);

    // semantic problems discovered at run time also surface as ConfigError
    ExperimentConfig bad = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "clock", "model": "no-such-model", "xi": 0,
            "index": [200]})");
    CHECK_THROWS_AS(run_experiment(bad, dir.string()), ConfigError);
}

TEST_CASE("identical configs give byte-identical outputs") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "universality-scalar", "model": "free-jacobi",
            "xi": 0, "index": [150, 300], "threshold": 0.1, "prefix": "u"})");
    fs::path d1 = temp_dir("rep1"), d2 = temp_dir("rep2");
    CHECK(run_experiment(c, d1.string(), 2) == 0);
    CHECK(run_experiment(c, d2.string(), 2) == 0);
    for (const char* name : {"u_report.json", "u_150.csv", "u_300.csv"})
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("kernel tables and opuc runs produce per-index files") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "kernel", "model": "chebyshev", "xi": 0.1,
            "index": [8], "grid": [[0, 0], [0.5, 0.2]], "prefix": "k"})");
    fs::path dir = temp_dir("kernel");
    CHECK(run_experiment(c, dir.string()) == 0);
    std::string csv = slurp(dir / "k_8.csv");
    CHECK(csv.rfind("re_z,im_z,re_w,im_w,re_k11", 0) == 0);
    fs::remove_all(dir);

    ExperimentConfig o = ExperimentConfig::from_json_text(
        R"({"schema": 1, "kind": "opuc", "model": "opuc-free", "xi": 0,
            "index": [500], "threshold": 0.05, "prefix": "o"})");
    fs::path odir = temp_dir("opuc");
    CHECK(run_experiment(o, odir.string()) == 0);
    CHECK(fs::exists(odir / "o_500.csv"));
    fs::remove_all(odir);
}

TEST_CASE("model list is populated") {
    auto models = list_models();
    CHECK(models.size() >= 8);
    CHECK(models[0] == "free-jacobi");
}
