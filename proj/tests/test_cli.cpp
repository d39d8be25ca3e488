#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qsl/cli.hpp"
#include "qsl/scenario.hpp"

using namespace qsl;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// The reference scenario with trimmed grids, so the solve stages finish in
// unit-test time. The problem data itself is untouched.
fs::path trimmed_scenario(const fs::path& dir) {
    njson j = njson::parse(slurp("scenarios/reference.json"));
    j["grids"]["m_nodes"] = 33;
    j["grids"]["M_max"] = 8.0;
    j["grids"]["r_min"] = 1e-4;
    j["grids"]["R_tr"] = 10.0;
    j["run"]["tol"] = 1e-6;
    j["run"]["j_max"] = 8;
    j["run"]["j_terms"] = 2;
    j["run"]["n_t"] = 2;
    j["run"]["n_z"] = 2;
    j["run"]["eps_samples"] = 6;
    j["run"]["n_max"] = 2;
    fs::path p = dir / "trimmed.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

}  // namespace

TEST_CASE("scenario parsing errors carry the error exit code") {
    fs::path dir = fresh_dir("qsl_cli_parse");
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(cmd_validate(bad.string(), dir.string()) == 2);
    fs::path missing = dir / "missing_field.json";
    std::ofstream(missing) << "{\"problem_q\": {}}";
    CHECK(cmd_validate(missing.string(), dir.string()) == 2);
    CHECK(cmd_validate((dir / "no_such_file.json").string(), dir.string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("validate subcommand on the reference scenario") {
    fs::path dir = fresh_dir("qsl_cli_validate");
    CHECK(cmd_validate("scenarios/reference.json", dir.string()) == 0);
    CHECK(fs::exists(dir / "validate.json"));
    njson v = njson::parse(slurp(dir / "validate.json"));
    CHECK(v["all_pass"].get<bool>());
    fs::remove_all(dir);
}

TEST_CASE("solve stages produce their artifacts and exit codes") {
    fs::path dir = fresh_dir("qsl_cli_solve");
    fs::path sc = trimmed_scenario(dir);

    // stage borel before stage q: missing upstream artifacts
    CHECK(cmd_solve(sc.string(), "borel", dir.string()) == 4);
    CHECK(cmd_solve(sc.string(), "nope", dir.string()) == 2);

    CHECK(cmd_solve(sc.string(), "q", dir.string()) == 0);
    CHECK(fs::exists(dir / "wk_grid.csv"));
    CHECK(fs::exists(dir / "norms_q.csv"));
    CHECK(fs::exists(dir / "decay_q.json"));
    {
        std::ifstream in(dir / "norms_q.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "j,norm_theta,norm_disc");
    }

    CHECK(cmd_solve(sc.string(), "borel", dir.string()) == 0);
    CHECK(fs::exists(dir / "vk_grid.csv"));
    CHECK(fs::exists(dir / "norms_b.csv"));
    CHECK(fs::exists(dir / "decay_b.json"));
    fs::remove_all(dir);
}

TEST_CASE("formal subcommand writes the coefficient tables") {
    fs::path dir = fresh_dir("qsl_cli_formal");
    fs::path sc = trimmed_scenario(dir);
    CliOverrides ov;
    ov.n_max = 2;
    CHECK(cmd_formal(sc.string(), dir.string(), ov) == 0);
    for (const char* f : {"formal_q.csv", "formal_b.csv"}) {
        CHECK(fs::exists(dir / f));
        std::ifstream in(dir / f);
        std::string header;
        std::getline(in, header);
        CHECK(header == "m,m_node,t_power,re,im");
    }
    fs::remove_all(dir);
}

TEST_CASE("report subcommand aggregates the fast checks") {
    fs::path dir = fresh_dir("qsl_cli_report");
    CHECK(cmd_report("scenarios/reference.json", dir.string()) == 0);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "report.csv"));
    njson rep = njson::parse(slurp(dir / "report.json"));
    CHECK(rep["all_pass"].get<bool>());
    CHECK(rep["checks"].size() >= 6);
    {
        std::ifstream in(dir / "report.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "section,name,value,pass");
    }
    fs::remove_all(dir);
}
