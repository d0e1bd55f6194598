#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "htrl/config.hpp"
#include "htrl/error_law.hpp"
#include "htrl/io.hpp"

using namespace htrl;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("HTRL_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli("fn-en --config /does/not/exist.conf --out cli_t0") == 2);
    CHECK(run_cli("fn-en --set nonsense_key=3 --out cli_t0") == 2);
    CHECK(run_cli("fn-en --set instances --out cli_t0") == 2);
    // Unknown config keys are rejected by name.
    fs::create_directories("cli_t0");
    write_text_file("cli_t0/bad.conf", "bogus_key = 1\n");
    CHECK(run_cli("fn-en --config cli_t0/bad.conf --out cli_t0") == 2);
}

TEST_CASE("reruns are byte-identical and thread-count independent") {
    const std::string base =
        "mep-growth --set \"n_grid=[64,128,256,512]\" --set reps=40 --seed 9";
    REQUIRE(run_cli(base + " --threads 1 --out cli_t1") == 0);
    REQUIRE(run_cli(base + " --threads 1 --out cli_t2") == 0);
    REQUIRE(run_cli(base + " --threads 2 --out cli_t3") == 0);
    for (const char* name : {"sup_mc.csv", "growth_fit.csv", "summary.json"}) {
        const std::string a = read_text_file(std::string("cli_t1/") + name);
        CHECK(a == read_text_file(std::string("cli_t2/") + name));
        CHECK(a == read_text_file(std::string("cli_t3/") + name));
    }
}

TEST_CASE("summary echoes a re-parseable config with full-precision numbers") {
    REQUIRE(run_cli("fn-en --set instances=4 --set delta_resolution=0.0125 --out cli_t4") == 0);
    const auto summary = nlohmann::json::parse(read_text_file("cli_t4/summary.json"));
    CHECK(summary["command"] == "fn-en");
    const ConfigValue echoed = ConfigValue::parse(summary["config_echo"].get<std::string>());
    CHECK(echoed.get("instances").as_uint() == 4);
    CHECK(echoed.get("delta_resolution").as_number() == 0.0125);
    CHECK(echoed.get("noise").get("kind").as_string() == "pareto");
    // Round trip: serialize -> parse -> equality.
    const ConfigValue again = ConfigValue::parse(echoed.serialize());
    CHECK(again == echoed);
    // The announced hash matches the echoed text.
    CHECK(summary["config_hash"].get<std::string>() ==
          git_blob_hash(summary["config_echo"].get<std::string>()));
    CHECK(summary["criteria"].size() == 1);

    // CSV numbers are written with 17 significant digits: parsing them back
    // reproduces the double exactly.
    const double v = 0.1234567890123456789;
    CHECK(std::stod(format_full(v)) == v);
}

TEST_CASE("hashes match known vectors") {
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    // Git's well-known empty-blob id.
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("config parsing, overrides, and law records") {
    const std::string text =
        "a = 1.5\n"
        "b = \"hi #there\"   # trailing comment\n"
        "flag = true\n"
        "grid = [1, 2, 3]\n"
        "noise = { kind = \"scaled\", scale = 3, base = { kind = \"pareto\", tail_index = 2 } }\n";
    ConfigValue cfg = ConfigValue::parse(text);
    CHECK(cfg.get("a").as_number() == 1.5);
    CHECK(cfg.get("b").as_string() == "hi #there");
    CHECK(cfg.get("flag").as_bool());
    CHECK(cfg.get("grid").as_array().size() == 3);
    const ErrorLaw law = law_from_config(cfg.get("noise"));
    CHECK(law.kind() == LawKind::pareto_symmetric);
    CHECK(law.scale() == 3.0);
    CHECK(law.tail_prob(3.0) == Catch::Approx(0.5));

    CHECK(law.tail_prob(6.0) == Catch::Approx(0.2));
    cfg.override_path("noise.base.tail_index", "4");
    CHECK(law_from_config(cfg.get("noise")).tail_prob(6.0) == Catch::Approx(1.0 / 17.0));
    CHECK_THROWS_AS(cfg.override_path("noise.bogus", "1"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigValue::parse("key_without_value\n"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigValue::parse("x = @@\n"), std::invalid_argument);

    // Law <-> config round trips for every kind.
    for (const auto& l :
         {ErrorLaw::gaussian(0.25), ErrorLaw::student_t(5.0), ErrorLaw::pareto_symmetric(4.5),
          ErrorLaw::scaled(ErrorLaw::student_t(3.0), 2.0)}) {
        const ErrorLaw back = law_from_config(law_to_config(l));
        CHECK(back.kind() == l.kind());
        CHECK(back.param() == l.param());
        CHECK(back.scale() == l.scale());
    }
}

TEST_CASE("phase diagram summary carries one criteria row per mapped cell") {
    REQUIRE(run_cli("phase-diagram --out cli_t6 --set reps=5 "
                    "--set \"n_grid=[64,128,256,512]\" --set \"alphas=[0,1]\" "
                    "--set \"ps=[2,4]\"") == 0);
    const auto summary = nlohmann::json::parse(read_text_file("cli_t6/summary.json"));
    CHECK(summary["criteria"].size() == 4);

    // Unmapped alphas are skipped, leaving an empty criteria list; the JSON
    // stays well formed for exploratory runs.
    REQUIRE(run_cli("phase-diagram --out cli_t7 --set reps=5 "
                    "--set \"n_grid=[64,128,256,512]\" --set \"alphas=[0.5]\" "
                    "--set \"ps=[2]\"") == 0);
    const auto empty = nlohmann::json::parse(read_text_file("cli_t7/summary.json"));
    CHECK(empty["criteria"].is_array());
    CHECK(empty["criteria"].empty());
}

TEST_CASE("bound-check emits the stated row schema") {
    REQUIRE(run_cli("bound-check --out cli_t8 --set \"n_grid=[64,128,256]\" "
                    "--set reps=30 --set psi_reps=40") == 0);
    const std::string csv = read_text_file("cli_t8/bound_check.csv");
    CHECK(csv.rfind("n,mc_mean,mc_stderr,theorem_bound,satisfied\n", 0) == 0);
    const std::string sup = read_text_file("cli_t8/summary.json");
    CHECK(nlohmann::json::parse(sup)["tables"][0]["name"] == "bound_check");
}

TEST_CASE("default lse-rate config passes its own check") {
    // Built-in defaults: isotonic class, Gaussian noise, step truth; the
    // measured exponent sits near 1/3 and --check exits 0.
    REQUIRE(run_cli("lse-rate --check --out cli_t9") == 0);
    const auto summary = nlohmann::json::parse(read_text_file("cli_t9/summary.json"));
    REQUIRE(summary["criteria"].size() == 1);
    CHECK(summary["criteria"][0]["pass"].get<bool>());
    const double e = summary["criteria"][0]["measured"].get<double>();
    CHECK(e > 0.25);
    CHECK(e < 0.44);
}

TEST_CASE("check flag gates the exit status") {
    const std::string base =
        "mep-growth --set \"n_grid=[32,64,128,256]\" --set reps=20 "
        "--set slope_lo=9 --set slope_hi=10 --out cli_t5";
    // An impossible slope window fails under --check ...
    CHECK(run_cli(base + " --check") == 1);
    // ... and the same run without --check reports but exits 0.
    CHECK(run_cli(base) == 0);
}
