#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "magres/cli.hpp"
#include "magres/io.hpp"

using namespace magres;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("magres_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kEqConfig =
    "[experiment]\n"
    "task = \"equalization\"\n"
    "train_len = 1500\n"
    "test_len = 400\n"
    "seed = 11\n"
    "[reservoir]\n"
    "n_nodes = 20\n";

const char* kCharacterizeConfig =
    "[device]\n"
    "v_dd = 0.8\n"
    "beta = 20.0\n"
    "alpha0 = 0.0\n"
    "[characterize]\n"
    "v_min = -0.1\n"
    "v_max = 0.1\n"
    "n_points = 11\n"
    "samples_per_point = 3\n";

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("cmd_run writes a deterministic report and manifest") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);

    cli::Options opt;
    opt.out_dir = tmp.file("out_a");
    REQUIRE(cli::cmd_run(tmp.file("eq.toml"), opt) == cli::kExitOk);

    const std::string report_a = io::read_file(tmp.file("out_a/report.json"));
    const auto parsed = nlohmann::json::parse(report_a);
    CHECK(parsed["task"] == "equalization");
    CHECK(parsed["seed"] == 11);
    REQUIRE(parsed["results"].size() == 1);
    CHECK(parsed["results"][0]["n_nodes"] == 20);
    CHECK(parsed["results"][0]["srr"].is_number());

    // manifest lists every output, no orphans
    const auto manifest = nlohmann::json::parse(io::read_file(tmp.file("out_a/manifest.json")));
    CHECK(manifest["seed"] == 11);
    std::vector<std::string> listed = manifest["outputs"];
    int files_on_disk = 0;
    for (const auto& entry : fs::directory_iterator(tmp.file("out_a"))) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        ++files_on_disk;
        CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());
    }
    CHECK(files_on_disk == static_cast<int>(listed.size()));

    opt.out_dir = tmp.file("out_b");
    REQUIRE(cli::cmd_run(tmp.file("eq.toml"), opt) == cli::kExitOk);
    CHECK(io::read_file(tmp.file("out_b/report.json")) == report_a);
}

TEST_CASE("cmd_run executes an n_nodes ladder with one result block per size") {
    TempDir tmp;
    io::write_file(tmp.file("mg.toml"),
                   "[experiment]\n"
                   "task = \"mackey_glass\"\n"
                   "train_len = 800\n"
                   "test_len = 120\n"
                   "seed = 5\n"
                   "[reservoir]\n"
                   "n_nodes = [10, 30]\n"
                   "washout = 60\n");
    cli::Options opt;
    opt.out_dir = tmp.file("out");
    REQUIRE(cli::cmd_run(tmp.file("mg.toml"), opt) == cli::kExitOk);
    const auto report = nlohmann::json::parse(io::read_file(tmp.file("out/report.json")));
    REQUIRE(report["results"].size() == 2);
    CHECK(report["results"][0]["n_nodes"] == 10);
    CHECK(report["results"][1]["n_nodes"] == 30);
    CHECK(report["results"][0]["nrmse"].contains("100"));
    CHECK(fs::exists(tmp.file("out/mg_trace_n10.csv")));
    CHECK(fs::exists(tmp.file("out/mg_trace_n30.csv")));
    CHECK(fs::exists(tmp.file("out/readout_n10.txt")));
    CHECK(fs::exists(tmp.file("out/readout_n30.txt")));
}

TEST_CASE("cmd_run emits csv metrics when asked") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);
    cli::Options opt;
    opt.out_dir = tmp.file("out");
    opt.format = "csv";
    REQUIRE(cli::cmd_run(tmp.file("eq.toml"), opt) == cli::kExitOk);
    const std::string metrics = io::read_file(tmp.file("out/metrics.csv"));
    CHECK(metrics.rfind("n_nodes,seed,metric,value\n", 0) == 0);
    CHECK(metrics.find(",srr,") != std::string::npos);
    CHECK(metrics.find(",ber,") != std::string::npos);
}

TEST_CASE("cli seed precedence: flag over config over environment") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);

    cli::Options opt;
    opt.out_dir = tmp.file("flag");
    opt.seed = 99;
    REQUIRE(cli::cmd_run(tmp.file("eq.toml"), opt) == cli::kExitOk);
    CHECK(nlohmann::json::parse(io::read_file(tmp.file("flag/report.json")))["seed"] == 99);

    // config without a seed falls back to MAGRES_SEED
    std::string no_seed(kEqConfig);
    const auto pos = no_seed.find("seed = 11\n");
    no_seed.erase(pos, std::string("seed = 11\n").size());
    io::write_file(tmp.file("noseed.toml"), no_seed);

    ::setenv("MAGRES_SEED", "1234", 1);
    cli::Options env_opt;
    env_opt.out_dir = tmp.file("env");
    REQUIRE(cli::cmd_run(tmp.file("noseed.toml"), env_opt) == cli::kExitOk);
    CHECK(nlohmann::json::parse(io::read_file(tmp.file("env/report.json")))["seed"] == 1234);

    ::setenv("MAGRES_SEED", "junk", 1);
    cli::Options junk_opt;
    junk_opt.out_dir = tmp.file("junk");
    CHECK(cli::cmd_run(tmp.file("noseed.toml"), junk_opt) == cli::kExitConfig);
    ::unsetenv("MAGRES_SEED");
}

TEST_CASE("cmd_run exit codes") {
    TempDir tmp;
    cli::Options opt;
    opt.out_dir = tmp.file("out");

    SUBCASE("missing config file") {
        CHECK(cli::cmd_run(tmp.file("missing.toml"), opt) == cli::kExitConfig);
    }

    SUBCASE("unknown key") {
        io::write_file(tmp.file("bad.toml"), "[experiment]\ntask = \"equalization\"\nbogus = 1\n");
        CHECK(cli::cmd_run(tmp.file("bad.toml"), opt) == cli::kExitConfig);
    }

    SUBCASE("degenerate identity channel is a task failure") {
        std::string cfg(kEqConfig);
        cfg += "[channel]\nfir_taps = [1.0]\npoly_coeffs = [0.0, 1.0]\nnoise_amp = 0.0\n";
        io::write_file(tmp.file("degenerate.toml"), cfg);
        CHECK(cli::cmd_run(tmp.file("degenerate.toml"), opt) == cli::kExitTask);
    }

    SUBCASE("unwritable output directory") {
        io::write_file(tmp.file("blocker"), "not a directory\n");
        cli::Options bad_out;
        bad_out.out_dir = tmp.file("blocker/sub");
        io::write_file(tmp.file("eq.toml"), kEqConfig);
        CHECK(cli::cmd_run(tmp.file("eq.toml"), bad_out) == cli::kExitIo);
    }
}

TEST_CASE("cmd_characterize writes the transfer table") {
    TempDir tmp;
    io::write_file(tmp.file("dev.toml"), kCharacterizeConfig);
    cli::Options opt;
    opt.out_dir = tmp.file("out");
    REQUIRE(cli::cmd_characterize(tmp.file("dev.toml"), opt) == cli::kExitOk);

    const std::string csv = io::read_file(tmp.file("out/transfer.csv"));
    CHECK(csv.rfind("v_in,mean,min,max\n", 0) == 0);
    CHECK(count_lines(csv) == 12);  // header + n_points

    // alpha0 = 0: mean column equals the analytic curve
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double v_in = 0.0;
        double mean = 0.0;
        row >> v_in >> mean;
        CHECK(mean == doctest::Approx(0.4 * std::tanh(20.0 * v_in)).epsilon(1e-7));
    }

    SUBCASE("characterize needs a device section") {
        io::write_file(tmp.file("empty.toml"), "[experiment]\ntask = \"equalization\"\n");
        CHECK(cli::cmd_characterize(tmp.file("empty.toml"), opt) == cli::kExitConfig);
    }
}

TEST_CASE("cmd_sweep aggregates metrics per value") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);
    cli::Options opt;
    opt.out_dir = tmp.file("out");
    opt.jobs = 2;
    opt.sweep_seeds = 2;

    REQUIRE(cli::cmd_sweep(tmp.file("eq.toml"), "n_nodes", {10.0, 20.0}, opt) == cli::kExitOk);
    const std::string csv = io::read_file(tmp.file("out/sweep.csv"));
    CHECK(csv.rfind("value,metric,median,iqr\n", 0) == 0);
    CHECK(count_lines(csv) == 3);  // header + 2 values
    CHECK(csv.find("srr") != std::string::npos);

    SUBCASE("unknown parameter exits 2") {
        CHECK(cli::cmd_sweep(tmp.file("eq.toml"), "warp_factor", {1.0}, opt) == cli::kExitConfig);
    }
}

TEST_CASE("single-value single-seed sweep equals the run metric") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);

    cli::Options run_opt;
    run_opt.out_dir = tmp.file("run");
    REQUIRE(cli::cmd_run(tmp.file("eq.toml"), run_opt) == cli::kExitOk);
    const auto report = nlohmann::json::parse(io::read_file(tmp.file("run/report.json")));
    const double srr = report["results"][0]["srr"].get<double>();

    cli::Options sweep_opt;
    sweep_opt.out_dir = tmp.file("sweep");
    sweep_opt.sweep_seeds = 1;
    REQUIRE(cli::cmd_sweep(tmp.file("eq.toml"), "n_nodes", {20.0}, sweep_opt) == cli::kExitOk);
    const std::string csv = io::read_file(tmp.file("sweep/sweep.csv"));

    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    REQUIRE(std::getline(is, line));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double value = 0.0;
    std::string metric;
    double median = 0.0;
    row >> value >> metric >> median;
    CHECK(value == 20.0);
    CHECK(metric == "srr");
    CHECK(median == doctest::Approx(srr).epsilon(1e-7));  // CSV carries 9 significant digits
}

TEST_CASE("dispatch maps argv to subcommands and exit codes") {
    TempDir tmp;
    io::write_file(tmp.file("eq.toml"), kEqConfig);
    const std::string config_arg = tmp.file("eq.toml");
    const std::string out_arg = tmp.file("out");

    {
        const char* argv[] = {"magres", "run", "--config", config_arg.c_str(),
                              "--out",  out_arg.c_str()};
        CHECK(cli::dispatch(6, argv) == cli::kExitOk);
        CHECK(fs::exists(tmp.file("out/report.json")));
    }
    {
        const char* argv[] = {"magres", "frobnicate"};
        CHECK(cli::dispatch(2, argv) == cli::kExitConfig);
    }
    {
        const char* argv[] = {"magres", "run"};
        CHECK(cli::dispatch(2, argv) == cli::kExitConfig);  // --config is required
    }
    {
        const char* argv[] = {"magres", "--help"};
        CHECK(cli::dispatch(2, argv) == cli::kExitOk);
    }
    {
        const char* argv[] = {"magres", "sweep", "--config", config_arg.c_str(),
                              "--param", "leak",  "--values", "0.2,0.4",
                              "--seeds", "1",     "--out",    out_arg.c_str()};
        CHECK(cli::dispatch(12, argv) == cli::kExitOk);
        CHECK(fs::exists(tmp.file("out/sweep.csv")));
    }
}
