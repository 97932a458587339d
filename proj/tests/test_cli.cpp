#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "swarmforecast/timeseries.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int code = -1; // -1 means the process did not exit normally
    std::string output;
};

const char* cli_path() {
    const char* bin = std::getenv("SWARMFORECAST_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "SWARMFORECAST_CLI must point at the built binary");
    return bin;
}

std::string data_csv() {
    const char* dir = std::getenv("SWARMFORECAST_DATA");
    REQUIRE_MESSAGE(dir != nullptr, "SWARMFORECAST_DATA must point at the data directory");
    return (fs::path(dir) / "consumption.csv").string();
}

CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + std::string(cli_path()) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[512];
    while (std::fgets(buf, sizeof(buf), pipe) != nullptr) result.output += buf;
    const int status = pclose(pipe);
    if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
    return result;
}

fs::path fresh_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    const fs::path dir =
        fs::temp_directory_path() / ("swarmforecast_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// small budgets keep the integration tests quick
const char* kFastConfig = "swarm_size=12\nk_max=40\nmax_epochs=100\ntarget_fitness=0.0001\n";

} // namespace

TEST_CASE("train writes a model and a non-increasing trace") {
    const fs::path dir = fresh_dir("train");
    write(dir / "fast.cfg", kFastConfig);
    const CmdResult r = run_cli("train --data " + data_csv() + " --algorithm mpso-bp --out " +
                                (dir / "out").string() + " --seed 7 --split 2015-01 --config " +
                                (dir / "fast.cfg").string());
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "out" / "model.json"));
    const std::string trace = slurp(dir / "out" / "trace.csv");
    REQUIRE(trace.rfind("iteration,global_best_fitness\n", 0) == 0);
    std::stringstream lines(trace);
    std::string line;
    std::getline(lines, line); // header
    double prev = 1e300;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double v = std::stod(line.substr(line.find(',') + 1));
        CHECK(v <= prev);
        prev = v;
        ++rows;
    }
    CHECK(rows >= 1);
    fs::remove_all(dir);
}

TEST_CASE("identical train commands produce byte-identical model files") {
    const fs::path dir = fresh_dir("det");
    write(dir / "fast.cfg", kFastConfig);
    const std::string base = "train --data " + data_csv() + " --algorithm pso-bp --seed 11 " +
                             "--split 2015-01 --config " + (dir / "fast.cfg").string();
    REQUIRE(run_cli(base + " --out " + (dir / "a").string()).code == 0);
    REQUIRE(run_cli(base + " --out " + (dir / "b").string()).code == 0);
    CHECK(slurp(dir / "a" / "model.json") == slurp(dir / "b" / "model.json"));
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
    fs::remove_all(dir);
}

TEST_CASE("missing data file exits 1 and names the path") {
    const CmdResult r = run_cli("train --data /no/such/file.csv --algorithm bp --out /tmp/x");
    CHECK(r.code == 1);
    CHECK(r.output.find("/no/such/file.csv") != std::string::npos);
}

TEST_CASE("seed precedence: flag over environment") {
    const fs::path dir = fresh_dir("seed");
    write(dir / "fast.cfg", kFastConfig);
    const std::string common = "train --data " + data_csv() +
                               " --algorithm bp --split 2015-01 --config " +
                               (dir / "fast.cfg").string();
    REQUIRE(run_cli(common + " --out " + (dir / "env").string(),
                    "SWARM_FORECAST_SEED=5 ").code == 0);
    REQUIRE(run_cli(common + " --out " + (dir / "flag").string() + " --seed 5").code == 0);
    CHECK(slurp(dir / "env" / "model.json") == slurp(dir / "flag" / "model.json"));
    REQUIRE(run_cli(common + " --out " + (dir / "override").string() + " --seed 6",
                    "SWARM_FORECAST_SEED=5 ").code == 0);
    CHECK(slurp(dir / "override" / "model.json") != slurp(dir / "env" / "model.json"));
    fs::remove_all(dir);
}

TEST_CASE("eval emits a 12-row report whose aggregates recompute from the CSV") {
    const fs::path dir = fresh_dir("eval");
    write(dir / "fast.cfg", kFastConfig);
    REQUIRE(run_cli("train --data " + data_csv() + " --algorithm mpso-bp --out " +
                    (dir / "m").string() + " --seed 3 --split 2015-01 --config " +
                    (dir / "fast.cfg").string())
                .code == 0);
    const CmdResult r = run_cli("eval --model " + (dir / "m" / "model.json").string() +
                                " --data " + data_csv() + " --split 2015-01 --out " +
                                (dir / "rep").string());
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("Relative error %") != std::string::npos);

    const auto metrics = nlohmann::json::parse(slurp(dir / "rep" / "metrics.json"));
    REQUIRE(metrics.at("rows").size() == 12);

    // independent recomputation from the full-precision CSV rows
    const std::string csv = slurp(dir / "rep" / "metrics.csv");
    std::stringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    REQUIRE(line == "month,true,predicted,relative_error_pct");
    double sq = 0.0, abs_sum = 0.0, abs_max = 0.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::stringstream cells(line);
        std::string month, truth, pred, rel;
        std::getline(cells, month, ',');
        std::getline(cells, truth, ',');
        std::getline(cells, pred, ',');
        std::getline(cells, rel, ',');
        const double t = std::stod(truth), p = std::stod(pred), e = std::stod(rel);
        sq += (t - p) * (t - p);
        abs_sum += std::abs(e);
        abs_max = std::max(abs_max, std::abs(e));
        ++rows;
    }
    REQUIRE(rows == 12);
    CHECK(metrics.at("mse").get<double>() == doctest::Approx(sq / 12.0).epsilon(1e-9));
    CHECK(metrics.at("average_relative_error_pct").get<double>() ==
          doctest::Approx(abs_sum / 12.0).epsilon(1e-9));
    CHECK(metrics.at("max_relative_error_pct").get<double>() ==
          doctest::Approx(abs_max).epsilon(1e-9));
    fs::remove_all(dir);
}

TEST_CASE("predict writes the requested horizon as consecutive months") {
    const fs::path dir = fresh_dir("predict");
    write(dir / "fast.cfg", kFastConfig);
    REQUIRE(run_cli("train --data " + data_csv() + " --algorithm mpso-bp --out " +
                    (dir / "m").string() + " --seed 2 --config " + (dir / "fast.cfg").string())
                .code == 0);
    const CmdResult r = run_cli("predict --model " + (dir / "m" / "model.json").string() +
                                " --data " + data_csv() + " --horizon 12");
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    std::stringstream lines(r.output);
    std::string line;
    std::getline(lines, line);
    REQUIRE(line == "month,predicted_kwh_per_t,clamped");
    using swarmforecast::YearMonth;
    YearMonth expected{2016, 1}; // bundled data ends 2015-12
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.rfind(expected.str() + ",", 0) == 0);
        expected = expected.next();
        ++rows;
    }
    CHECK(rows == 12);

    SUBCASE("horizon 0 exits 1") {
        const CmdResult bad = run_cli("predict --model " + (dir / "m" / "model.json").string() +
                                      " --data " + data_csv() + " --horizon 0");
        CHECK(bad.code == 1);
    }
    fs::remove_all(dir);
}

TEST_CASE("compare emits per-seed and aggregate rows") {
    const fs::path dir = fresh_dir("compare");
    write(dir / "fast.cfg",
          "swarm_size=8\nk_max=10\nmax_epochs=20\n");
    const std::string cmd = "compare --data " + data_csv() +
                            " --split 2015-01 --seeds 1,2 --config " +
                            (dir / "fast.cfg").string() + " --out ";
    const CmdResult r = run_cli(cmd + (dir / "rep").string());
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "rep" / "comparison.json"));
    CHECK(report.at("per_seed").size() == 6);   // 3 trainers x 2 seeds
    CHECK(report.at("aggregate").size() == 3);
    CHECK(report.at("aggregate")[0].at("model") == "BP");
    CHECK(report.at("aggregate")[2].at("model") == "MPSO-BP");

    const CmdResult again = run_cli(cmd + (dir / "rep2").string());
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "rep" / "comparison.json") == slurp(dir / "rep2" / "comparison.json"));
    fs::remove_all(dir);
}

TEST_CASE("unknown config keys exit 1") {
    const fs::path dir = fresh_dir("cfg");
    write(dir / "bad.cfg", "swarm_sise=40\n");
    const CmdResult r = run_cli("train --data " + data_csv() + " --algorithm bp --out " +
                                (dir / "out").string() + " --config " +
                                (dir / "bad.cfg").string());
    CHECK(r.code == 1);
    CHECK(r.output.find("swarm_sise") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("diverging training exits 2") {
    const fs::path dir = fresh_dir("diverge");
    write(dir / "explode.cfg", "alpha=1e12\nmax_epochs=50\nbp_target_loss=1e-12\n");
    const CmdResult r = run_cli("train --data " + data_csv() + " --algorithm bp --out " +
                                (dir / "out").string() + " --seed 1 --config " +
                                (dir / "explode.cfg").string());
    CAPTURE(r.output);
    CHECK(r.code == 2);
    fs::remove_all(dir);
}

TEST_CASE("fuzzed CSV input never crashes the parser") {
    const fs::path dir = fresh_dir("fuzz");
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> len(0, 400), byte(0, 255), mode(0, 2);
    for (int round = 0; round < 60; ++round) {
        std::string content;
        switch (mode(rng)) {
            case 0: { // raw bytes
                const int n = len(rng);
                for (int i = 0; i < n; ++i) content += static_cast<char>(byte(rng));
                break;
            }
            case 1: { // csv-shaped garbage
                content = "month,value\n";
                const int n = len(rng) % 30;
                for (int i = 0; i < n; ++i) {
                    content += std::to_string(byte(rng)) + "-" + std::to_string(byte(rng)) +
                               "," + std::to_string(byte(rng) - 128) + "\n";
                }
                break;
            }
            default: { // truncated valid file
                content = "month,value\n2011-01,36.5\n2011-02,";
                break;
            }
        }
        write(dir / "fuzz.csv", content);
        const CmdResult r = run_cli("train --data " + (dir / "fuzz.csv").string() +
                                    " --algorithm bp --out " + (dir / "out").string());
        CAPTURE(round);
        CHECK(r.code == 1); // validation error, never a crash
        CHECK_FALSE(r.output.empty());
    }
    fs::remove_all(dir);
}
