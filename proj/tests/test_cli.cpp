#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "regcb/evaluation.hpp"

using namespace regcb;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(REGCB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("regcb_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("run writes a complete run directory")
{
    const fs::path dir = scratch("run");
    write_file(dir / "cfg.json", R"({"horizon": 1000, "algorithm": "regcb-elim"})");
    REQUIRE(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "b").string()) == 0);
    for (const char* f : {"config.json", "rounds.csv", "validation.csv", "meta.json"}) {
        CHECK(fs::exists(dir / "a" / f));
    }
    CHECK(read_rounds_csv(dir / "a" / "rounds.csv").size() == 1000);
    CHECK(slurp(dir / "a" / "rounds.csv") == slurp(dir / "b" / "rounds.csv"));
    CHECK(slurp(dir / "a" / "validation.csv") == slurp(dir / "b" / "validation.csv"));

    REQUIRE(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "c").string() +
                    " --seed-algo 7") == 0);
    CHECK(slurp(dir / "a" / "rounds.csv") != slurp(dir / "c" / "rounds.csv"));
    fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with status 2")
{
    const fs::path dir = scratch("bad");
    write_file(dir / "bad.json", R"({"algorithm": "linucb"})");
    CHECK(run_cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string()) == 2);
    write_file(dir / "typo.json", R"({"horizn": 3})");
    CHECK(run_cli("run --config " + (dir / "typo.json").string() + " --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("lowerbound --algorithm greedy --T 10 --seeds 1") == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep covers the grid and resumes")
{
    const fs::path dir = scratch("sweep");
    write_file(dir / "cfg.json", R"({"horizon": 150, "algorithm": "egreedy", "holdout_size": 50})");
    const std::string args = "sweep --config " + (dir / "cfg.json").string() + " --out " + (dir / "s").string();
    REQUIRE(run_cli(args + " --jobs 2") == 0);
    std::size_t runs = 0;
    for (const auto& e : fs::directory_iterator(dir / "s")) {
        if (e.is_directory() && fs::exists(e.path() / "meta.json")) ++runs;
    }
    CHECK(runs == 40);
    CHECK(fs::exists(dir / "s" / "summary.csv"));
    const auto best = read_validation_csv(dir / "s" / "best_series.csv");
    CHECK(best.size() == validation_rounds(150).size());
    const std::string before = slurp(dir / "s" / "summary.csv");

    // drop one run; resume redoes only that one and reproduces the summary
    const auto stamp = fs::last_write_time(dir / "s" / "p0_r0" / "meta.json");
    fs::remove(dir / "s" / "p3_r2" / "meta.json");
    REQUIRE(run_cli(args + " --resume") == 0);
    CHECK(fs::exists(dir / "s" / "p3_r2" / "meta.json"));
    CHECK(fs::last_write_time(dir / "s" / "p0_r0" / "meta.json") == stamp);
    CHECK(slurp(dir / "s" / "summary.csv") == before);
    fs::remove_all(dir);
}

TEST_CASE("diag recovers a power-law width decay")
{
    const fs::path dir = scratch("diag");
    std::vector<RoundLog> rounds;
    for (std::size_t t = 1; t <= 400; ++t) {
        RoundLog r;
        r.t = t;
        r.width = 2.0 / std::sqrt(static_cast<double>(t));
        rounds.push_back(r);
    }
    write_rounds_csv(dir / "rounds.csv", rounds);
    REQUIRE(run_cli("diag --run " + dir.string() + " --out " + (dir / "d").string() + " --window 1") == 0);
    std::ifstream in(dir / "d" / "slope.csv");
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "series,slope,intercept,used,dropped");
    const double slope = parse_double_field(line.substr(6, line.find(',', 6) - 6));
    CHECK(std::abs(slope + 0.5) <= 1e-9);
    fs::remove_all(dir);
}

TEST_CASE("lowerbound and aggregate write their tables")
{
    const fs::path dir = scratch("lb");
    REQUIRE(run_cli("lowerbound --N 5 --T 50 --seeds 2 --out " + dir.string()) == 0);
    const std::string lb = slurp(dir / "lowerbound.csv");
    CHECK(lb.rfind("algorithm,seeds,horizon,regret,distinct_contexts,mistakes,repeat_mistakes", 0) == 0);
    CHECK(lb.find("regcb-elim") != std::string::npos);
    CHECK(lb.find("regcb-opt") != std::string::npos);

    for (const char* ds : {"d1", "d2"}) {
        for (const auto& [algo, reward] : {std::pair{"x", 0.5}, std::pair{"y", 0.7}}) {
            fs::create_directories(dir / "agg" / ds / algo);
            write_validation_csv(dir / "agg" / ds / algo / "best_series.csv", {{1000, reward}});
        }
    }
    REQUIRE(run_cli("aggregate --in " + (dir / "agg").string() + " --out " + (dir / "out").string()) == 0);
    const std::string losses = slurp(dir / "out" / "losses.csv");
    CHECK(losses.find("d1,x,0.5,1") != std::string::npos);
    CHECK(losses.find("d2,y,0.7,0") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "cdf.csv"));
    REQUIRE(run_cli("aggregate --in " + (dir / "agg").string() + " --out " + (dir / "o2").string() +
                    " --min-examples 5000") == 0);
    CHECK(slurp(dir / "o2" / "losses.csv") == "dataset,algorithm,reward,loss\n");
    fs::remove_all(dir);
}
