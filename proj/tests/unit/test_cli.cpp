#include "helpers.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "resonance/cli.hpp"

using namespace resonance;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("resonance_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

json load_config(const std::string& name)
{
    std::ifstream f(std::string(RESONANCE_CONFIGS) + "/" + name);
    return json::parse(f);
}

struct Result {
    int code;
    std::string err;
};

Result run_config(const json& config, const fs::path& dir, const std::map<std::string, std::string>& env = {})
{
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << config.dump(2);
    cli::Options opt;
    opt.config = cfg.string();
    opt.out = dir.string();
    std::ostringstream log, err;
    return {cli::run(opt, env, log, err), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("rates task on the a = b qubit", "[cli]")
{
    TempDir dir;
    json cfg = load_config("qubit_rates.json");
    cfg["system"]["qubit"]["a"] = 0.4;
    cfg["system"]["qubit"]["b"] = 0.4;
    const auto r = run_config(cfg, dir.path);
    REQUIRE(r.code == 0);
    const json out = json::parse(slurp(dir.path / "qubit_rates.json"));
    CHECK(out["task"] == "rates");
    CHECK(std::abs(out["rates"]["ratio"].get<double>() - 0.5) < 1e-8);
    CHECK(out["rates"]["tau_T"].get<double>() > 0.0);
}

TEST_CASE("dephasing-compare in three dimensions reports incomplete decoherence", "[cli]")
{
    TempDir dir;
    json cfg = load_config("dephasing_compare_d3.json");
    cfg["task"]["times"] = json{{"start", 0}, {"stop", 200}, {"count", 5}};
    REQUIRE(run_config(cfg, dir.path).code == 0);
    const json out = json::parse(slurp(dir.path / (cfg["output"]["prefix"].get<std::string>() + ".json")));
    CHECK(out["decoherence"] == "incomplete decoherence");
    CHECK(out["gamma_infinity"]["value"].is_number());
    CHECK(out["gamma_infinity"]["heuristic"] == true);

    TempDir dir1;
    json c1 = load_config("dephasing_compare_d1.json");
    c1["task"]["times"] = json{{"start", 0}, {"stop", 200}, {"count", 5}};
    REQUIRE(run_config(c1, dir1.path).code == 0);
    const json o1 = json::parse(slurp(dir1.path / (c1["output"]["prefix"].get<std::string>() + ".json")));
    CHECK(o1["decoherence"] == "full");
}

TEST_CASE("validation and numerical errors", "[cli]")
{
    TempDir dir;
    json cfg = load_config("qubit_rates.json");
    cfg["thermal"].erase("beta");
    auto r = run_config(cfg, dir.path);
    CHECK(r.code == 2);
    const json e = json::parse(r.err);
    CHECK(e["field"] == "thermal.beta");
    CHECK(e["error"] == "validation");

    json bad = load_config("qubit_rates.json");
    bad["form_factor"]["m"] = 3;
    CHECK(run_config(bad, dir.path).code == 2);
    bad = load_config("qubit_rates.json");
    bad["task"]["type"] = "nonsense";
    r = run_config(bad, dir.path);
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["field"] == "task.type");

    json div = load_config("equilibrium.json");
    div["form_factor"] = json{{"family", "power_exp"}, {"p", 0.5}, {"m", 2}, {"dimension", 1}};
    r = run_config(div, dir.path);
    CHECK(r.code == 3);
    CHECK(json::parse(r.err)["error"] == "divergent_integral");

    cli::Options opt;
    opt.config = (dir.path / "missing.json").string();
    std::ostringstream log, err;
    CHECK(cli::run(opt, {}, log, err) == 2);
}

TEST_CASE("trajectory CSV format", "[cli]")
{
    TempDir dir;
    json cfg = load_config("qubit_evolve.json");
    cfg["task"]["times"] = json{{"start", 0}, {"stop", 100}, {"count", 7}};
    REQUIRE(run_config(cfg, dir.path).code == 0);
    const auto rows = read_csv(slurp(dir.path / "qubit_evolve.csv"));
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) CHECK(row.size() == 1 + 2 * 4);
    CHECK(rows[0][0] == "t");
    CHECK(rows[0][1] == "re_rho_1_1");
    CHECK(rows[0][8] == "im_rho_2_2");
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (const auto& cell : rows[i]) {
            const double v = std::strtod(cell.c_str(), nullptr);
            CHECK(cli::format_double(v) == cell);
        }
    const double re11 = std::strtod(rows[3][1].c_str(), nullptr), re22 = std::strtod(rows[3][7].c_str(), nullptr);
    CHECK(std::abs(re11 + re22 - 1.0) < 1e-10);
}

TEST_CASE("format_double round-trips", "[cli][property]")
{
    for (int k = 0; k < 1000; ++k) {
        const double v = testutil::uniform(-1.0, 1.0) * std::pow(10.0, testutil::uniform(-300.0, 300.0));
        CHECK(std::strtod(cli::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(cli::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("environment overrides", "[cli]")
{
    json cfg = {{"thermal", {{"beta", 1.0}}}, {"task", {{"type", "rates"}}}};
    cli::apply_env_overrides(cfg, {{"RESONANCE_THERMAL__BETA", "2.5"},
                                   {"RESONANCE_OUTPUT__PREFIX", "run7"},
                                   {"OTHER_THERMAL__BETA", "9"}});
    CHECK(cfg["thermal"]["beta"] == 2.5);
    CHECK(cfg["output"]["prefix"] == "run7");

    TempDir dir;
    const auto r = run_config(load_config("qubit_rates.json"), dir.path,
                              {{"RESONANCE_OUTPUT__PREFIX", "overridden"}, {"RESONANCE_SYSTEM__QUBIT__B", "0.3"}});
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir.path / "overridden.json"));
    CHECK(std::abs(json::parse(slurp(dir.path / "overridden.json"))["rates"]["ratio"].get<double>() - 0.5) < 1e-8);
}

TEST_CASE("atomic writes", "[cli]")
{
    TempDir dir;
    const fs::path p = dir.path / "sub" / "file.txt";
    cli::write_atomic(p.string(), "first");
    cli::write_atomic(p.string(), "second");
    CHECK(slurp(p) == "second");
    CHECK_FALSE(fs::exists(p.string() + ".tmp"));
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir.path))
        if (e.is_regular_file()) ++files;
    CHECK(files == 1);
}

TEST_CASE("shipped configs run and reruns are byte-identical", "[cli]")
{
    for (const auto& entry : fs::directory_iterator(RESONANCE_CONFIGS)) {
        const std::string name = entry.path().filename().string();
        if (name == "dephasing_compare_d3.json" || name == "dephasing_compare_d1.json") continue;  // covered above
        TempDir a, b;
        const std::string cmd = std::string(RESONANCE_TOOL) + " --config " + entry.path().string() + " --out ";
        INFO(name);
        REQUIRE(WEXITSTATUS(std::system((cmd + a.path.string()).c_str())) == 0);
        REQUIRE(WEXITSTATUS(std::system((cmd + b.path.string() + " --threads 2").c_str())) == 0);
        std::size_t compared = 0;
        for (const auto& f : fs::directory_iterator(a.path)) {
            CHECK(slurp(f.path()) == slurp(b.path / f.path().filename()));
            ++compared;
        }
        CHECK(compared >= 1);
    }
}

TEST_CASE("tool exit codes", "[cli]")
{
    TempDir dir;
    json cfg = load_config("qubit_rates.json");
    cfg["thermal"].erase("beta");
    const fs::path p = dir.path / "bad.json";
    std::ofstream(p) << cfg.dump();
    const std::string cmd = std::string(RESONANCE_TOOL) + " --config " + p.string() + " --out " + dir.path.string() + " 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((std::string(RESONANCE_TOOL) + " 2>/dev/null").c_str())) == 2);
}
