#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "superlap/cli.hpp"

using namespace superlap;
namespace fs = std::filesystem;

namespace {
fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "superlap_cli_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}
int run_cmd(const std::string& command, const fs::path& cfg, const fs::path& out,
            std::vector<std::string> overrides = {}) {
  std::ostringstream log;
  cli::Invocation inv{command, cfg.string(), std::move(overrides), std::nullopt, out.string()};
  return cli::run(inv, log);
}
nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}
const char* k1d = "[domain]\ndim = 1\nn = 32\n[measure]\npreset = C5\ns = 0.25\nalpha = 0.2\n[problem]\np = 2\n";
const char* k2d =
    "[domain]\ndim = 2\nn = 10\n[measure]\npreset = C1\n[problem]\np = 1.5\nlambda = auto: 0.8*lambda1\n";
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate-measure reports gamma and the critical condition") {
    const auto cfg = write_config("c5.ini", k1d);
    const auto out = cfg.parent_path() / "validate";
    REQUIRE(run_cmd("validate-measure", cfg, out) == cli::kSuccess);
    const auto j = read_json(out / "summary.json");
    CHECK(j["measure"]["gamma"].get<double>() == doctest::Approx(0.2));
    CHECK(j["critical"]["condition_holds"].get<bool>() == false);
    CHECK(fs::exists(out / "atoms.csv"));
  }

  TEST_CASE("summary.csv covers every JSON number") {
    const auto cfg = write_config("c5.ini", k1d);
    const auto out = cfg.parent_path() / "eigen";
    REQUIRE(run_cmd("eigen", cfg, out) == cli::kSuccess);
    std::ifstream in(out / "summary.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "key,value");
    std::map<std::string, double> csv;
    while (std::getline(in, line)) {
      const auto comma = line.rfind(',');
      csv[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    }
    const auto flat = read_json(out / "summary.json").flatten();
    int numbers = 0;
    for (auto it = flat.begin(); it != flat.end(); ++it) {
      if (!it.value().is_number()) continue;
      ++numbers;
      std::string key = it.key().substr(1);
      std::replace(key.begin(), key.end(), '/', '.');
      REQUIRE(csv.count(key) == 1);
      CHECK(csv[key] == it.value().get<double>());
    }
    CHECK(numbers > 5);
  }

  TEST_CASE("solve in 1D with s_sharp = 1 is a config error") {
    const auto cfg = write_config("c1_1d.ini", "[domain]\ndim = 1\nn = 32\n[measure]\npreset = C1\n[problem]\np = 1.5\n");
    CHECK(run_cmd("solve", cfg, cfg.parent_path() / "solve1d") == cli::kConfigError);
  }

  TEST_CASE("unknown preset and bad overrides exit 2") {
    const auto cfg = write_config("c5.ini", k1d);
    CHECK(run_cmd("validate-measure", cfg, cfg.parent_path() / "bad", {"measure.preset=C9"}) == cli::kConfigError);
    CHECK(run_cmd("validate-measure", cfg, cfg.parent_path() / "bad", {"domain.n=zero"}) == cli::kConfigError);
    CHECK(run_cmd("validate-measure", cfg, cfg.parent_path() / "bad", {"measure.s=1.5"}) == cli::kConfigError);
  }

  TEST_CASE("auto lambda resolves against lambda1") {
    const auto cfg = write_config("c1_2d.ini", k2d);
    const auto out = cfg.parent_path() / "thresholds";
    REQUIRE(run_cmd("thresholds", cfg, out) == cli::kSuccess);
    const auto j = read_json(out / "summary.json");
    const double l1 = j["thresholds"]["lambda_l"].get<double>();
    CHECK(j["thresholds"]["lambda"].get<double>() == doctest::Approx(0.8 * l1).epsilon(1e-12));
  }

  TEST_CASE("command list") {
    const auto& cmds = cli::commands();
    const std::set<std::string> names(cmds.begin(), cmds.end());
    for (const char* c : {"validate-measure", "assemble", "eigen", "sobolev", "thresholds", "solve", "verify", "sweep"})
      CHECK(names.count(c) == 1);
  }
}
