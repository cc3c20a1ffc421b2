#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "roughflow/errors.hpp"
#include "roughflow/experiments.hpp"

using namespace roughflow;
namespace fs = std::filesystem;

namespace {

const char* kZeroOnepoint = R"(
[run]
seed = 7
[field]
kernel = zero
d = 2
[turbulence]
v = 1, 0
eps = 0.1
M = 20
)";

const char* kOnepoint = R"(
[run]
seed = 3
[turbulence]
v = 1, 0
eps = 0.2
T = 0.5
M = 24
record_points = 3
)";

ExperimentConfig make(const std::string& kind, const std::string& text) {
  ExperimentConfig c;
  c.kind = kind;
  c.params = Config::parse(text);
  return c;
}

bool has_constraint(const std::vector<Violation>& v, const std::string& name) {
  for (const auto& x : v)
    if (x.constraint == name) return true;
  return false;
}

// every number must sit in a {value, provenance} leaf with a known tag
void check_provenance(const nlohmann::json& j, bool in_value, int& numbers) {
  static const std::set<std::string> tags{"oracle", "monte-carlo", "paper-constant"};
  if (j.is_number()) {
    ++numbers;
    CHECK(in_value);
    return;
  }
  if (j.is_object()) {
    if (j.contains("provenance") && j.contains("value")) {
      CHECK(tags.count(j["provenance"].get<std::string>()) == 1);
      check_provenance(j["value"], true, numbers);
      return;
    }
    for (const auto& [k, v] : j.items()) check_provenance(v, in_value, numbers);
  } else if (j.is_array()) {
    for (const auto& v : j) check_provenance(v, in_value, numbers);
  }
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("roughflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ROUGHFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_SUITE("cli-experiments") {
  TEST_CASE("config parsing") {
    const Config c = Config::parse("top = 1\n[a]\nx = 1.5  # comment\nlist = 1, 2 3\n[b]\nname = hello world\n");
    CHECK(c.num("top", 0) == 1);
    CHECK(c.num("a.x", 0) == 1.5);
    CHECK(c.list("a.list", {}) == std::vector<double>{1, 2, 3});
    CHECK(c.str("b.name", "") == "hello world");
    CHECK(c.num("a.missing", 4.0) == 4.0);
    CHECK(c.entries().size() == 4);
    CHECK_THROWS_AS(Config::parse("[a]\njust words\n"), ArgumentError);
    CHECK_THROWS_AS(Config::parse("[a]\nx = abc\n").num("a.x", 0), ArgumentError);
  }

  TEST_CASE("seed precedence") {
    const Config with = Config::parse("[run]\nseed = 11\n"), without = Config::parse("");
    CHECK(resolve_seed(5, with) == 5u);
    CHECK(resolve_seed(std::nullopt, with) == 11u);
    ::setenv("ROUGHFLOW_SEED", "23", 1);
    CHECK(resolve_seed(std::nullopt, without) == 23u);
    ::unsetenv("ROUGHFLOW_SEED");
    CHECK_FALSE(resolve_seed(std::nullopt, without).has_value());
  }

  TEST_CASE("validation of defaults and of broken configs") {
    for (const auto& k : experiment_kinds()) CHECK(validate(make(k, "[run]\nseed = 1\n")).empty());
    CHECK(has_constraint(validate(make("tightness", "[run]\nseed = 1\n[mixing]\nkappa = 0.1\n")),
                         "1/(1/p - 1/(2a)) - 2 < r - d/a"));
    CHECK(has_constraint(validate(make("tightness", "[run]\nseed = 1\n[mixing]\nkappa = 0.5\n")),
                         "0 < kappa < min(1/3, 1/d) - 1/a0"));
    CHECK(has_constraint(validate(make("turb-onepoint", "[run]\nseed = 1\n[turbulence]\nv = 0, 0\n")), "v != 0"));
    CHECK(has_constraint(validate(make("no-such-kind", "[run]\nseed = 1\n")), "kind recognized"));
    CHECK(has_constraint(validate(make("toy-converge", "[run]\nseed = 1\n[toy]\nepz = 0.1\n")), "known parameter key"));
    ::unsetenv("ROUGHFLOW_SEED");
    CHECK(has_constraint(validate(make("toy-converge", "")), "seed present"));
    ExperimentConfig w = make("toy-converge", "[run]\nseed = 1\n");
    w.workers = 0;
    CHECK(has_constraint(validate(w), "workers >= 1"));
  }

  TEST_CASE("toy convergence report") {
    const ExperimentResult r = run_experiment(make("toy-converge", "[run]\nseed = 1\n"));
    CHECK(r.all_pass);
    CHECK(r.report["kind"] == "toy-converge");
    CHECK(r.report["config"]["run.seed"] == "1");
    REQUIRE(r.files.size() >= 1);
    CHECK(r.files[0].text.rfind("eps,", 0) == 0);
    int numbers = 0;
    check_provenance(r.report, false, numbers);
    CHECK(numbers > 0);
  }

  TEST_CASE("zero field one-point run passes and carries provenance everywhere") {
    const ExperimentResult r = run_experiment(make("turb-onepoint", kZeroOnepoint));
    CHECK(r.all_pass);
    int numbers = 0;
    check_provenance(r.report, false, numbers);
    CHECK(numbers > 0);
    const std::string dump = r.report.dump();
    CHECK(dump.find("workers") == std::string::npos);
  }

  TEST_CASE("exit codes from run") {
    std::ostringstream log;
    const fs::path out = temp_dir("exit");
    ExperimentConfig ok = make("turb-onepoint", kZeroOnepoint);
    ok.out_dir = out.string();
    CHECK(run(ok, log) == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "trajectories.csv"));

    ExperimentConfig bad = make("tightness", "[run]\nseed = 1\n[mixing]\nkappa = 0.1\n");
    bad.out_dir = out.string();
    log.str("");
    CHECK(run(bad, log) == 2);
    CHECK(log.str().find("[1/(1/p - 1/(2a)) - 2 < r - d/a]") != std::string::npos);

    // a field box too tight for the wandering trajectory
    ExperimentConfig tight = make("turb-onepoint", std::string(kOnepoint) + "margin = 0.001\n");
    tight.out_dir = out.string();
    log.str("");
    CHECK(run(tight, log) == 3);
    CHECK(log.str().find("divergence") != std::string::npos);
  }

  TEST_CASE("reports are worker invariant and reproducible") {
    ExperimentConfig a = make("turb-onepoint", kOnepoint), b = a, c = a;
    a.workers = 1;
    b.workers = 1;
    c.workers = 2;
    const ExperimentResult ra = run_experiment(a), rb = run_experiment(b), rc = run_experiment(c);
    CHECK(ra.report.dump() == rb.report.dump());
    CHECK(ra.report.dump() == rc.report.dump());
    REQUIRE(ra.files.size() == rc.files.size());
    for (size_t i = 0; i < ra.files.size(); ++i) CHECK(ra.files[i].text == rc.files[i].text);
    ExperimentConfig d = a;
    d.seed = 4;
    CHECK(run_experiment(d).report.dump() != ra.report.dump());
  }

  TEST_CASE("command line binary") {
    const fs::path dir = temp_dir("cli");
    {
      std::ofstream(dir / "zero.cfg") << kZeroOnepoint;
      std::string noseed = kZeroOnepoint;
      noseed.replace(noseed.find("seed = 7"), 8, "");
      std::ofstream(dir / "noseed.cfg") << noseed;
      std::ofstream(dir / "broken.cfg") << "[run]\nnot a pair\n";
    }
    const std::string out = " --out " + (dir / "out").string();
    CHECK(run_cli("turb-onepoint --config " + (dir / "zero.cfg").string() + out) == 0);
    const std::string first = slurp(dir / "out" / "report.json");
    CHECK(run_cli("turb-onepoint --config " + (dir / "zero.cfg").string() + " --workers 2" + out) == 0);
    CHECK(slurp(dir / "out" / "report.json") == first);
    CHECK(run_cli("bogus --config " + (dir / "zero.cfg").string() + out) == 2);
    CHECK(run_cli("turb-onepoint" + out) == 2);
    CHECK(run_cli("turb-onepoint --config " + (dir / "broken.cfg").string() + out) == 2);
    CHECK(run_cli("turb-onepoint --config " + (dir / "zero.cfg").string() + " --workers 0" + out) == 2);
    ::unsetenv("ROUGHFLOW_SEED");
    CHECK(run_cli("turb-onepoint --config " + (dir / "noseed.cfg").string() + out) == 2);
    ::setenv("ROUGHFLOW_SEED", "7", 1);
    CHECK(run_cli("turb-onepoint --config " + (dir / "noseed.cfg").string() + out) == 0);
    ::unsetenv("ROUGHFLOW_SEED");
    CHECK(slurp(dir / "out" / "report.json") == first);
    CHECK(run_cli("turb-onepoint --config " + (dir / "noseed.cfg").string() + " --seed 7" + out) == 0);
  }
}
