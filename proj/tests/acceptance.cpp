// Acceptance runner: `acceptance --criterion N` runs the shipped configs for criterion N and
// prints one PASS/FAIL line per verdict plus a final line for the criterion.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "roughflow/experiments.hpp"

using namespace roughflow;
using json = nlohmann::json;

namespace {

ExperimentConfig load(const std::string& kind, const std::string& file, int workers = 1) {
  ExperimentConfig c;
  c.kind = kind;
  c.params = Config::load(std::string(ROUGHFLOW_CONFIG_DIR) + "/" + file);
  c.workers = workers;
  return c;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;
};

void run_and_judge(const ExperimentConfig& cfg, Outcome& out) {
  try {
    const ExperimentResult r = run_experiment(cfg);
    for (const auto& v : r.report["verdicts"]) {
      const bool p = v["pass"].get<bool>();
      out.lines.push_back(std::string(p ? "PASS " : "FAIL ") + cfg.kind + "/" + v["name"].get<std::string>());
      out.pass = out.pass && p;
    }
  } catch (const std::exception& e) {
    out.lines.push_back("FAIL " + cfg.kind + " raised: " + e.what());
    out.pass = false;
  }
}

// equal structure, numbers within tol (relative above magnitude 1)
bool close(const json& a, const json& b, double tol, double& worst) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    const double d = std::abs(x - y) / std::max(1.0, std::abs(x));
    worst = std::max(worst, d);
    return d <= tol;
  }
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()) || !close(it.value(), b[it.key()], tol, worst)) return false;
    return true;
  }
  if (a.is_array()) {
    for (size_t i = 0; i < a.size(); ++i)
      if (!close(a[i], b[i], tol, worst)) return false;
    return true;
  }
  return a == b;
}

void determinism(const ExperimentConfig& base, Outcome& out) {
  ExperimentConfig one = base, many = base;
  one.workers = 1;
  many.workers = 4;
  const ExperimentResult a = run_experiment(one), b = run_experiment(one), c = run_experiment(many);
  bool bytes = a.report.dump(2) == b.report.dump(2) && a.files.size() == b.files.size();
  for (size_t i = 0; bytes && i < a.files.size(); ++i) bytes = a.files[i].text == b.files[i].text;
  out.lines.push_back(std::string(bytes ? "PASS " : "FAIL ") + base.kind + "/repeat_bit_identical");
  double worst = 0;
  const bool stats = close(a.report, c.report, 1e-12, worst);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (max rel diff %.3g)", worst);
  out.lines.push_back(std::string(stats ? "PASS " : "FAIL ") + base.kind + "/workers_1_vs_4_within_1e-12" + buf);
  out.pass = out.pass && bytes && stats;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "criterion number")->required()->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  // wall-clock budgets in seconds; criterion 8 has none
  const double budget[9] = {0, 60, 60, 300, 900, 900, 600, 600, 0};
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  switch (criterion) {
    case 1: run_and_judge(load("lift-check", "lift-check.cfg"), out); break;
    case 2: run_and_judge(load("flow-order", "flow-order.cfg"), out); break;
    case 3: run_and_judge(load("toy-converge", "toy-converge.cfg"), out); break;
    case 4: run_and_judge(load("turb-onepoint", "turb-onepoint.cfg"), out); break;
    case 5: run_and_judge(load("turb-twopoint", "turb-twopoint.cfg"), out); break;
    case 6: run_and_judge(load("tightness", "tightness.cfg"), out); break;
    case 7:
      run_and_judge(load("skeleton", "skeleton.cfg"), out);
      run_and_judge(load("localization", "localization.cfg"), out);
      break;
    case 8:
      determinism(load("turb-onepoint", "turb-onepoint.cfg"), out);
      determinism(load("skeleton", "skeleton.cfg"), out);
      break;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget[criterion] > 0) {
    const bool in_time = secs <= budget[criterion];
    char buf[96];
    std::snprintf(buf, sizeof buf, "runtime %.1f s within %.0f s", secs, budget[criterion]);
    out.lines.push_back(std::string(in_time ? "PASS " : "FAIL ") + buf);
    out.pass = out.pass && in_time;
  }
  for (const auto& l : out.lines) std::cout << "  " << l << "\n";
  std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << criterion << "\n";
  return out.pass ? 0 : 1;
}
