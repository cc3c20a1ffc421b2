#include "roughflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "roughflow/besov.hpp"
#include "roughflow/driver.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/parallel.hpp"
#include "roughflow/philox.hpp"
#include "roughflow/random_field.hpp"
#include "roughflow/stats.hpp"
#include "roughflow/tightness.hpp"
#include "roughflow/toy.hpp"
#include "roughflow/turbulence.hpp"

namespace roughflow {

using json = nlohmann::json;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"lift-check", "flow-order", "toy-converge", "turb-onepoint",
                                          "turb-twopoint", "skeleton", "tightness", "localization"};
  return k;
}

std::optional<uint64_t> resolve_seed(std::optional<uint64_t> cli, const Config& params) {
  if (cli) return cli;
  auto parse = [](const std::string& s) -> std::optional<uint64_t> {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  if (params.has("run.seed")) return parse(params.str("run.seed", ""));
  if (const char* env = std::getenv("ROUGHFLOW_SEED")) return parse(env);
  return std::nullopt;
}

namespace {

// ---------------------------------------------------------------- parameter reading

struct Checker {
  std::vector<Violation> out;
  void add(const std::string& c, const std::string& d) {
    for (const auto& v : out)
      if (v.constraint == c && v.detail == d) return;
    out.push_back({c, d});
  }
  template <class F>
  void guard(F&& f) {
    try {
      f();
    } catch (const ConstraintError& e) {
      add(e.constraint, e.what());
    } catch (const ArgumentError& e) {
      add("well-formed parameters", e.what());
    }
  }
};

// tracks which keys were read so that typos surface as violations
class Reader {
 public:
  Reader(const Config& c, Checker& checker) : ck(checker), c_(c) { used_.insert("run.seed"); }

  double num(const std::string& k, double def) { return get(k, def, [&] { return c_.num(k, def); }); }
  long integer(const std::string& k, long def) { return get(k, def, [&] { return c_.integer(k, def); }); }
  std::string str(const std::string& k, const std::string& def) {
    used_.insert(k);
    return c_.str(k, def);
  }
  std::vector<double> list(const std::string& k, const std::vector<double>& def) {
    return get(k, def, [&] { return c_.list(k, def); });
  }
  Vec vec(const std::string& k, const Vec& def) { return get(k, def, [&] { return c_.vec(k, def); }); }

  void finish() {
    for (const auto& [k, v] : c_.entries())
      if (!used_.count(k)) ck.add("known parameter key", "unknown key '" + k + "' for this experiment");
  }

  Checker& ck;

 private:
  template <class T, class F>
  T get(const std::string& k, const T& def, F&& f) {
    used_.insert(k);
    try {
      return f();
    } catch (const ArgumentError& e) {
      ck.add("well-formed parameters", e.what());
      return def;
    }
  }
  const Config& c_;
  std::set<std::string> used_;
};

Vec unit(int d, int axis) {
  Vec e = Vec::Zero(d);
  e(axis) = 1.0;
  return e;
}

struct FieldParams {
  KernelSpec spec = default_kernel(2);
  double a0 = 8.0, kappa = 0.05;
};

FieldParams read_field(Reader& r) {
  FieldParams f;
  const std::string kind = r.str("field.kernel", "default");
  const long d = r.integer("field.d", 2);
  if (d < 1 || d > 3) {
    r.ck.add("1 <= d <= 3", "field dimension must be 1, 2 or 3");
    return f;
  }
  if (kind == "default" || kind == "zero")
    f.spec = default_kernel(static_cast<int>(d));
  else if (kind == "anisotropic")
    f.spec = anisotropic_kernel(static_cast<int>(d));
  else
    r.ck.add("field.kernel in {default, anisotropic, zero}", "unknown kernel '" + kind + "'");
  f.spec.L = r.num("field.L", f.spec.L);
  f.spec.h = r.num("field.h", f.spec.L / 4);
  f.spec.amplitude = kind == "zero" ? 0.0 : r.num("field.amplitude", f.spec.amplitude);
  f.a0 = r.num("mixing.a0", f.a0);
  f.kappa = r.num("mixing.kappa", f.kappa);
  r.ck.guard([&] { f.spec.validate(); });
  r.ck.guard([&] { mixing_profile(f.spec, f.kappa, f.a0); });
  return f;
}

Vec read_velocity(Reader& r, const std::string& key, int d) {
  Vec v = r.vec(key, unit(d, 0));
  if (v.size() != d) {
    r.ck.add("velocity has d components", key + " must have " + std::to_string(d) + " entries");
    return unit(d, 0);
  }
  if (v.norm() == 0.0) r.ck.add("v != 0", "non-zero mean velocity required");
  return v;
}

Vec read_point(Reader& r, const std::string& key, int d) {
  Vec x = r.vec(key, Vec::Zero(d));
  if (x.size() != d) {
    r.ck.add("point has d components", key + " must have " + std::to_string(d) + " entries");
    return Vec::Zero(d);
  }
  return x;
}

void require(Checker& ck, bool ok, const std::string& constraint, const std::string& detail) {
  if (!ok) ck.add(constraint, detail);
}

std::vector<int> to_ints(Checker& ck, const std::string& key, const std::vector<double>& xs) {
  std::vector<int> out;
  for (double x : xs) {
    if (x != std::floor(x) || x < 1 || x > 1e7) {
      ck.add("positive integers", key + " entries must be positive integers");
      return {};
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

bool increasing(const std::vector<double>& x) {
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

bool decreasing(const std::vector<double>& x) {
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] < x[i - 1])) return false;
  return true;
}

bool non_increasing(const std::vector<double>& x) {
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] <= x[i - 1])) return false;
  return true;
}

// ---------------------------------------------------------------- output helpers

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

constexpr const char* kOracle = "oracle";
constexpr const char* kMC = "monte-carlo";
constexpr const char* kConst = "paper-constant";

struct Report {
  json values = json::object();
  json verdicts = json::array();
  json diagnostics = json::array();

  void value(const std::string& name, json v, const char* prov) {
    values[name] = json{{"value", std::move(v)}, {"provenance", prov}};
  }
  void verdict(const std::string& name, bool pass, const std::string& rule, std::vector<std::string> compares) {
    verdicts.push_back(json{{"name", name}, {"pass", pass}, {"rule", rule}, {"compares", compares}});
  }
  void diagnostic(const std::string& name, bool pass, const std::string& rule, std::vector<std::string> compares) {
    diagnostics.push_back(json{{"name", name}, {"pass", pass}, {"rule", rule}, {"compares", compares}});
  }
  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v["pass"].get<bool>()) return false;
    return true;
  }
};

std::string fmt(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  template <class... A>
  void row(const A&... a) {
    std::vector<std::string> cells{cell(a)...};
    row_strings(cells);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) ss_ << ',';
      ss_ << cells[i];
    }
    ss_ << '\n';
  }
  std::string str() const { return ss_.str(); }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(uint64_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ostringstream ss_;
};

std::vector<std::string> coord_header(const std::vector<std::string>& lead, int d) {
  std::vector<std::string> h = lead;
  for (int i = 1; i <= d; ++i) h.push_back("x" + std::to_string(i));
  return h;
}

// stable tags for seed derivation
constexpr uint64_t kTagOnepoint = 0x6f6e65706f696e74ULL;
constexpr uint64_t kTagTwopoint = 0x74776f706f696e74ULL;
constexpr uint64_t kTagSkeleton = 0x736b656c65746f6eULL;
constexpr uint64_t kTagLocal = 0x6c6f63616c697a65ULL;
constexpr uint64_t kTagAudit = 0x6175646974ULL;

// ================================================================ lift-check

struct LiftParams {
  double T = 1.0;
  int intervals = 8;
  QuadConfig quad;
  double tol = 1e-8, detect = 10.0;
  double lo = -1.0, hi = 1.0;
  int res = 5;
  double toy_a = 0.5;
  Vec toy_k;
};

LiftParams check_lift(Reader& r) {
  LiftParams p;
  p.T = r.num("lift.T", p.T);
  p.intervals = static_cast<int>(r.integer("lift.intervals", p.intervals));
  p.quad.order = static_cast<int>(r.integer("lift.order", p.quad.order));
  p.quad.substeps = static_cast<int>(r.integer("lift.substeps", p.quad.substeps));
  p.tol = r.num("lift.tolerance", p.tol);
  p.detect = r.num("lift.detect_factor", p.detect);
  p.lo = r.num("lift.domain_lo", p.lo);
  p.hi = r.num("lift.domain_hi", p.hi);
  p.res = static_cast<int>(r.integer("lift.domain_res", p.res));
  p.toy_a = r.num("toy.a", p.toy_a);
  Vec k(2);
  k << 1.0, 0.5;
  p.toy_k = r.vec("toy.k", k);
  require(r.ck, p.T > 0, "T > 0", "lift horizon must be positive");
  require(r.ck, p.intervals >= 2, "intervals >= 2", "grid triples need at least 2 intervals");
  require(r.ck, p.quad.order >= 1 && p.quad.order <= 16 && p.quad.substeps >= 1, "1 <= order <= 16, substeps >= 1",
          "quadrature rule order and substeps");
  require(r.ck, p.tol > 0, "tolerance > 0", "defect tolerance must be positive");
  require(r.ck, p.hi > p.lo && p.res >= 2, "domain_lo < domain_hi, domain_res >= 2", "spatial grid");
  require(r.ck, p.toy_k.size() == 2, "toy.k has 2 components", "toy wave vector lives in R^2");
  return p;
}

ExperimentResult run_lift(const LiftParams& p, int workers) {
  Report rep;
  Mat A = Mat::Zero(2, 2), B = Mat::Zero(2, 2);
  A(0, 1) = 1.0;
  B(1, 0) = 1.0;
  Vec c(2);
  c << 1.0, 0.5;
  const std::vector<std::pair<std::string, SmoothVectorField>> fields{
      {"constant", constant_field(c)},
      {"piecewise", piecewise_linear_field(A, B, 0.5 * p.T)},
      {"toy", toy_field(tanh_phase(p.toy_a, p.toy_k))}};
  const TimeGrid grid = TimeGrid::uniform(p.T, p.intervals);
  const SpatialDomain dom(2, p.lo, p.hi, p.res);
  struct Triple {
    int i, j, k;
  };
  std::vector<Triple> triples;
  const int n = static_cast<int>(grid.t.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) triples.push_back({i, j, k});

  Csv csv({"field", "s", "u", "t", "additivity", "chen", "chen_corrupted"});
  rep.value("tolerance", p.tol, kConst);
  rep.value("detection_threshold", p.detect * p.tol, kConst);
  for (const auto& [name, field] : fields) {
    const RoughDriver drv = canonical_lift(field, grid, p.quad);
    RoughDriver bad = drv;
    const TwoTimeVectorField W = drv.W;
    bad.W.eval = [W](double s, double t, const Vec& x, int order) { return W(s, t, x, order).scaled(2.0); };
    struct Row {
      double add, chen, bad;
    };
    const auto rows = parallel_map<Row>(static_cast<int>(triples.size()), workers, [&](int q) {
      const double s = grid.t[triples[q].i], u = grid.t[triples[q].j], t = grid.t[triples[q].k];
      return Row{additivity_defect(drv.V, s, u, t, dom), chen_defect(drv, s, u, t, dom), chen_defect(bad, s, u, t, dom)};
    });
    double ma = 0, mc = 0, mb = 0;
    for (size_t q = 0; q < rows.size(); ++q) {
      ma = std::max(ma, rows[q].add);
      mc = std::max(mc, rows[q].chen);
      mb = std::max(mb, rows[q].bad);
      csv.row(name, grid.t[triples[q].i], grid.t[triples[q].j], grid.t[triples[q].k], rows[q].add, rows[q].chen,
              rows[q].bad);
    }
    rep.value(name + ".max_additivity_defect", ma, kOracle);
    rep.value(name + ".max_chen_defect", mc, kOracle);
    rep.value(name + ".max_chen_defect_corrupted", mb, kOracle);
    rep.verdict(name + ".additivity", ma <= p.tol, "max additivity defect <= tolerance",
                {name + ".max_additivity_defect", "tolerance"});
    rep.verdict(name + ".chen", mc <= p.tol, "max Chen defect <= tolerance", {name + ".max_chen_defect", "tolerance"});
    // a time-independent field has W = 0, so doubling W changes nothing there
    if (name != "constant")
      rep.verdict(name + ".corruption_detected", mb > p.detect * p.tol, "Chen defect of the 2W driver > threshold",
                  {name + ".max_chen_defect_corrupted", "detection_threshold"});
  }
  rep.value("triples", static_cast<double>(triples.size()), kConst);
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"lift_defects.csv", csv.str()});
  return out;
}

// ================================================================ flow-order

struct FlowParams {
  int exp_refinement = 256, rot_refinement = 512;
  std::vector<int> refinements{16, 32, 64, 128};
  double exp_tol = 1e-4, rot_tol = 1e-3, order_lo = 1.8, order_hi = 2.3;
};

FlowParams check_flow(Reader& r) {
  FlowParams p;
  p.exp_refinement = static_cast<int>(r.integer("flow.exp_refinement", p.exp_refinement));
  p.rot_refinement = static_cast<int>(r.integer("flow.rot_refinement", p.rot_refinement));
  std::vector<double> lv(p.refinements.begin(), p.refinements.end());
  p.refinements = to_ints(r.ck, "flow.refinements", r.list("flow.refinements", lv));
  p.exp_tol = r.num("flow.exp_tolerance", p.exp_tol);
  p.rot_tol = r.num("flow.rot_tolerance", p.rot_tol);
  p.order_lo = r.num("flow.order_lo", p.order_lo);
  p.order_hi = r.num("flow.order_hi", p.order_hi);
  require(r.ck, p.exp_refinement >= 1 && p.exp_refinement <= 512 && p.rot_refinement >= 1 && p.rot_refinement <= 512,
          "refinement <= 512", "flow refinements must lie in [1, 512]");
  require(r.ck, p.refinements.size() >= 3, ">= 3 refinement levels", "order estimate needs 3 levels");
  for (size_t i = 1; i < p.refinements.size(); ++i)
    require(r.ck, p.refinements[i] == 2 * p.refinements[i - 1], "geometric refinement levels",
            "refinement levels must double");
  return p;
}

ExperimentResult run_flow(const FlowParams& p) {
  Report rep;
  Csv csv({"case", "refinement", "step", "error"});
  // d = 1 exponential
  Mat one = Mat::Identity(1, 1);
  const RoughDriver exp_drv = canonical_lift(linear_field(one), TimeGrid::uniform(1.0, 1));
  SolverConfig ce;
  ce.refinement = p.exp_refinement;
  const FlowMap fe = solve_flow(exp_drv, ce, TimeGrid::uniform(1.0, 1));
  Vec x1 = Vec::Ones(1);
  const double exp_err = std::abs(fe(0.0, 1.0, x1)(0) - std::exp(1.0));
  csv.row("exponential", p.exp_refinement, 1.0 / p.exp_refinement, exp_err);
  rep.value("exponential.phi", fe(0.0, 1.0, x1)(0), kOracle);
  rep.value("exponential.exact", std::exp(1.0), kOracle);
  rep.value("exponential.error", exp_err, kOracle);
  rep.value("exponential.tolerance", p.exp_tol, kConst);
  rep.verdict("exponential", exp_err <= p.exp_tol, "|phi_{1,0}(1) - e| <= tolerance",
              {"exponential.error", "exponential.tolerance"});

  // rotation in the plane
  Mat J = Mat::Zero(2, 2);
  J(0, 1) = -1.0;
  J(1, 0) = 1.0;
  const double pi = std::acos(-1.0);
  const RoughDriver rot_drv = canonical_lift(linear_field(J), TimeGrid::uniform(pi, 1));
  SolverConfig cr;
  cr.refinement = p.rot_refinement;
  const FlowMap fr = solve_flow(rot_drv, cr, TimeGrid::uniform(pi, 1));
  const Vec e1 = unit(2, 0);
  const Vec end = fr(0.0, pi, e1);
  const double rot_err = (end + e1).norm();
  csv.row("rotation", p.rot_refinement, pi / p.rot_refinement, rot_err);
  rep.value("rotation.phi", to_json(end), kOracle);
  rep.value("rotation.exact", to_json(Vec(-e1)), kOracle);
  rep.value("rotation.error", rot_err, kOracle);
  rep.value("rotation.tolerance", p.rot_tol, kConst);
  rep.verdict("rotation", rot_err <= p.rot_tol, "|phi_{pi,0}(e1) + e1| <= tolerance",
              {"rotation.error", "rotation.tolerance"});

  // observed order against the closed form e^t x
  const OrderResult ord = order_estimate(
      exp_drv, [](const Vec& x) { return Vec(std::exp(1.0) * x); }, p.refinements, TimeGrid::uniform(1.0, 1), {x1});
  for (size_t i = 0; i < ord.steps.size(); ++i) csv.row("order", p.refinements[i], ord.steps[i], ord.errors[i]);
  rep.value("order.steps", ord.steps, kOracle);
  rep.value("order.errors", ord.errors, kOracle);
  rep.value("order.observed", ord.order, kOracle);
  rep.value("order.lo", p.order_lo, kConst);
  rep.value("order.hi", p.order_hi, kConst);
  rep.verdict("order", ord.order >= p.order_lo && ord.order <= p.order_hi, "lo <= observed order <= hi",
              {"order.observed", "order.lo", "order.hi"});

  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"flow_order.csv", csv.str()});
  return out;
}

// ================================================================ toy-converge

struct ToyParams {
  double a = 0.5;
  Vec k;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  ToyReportConfig cfg;
  double half = 0.5;
  int res = 5;
  double slope_lo = 0.35, slope_hi = 0.65;
};

ToyParams check_toy(Reader& r) {
  ToyParams p;
  p.a = r.num("toy.a", p.a);
  Vec k(2);
  k << 1.0, 0.5;
  p.k = r.vec("toy.k", k);
  p.eps = r.list("toy.eps", p.eps);
  p.cfg.gamma = r.num("toy.gamma", p.cfg.gamma);
  p.cfg.T = r.num("toy.T", p.cfg.T);
  p.half = r.num("toy.domain_half", p.half);
  p.res = static_cast<int>(r.integer("toy.domain_res", p.res));
  p.slope_lo = r.num("toy.slope_lo", p.slope_lo);
  p.slope_hi = r.num("toy.slope_hi", p.slope_hi);
  require(r.ck, p.k.size() == 2, "toy.k has 2 components", "toy wave vector lives in R^2");
  require(r.ck, p.eps.size() >= 3, ">= 3 eps values", "convergence slope needs at least 3 eps values");
  for (double e : p.eps) require(r.ck, e > 0 && e <= 1, "0 < eps <= 1", "toy eps out of range");
  require(r.ck, p.cfg.gamma > 0 && p.cfg.gamma < 0.5, "0 < gamma < 1/2", "Holder exponent out of range");
  require(r.ck, p.cfg.T > 0, "T > 0", "toy horizon must be positive");
  require(r.ck, p.half > 0 && p.res >= 2, "domain_half > 0, domain_res >= 2", "spatial grid");
  return p;
}

ExperimentResult run_toy(const ToyParams& p) {
  Report rep;
  const PhaseFunction f = tanh_phase(p.a, p.k);
  const SpatialDomain dom(2, -p.half, p.half, p.res);
  const ToyReport tr = convergence_report(f, p.eps, dom, p.cfg);
  Csv csv({"eps", "v_dist", "w_dist", "flow_err", "flow_err_limit", "flow_err_corrected"});
  std::vector<double> v, w, fe, fl, fc;
  for (const auto& row : tr.rows) {
    csv.row(row.eps, row.v_dist, row.w_dist, row.flow_err, row.flow_err_limit, row.flow_err_corrected);
    fc.push_back(row.flow_err_corrected);
    v.push_back(row.v_dist);
    w.push_back(row.w_dist);
    fe.push_back(row.flow_err);
    fl.push_back(row.flow_err_limit);
  }
  rep.value("eps", p.eps, kConst);
  rep.value("gamma", tr.gamma, kConst);
  rep.value("v_dist", v, kOracle);
  rep.value("w_dist", w, kOracle);
  rep.value("flow_err", fe, kOracle);
  rep.value("flow_err_limit", fl, kOracle);
  rep.value("flow_err_corrected", fc, kOracle);
  rep.value("slope", tr.slope, kOracle);
  rep.value("slope_target", 1.0 - 2.0 * tr.gamma, kConst);
  rep.value("slope_lo", p.slope_lo, kConst);
  rep.value("slope_hi", p.slope_hi, kConst);
  rep.verdict("first_level_slope", tr.slope >= p.slope_lo && tr.slope <= p.slope_hi, "slope_lo <= slope <= slope_hi",
              {"slope", "slope_lo", "slope_hi"});
  rep.verdict("second_level_decreasing", decreasing(w), "w_dist strictly decreasing along eps", {"w_dist"});
  rep.verdict("flow_endpoint_decreasing", decreasing(fe),
              "distance to x0 - (1/2) t f(0) grad f(0) strictly decreasing along eps", {"flow_err"});
  rep.diagnostic("flow_endpoint_limit_decreasing", decreasing(fl),
                 "distance to the flow of the limit driver strictly decreasing along eps", {"flow_err_limit"});
  rep.diagnostic("flow_endpoint_corrected_decreasing", decreasing(fc),
                 "distance to limit flow plus first-level term strictly decreasing along eps", {"flow_err_corrected"});
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"toy_convergence.csv", csv.str()});
  return out;
}

// ================================================================ turbulence (shared)

struct TurbParams {
  FieldParams field;
  Vec v, x0;
  double eps = 0.1, T = 1.0, h0 = 0.02, nsigma = 3.0, margin = 4.0, ks_threshold = 0.01;
  int M = 200, record_points = 50;
  std::vector<double> separations{0.0, 0.5, 3.0};  // in units of L
};

TurbParams check_turb(Reader& r, bool twopoint) {
  TurbParams p;
  p.field = read_field(r);
  const int d = p.field.spec.d;
  p.v = read_velocity(r, "turbulence.v", d);
  p.x0 = read_point(r, "turbulence.x0", d);
  p.eps = r.num("turbulence.eps", p.eps);
  p.T = r.num("turbulence.T", p.T);
  p.M = static_cast<int>(r.integer("turbulence.M", p.M));
  p.h0 = r.num("turbulence.h0", p.h0);
  p.nsigma = r.num("turbulence.nsigma", p.nsigma);
  p.margin = r.num("turbulence.margin", p.margin);
  if (twopoint) {
    p.separations = r.list("turbulence.separations", p.separations);
    require(r.ck, d >= 2, "d >= 2", "perpendicular separations need d >= 2");
    for (double s : p.separations) require(r.ck, s >= 0, "separations >= 0", "separations are distances");
  } else {
    p.record_points = static_cast<int>(r.integer("turbulence.record_points", p.record_points));
    p.ks_threshold = r.num("turbulence.ks_threshold", p.ks_threshold);
    require(r.ck, p.record_points >= 1, "record_points >= 1", "trajectory dump resolution");
  }
  TurbulenceConfig tc;
  tc.v = p.v;
  tc.eps = {p.eps};
  tc.T = p.T;
  tc.M = p.M;
  tc.x0 = {p.x0};
  r.ck.guard([&] { tc.validate(); });
  require(r.ck, p.h0 > 0 && p.h0 <= 0.5, "0 < h0 <= 0.5", "micro step must resolve the kernel");
  require(r.ck, p.nsigma > 0, "nsigma > 0", "verdict width in standard errors");
  require(r.ck, p.margin > 0, "margin > 0", "field box margin");
  return p;
}

int micro_steps(const TurbParams& p) {
  const double h = p.eps * p.eps * p.h0 * p.field.spec.L / p.v.norm();
  return static_cast<int>(std::ceil(p.T / h - 1e-9));
}

// unit vector perpendicular to v, built from the axis least aligned with it
Vec perpendicular(const Vec& v) {
  const int d = static_cast<int>(v.size());
  int best = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(v(i)) < std::abs(v(best))) best = i;
  Vec e = unit(d, best);
  const Vec u = v.normalized();
  e -= e.dot(u) * u;
  return e.normalized();
}

ExperimentResult run_onepoint(const TurbParams& p, uint64_t seed, int workers) {
  Report rep;
  const KernelSpec& spec = p.field.spec;
  const int d = spec.d;
  const HomogenizationOracles o = compute_oracles(spec, p.v);
  TrajectoryOptions opt;
  opt.h0 = p.h0;
  opt.record_every = std::max(1, micro_steps(p) / p.record_points);
  const FieldBox box = trajectory_box(p.v, p.eps, p.T, {p.x0}, p.margin);
  struct Sample {
    uint64_t seed;
    Path path;
  };
  const auto samples = parallel_map<Sample>(p.M, workers, [&](int i) {
    const uint64_t s = mix_seed(seed, kTagOnepoint, static_cast<uint64_t>(i));
    const FieldRealization F(spec, s, box);
    return Sample{s, rescaled_trajectory(F, p.v, p.eps, p.T, p.x0, opt)};
  });
  std::vector<Vec> inc;
  Csv traj(coord_header({"seed", "t"}, d));
  for (const auto& s : samples) {
    inc.push_back(s.path.x.back() - p.x0);
    for (size_t k = 0; k < s.path.t.size(); ++k) {
      std::vector<std::string> cells{std::to_string(s.seed), fmt(s.path.t[k])};
      for (int q = 0; q < d; ++q) cells.push_back(fmt(s.path.x[k](q)));
      traj.row_strings(cells);
    }
  }
  const OnePointReport r = empirical_onepoint(inc, p.T, o, p.nsigma);
  rep.value("nsigma", p.nsigma, kConst);
  rep.value("drift", to_json(r.drift), kMC);
  rep.value("drift_se", to_json(r.drift_se), kMC);
  rep.value("drift_oracle", to_json(r.drift_oracle), kOracle);
  rep.value("cov_rate", to_json(r.cov_rate), kMC);
  rep.value("cov_rate_se", to_json(r.cov_rate_se), kMC);
  rep.value("cov_target", to_json(r.cov_target), kOracle);
  rep.value("C00", to_json(r.C00), kOracle);
  rep.value("ks_p", r.ks_p, kMC);
  rep.value("ks_threshold", p.ks_threshold, kConst);
  rep.value("c_sf", to_json(o.c_sf), kOracle);
  rep.value("b_sf", to_json(o.b_sf), kOracle);
  rep.verdict("drift", r.drift_pass, "|drift - drift_oracle| <= nsigma * drift_se componentwise",
              {"drift", "drift_se", "drift_oracle", "nsigma"});
  rep.verdict("covariance_rate", r.cov_pass, "|cov_rate - (C00 + C00^T)| <= nsigma * cov_rate_se componentwise",
              {"cov_rate", "cov_rate_se", "cov_target", "nsigma"});
  const bool ks = std::all_of(r.ks_p.begin(), r.ks_p.end(), [&](double q) { return q > p.ks_threshold; });
  rep.verdict("ks_normality", ks, "every endpoint marginal has KS p > ks_threshold", {"ks_p", "ks_threshold"});
  rep.diagnostic("covariance_rate_vs_C00", r.cov_pass_C00, "|cov_rate - C00| <= nsigma * cov_rate_se componentwise",
                 {"cov_rate", "cov_rate_se", "C00", "nsigma"});
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"trajectories.csv", traj.str()});
  return out;
}

ExperimentResult run_twopoint(const TurbParams& p, uint64_t seed, int workers) {
  Report rep;
  const KernelSpec& spec = p.field.spec;
  const HomogenizationOracles o = compute_oracles(spec, p.v);
  const Vec e = perpendicular(p.v);
  std::vector<Vec> starts{p.x0};
  for (double s : p.separations) starts.push_back(p.x0 + s * spec.L * e);
  TrajectoryOptions opt;
  opt.h0 = p.h0;
  const FieldBox box = trajectory_box(p.v, p.eps, p.T, starts, p.margin);
  const auto inc = parallel_map<std::vector<Vec>>(p.M, workers, [&](int i) {
    const FieldRealization F(spec, mix_seed(seed, kTagTwopoint, static_cast<uint64_t>(i)), box);
    std::vector<Vec> out;
    for (const Vec& x : starts) out.push_back(rescaled_trajectory(F, p.v, p.eps, p.T, x, opt).x.back() - x);
    return out;
  });
  std::vector<Vec> ix;
  for (const auto& s : inc) ix.push_back(s[0]);
  Csv csv({"separation", "i", "j", "estimate", "stderr", "oracle"});
  rep.value("nsigma", p.nsigma, kConst);
  rep.value("separations", p.separations, kConst);
  rep.value("range", spec.range(), kOracle);
  for (size_t k = 0; k < p.separations.size(); ++k) {
    std::vector<Vec> iy;
    for (const auto& s : inc) iy.push_back(s[k + 1]);
    const Mat oracle = o.C(p.x0, starts[k + 1]);
    const TwoPointReport r = empirical_twopoint(ix, iy, p.T, oracle, p.nsigma);
    const std::string tag = "sep" + std::to_string(k);
    rep.value(tag + ".separation", p.separations[k] * spec.L, kConst);
    rep.value(tag + ".cross_rate", to_json(r.cross_rate), kMC);
    rep.value(tag + ".cross_se", to_json(r.cross_se), kMC);
    rep.value(tag + ".oracle", to_json(oracle), kOracle);
    for (int i = 0; i < spec.d; ++i)
      for (int j = 0; j < spec.d; ++j)
        csv.row(p.separations[k] * spec.L, i + 1, j + 1, r.cross_rate(i, j), r.cross_se(i, j), oracle(i, j));
    rep.verdict(tag + ".cross_covariance", r.pass, "|cross_rate - C(x,y)| <= nsigma * cross_se componentwise",
                {tag + ".cross_rate", tag + ".cross_se", tag + ".oracle", "nsigma"});
    if (p.separations[k] * spec.L >= spec.range())
      rep.verdict(tag + ".oracle_zero", oracle.norm() == 0.0, "oracle vanishes exactly beyond the dependence range",
                  {tag + ".oracle", "range"});
  }
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"twopoint.csv", csv.str()});
  return out;
}

// ================================================================ skeleton

struct SkeletonParams {
  FieldParams field;
  Vec v, x;
  double t = 1.0, panel = 1.0 / 32;
  std::vector<int> ns{8, 16, 32, 64};
  int seeds = 20;
  std::vector<double> family{0.3, 0.2, 0.1, 0.05};
  double floor = 1e-10;  // gaps below this are quadrature/rounding level
};

SkeletonParams check_skeleton(Reader& r) {
  SkeletonParams p;
  p.field = read_field(r);
  const int d = p.field.spec.d;
  p.v = read_velocity(r, "skeleton.v", d);
  p.x = read_point(r, "skeleton.x", d);
  p.t = r.num("skeleton.t", p.t);
  p.panel = r.num("skeleton.panel", p.panel);
  std::vector<double> nd(p.ns.begin(), p.ns.end());
  p.ns = to_ints(r.ck, "skeleton.n", r.list("skeleton.n", nd));
  p.seeds = static_cast<int>(r.integer("skeleton.seeds", p.seeds));
  p.family = r.list("skeleton.family_eps", p.family);
  p.floor = r.num("skeleton.gap_floor", p.floor);
  require(r.ck, p.floor >= 0, "gap_floor >= 0", "rounding floor for gaps");
  require(r.ck, p.t > 0, "t > 0", "skeleton time must be positive");
  require(r.ck, p.panel > 0 && p.panel <= 1, "0 < panel <= 1", "quadrature panel width");
  require(r.ck, p.seeds >= 1, "seeds >= 1", "need at least one realization");
  for (int n : p.ns) {
    require(r.ck, n >= 4, "n >= 4", "skeleton blocks");
    const double nt = n * p.t;
    require(r.ck, std::abs(nt - std::round(nt)) <= 1e-9, "n t integer", "block count n t must be an integer");
  }
  std::vector<double> nsd(p.ns.begin(), p.ns.end());
  require(r.ck, increasing(nsd), "n increasing", "skeleton n list must increase");
  for (double e : p.family) require(r.ck, e > 0 && e <= 1, "0 < eps <= 1", "family eps out of range");
  require(r.ck, p.family.size() >= 2 && decreasing(p.family), "family eps decreasing", "family eps list");
  return p;
}

ExperimentResult run_skeleton(const SkeletonParams& p, uint64_t seed, int workers) {
  Report rep;
  const KernelSpec& spec = p.field.spec;
  const StarTuple E = ordered_expectation(spec, p.v);
  double tau = p.ns.back() * p.t;
  for (double e : p.family) tau = std::max(tau, p.t / (e * e));
  const FieldBox box = trajectory_box(p.v, 1.0, tau + 1.0, {p.x}, 0.5);
  struct Sample {
    std::vector<SkeletonResidual> sk;
    std::vector<FamilyGap> fam;
  };
  const auto samples = parallel_map<Sample>(p.seeds, workers, [&](int i) {
    const FieldRealization F(spec, mix_seed(seed, kTagSkeleton, static_cast<uint64_t>(i)), box);
    Sample s;
    for (int n : p.ns) s.sk.push_back(skeleton_residual(F, p.v, p.x, p.t, n, E, p.panel));
    for (double e : p.family) s.fam.push_back(family_vs_sequence(F, p.v, p.x, p.t, e, p.panel));
    return s;
  });
  Csv sk({"n", "sample", "residual", "first_gap"});
  Csv fam({"eps", "n", "sample", "first", "second"});
  std::vector<double> med_res, med_first, med_second;
  for (size_t k = 0; k < p.ns.size(); ++k) {
    std::vector<double> xs;
    for (int i = 0; i < p.seeds; ++i) {
      xs.push_back(samples[i].sk[k].total);
      sk.row(p.ns[k], i, samples[i].sk[k].total, samples[i].sk[k].first);
    }
    med_res.push_back(median(xs));
  }
  for (size_t k = 0; k < p.family.size(); ++k) {
    std::vector<double> a, b;
    for (int i = 0; i < p.seeds; ++i) {
      const FamilyGap& g = samples[i].fam[k];
      a.push_back(g.first);
      b.push_back(g.second);
      fam.row(p.family[k], g.n, i, g.first, g.second);
    }
    med_first.push_back(median(a));
    med_second.push_back(median(b));
  }
  std::vector<double> nsd(p.ns.begin(), p.ns.end());
  rep.value("n", nsd, kConst);
  rep.value("median_residual", med_res, kMC);
  rep.value("family_eps", p.family, kConst);
  rep.value("median_first_gap", med_first, kMC);
  rep.value("median_second_gap", med_second, kMC);
  rep.value("ordered_expectation_norm", E.norm(), kOracle);
  rep.verdict("skeleton_residual_non_increasing", non_increasing(med_res), "median residual non-increasing in n",
              {"median_residual"});
  rep.value("gap_floor", p.floor, kConst);
  // exact reciprocal squares make later gaps vanish up to rounding; the first entry must dominate
  auto family_ok = [&](std::vector<double> m) {
    for (double& x : m)
      if (x <= p.floor) x = 0.0;
    return m.size() >= 2 && non_increasing(m) && m[0] > *std::max_element(m.begin() + 1, m.end());
  };
  rep.verdict("family_first_level", family_ok(med_first),
              "median first-level gap (floored at gap_floor) non-increasing along eps and largest at the first eps",
              {"median_first_gap", "gap_floor"});
  rep.verdict("family_second_level", family_ok(med_second),
              "median second-level gap (floored at gap_floor) non-increasing along eps and largest at the first eps",
              {"median_second_gap", "gap_floor"});
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"skeleton.csv", sk.str()});
  out.files.push_back({"family.csv", fam.str()});
  return out;
}

// ================================================================ localization

struct LocalParams {
  FieldParams field;
  Vec v;
  double eps = 0.1, T = 1.0, K_radius = 0.1;
  int K_points = 4, seeds = 100, record_every = 50;
  std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
};

LocalParams check_local(Reader& r) {
  LocalParams p;
  p.field = read_field(r);
  p.v = read_velocity(r, "localization.v", p.field.spec.d);
  p.eps = r.num("localization.eps", p.eps);
  p.T = r.num("localization.T", p.T);
  p.K_radius = r.num("localization.K_radius", p.K_radius);
  p.K_points = static_cast<int>(r.integer("localization.K_points", p.K_points));
  p.seeds = static_cast<int>(r.integer("localization.seeds", p.seeds));
  p.record_every = static_cast<int>(r.integer("localization.record_every", p.record_every));
  p.radii = r.list("localization.radii", p.radii);
  require(r.ck, p.eps > 0 && p.eps <= 1, "0 < eps <= 1", "localization eps out of range");
  require(r.ck, p.T > 0, "T > 0", "horizon must be positive");
  require(r.ck, p.seeds >= 1, "seeds >= 1", "need at least one realization");
  require(r.ck, p.K_points >= 0 && p.K_radius >= 0, "K_points >= 0, K_radius >= 0", "set K");
  require(r.ck, p.record_every >= 1, "record_every >= 1", "time grid stride");
  require(r.ck, !p.radii.empty() && increasing(p.radii) && p.radii.front() > 0, "radii increasing and positive",
          "localization radii must increase");
  if (!p.radii.empty())
    require(r.ck, p.K_radius < p.radii.front() / 2, "K inside B(0, R_min/2)", "K_radius must be below R_min/2");
  return p;
}

// origin plus K_points evenly spaced on the circle of radius K_radius (first two coordinates)
std::vector<Vec> local_K(const LocalParams& p) {
  const int d = p.field.spec.d;
  std::vector<Vec> K{Vec::Zero(d)};
  const double pi = std::acos(-1.0);
  for (int i = 0; i < p.K_points && p.K_radius > 0; ++i) {
    Vec x = Vec::Zero(d);
    const double a = 2 * pi * i / p.K_points;
    x(0) = p.K_radius * std::cos(a);
    if (d > 1) x(1) = p.K_radius * std::sin(a);
    K.push_back(x);
  }
  return K;
}

ExperimentResult run_local(const LocalParams& p, uint64_t seed, int workers) {
  Report rep;
  const std::vector<Vec> K = local_K(p);
  const FieldBox box =
      trajectory_box(p.v, p.eps, p.T, {Vec::Zero(p.field.spec.d)}, 2 * p.radii.back() + p.field.spec.L);
  const auto samples = parallel_map<LocalizationSample>(p.seeds, workers, [&](int i) {
    const FieldRealization F(p.field.spec, mix_seed(seed, kTagLocal, static_cast<uint64_t>(i)), box);
    return localization_sample(F, p.v, p.eps, p.T, K, p.radii, p.record_every);
  });
  const LocalizationTable tab = localization_table(samples, p.radii);
  Csv csv({"sample", "R", "nonexit", "distance_to_next"});
  for (int i = 0; i < p.seeds; ++i)
    for (size_t r = 0; r < p.radii.size(); ++r)
      csv.row(i, p.radii[r], samples[i].nonexit[r] ? 1 : 0,
              r + 1 < p.radii.size() ? fmt(samples[i].distance[r]) : std::string(""));
  rep.value("radii", p.radii, kConst);
  rep.value("nonexit_fraction", tab.nonexit_fraction, kMC);
  rep.value("median_distance", tab.median_distance, kMC);
  rep.value("max_distance", tab.max_distance, kMC);
  rep.verdict("nonexit_monotone", tab.monotone, "non-exit fraction nondecreasing in R", {"nonexit_fraction"});
  rep.verdict("zero_distance_on_nonexit", tab.zero_on_nonexit,
              "distance exactly 0 whenever the realization never leaves B(0,R)", {"max_distance"});
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"localization.csv", csv.str()});
  return out;
}

// ================================================================ tightness

struct TightParams {
  FieldParams field;
  TightnessSetup st;
  std::vector<double> eps{0.2, 0.1, 0.05};
  int seeds = 100;
  long audit = 100000;
  double max_ratio = 3.0, max_slope = 0.3, flag_ratio = 0.3;
};

TightParams check_tight(Reader& r) {
  TightParams p;
  p.field = read_field(r);
  p.st.spec = p.field.spec;
  p.st.speed = r.num("tightness.speed", p.st.speed);
  p.st.R = r.num("tightness.R", p.st.R);
  p.st.dx = r.num("tightness.dx", p.st.dx);
  p.st.sub = static_cast<int>(r.integer("tightness.sub", p.st.sub));
  p.st.s = r.num("tightness.s", p.st.s);
  p.st.t = r.num("tightness.t", p.st.t);
  p.st.batches = static_cast<int>(r.integer("tightness.batches", p.st.batches));
  p.st.tp.p = r.num("tightness.p", 2.0);
  p.st.tp.r = r.num("tightness.r", 0.9);
  p.st.tp.k1 = static_cast<int>(r.integer("tightness.k1", 3));
  p.st.tp.d = p.field.spec.d;
  p.st.tp.a = r.num("tightness.a", tightness_exponent(p.field.a0, p.field.kappa));
  p.eps = r.list("tightness.eps", p.eps);
  p.seeds = static_cast<int>(r.integer("tightness.seeds", p.seeds));
  p.audit = r.integer("tightness.audit", p.audit);
  p.max_ratio = r.num("tightness.max_ratio", p.max_ratio);
  p.max_slope = r.num("tightness.max_slope", p.max_slope);
  require(r.ck, p.field.spec.d == 2, "d = 2", "tightness grids are implemented for d = 2");
  require(r.ck, p.eps.size() >= 2, ">= 2 eps values", "uniformity needs several eps values");
  require(r.ck, p.seeds >= p.st.batches, "seeds >= batches", "every batch needs a seed");
  require(r.ck, p.audit >= 1, "audit >= 1", "admissibility audit size");
  r.ck.guard([&] { p.st.tp.validate(); });
  if (p.field.spec.d == 2)
    for (double e : p.eps) {
      if (!(e > 0 && e <= 1)) {
        r.ck.add("0 < eps <= 1", "tightness eps out of range");
        continue;
      }
      r.ck.guard([&] { p.st.validate(e); });
    }
  return p;
}

ExperimentResult run_tight(const TightParams& p, uint64_t seed, int workers) {
  Report rep;
  std::vector<MomentStatistic> stats;
  for (double e : p.eps) stats.push_back(tightness_statistic(p.st, e, seed, p.seeds, workers));
  const UniformityReport u = uniformity(stats, p.max_ratio, p.max_slope);
  const AdmissibilityAudit audit = admissibility_audit(p.audit, mix_seed(seed, kTagAudit, 0));
  static const char* names[4] = {"V_moment", "W_moment", "V_difference", "W_difference"};
  Csv csv({"eps", "summand_id", "estimate", "stderr"});
  json flags = json::array();
  for (const auto& s : stats)
    for (int k = 0; k < 4; ++k) {
      csv.row(s.eps, k, s.s[k].estimate, s.s[k].se);
      if (s.s[k].se > p.flag_ratio * s.s[k].estimate)
        flags.push_back(json{{"eps", json{{"value", s.eps}, {"provenance", kConst}}},
                             {"summand", names[k]},
                             {"note", "standard error above 0.3 of the estimate"}});
    }
  rep.value("eps", p.eps, kConst);
  rep.value("p", p.st.tp.p, kConst);
  rep.value("r", p.st.tp.r, kConst);
  rep.value("a", p.st.tp.a, kConst);
  rep.value("k1", p.st.tp.k1, kConst);
  rep.value("max_ratio", p.max_ratio, kConst);
  rep.value("max_slope", p.max_slope, kConst);
  for (int k = 0; k < 4; ++k) {
    std::vector<double> est, se;
    for (const auto& s : stats) {
      est.push_back(s.s[k].estimate);
      se.push_back(s.s[k].se);
    }
    const std::string n = names[k];
    rep.value(n + ".estimate", est, kMC);
    rep.value(n + ".stderr", se, kMC);
    rep.value(n + ".ratio", u.ratio[k], kMC);
    rep.value(n + ".slope", u.slope[k], kMC);
    rep.verdict(n + ".uniform", u.ratio[k] <= p.max_ratio && std::abs(u.slope[k]) <= p.max_slope,
                "max/min across eps <= max_ratio and |log-log slope| <= max_slope",
                {n + ".ratio", n + ".slope", "max_ratio", "max_slope"});
  }
  json adm = json{{"tested", json{{"value", audit.tested}, {"provenance", kMC}}},
                  {"accepted", json{{"value", audit.accepted}, {"provenance", kMC}}},
                  {"false_accepts", json{{"value", audit.false_accepts}, {"provenance", kMC}}},
                  {"pass", audit.false_accepts == 0}};
  rep.value("admissibility.tested", audit.tested, kMC);
  rep.value("admissibility.accepted", audit.accepted, kMC);
  rep.value("admissibility.false_accepts", audit.false_accepts, kMC);
  rep.verdict("admissibility_audit", audit.false_accepts == 0, "no accepted tuple violates the inequality chain",
              {"admissibility.false_accepts"});
  ExperimentResult out;
  out.report = json{{"values", rep.values}, {"verdicts", rep.verdicts}, {"diagnostics", rep.diagnostics},
                    {"flags", flags}};
  out.all_pass = rep.all_pass();
  out.files.push_back({"tightness.csv", csv.str()});
  out.files.push_back({"admissibility.json", adm.dump(2) + "\n"});
  return out;
}

// ---------------------------------------------------------------- dispatch

struct Plan {
  std::vector<Violation> violations;
  std::function<ExperimentResult(uint64_t, int)> run;
};

Plan plan(const ExperimentConfig& cfg) {
  Plan pl;
  Checker ck;
  Reader r(cfg.params, ck);
  const std::string& k = cfg.kind;
  if (k == "lift-check") {
    auto p = check_lift(r);
    pl.run = [p](uint64_t, int w) { return run_lift(p, w); };
  } else if (k == "flow-order") {
    auto p = check_flow(r);
    pl.run = [p](uint64_t, int) { return run_flow(p); };
  } else if (k == "toy-converge") {
    auto p = check_toy(r);
    pl.run = [p](uint64_t, int) { return run_toy(p); };
  } else if (k == "turb-onepoint") {
    auto p = check_turb(r, false);
    pl.run = [p](uint64_t s, int w) { return run_onepoint(p, s, w); };
  } else if (k == "turb-twopoint") {
    auto p = check_turb(r, true);
    pl.run = [p](uint64_t s, int w) { return run_twopoint(p, s, w); };
  } else if (k == "skeleton") {
    auto p = check_skeleton(r);
    pl.run = [p](uint64_t s, int w) { return run_skeleton(p, s, w); };
  } else if (k == "localization") {
    auto p = check_local(r);
    pl.run = [p](uint64_t s, int w) { return run_local(p, s, w); };
  } else if (k == "tightness") {
    auto p = check_tight(r);
    pl.run = [p](uint64_t s, int w) { return run_tight(p, s, w); };
  } else {
    ck.add("kind recognized", "unknown experiment kind '" + k + "'");
    pl.violations = ck.out;
    return pl;
  }
  r.finish();
  if (!resolve_seed(cfg.seed, cfg.params))
    ck.add("seed present", "no seed: pass --seed, set [run] seed, or export ROUGHFLOW_SEED");
  if (cfg.workers < 1) ck.add("workers >= 1", "worker count must be positive");
  pl.violations = ck.out;
  return pl;
}

}  // namespace

std::vector<Violation> validate(const ExperimentConfig& cfg) { return plan(cfg).violations; }

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Plan pl = plan(cfg);
  if (!pl.violations.empty()) throw ConstraintError(pl.violations.front().constraint, pl.violations.front().detail);
  const uint64_t seed = *resolve_seed(cfg.seed, cfg.params);
  ExperimentResult res = pl.run(seed, cfg.workers);
  json echo = json::object();
  for (const auto& [key, v] : cfg.params.entries()) echo[key] = v;
  echo["run.seed"] = std::to_string(seed);
  res.report["kind"] = cfg.kind;
  res.report["config"] = echo;
  res.report["all_pass"] = res.all_pass;
  return res;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) log << "validation error [" << v.constraint << "]: " << v.detail << "\n";
    return 2;
  }
  ExperimentResult res;
  try {
    res = run_experiment(cfg);
  } catch (const ConstraintError& e) {
    log << "validation error [" << e.constraint << "]: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    log << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << " on [" << e.s << ", " << e.t << "] at x = (";
    for (size_t i = 0; i < e.x.size(); ++i) log << (i ? ", " : "") << e.x[i];
    log << ")\n";
    return 3;
  } catch (const CoverageError& e) {
    log << "divergence: " << e.what() << " (field box too small; required margin " << e.required_margin << ")\n";
    return 3;
  } catch (const std::runtime_error& e) {
    log << "divergence: " << e.what() << "\n";
    return 3;
  }
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "report.json", std::ios::binary);
    f << res.report.dump(2) << "\n";
  }
  for (const auto& file : res.files) {
    std::ofstream f(dir / file.name, std::ios::binary);
    f << file.text;
  }
  for (const auto& v : res.report["verdicts"])
    log << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << v["name"].get<std::string>() << "\n";
  return res.all_pass ? 0 : 1;
}

}  // namespace roughflow
