#include "beltrami/lab.hpp"

#include "beltrami/calibration.hpp"
#include "beltrami/contact.hpp"
#include "beltrami/dynamics.hpp"
#include "beltrami/galerkin.hpp"
#include "beltrami/lattice.hpp"
#include "beltrami/projector.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace beltrami::lab {

namespace fs = std::filesystem;

std::string version() { return BELTRAMI_VERSION; }

// ---------------------------------------------------------------------------
// Config validation

namespace {

const std::map<std::string, std::set<std::string>>& kind_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"spectrum", {"n"}},
      {"abc", {"A", "B", "C", "grid", "sample_grid"}},
      {"bernoulli", {"n", "samples", "grid"}},
      {"lyapunov", {"A", "B", "C", "seeds", "T", "renorm", "tol", "start", "expect", "threshold"}},
      {"poincare", {"A", "B", "C", "x0", "crossings", "axis", "level", "direction", "tol", "time_budget"}},
      {"perturb", {"K", "epsilons", "window", "compat_grid"}},
      {"pi-map", {"dim", "k", "center", "radius", "q", "nodes"}},
  };
  return keys;
}

class ParamReader {
 public:
  ParamReader(const std::string& kind, const json& in) : kind_(kind), in_(in) {
    if (!in_.is_object()) fail("params must be an object");
    for (const auto& [key, value] : in_.items())
      if (!kind_keys().at(kind).count(key)) fail("unknown parameter '" + key + "'");
  }

  double number(const std::string& key, std::optional<double> def, double lo, double hi) {
    if (!in_.contains(key)) {
      if (!def) fail("missing required parameter '" + key + "'");
      out_[key] = *def;
      return *def;
    }
    const json& v = in_.at(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi)
      fail("'" + key + "' = " + io::format_number(x) + " outside [" + io::format_number(lo) + ", " +
           io::format_number(hi) + "]");
    out_[key] = x;
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> def, long long lo, long long hi) {
    if (!in_.contains(key)) {
      if (!def) fail("missing required parameter '" + key + "'");
      out_[key] = *def;
      return *def;
    }
    const json& v = in_.at(key);
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) fail("'" + key + "' = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    out_[key] = x;
    return x;
  }

  std::string choice(const std::string& key, const std::string& def, const std::set<std::string>& allowed) {
    std::string s = def;
    if (in_.contains(key)) {
      if (!in_.at(key).is_string()) fail("'" + key + "' must be a string");
      s = in_.at(key).get<std::string>();
    }
    if (!allowed.count(s)) fail("'" + key + "' has unsupported value '" + s + "'");
    out_[key] = s;
    return s;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def, std::size_t min_size,
                              std::size_t max_size) {
    std::vector<double> v = def;
    if (in_.contains(key)) {
      const json& a = in_.at(key);
      if (!a.is_array()) fail("'" + key + "' must be an array of numbers");
      v.clear();
      for (const auto& x : a) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) fail("'" + key + "' must contain finite numbers");
        v.push_back(x.get<double>());
      }
    }
    if (v.size() < min_size || v.size() > max_size)
      fail("'" + key + "' must have between " + std::to_string(min_size) + " and " + std::to_string(max_size) +
           " entries");
    out_[key] = v;
    return v;
  }

  bool has(const std::string& key) const { return in_.contains(key); }
  json result() const { return out_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigInvalid(kind_ + ": " + msg); }

 private:
  std::string kind_;
  const json& in_;
  json out_ = json::object();
};

std::vector<double> default_epsilons() {
  std::vector<double> e;
  for (int i = -4; i <= 4; ++i) e.push_back(i / 20.0);
  return e;
}

// Reads every parameter once so that defaults are materialized.
json normalize_params(const std::string& kind, const json& in) {
  ParamReader r(kind, in);
  constexpr double big = 1e12;
  if (kind == "spectrum") {
    r.integer("n", std::nullopt, 0, 1000000);
  } else if (kind == "abc") {
    r.number("A", 1.0, -big, big);
    r.number("B", 1.0, -big, big);
    r.number("C", 1.0, -big, big);
    r.integer("grid", 32, 8, 256);
    r.integer("sample_grid", 16, 4, 128);
  } else if (kind == "bernoulli") {
    r.integer("n", 1, 1, 10000);
    r.integer("samples", 5, 1, 1000);
    r.integer("grid", 16, 4, 128);
  } else if (kind == "lyapunov") {
    r.number("A", 1.0, -big, big);
    r.number("B", 0.5, -big, big);
    r.number("C", 0.1, -big, big);
    r.integer("seeds", 4, 1, 10000);
    r.number("T", 1000.0, 1e-3, 1e8);
    r.number("renorm", 1.0, 1e-6, 1e6);
    r.number("tol", 1e-9, 1e-14, 1e-2);
    r.choice("start", "separatrix", {"separatrix", "uniform"});
    const std::string expect = r.choice("expect", "none", {"none", "chaotic", "integrable"});
    r.number("threshold", expect == "integrable" ? 5e-3 : calibration::lyapunov_theta, 0.0, big);
  } else if (kind == "poincare") {
    r.number("A", 1.0, -big, big);
    r.number("B", 0.5, -big, big);
    r.number("C", 0.1, -big, big);
    if (r.has("x0")) r.numbers("x0", {}, 3, 3);
    r.integer("crossings", 500, 1, 10000000);
    r.integer("axis", 2, 0, 2);
    r.number("level", std::numbers::pi / 2, -big, big);
    const long long dir = r.integer("direction", 1, -1, 1);
    if (dir == 0) r.fail("'direction' must be +1 or -1");
    r.number("tol", 1e-10, 1e-14, 1e-2);
    r.number("time_budget", 1e5, 1e-3, 1e9);
  } else if (kind == "perturb") {
    r.integer("K", 3, 1, 6);
    const auto eps = r.numbers("epsilons", default_epsilons(), 1, 1000);
    if (std::find(eps.begin(), eps.end(), 0.0) == eps.end()) r.fail("'epsilons' must include 0");
    const auto w = r.numbers("window", {0.7, 1.3}, 2, 2);
    if (!(w[0] < w[1])) r.fail("'window' must satisfy lo < hi");
    r.integer("compat_grid", 16, 4, 64);
  } else if (kind == "pi-map") {
    const long long dim = r.integer("dim", 60, 2, 2000);
    r.integer("k", 3, 1, dim - 1);
    r.number("center", 1.0, -big, big);
    r.number("radius", 0.5, 1e-12, big);
    r.numbers("q", {-0.1, -0.05, 0.0, 0.05, 0.1}, 1, 1000);
    const long long nodes = r.integer("nodes", 64, 4, 4096);
    if (nodes % 2) r.fail("'nodes' must be even");
  }
  return r.result();
}

}  // namespace

json ExperimentConfig::to_json() const { return {{"kind", kind}, {"seed", seed}, {"params", params}}; }

std::string ExperimentConfig::hash() const { return io::content_hash(to_json()); }

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
  static const std::set<std::string> top = {"$schema", "description", "kind", "seed", "output", "jobs", "params"};
  for (const auto& [key, value] : j.items())
    if (!top.count(key)) throw ConfigInvalid("unknown top-level key '" + key + "'");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigInvalid("missing string 'kind'");
  ExperimentConfig c;
  c.kind = j.at("kind").get<std::string>();
  if (!kind_keys().count(c.kind)) throw ConfigInvalid("unknown kind '" + c.kind + "'");
  if (j.contains("seed")) {
    const json& sd = j.at("seed");
    if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<long long>() < 0)) throw ConfigInvalid("'seed' must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigInvalid("'output' must be a string");
    c.output = j.at("output").get<std::string>();
  }
  if (j.contains("jobs")) {
    if (!j.at("jobs").is_number_integer() || j.at("jobs").get<int>() < 1) throw ConfigInvalid("'jobs' must be >= 1");
    c.jobs = j.at("jobs").get<int>();
  }
  c.params = normalize_params(c.kind, j.contains("params") ? j.at("params") : json::object());
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigInvalid("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

template <typename F>
void parallel_for(int count, int jobs, F&& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[std::size_t(i)] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check(RunRecord& r, const std::string& name, bool ok, double value, const std::string& detail = {}) {
  r.assertions.push_back({name, ok, value, detail});
}

ABCParams abc_of(const json& p) { return {p.at("A").get<double>(), p.at("B").get<double>(), p.at("C").get<double>()}; }

std::string field_hash(const VectorField& v) { return io::content_hash(io::to_json(v)); }

void run_spectrum(const ExperimentConfig& c, RunRecord& r) {
  const auto n = c.params.at("n").get<std::int64_t>();
  const EigenShell shell = lattice_shell(n);
  r.results = {{"n", n},
               {"eigenvalue", std::sqrt(double(n))},
               {"multiplicity", shell.multiplicity()},
               {"empty_shell", shell.empty()},
               {"admissible", admissible_mod8(n)}};
  io::CsvTable t{"shell.csv", {"k1", "k2", "k3"}, {}};
  for (const auto& k : shell.vectors) t.rows.push_back({double(k.x), double(k.y), double(k.z)});
  r.tables.push_back(std::move(t));
  if (shell.empty() || n == 0) return;
  const auto basis = helicity_basis(n);
  const double res = eigen_residual(basis, std::sqrt(double(n)));
  const double gram = gram_deviation(basis);
  r.results["eigen_residual"] = res;
  r.results["gram_deviation"] = gram;
  check(r, "basis size equals shell multiplicity", basis.size() == shell.multiplicity(), double(basis.size()));
  check(r, "curl eigen residual <= 1e-13", res <= 1e-13, res);
  check(r, "Gram deviation <= 1e-12", gram <= 1e-12, gram);
  json fields = json::array();
  for (const auto& u : basis) fields.push_back(io::to_json(u));
  r.sidecars.push_back({"basis.json", {{"n", n}, {"fields", fields}}});
}

void run_abc(const ExperimentConfig& c, RunRecord& r) {
  const ABCParams p = abc_of(c.params);
  const int grid = c.params.at("grid").get<int>(), sg = c.params.at("sample_grid").get<int>();
  const VectorField v = make_abc(p);
  const SteadyResidual sr = steady_residual(v);
  const ScalarField F = bernoulli(v);
  const double Fsup = F.empty() ? 0.0 : to_grid(F, grid).abs().maxCoeff();
  const double mn = min_norm(v, grid);
  r.results = {{"field_hash", field_hash(v)},
               {"euler_residual", sr.euler},
               {"bernoulli_residual", sr.bernoulli},
               {"bernoulli_sup", Fsup},
               {"min_norm", mn}};
  check(r, "Euler residual <= 1e-10", sr.euler <= 1e-10, sr.euler);
  check(r, "Bernoulli residual <= 1e-10", sr.bernoulli <= 1e-10, sr.bernoulli);
  check(r, "Bernoulli function vanishes (sup <= 1e-11)", Fsup <= 1e-11, Fsup);

  const UniformGrid g{sg};
  const GridVector s = sample(v, sg);
  io::CsvTable speed{"speed.csv", {"x1", "x2", "x3", "value"}, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Eigen::Vector3d x = g.point(i);
    const auto j = Eigen::Index(i);
    speed.rows.push_back({x[0], x[1], x[2], std::sqrt(s[0][j] * s[0][j] + s[1][j] * s[1][j] + s[2][j] * s[2][j])});
  }
  r.tables.push_back(std::move(speed));
  try {
    const ScalarGridReport f = proportionality_factor(v, grid);
    r.results["proportionality_factor"] = {{"min", f.min}, {"max", f.max}, {"gap", f.gap()}};
    check(r, "proportionality factor constant (gap <= 1e-10)", f.gap() <= 1e-10, f.gap());
  } catch (const VanishingField& e) {
    r.results["proportionality_factor"] = {{"vanishing", true}, {"message", e.what()}};
  }
  r.sidecars.push_back({"field.json", io::to_json(v)});
}

void run_bernoulli(const ExperimentConfig& c, RunRecord& r) {
  const auto n = c.params.at("n").get<std::int64_t>();
  const int samples = c.params.at("samples").get<int>(), grid = c.params.at("grid").get<int>();
  if (lattice_shell(n).empty()) throw NoSuchEigenvalue("empty shell n = " + std::to_string(n));
  io::CsvTable t{"bernoulli.csv", {"sample", "seed", "bernoulli_sup", "euler_residual", "bernoulli_residual"}, {}};
  t.rows.resize(std::size_t(samples));
  parallel_for(samples, c.jobs, [&](int i) {
    const std::uint64_t s = c.seed * 1000 + std::uint64_t(i);
    const VectorField v = random_beltrami(n, s);
    const ScalarField F = bernoulli(v);
    const double sup = F.empty() ? 0.0 : to_grid(F, grid).abs().maxCoeff();
    const SteadyResidual sr = steady_residual(v);
    t.rows[std::size_t(i)] = {double(i), double(s), sup, sr.euler, sr.bernoulli};
  });
  double worst = 0.0;
  for (const auto& row : t.rows) worst = std::max(worst, row[2]);
  r.results = {{"n", n}, {"samples", samples}, {"max_bernoulli_sup", worst}};
  check(r, "Bernoulli sup-norm <= 1e-11 for every sample", worst <= 1e-11, worst);
  r.tables.push_back(std::move(t));
}

void run_lyapunov(const ExperimentConfig& c, RunRecord& r) {
  const ABCParams p = abc_of(c.params);
  const VectorField v = make_abc(p);
  const int seeds = c.params.at("seeds").get<int>();
  const double T = c.params.at("T").get<double>(), renorm = c.params.at("renorm").get<double>(),
               tol = c.params.at("tol").get<double>(), threshold = c.params.at("threshold").get<double>();
  const bool uniform = c.params.at("start").get<std::string>() == "uniform";
  std::vector<LyapunovEstimate> est(static_cast<std::size_t>(seeds));
  std::vector<Eigen::Vector3d> x0(static_cast<std::size_t>(seeds));
  parallel_for(seeds, c.jobs, [&](int i) {
    const std::uint64_t idx = c.seed * 1000 + std::uint64_t(i);
    x0[std::size_t(i)] = uniform ? torus_point(c.seed, std::uint64_t(i)) : separatrix_seed(idx);
    est[std::size_t(i)] = lyapunov_max(v, x0[std::size_t(i)], T, renorm, tol);
  });
  io::CsvTable summary{"lyapunov.csv", {"seed", "lambda_max", "band"}, {}};
  json starts = json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < seeds; ++i) {
    const auto& e = est[std::size_t(i)];
    summary.rows.push_back({double(i), e.lambda_max, e.band});
    io::CsvTable h{"lyapunov_seed_" + std::to_string(i) + ".csv", {"t", "estimate"}, {}};
    for (const auto& [t, val] : e.history) h.rows.push_back({t, val});
    r.tables.push_back(std::move(h));
    starts.push_back({x0[std::size_t(i)][0], x0[std::size_t(i)][1], x0[std::size_t(i)][2]});
    lo = std::min(lo, e.lambda_max);
    hi = std::max(hi, e.lambda_max);
  }
  r.tables.insert(r.tables.begin(), std::move(summary));
  const std::string fh = field_hash(v);
  r.results = {{"field_hash", fh}, {"min_lambda_max", lo}, {"max_lambda_max", hi}, {"threshold", threshold}};
  r.sidecars.push_back({"lyapunov.json",
                        {{"field_hash", fh}, {"seed", c.seed}, {"tol", tol}, {"T", T}, {"renorm", renorm},
                         {"start", uniform ? "uniform" : "separatrix"}, {"initial_points", starts}}});
  const std::string expect = c.params.at("expect").get<std::string>();
  if (expect == "chaotic") check(r, "some seed exceeds the chaos threshold", hi > threshold, hi);
  if (expect == "integrable") check(r, "every seed below the integrable bound", hi <= threshold, hi);
}

void run_poincare(const ExperimentConfig& c, RunRecord& r) {
  const VectorField v = make_abc(abc_of(c.params));
  SectionPlane plane;
  plane.axis = c.params.at("axis").get<int>();
  plane.level = c.params.at("level").get<double>();
  plane.direction = c.params.at("direction").get<int>();
  Eigen::Vector3d x0 = separatrix_seed(c.seed);
  if (c.params.contains("x0")) {
    const auto a = c.params.at("x0").get<std::vector<double>>();
    x0 = {a[0], a[1], a[2]};
  }
  const double tol = c.params.at("tol").get<double>();
  const PoincareSection s = poincare(v, plane, x0, c.params.at("crossings").get<int>(), tol,
                                     c.params.at("time_budget").get<double>());
  io::CsvTable pts{"section.csv", {"s1", "s2"}, {}};
  for (const auto& q : s.points) pts.rows.push_back({q[0], q[1]});
  io::CsvTable traj{"crossings.csv", {"t", "x1", "x2", "x3"}, {}};
  for (std::size_t i = 0; i < s.states.size(); ++i)
    traj.rows.push_back({s.times[i], s.states[i][0], s.states[i][1], s.states[i][2]});
  r.tables.push_back(std::move(pts));
  r.tables.push_back(std::move(traj));
  const std::string fh = field_hash(v);
  const double T = s.times.empty() ? 0.0 : s.times.back();
  r.results = {{"field_hash", fh},
               {"crossings", s.points.size()},
               {"occupancy", section_occupancy(s.points)},
               {"max_level_residual", s.max_level_residual},
               {"steps", s.stats.steps},
               {"rejected", s.stats.rejected}};
  r.sidecars.push_back({"section.json", {{"field_hash", fh}, {"seed", c.seed}, {"tol", tol}, {"T", T},
                                         {"x0", {x0[0], x0[1], x0[2]}}}});
  check(r, "crossings lie on the plane (residual <= 1e-9)", s.max_level_residual <= 1e-9, s.max_level_residual);
}

void run_perturb(const ExperimentConfig& c, RunRecord& r) {
  const int K = c.params.at("K").get<int>();
  const auto eps = c.params.at("epsilons").get<std::vector<double>>();
  const auto w = c.params.at("window").get<std::vector<double>>();
  const int cg = c.params.at("compat_grid").get<int>();
  const ContactModel model = std_contact_t3();
  const MetricFamily fam = metric_family(model.metric, model.form, default_beta(), eps);

  std::vector<CompatibilityReport> compat(eps.size());
  parallel_for(int(eps.size()), c.jobs,
               [&](int i) { compat[std::size_t(i)] = check_compatibility(fam.member(eps[std::size_t(i)]), model.form, cg); });
  double worst_compat = 0.0;
  json compat_json = json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    worst_compat = std::max(worst_compat, compat[i].max());
    compat_json.push_back({{"epsilon", eps[i]}, {"defects", io::to_json(compat[i])}});
  }

  const SplittingCurves sc = track_splitting(fam, model.form, {w[0], w[1]}, K, eps);
  const auto V = adapted_v_basis(model.form.alpha, fam.beta());
  const Eigen::MatrixXd Pi = pairing_matrix(V, fam.variation().h, fam.base(), model.form.lambda0);
  const Eigen::MatrixXd G = galerkin_pi_derivative(fam.base(), fam.variation().h, V, K);
  const double cert = splitting_certificate(G);
  const double agree = (G - Pi).norm() / Pi.norm();

  io::CsvTable curves{"splitting_curves.csv", {"epsilon"}, {}};
  for (int i = 0; i < sc.multiplicity; ++i) curves.header.push_back("lambda_" + std::to_string(i + 1));
  for (std::size_t j = 0; j < eps.size(); ++j) {
    std::vector<double> row{eps[j]};
    for (int i = 0; i < sc.multiplicity; ++i) row.push_back(sc.branches[j][i]);
    curves.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(curves));
  r.tables.push_back(io::matrix_table("pi_prime.csv", G));

  const std::string metric_hash = io::content_hash(io::to_json(fam.base()));
  std::vector<double> slopes(sc.fitted_slopes.data(), sc.fitted_slopes.data() + sc.fitted_slopes.size());
  r.results = {{"K", K},
               {"dimension", 3 * (2 * K + 1) * (2 * K + 1) * (2 * K + 1)},
               {"epsilons", eps},
               {"window", w},
               {"multiplicity", sc.multiplicity},
               {"fitted_slopes", slopes},
               {"slope_gap", sc.slope_gap},
               {"alpha_defect", sc.alpha_defect},
               {"alpha_residual", sc.alpha_residual},
               {"min_separation_ratio", sc.min_separation_ratio},
               {"splitting_certificate", cert},
               {"pi_prime_vs_pairing", agree},
               {"compatibility", compat_json},
               {"tolerances", {{"window_touch", 1e-8}, {"alpha", 1e-9}, {"compatibility", 1e-10}}}};
  r.sidecars.push_back({"pi_prime.json", {{"K", K}, {"D", 3 * (2 * K + 1) * (2 * K + 1) * (2 * K + 1)},
                                          {"rows", G.rows()}, {"metric_hash", metric_hash},
                                          {"basis", "alpha, beta, remaining curl eigenforms"}}});
  check(r, "compatibility defects <= 1e-10", worst_compat <= 1e-10, worst_compat);
  check(r, "alpha eigenvalue stays at lambda0 (<= 1e-9)", sc.alpha_defect <= 1e-9, sc.alpha_defect);
  check(r, "cluster splits (slope gap > 0)", sc.slope_gap > 0.0, sc.slope_gap);
  check(r, "Galerkin pi' matches the pairing matrix (rel <= 1e-6)", agree <= 1e-6, agree);
  check(r, "splitting certificate > 0", cert > 0.0, cert);
}

void run_pi_map(const ExperimentConfig& c, RunRecord& r) {
  const int dim = c.params.at("dim").get<int>(), k = c.params.at("k").get<int>(),
            nodes = c.params.at("nodes").get<int>();
  const double center = c.params.at("center").get<double>(), radius = c.params.at("radius").get<double>();
  const auto qs = c.params.at("q").get<std::vector<double>>();
  const MatrixFamily fam = random_family(dim, k, center, radius, c.seed);
  std::vector<PiMapReport> reps(qs.size());
  parallel_for(int(qs.size()), c.jobs,
               [&](int i) { reps[std::size_t(i)] = pi_map(fam, qs[std::size_t(i)], 0.0, center, radius, nodes); });
  io::CsvTable t{"pi_map.csv", {"q", "sigma_match_defect", "identity_deviation", "idempotency_defect"}, {}};
  double sigma = 0.0, idem = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& P = reps[i].projector;
    const double d = (P * P - P).norm();
    t.rows.push_back({qs[i], reps[i].sigma_match_defect, reps[i].identity_deviation, d});
    sigma = std::max(sigma, reps[i].sigma_match_defect);
    idem = std::max(idem, d);
  }
  const Eigen::MatrixXd pp = pi_derivative(fam.derivative(0.0), reps.front().frame);
  r.tables.push_back(std::move(t));
  r.tables.push_back(io::matrix_table("pi_prime.csv", pp));
  r.results = {{"dim", dim},          {"k", k},       {"center", center},          {"radius", radius},
               {"nodes", nodes},      {"q", qs},      {"max_sigma_match", sigma},  {"max_idempotency", idem},
               {"pi_prime_certificate", splitting_certificate(pp)}};
  check(r, "sigma(pi) matches the spectrum in the window (<= 1e-9)", sigma <= 1e-9, sigma);
  check(r, "projector idempotent (<= 1e-10)", idem <= 1e-10, idem);
}

}  // namespace

bool RunRecord::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

json RunRecord::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) files_json.push_back({{"path", f.path}, {"sha256", f.sha256}});
  json asserts = json::array();
  for (const auto& a : assertions)
    asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value}, {"detail", a.detail}});
  return {{"config_hash", config_hash}, {"tool_version", tool_version}, {"kind", kind},
          {"wall_time_seconds", wall_time}, {"files", files_json}, {"assertions", asserts},
          {"passed", passed()}};
}

RunRecord compute(const ExperimentConfig& config) {
  RunRecord r;
  r.config_hash = config.hash();
  r.tool_version = version();
  r.kind = config.kind;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (config.kind == "spectrum") run_spectrum(config, r);
    else if (config.kind == "abc") run_abc(config, r);
    else if (config.kind == "bernoulli") run_bernoulli(config, r);
    else if (config.kind == "lyapunov") run_lyapunov(config, r);
    else if (config.kind == "poincare") run_poincare(config, r);
    else if (config.kind == "perturb") run_perturb(config, r);
    else if (config.kind == "pi-map") run_pi_map(config, r);
    else throw ConfigInvalid("unknown kind '" + config.kind + "'");
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const ComputeFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw ComputeFailure(config.kind + ": " + e.what());
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<FileEntry> emit_plot_data(const RunRecord& record, const fs::path& out_dir) {
  std::vector<FileEntry> out;
  for (const auto& t : record.tables) out.push_back({t.name, io::write_file(out_dir / t.name, io::to_csv(t))});
  return out;
}

RunRecord run(const ExperimentConfig& config, const fs::path& out_dir) {
  RunRecord r = compute(config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ComputeFailure("cannot create output directory " + out_dir.string() + ": " + ec.message());
  try {
    auto write_json = [&](const std::string& name, const json& j) {
      r.files.push_back({name, io::write_file(out_dir / name, j.dump(2) + "\n")});
    };
    write_json("config.json", config.to_json());
    json result = {{"config_hash", r.config_hash}, {"tool_version", r.tool_version}, {"kind", r.kind},
                   {"results", r.results}};
    json asserts = json::array();
    for (const auto& a : r.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value}});
    result["assertions"] = asserts;
    write_json("result.json", result);
    for (const auto& [name, doc] : r.sidecars) {
      json d = doc;
      d["config_hash"] = r.config_hash;
      d["tool_version"] = r.tool_version;
      write_json(name, d);
    }
    for (auto& f : emit_plot_data(r, out_dir)) r.files.push_back(std::move(f));
    io::write_file(out_dir / "run_record.json", r.to_json().dump(2) + "\n");
  } catch (const std::exception& e) {
    throw ComputeFailure(std::string("writing results: ") + e.what());
  }
  return r;
}

}  // namespace beltrami::lab
