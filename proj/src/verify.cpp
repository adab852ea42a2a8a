#include "beltrami/calibration.hpp"
#include "beltrami/contact.hpp"
#include "beltrami/dynamics.hpp"
#include "beltrami/galerkin.hpp"
#include "beltrami/lab.hpp"
#include "beltrami/lattice.hpp"
#include "beltrami/projector.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace beltrami::lab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Checks {
  std::vector<Assertion> list;
  void at_most(const std::string& name, double value, double bound) {
    list.push_back({name + " <= " + io::format_number(bound), value <= bound, value, {}});
  }
  void at_least(const std::string& name, double value, double bound, bool strict = false) {
    const bool ok = strict ? value > bound : value >= bound;
    list.push_back({name + (strict ? " > " : " >= ") + io::format_number(bound), ok, value, {}});
  }
  void truth(const std::string& name, bool ok, double value = 0.0, std::string detail = {}) {
    list.push_back({name, ok, value, std::move(detail)});
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Curl eigenfamily.
void criterion_eigenfamily(Checks& c) {
  double res = 0.0, gram = 0.0;
  bool sizes = true;
  int shells = 0;
  for (std::int64_t n = 1; n <= 100; ++n) {
    const EigenShell shell = lattice_shell(n);
    if (shell.empty()) continue;
    ++shells;
    const auto basis = helicity_basis(n);
    sizes = sizes && basis.size() == shell.multiplicity();
    res = std::max(res, eigen_residual(basis, std::sqrt(double(n))));
    gram = std::max(gram, gram_deviation(basis));
  }
  c.truth("basis size equals shell multiplicity for all " + std::to_string(shells) + " nonempty shells", sizes);
  c.at_most("max coefficient residual |curl u - sqrt(n) u|", res, 1e-13);
  c.at_most("max Gram deviation", gram, 1e-12);
  c.truth("multiplicity(1) == 6", lattice_shell(1).multiplicity() == 6 && helicity_basis(1).size() == 6,
          double(lattice_shell(1).multiplicity()));
}

// 2. Steady-state pipeline.
void criterion_steady(Checks& c) {
  double euler = 0.0, bern = 0.0, fsup = 0.0;
  for (int i = 0; i < 20; ++i) {
    auto u = [&](int j) { return 4.0 * counter_uniform(0xABC, std::uint64_t(3 * i + j)) - 2.0; };
    const VectorField v = make_abc({u(0), u(1), u(2)});
    const SteadyResidual r = steady_residual(v);
    euler = std::max(euler, r.euler);
    bern = std::max(bern, r.bernoulli);
    const ScalarField F = bernoulli(v);
    if (!F.empty()) fsup = std::max(fsup, to_grid(F, 16).abs().maxCoeff());
  }
  for (std::int64_t n = 1; n <= 30; ++n) {
    if (lattice_shell(n).empty()) continue;
    const ScalarField F = bernoulli(random_beltrami(n, std::uint64_t(n)));
    if (!F.empty()) fsup = std::max(fsup, to_grid(F, 2 * product_grid_size(F.truncation(), 0)).abs().maxCoeff());
  }
  c.at_most("Euler residual over 20 ABC triples", euler, 1e-10);
  c.at_most("Bernoulli-form residual over 20 ABC triples", bern, 1e-10);
  c.at_most("sup |F| over ABC and random Beltrami fields", fsup, 1e-11);
  const ScalarGridReport f = proportionality_factor(make_abc({1.0, 0.5, 0.1}), 32);
  c.at_most("proportionality factor gap for ABC(1, 0.5, 0.1)", f.gap(), 1e-10);
  c.at_most("|f - 1|", std::max(std::abs(f.max - 1.0), std::abs(f.min - 1.0)), 1e-10);
}

// 3. Nonvanishing.
void criterion_nonvanishing(Checks& c) {
  c.at_least("min |v| for ABC(1, 0.5, 0)", min_norm(make_abc({1.0, 0.5, 0.0}), 32), calibration::min_norm_abc_c0, true);
  c.at_least("min |v| for ABC(1, 0.5, 0.1)", min_norm(make_abc({1.0, 0.5, 0.1}), 32), calibration::min_norm_abc_c01,
             true);
  c.at_most("min |v| for ABC(1, 1, 1)", min_norm(make_abc({1.0, 1.0, 1.0}), 32), 1e-3);
}

// 4. Integrable baseline vs chaos proxy.
void criterion_lyapunov(Checks& c, int jobs) {
  ExperimentConfig base;
  base.kind = "lyapunov";
  base.jobs = jobs;
  double worst = 0.0;
  for (double B : {0.25, 0.5, 0.75}) {
    ExperimentConfig cfg = base;
    cfg.params = {{"A", 1.0}, {"B", B}, {"C", 0.0}, {"seeds", 10}, {"T", 1e4}, {"renorm", 1.0}, {"tol", 1e-9},
                  {"start", "separatrix"}, {"expect", "integrable"}, {"threshold", 5e-3}};
    const RunRecord r = compute(cfg);
    worst = std::max(worst, r.results.at("max_lambda_max").get<double>());
  }
  c.at_most("max lambda over 10 seeds x B in {0.25, 0.5, 0.75}, C = 0, T = 1e4", worst, 5e-3);
  ExperimentConfig cfg = base;
  cfg.params = {{"A", 1.0}, {"B", 0.5}, {"C", 0.1}, {"seeds", 20}, {"T", 1e4}, {"renorm", 1.0}, {"tol", 1e-9},
                {"start", "separatrix"}, {"expect", "chaotic"}, {"threshold", calibration::lyapunov_theta}};
  const RunRecord r = compute(cfg);
  c.at_least("max lambda over 20 seeds for ABC(1, 0.5, 0.1) vs theta", r.results.at("max_lambda_max").get<double>(),
             calibration::lyapunov_theta, true);
}

// 5. Compatible-metric identities.
void criterion_compatible(Checks& c) {
  const ContactModel m = std_contact_t3();
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), {});
  const int n = 16;
  const auto g0 = m.metric.sample(n);
  double defect = 0.0, det = 0.0;
  for (int i = -10; i <= 10; ++i) {
    const MetricField g = fam.member(i / 50.0);
    defect = std::max(defect, check_compatibility(g, m.form, n).max());
    const auto ge = g.sample(n);
    for (std::size_t p = 0; p < ge.size(); ++p)
      det = std::max(det, std::abs(ge[p].determinant() - g0[p].determinant()) / g0[p].determinant());
  }
  const auto H = fam.variation().h.sample(32);
  const auto G = m.metric.sample(32);
  double tr = 0.0;
  for (std::size_t p = 0; p < H.size(); ++p) tr = std::max(tr, std::abs((G[p].inverse() * H[p]).trace()));
  c.at_most("compatibility defects over eps in [-0.2, 0.2]", defect, 1e-10);
  c.at_most("relative |det g_eps - det g|", det, 1e-12);
  c.at_most("sup |Tr_g h|", tr, 1e-12);
}

// 6. First-order eigenvalue variation three ways.
void criterion_first_order(Checks& c) {
  const int K = 3;
  const ContactModel m = std_contact_t3();
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), {});
  const TensorField& h = fam.variation().h;
  const double lambda = m.form.lambda0;
  const auto V = adapted_v_basis(m.form.alpha, fam.beta());
  const Eigen::MatrixXd Pi = pairing_matrix(V, h, fam.base(), lambda);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pi);

  double rel = 0.0, alpha_three = 0.0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    OneForm u(1);
    for (std::size_t i = 0; i < V.size(); ++i) u += V[i] * es.eigenvectors()(Eigen::Index(i), j);
    const HellmannFeynman hf = hellmann_feynman(fam, m.form, u, lambda, K);
    const double a = hf.finite_difference, b = hf.pencil, p = hf.pairing;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(p)});
    if (scale < 1e-8) {
      alpha_three = std::max(alpha_three, scale);  // the alpha direction
      continue;
    }
    rel = std::max({rel, std::abs(a - b) / scale, std::abs(b - p) / scale, std::abs(a - p) / scale});
  }
  // alpha direction explicitly.
  const HellmannFeynman ha = hellmann_feynman(fam, m.form, m.form.alpha, lambda, K);
  alpha_three = std::max({alpha_three, std::abs(ha.finite_difference), std::abs(ha.pencil), std::abs(ha.pairing)});

  const double alpha_pair = std::abs(variation_pairing(m.form.alpha, m.form.alpha, h, fam.base(), lambda));
  const double beta_pair = variation_pairing(fam.beta(), fam.beta(), h, fam.base(), lambda);
  const ScalarField& q = fam.variation().beta_xi_sq;
  const double expect = lambda * 0.5 * integral(q * q);
  c.at_most("max pairwise relative gap (finite difference, pencil, pairing)", rel, 1e-6);
  c.at_most("alpha direction: all three slopes", alpha_three, 1e-8);
  c.at_most("|alpha pairing|", alpha_pair, 1e-8);
  c.at_most("beta pairing vs lambda0 / 2 integral |beta_xi|^4 (relative)", std::abs(beta_pair - expect) / expect, 1e-8);
}

// 7. Splitting of the lambda0 cluster.
void criterion_splitting(Checks& c) {
  const ContactModel m = std_contact_t3();
  std::vector<double> eps;
  for (int i = -4; i <= 4; ++i) eps.push_back(i / 20.0);
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), eps);
  const SplittingCurves sc = track_splitting(fam, m.form, {0.7, 1.3}, 3, eps);
  c.truth("cluster multiplicity 6", sc.multiplicity == 6, sc.multiplicity);
  c.at_most("alpha eigenvalue defect |lambda - lambda0|", sc.alpha_defect, 1e-9);
  c.at_least("fitted slope gap", sc.slope_gap, 0.0, true);
  c.at_least("min over eps != 0 of (spread / |eps|)", sc.min_separation_ratio, 0.0, true);
}

// 8. Projector and pi map.
void criterion_projector(Checks& c) {
  double match = 0.0, idem = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int dim = 8 + (i * 37) % 193;
    const double center = 0.3 * (i % 7) - 1.0, radius = 0.2 + 0.05 * (i % 3);
    const Eigen::MatrixXd A = designed_symmetric(dim, 1 + i % 5, center, radius, 1000 + std::uint64_t(i));
    const Eigen::MatrixXd P = spectral_projector(A, center, radius, 64);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
      if (std::abs(es.eigenvalues()[j] - center) < radius)
        oracle += es.eigenvectors().col(j) * es.eigenvectors().col(j).transpose();
    match = std::max(match, (P - oracle).norm());
    idem = std::max(idem, (P * P - P).norm());
  }
  c.at_most("projector vs eigendecomposition, 100 matrices", match, 1e-8);
  c.at_most("|P^2 - P|", idem, 1e-10);

  double sigma = 0.0, rel = 0.0;
  for (int i = 0; i < 5; ++i) {
    const MatrixFamily f = random_family(40 + 30 * i, 2 + i % 3, 1.0, 0.5, 500 + std::uint64_t(i));
    for (double q : {-0.1, -0.03, 0.04, 0.1}) sigma = std::max(sigma, pi_map(f, q, 0.0, 1.0, 0.5).sigma_match_defect);
    const Eigen::MatrixXd d = pi_map(f, 0.0, 0.0, 1.0, 0.5).pi_prime;
    auto central = [&](double s) {
      return Eigen::MatrixXd((pi_map(f, s, 0.0, 1.0, 0.5).pi - pi_map(f, -s, 0.0, 1.0, 0.5).pi) / (2 * s));
    };
    const Eigen::MatrixXd fd = (4.0 * central(1e-3) - central(2e-3)) / 3.0;
    rel = std::max(rel, (fd - d).norm() / d.norm());
  }
  c.at_most("sigma(pi(q)) vs sigma(A_q) in the window", sigma, 1e-9);
  c.at_most("pi_derivative vs Richardson differences (relative)", rel, 1e-6);

  const ContactModel m = std_contact_t3();
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), {});
  const auto V = adapted_v_basis(m.form.alpha, fam.beta());
  const Eigen::MatrixXd G = galerkin_pi_derivative(fam.base(), fam.variation().h, V, 3);
  c.at_least("splitting certificate of the Galerkin pi'(h)", splitting_certificate(G), 0.0, true);
  c.at_most("|(alpha, alpha) entry of pi'(h)|", std::abs(G(0, 0)), 1e-12);
  c.at_least("(beta, beta) entry of pi'(h)", G(1, 1), 0.0, true);
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() == "run_record.json") continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

// 9b. Identical configs give byte-identical artifacts.
void determinism(Checks& c, int jobs) {
  const std::vector<json> configs = {
      {{"kind", "spectrum"}, {"params", {{"n", 9}}}},
      {{"kind", "abc"}, {"params", {{"A", 1.0}, {"B", 0.5}, {"C", 0.1}}}},
      {{"kind", "poincare"}, {"seed", 3}, {"params", {{"crossings", 200}}}},
      {{"kind", "lyapunov"}, {"seed", 2}, {"params", {{"seeds", 3}, {"T", 300.0}}}},
      {{"kind", "perturb"}, {"params", {{"K", 1}, {"epsilons", {-0.1, 0.0, 0.1}}}}},
      {{"kind", "pi-map"}, {"seed", 11}, {"params", {{"dim", 40}}}},
  };
  const fs::path root = fs::temp_directory_path() / ("beltrami-verify-" + std::to_string(mix64(std::uint64_t(
                                                         Clock::now().time_since_epoch().count()))));
  bool same = true;
  std::string detail;
  for (const auto& j : configs) {
    ExperimentConfig cfg = parse_config(j);
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      cfg.jobs = rep == 0 ? 1 : std::max(2, jobs);
      const fs::path dir = root / (cfg.kind + "-" + std::to_string(rep));
      run(cfg, dir);
      auto files = read_dir(dir);
      if (rep == 0) {
        first = std::move(files);
      } else if (files != first) {
        same = false;
        detail += cfg.kind + " ";
      }
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  c.truth("identical configs reproduce byte-identical artifacts (serial vs threaded)", same, 0.0, detail);
}

}  // namespace

bool VerifySummary::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed || c.skipped; });
}

json VerifySummary::to_json() const {
  json list = json::array();
  for (const auto& c : criteria) {
    json checks = json::array();
    for (const auto& a : c.checks)
      checks.push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value}, {"detail", a.detail}});
    list.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped},
                    {"seconds", c.seconds}, {"checks", checks}});
  }
  return {{"level", level == Level::Quick ? "quick" : "full"}, {"tool_version", version()},
          {"passed", passed()}, {"seconds", seconds}, {"criteria", list}};
}

std::string format_line(const CriterionResult& c) {
  std::ostringstream os;
  os << "criterion " << c.id << " " << (c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")) << " " << c.name << " ("
     << std::fixed << std::setprecision(1) << c.seconds << " s)";
  for (const auto& a : c.checks)
    if (!a.passed) os << "\n    failed: " << a.name << " [value " << io::format_number(a.value) << "] " << a.detail;
  return os.str();
}

VerifySummary verify_suite(Level level, int jobs, const std::function<void(const CriterionResult&)>& progress) {
  struct Entry {
    int id;
    std::string name;
    double limit;
    bool full_only;
    std::function<void(Checks&)> body;
  };
  const std::vector<Entry> entries = {
      {1, "curl eigenfamily", 10, false, criterion_eigenfamily},
      {2, "steady-state pipeline", 30, false, criterion_steady},
      {3, "nonvanishing", 10, false, criterion_nonvanishing},
      {4, "integrable baseline vs chaos proxy", 600, true, [jobs](Checks& c) { criterion_lyapunov(c, jobs); }},
      {5, "compatible-metric identities", 30, false, criterion_compatible},
      {6, "first-order variation three ways (K = 3)", 120, false, criterion_first_order},
      {7, "cluster splitting along g_eps (K = 3)", 300, false, criterion_splitting},
      {8, "projector and pi map", 120, false, criterion_projector},
  };

  VerifySummary s;
  s.level = level;
  const auto t_all = Clock::now();
  double quick_seconds = 0.0;
  bool quick_ok = true;
  for (const auto& e : entries) {
    CriterionResult r{e.id, e.name, false, false, 0.0, {}};
    if (e.full_only && level == Level::Quick) {
      r.skipped = true;
    } else {
      Checks c;
      const auto t0 = Clock::now();
      try {
        e.body(c);
      } catch (const std::exception& ex) {
        c.truth("completed without error", false, 0.0, ex.what());
      }
      r.seconds = seconds_since(t0);
      c.at_most("runtime seconds", r.seconds, e.limit);
      r.checks = std::move(c.list);
      r.passed = std::all_of(r.checks.begin(), r.checks.end(), [](const Assertion& a) { return a.passed; });
      if (!e.full_only) {
        quick_seconds += r.seconds;
        quick_ok = quick_ok && r.passed;
      }
    }
    if (progress) progress(r);
    s.criteria.push_back(std::move(r));
  }

  CriterionResult r9{9, "reproducibility", false, false, 0.0, {}};
  {
    Checks c;
    const auto t0 = Clock::now();
    try {
      determinism(c, jobs);
    } catch (const std::exception& ex) {
      c.truth("reproducibility runs completed", false, 0.0, ex.what());
    }
    r9.seconds = seconds_since(t0);
    c.truth("quick-level criteria all pass", quick_ok);
    c.at_most("quick-level wall time including reproducibility runs (s)", quick_seconds + r9.seconds, 300.0);
    r9.checks = std::move(c.list);
    r9.passed = std::all_of(r9.checks.begin(), r9.checks.end(), [](const Assertion& a) { return a.passed; });
  }
  if (progress) progress(r9);
  s.criteria.push_back(std::move(r9));
  s.seconds = seconds_since(t_all);
  return s;
}

}  // namespace beltrami::lab
