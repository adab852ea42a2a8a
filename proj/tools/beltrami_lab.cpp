// beltrami-lab: batch runner for experiment configs and the acceptance suite.
//
//   beltrami-lab --config run.json [--out DIR] [--seed N] [--jobs N]
//   beltrami-lab --level quick|full [--out DIR] [--jobs N]
//
// Exit status: 0 all assertions pass, 1 compute failure or failed
// assertion, 2 invalid configuration or usage.

#include "beltrami/lab.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;
using namespace beltrami;

namespace {

fs::path output_dir(const std::string& flag, const lab::ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output.empty()) return cfg.output;
  const char* root = std::getenv("BELTRAMI_LAB_OUT");
  const fs::path base = root && *root ? fs::path(root) : fs::path("lab-out");
  return base / (cfg.kind + "-" + cfg.hash().substr(0, 12));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beltrami field and contact-metric experiment runner"};
  std::string config_path, out, level;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto* cfg_opt = app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out, "output directory (default: $BELTRAMI_LAB_OUT/<kind>-<hash>)");
  auto* seed_opt = app.add_option("--seed", seed, "global seed, overrides the config");
  auto* level_opt =
      app.add_option("--level", level, "run the acceptance suite")->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", lab::version());
  cfg_opt->excludes(level_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!level.empty()) {
    const lab::Level lv = level == "full" ? lab::Level::Full : lab::Level::Quick;
    const auto summary =
        lab::verify_suite(lv, jobs, [](const lab::CriterionResult& c) { std::cout << lab::format_line(c) << std::endl; });
    if (!out.empty()) {
      fs::create_directories(out);
      io::write_file(fs::path(out) / "verify_summary.json", summary.to_json().dump(2) + "\n");
    }
    std::cout << (summary.passed() ? "verify " + level + ": PASS" : "verify " + level + ": FAIL") << std::endl;
    return summary.passed() ? 0 : 1;
  }

  if (config_path.empty()) {
    std::cerr << "one of --config or --level is required\n" << app.help();
    return 2;
  }

  try {
    lab::ExperimentConfig cfg = lab::load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (jobs > 1) cfg.jobs = jobs;
    const fs::path dir = output_dir(out, cfg);
    const lab::RunRecord rec = lab::run(cfg, dir);
    for (const auto& a : rec.assertions)
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " [" << io::format_number(a.value) << "]\n";
    std::cout << "wrote " << rec.files.size() + 1 << " files to " << dir.string() << "\n";
    return rec.passed() ? 0 : 1;
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compute failure: " << e.what() << "\n";
    return 1;
  }
}
