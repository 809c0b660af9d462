#include "greedy/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const greedy::ExperimentConfig config = greedy::load_config(config_path);
  const greedy::ExperimentResult result = greedy::run_experiment(config);
  greedy::write_artifacts(result, out_dir);
  const auto& recs = result.trace.records;
  std::cout << "config_hash " << result.hash << '\n'
            << greedy::to_string(result.trace.algorithm) << ": " << recs.size()
            << " steps, final residual "
            << greedy::format_double(recs.empty() ? result.trace.initial_norm
                                                  : recs.back().residual_norm)
            << " (" << result.trace.stop_reason << ")\n"
            << greedy::reports_summary_csv(result.reports);
  return result.passed() ? kOk : kCheckFailure;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, unsigned threads) {
  const greedy::SweepSpec spec = greedy::load_sweep(spec_path);
  const greedy::SweepResult result = greedy::run_sweep(spec, out_dir, threads);
  std::cout << result.rows.size() << " runs, " << result.failures() << " with failures or errors\n"
            << "summary: " << (std::filesystem::path(out_dir) / "summary.csv").string() << '\n';
  return result.failures() == 0 ? kOk : kCheckFailure;
}

int cmd_verify(const std::string& profile, std::uint64_t seed) {
  const greedy::VerifyResult result =
      greedy::verify_suite(seed, greedy::parse_profile(profile), std::cout);
  return result.passed() ? kOk : kCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy approximation experiments in complex l_p"};
  app.require_subcommand(1);

  std::string config_path, spec_path, out_dir, profile = "quick";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "run one experiment and its checks");
  run->add_option("--config", config_path, "config file (key = value text or JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--spec", spec_path, "sweep spec file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* verify = app.add_subcommand("verify", "run the property battery");
  verify->add_option("--profile", profile, "quick or full")
      ->check(CLI::IsMember({"quick", "full", "QUICK", "FULL"}));
  verify->add_option("--seed", seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*sweep) return cmd_sweep(spec_path, out_dir, threads);
    return cmd_verify(profile, seed);
  } catch (const greedy::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}
