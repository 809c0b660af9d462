#pragma once

// Experiment configuration, seeded runs, sweeps, and artifact files.
//
// Config text format: one `key = value` per line, `#` starts a comment, blank
// lines are ignored. Keys (defaults in parentheses):
//
//   space.p (2)                      1 < p <= 64
//   space.dim (16)
//   dictionary.kind (GAUSSIAN)       GAUSSIAN | FOURIER_FRAME | CANONICAL
//   dictionary.count (48)
//   dictionary.seed (1)
//   target.membership (A1)           A1 | CONV
//   target.sparsity (4)
//   target.eps (0)
//   target.seed (2)
//   algorithm.id (WGAFR)             WGAFR | GAWR | IAC | IACC
//   algorithm.tau (1)                one value = constant, comma list = t_1, t_2, ...
//   algorithm.r (default)            default (2/(k+2)) | one value | comma list
//   algorithm.K1 (1)
//   algorithm.iters (100)
//   algorithm.policy (ARGMAX)        ARGMAX | FIRST_QUALIFYING
//   solver.grad_tol, solver.max_iters, solver.armijo_c, solver.backtrack_factor
//   check.slack (1e-8)
//   check.fit_lo (10), check.fit_hi (0 = last step)
//   output.trace_csv (trace.csv), output.trace_json (trace.json),
//   output.report_json (report.json)
//
// A JSON object is accepted as well, either nested ({"space": {"p": 2}}) or
// with dotted keys.

#include "greedy/analysis.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace greedy {

class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& msg);
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

struct ExperimentConfig {
  double p = 2.0;
  std::size_t dim = 16;

  DictionaryKind dict_kind = DictionaryKind::Gaussian;
  std::size_t dict_count = 48;
  std::uint64_t dict_seed = 1;

  Membership membership = Membership::A1;
  std::size_t sparsity = 4;
  double eps = 0.0;
  std::uint64_t target_seed = 2;

  Algorithm algorithm = Algorithm::Wgafr;
  std::vector<double> tau{1.0};
  std::vector<double> r; ///< empty = 2/(k+2)
  double K1 = 1.0;
  std::size_t iters = 100;
  SelectionPolicy policy = SelectionPolicy::Argmax;

  SolverConfig solver;

  double slack = kSolverSlack;
  std::size_t fit_lo = 10;
  std::size_t fit_hi = 0;

  std::string trace_csv = "trace.csv";
  std::string trace_json = "trace.json";
  std::string report_json = "report.json";

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  WeaknessSequence weakness() const;
  RelaxationSchedule relaxation() const;
};

/// Every key of the schema, in canonical order.
const std::vector<std::string>& config_keys();

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& c, const std::string& key);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_json(const nlohmann::json& j);
/// Picks the JSON or text reader from the first non-blank character.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text: every key in schema order. parse(to_text(c)) == c.
std::string config_to_text(const ExperimentConfig& c);
nlohmann::json config_to_json(const ExperimentConfig& c);

/// 64-bit FNV-1a of the canonical text, 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct ExperimentResult {
  ExperimentConfig config;
  std::string hash;
  GreedyTrace trace;
  std::vector<CheckReport> reports;

  bool passed() const;
};

/// Builds space, dictionary and target, runs the algorithm and its checkers.
ExperimentResult run_experiment(const ExperimentConfig& config);

nlohmann::json report_document(const ExperimentResult& result);

/// Writes the trace CSV, trace JSON and report JSON into out_dir.
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& out_dir);

struct LoadedRun {
  GreedyTrace trace;
  std::vector<CheckReport> reports;
  std::string hash;
};

class HashMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads a trace CSV and its report JSON; refuses the pair unless both carry
/// the same config hash.
LoadedRun load_run(const std::filesystem::path& trace_csv, const std::filesystem::path& report_json);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
};

/// Sweep text format:
///   base.<config key> = value
///   axis.<config key> = v1, v2, ...
///   replicates = n
///   seed = n
SweepSpec parse_sweep_text(const std::string& text);
SweepSpec load_sweep(const std::filesystem::path& path);

struct SweepRow {
  std::size_t cell = 0;
  std::size_t replicate = 0;
  std::vector<std::string> axis_values;
  std::uint64_t dict_seed = 0;
  std::uint64_t target_seed = 0;
  std::string hash;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::optional<double> slope;
  std::size_t checks_passed = 0;
  std::size_t checks_total = 0;
  std::string error;
};

struct SweepResult {
  std::vector<std::string> axis_keys;
  std::vector<SweepRow> rows; ///< cell-major, then replicate
  std::size_t failures() const;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Runs every (cell, replicate) on `threads` workers (0 = hardware default).
/// When out_dir is non-empty each row writes its artifacts under
/// out_dir/cell<i>_rep<j>/ and the summary goes to out_dir/summary.csv.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                      unsigned threads = 0);

std::string sweep_summary_csv(const SweepResult& result);

enum class VerifyProfile { Quick, Full };

VerifyProfile parse_profile(const std::string& s);

struct VerifyResult {
  std::vector<CheckReport> reports;
  bool passed() const;
};

/// Property battery over fresh seeded data. Writes one line per check to log.
VerifyResult verify_suite(std::uint64_t seed, VerifyProfile profile, std::ostream& log);

} // namespace greedy
