#pragma once

// The four greedy loops (WGAFR, GAWR, IAc, IAcc) with per-iteration traces.

#include "greedy/dictionary.hpp"
#include "greedy/inner_solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace greedy {

enum class Algorithm { Wgafr, Gawr, Iac, Iacc };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

/// Weakness parameters t_m in [0, 1], indexed from m = 1.
class WeaknessSequence {
public:
  static WeaknessSequence constant(double t);
  static WeaknessSequence general(std::vector<double> values);

  double at(std::size_t m) const;
  bool is_constant() const noexcept { return constant_; }
  /// Number of explicitly given terms (0 for a constant sequence).
  std::size_t length() const noexcept { return constant_ ? 0 : values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  WeaknessSequence(bool constant, std::vector<double> values);
  bool constant_;
  std::vector<double> values_;
};

/// Relaxation factors r_m in [0, 1). The default schedule is r_k = 2/(k+2).
class RelaxationSchedule {
public:
  enum class Kind { Standard, Constant, Custom };

  static RelaxationSchedule standard();
  static RelaxationSchedule constant(double r);
  static RelaxationSchedule custom(std::vector<double> values);

  double at(std::size_t m) const;
  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  RelaxationSchedule(Kind kind, std::vector<double> values);
  Kind kind_;
  std::vector<double> values_;
};

/// eps_n = K1 * gamma^(1/q) * n^(-1/p_dual).
double epsilon_schedule(double K1, const SmoothnessParams& params, std::size_t n);

struct EpsilonSchedule {
  double K1;
  SmoothnessParams params;

  double at(std::size_t n) const { return epsilon_schedule(K1, params, n); }
};

struct TraceRecord {
  std::size_t m = 0;
  std::size_t selected_index = 0;
  Complex phase{1.0, 0.0};
  Complex lambda{0.0, 0.0};
  Complex w_or_r{0.0, 0.0}; ///< w_m (WGAFR), r_m (GAWR) or 1/m (IAc, IAcc)
  double residual_norm = 0.0;
  double dual_norm = 0.0;   ///< ||F_{f_{m-1}}||_D used for the selection
  double eps_m = 0.0;
  bool solver_converged = true;
};

struct GreedyTrace {
  Algorithm algorithm = Algorithm::Wgafr;
  std::string config_hash;
  double initial_norm = 0.0; ///< ||f_0|| = ||f||
  std::vector<TraceRecord> records;
  std::string stop_reason;
  /// G_m after each step; kept in memory only, not serialized.
  std::vector<ComplexVector> approximants;

  /// ||f_m|| for m = 0..size(); index 0 is the initial norm.
  std::vector<double> residual_norms() const;
};

/// Residual norm at which a run stops early.
inline constexpr double kStopResidual = 1e-12;
inline constexpr const char* kStopResidualReason = "residual_below_threshold";
inline constexpr const char* kStopIterationsReason = "iterations_exhausted";
inline constexpr const char* kStopStagnationReason = "stagnation";

/// Tolerance of the barycentric reconstruction asserted at every IAc/IAcc step.
inline constexpr double kBarycentricTolerance = 1e-10;

GreedyTrace run_wgafr(const Dictionary& dict, const TargetSpec& target,
                      const WeaknessSequence& tau, std::size_t iters, SelectionPolicy policy,
                      const SolverConfig& cfg);

GreedyTrace run_gawr(const Dictionary& dict, const TargetSpec& target,
                     const WeaknessSequence& tau, const RelaxationSchedule& r, std::size_t iters,
                     SelectionPolicy policy, const SolverConfig& cfg);

/// Requires target.eps == 0 and f in A_1(D). Throws InfeasibleSelection if a
/// step finds no admissible element.
GreedyTrace run_iac(const Dictionary& dict, const TargetSpec& target, double K1,
                    std::size_t iters, SelectionPolicy policy);

/// Requires target.eps == 0 and target.membership == Conv.
GreedyTrace run_iacc(const Dictionary& dict, const TargetSpec& target, double K1,
                     std::size_t iters, SelectionPolicy policy);

/// G_m rebuilt from the recorded selections as (1/m) sum_j phase_j g_{index_j}.
ComplexVector barycentric_reconstruction(const Dictionary& dict, const GreedyTrace& trace,
                                         std::size_t m);

// Trace serialization. The CSV starts with "# config_hash=<hex>",
// "# algorithm=<id>", "# initial_norm=<x>" and "# stop_reason=<why>" lines,
// then the fixed header row.
inline constexpr const char* kTraceCsvHeader =
    "m,algo,selected_index,phase_re,phase_im,lambda_re,lambda_im,w_or_r_re,w_or_r_im,"
    "residual_norm,dual_norm,eps_m,solver_converged";

void write_trace_csv(std::ostream& os, const GreedyTrace& trace);
std::string trace_to_csv(const GreedyTrace& trace);

/// Malformed input while reading a trace or report; carries the 1-based line.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& msg);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Reads a CSV written by write_trace_csv. Approximants are not part of the
/// CSV and stay empty.
GreedyTrace read_trace_csv(std::istream& is);

nlohmann::json trace_to_json(const GreedyTrace& trace, const nlohmann::json& config);

std::string format_double(double v);

} // namespace greedy
