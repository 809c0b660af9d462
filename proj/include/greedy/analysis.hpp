#pragma once

// Numerical checkers for the inequalities behind the greedy convergence
// results, and empirical rate fits. Every checker substitutes rho_bound for the
// true modulus of smoothness; rho only ever appears on the large side of the
// checked inequalities, so the substitution keeps them valid.

#include "greedy/algorithms.hpp"

#include <json.hpp>

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace greedy {

enum class CheckStatus {
  Pass,
  Fail,
  NotApplicable, ///< the inputs violate the statement's hypotheses
  Diagnostic,    ///< informational; never fails
};

std::string to_string(CheckStatus s);

struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  /// min over samples of (large side - small side); negative means violated.
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::vector<std::string> details; ///< failing cases, truncated
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const noexcept { return status != CheckStatus::Fail; }

  /// Records one inequality sample lhs <= rhs.
  void observe(double lhs, double rhs, const std::string& where);
  /// Sets status from worst_margin and tolerance.
  void finalize();
  double metric(const std::string& key) const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t m_lo = 0;
  std::size_t m_hi = 0;
  double r_squared = 0.0;
  bool shrunk = false; ///< window cut short by a zero residual
};

/// Per-step slack absorbing inexact inner minimization.
inline constexpr double kSolverSlack = 1e-8;

/// Lower inequality 0 <= ||x+uy|| - ||x|| - Re(u F_x(y)) and the upper bound
/// 2 ||x|| rho(|u| ||y|| / ||x||) on random triples with u in [-2, 2].
CheckReport check_ll0(const LpSpace& space, std::size_t n_samples, std::uint64_t seed,
                      double tol = 1e-9);

/// The optimal weak-greedy step size lambda used in the WGAFR rate argument.
double mt2_optimal_lambda(const SmoothnessParams& params, double prev_norm, double A_eps,
                          double t);

/// Default lambda grid: 101 equispaced points on [0, 1].
std::vector<double> default_lambda_grid();

/// Per-step WGAFR recursion: for every lambda >= 0 on the grid (plus the
/// optimal lambda of the rate argument),
///   ||f_m|| <= ||f_{m-1}|| (1 - lambda t_m / A (1 - eps/||f_{m-1}||)
///                           + 2 rho(5 lambda / ||f_{m-1}||)).
CheckReport check_ml1_step(const LpSpace& space, const GreedyTrace& trace, std::size_t m,
                           double A_eps, double eps, double t_m,
                           const std::vector<double>& lambda_grid,
                           double slack = kSolverSlack);

/// check_ml1_step over every step of the trace, merged into one report.
CheckReport check_ml1(const LpSpace& space, const GreedyTrace& trace, double A_eps, double eps,
                      const WeaknessSequence& tau, const std::vector<double>& lambda_grid,
                      double slack = kSolverSlack);

/// Per-step GAWR recursion
///   ||f_m|| <= ||f_{m-1}|| (1 - r_m (1 - eps/||f_{m-1}||)
///              + 2 rho(r_m (||f|| + A/t) / ((1 - r_m) ||f_{m-1}||))).
/// Skipped when r_m = 0 (reduces to monotonicity, which is checked instead) or
/// ||f_{m-1}|| <= eps.
CheckReport check_ml3_step(const LpSpace& space, const GreedyTrace& trace, std::size_t m,
                           double A_eps, double eps, double t, double r_m, double f_norm,
                           double slack = kSolverSlack);

CheckReport check_ml3(const LpSpace& space, const GreedyTrace& trace, double A_eps, double eps,
                      double t, const RelaxationSchedule& r, double slack = kSolverSlack);

/// A_q = 4 (8 gamma)^(1/(q-1)) 5^(q/(q-1)).
double mt2_constant(const SmoothnessParams& params);

/// ||f_m|| <= max(2 eps, A_q^(1/p) (A + eps) (1 + sum_{k<=m} t_k^p)^(-1/p)),
/// p = p_dual, at every step.
CheckReport check_mt2_bound(const GreedyTrace& trace, const SmoothnessParams& params,
                            double A_eps, double eps, const WeaknessSequence& tau,
                            double slack = kSolverSlack);

/// Recursion x_{m+1} <= x_m (1 - x_m a_{m+1}) with x_0 <= C1 implies
/// x_m <= (1/C1 + sum_{k<=m} a_k)^(-1). x_seq = x_0..x_M, a_seq = a_1..a_M.
CheckReport check_hl1(const std::vector<double>& x_seq, double C1,
                      const std::vector<double>& a_seq, double tol = 1e-12);

/// Constant of the decay lemma for sequences with a_n <= a_{n-1} + A (n-1)^-alpha
/// that contract by (1 - gamma/v) whenever a_v >= A v^-alpha: 2^(1+alpha).
double ml4_constant(double alpha);

/// Verifies the hypotheses on a_seq = a_1..a_N, then reports
/// max_n a_n n^alpha / A as the empirical constant and requires it to be at most
/// ml4_constant(alpha).
CheckReport check_ml4(const std::vector<double>& a_seq, double alpha, double gamma_param,
                      double A, double tol = 1e-12);

/// Least-squares slope of log ||f_m|| against log m over m in [m_lo, m_hi].
RateFit fit_log_slope(const GreedyTrace& trace, std::size_t m_lo, std::size_t m_hi);
RateFit fit_log_slope(const std::vector<double>& residual_by_m, std::size_t m_lo,
                      std::size_t m_hi);

/// Best approximation certificate: |F_{f - f_L}(b_i)| <= 1e-7 for every basis
/// element, and ||f - f_L|| <= ||f - g|| + 1e-9 for n_competitors sampled g in L.
CheckReport check_orthogonality(const LpSpace& space, std::span<const Complex> f,
                                const std::vector<ComplexVector>& basis,
                                const SolverConfig& cfg, std::size_t n_competitors = 100,
                                std::uint64_t seed = 0);

/// Samples absolutely convex and convex combinations of the dictionary and
/// checks that neither |F| nor Re F exceeds its maximum over D.
CheckReport check_dual_norm_supremum(const DualFunctional& F, const Dictionary& dict,
                                     std::size_t n_samples, std::uint64_t seed,
                                     double tol = 1e-9);

/// s^{-1}(v) for s(u) = gamma u^(q-1), the inverse of rho_bound(u)/u.
double inverse_s(const SmoothnessParams& params, double v);

/// Diagnostic partial sums of sum_m t_m s^{-1}(theta t_m).
CheckReport check_weakness_series(const WeaknessSequence& tau, double theta, std::size_t n_terms,
                               const SmoothnessParams& params);

/// ||f_m|| <= ||f_{m-1}|| + slack at every step.
CheckReport check_monotone(const GreedyTrace& trace, double slack = kSolverSlack);

/// ||f_m|| <= ||f_{m-1}|| + 2/m at every step of an incremental run.
CheckReport check_triviality_bound(const GreedyTrace& trace, double slack = 1e-10);

/// G_m rebuilt from the recorded (index, phase) list matches the stored G_m
/// within 1e-10; the coefficients are unimodular multiples of 1/m, and for IAcc
/// nonnegative weights summing to one within 1e-12.
CheckReport check_barycentric(const Dictionary& dict, const GreedyTrace& trace);

nlohmann::json to_json(const CheckReport& r);
CheckReport report_from_json(const nlohmann::json& j);
nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);

/// CSV summary with columns name,passed,worst_margin,samples.
std::string reports_summary_csv(const std::vector<CheckReport>& reports);

} // namespace greedy
