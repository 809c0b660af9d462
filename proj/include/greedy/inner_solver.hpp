#pragma once

// Convex inner problems of the greedy algorithms: minimize ||base - sum_j z_j d_j||
// over complex coefficients z by BFGS with Armijo backtracking on (Re z, Im z).
// The gradient comes from the norming functional of the residual:
// d/ds ||x + s y|| at s = 0 equals Re F_x(y).

#include "greedy/space.hpp"

#include <vector>

namespace greedy {

struct SolverConfig {
  double grad_tol = 1e-10;
  int max_iters = 500;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;

  bool operator==(const SolverConfig&) const = default;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SolveResult {
  std::vector<Complex> minimizer;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Residuals below this norm are treated as exact zeros.
inline constexpr double kZeroResidual = 1e-13;

/// min over z in C^k of ||base - sum_j z_j dirs[j]||, starting from `start`.
SolveResult minimize_affine(const LpSpace& space, std::span<const Complex> base,
                            const std::vector<ComplexVector>& dirs,
                            std::vector<Complex> start, const SolverConfig& cfg);

/// lambda* = argmin_lambda ||base - lambda direction||, started at lambda = 0.
SolveResult minimize_over_line(const LpSpace& space, std::span<const Complex> base,
                               std::span<const Complex> direction, const SolverConfig& cfg);

/// (w*, lambda*) = argmin ||f - ((1 - w) G_prev + lambda phi)||.
/// minimizer = {w, lambda}. When G_prev = 0 the w coordinate stays at 0.
SolveResult minimize_free_relax(const LpSpace& space, std::span<const Complex> f,
                                std::span<const Complex> G_prev, std::span<const Complex> phi,
                                const SolverConfig& cfg, Complex w0 = 0.0,
                                Complex lambda0 = 0.0);

struct SubspaceApprox {
  std::vector<Complex> coeffs;
  ComplexVector residual; ///< f - sum_i coeffs_i basis_i
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Relative rank threshold of the pivoted QR used to reject dependent bases.
inline constexpr double kRankTolerance = 1e-10;

/// Best approximation of f from span(basis). Throws std::invalid_argument when
/// the basis is empty or numerically dependent.
SubspaceApprox best_approx_subspace(const LpSpace& space, std::span<const Complex> f,
                                    const std::vector<ComplexVector>& basis,
                                    const SolverConfig& cfg);

} // namespace greedy
