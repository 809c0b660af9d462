#pragma once

// Complex l_p^n: norms, norming functionals and smoothness bounds.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace greedy {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Thrown when operands live in spaces of different dimension.
class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Largest exponent accepted by LpSpace; |h_i|^(p-1) overflows beyond this.
inline constexpr double kMaxExponent = 64.0;

/// The uniformly smooth space l_p^n over C with 1 < p <= kMaxExponent.
class LpSpace {
public:
  LpSpace(double p, std::size_t dim);

  double p() const noexcept { return p_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Hoelder conjugate p/(p-1); the exponent of the dual norm.
  double conjugate() const noexcept { return p_ / (p_ - 1.0); }

  void require_dim(std::span<const Complex> v, const char* what) const;

  bool operator==(const LpSpace&) const = default;

private:
  double p_;
  std::size_t dim_;
};

/// A bounded linear functional F(x) = sum_i c_i x_i on l_p^n.
struct DualFunctional {
  ComplexVector coeffs;

  std::size_t dim() const noexcept { return coeffs.size(); }
};

/// Power-type smoothness rho(u) <= gamma u^q of l_p, plus the exponent
/// p_dual = q/(q-1) that appears in the rate statements.
struct SmoothnessParams {
  double q;
  double gamma;
  double p_dual;
};

double lp_norm(const LpSpace& space, std::span<const Complex> v);

/// l_r norm of raw coordinates for an arbitrary exponent r >= 1.
double raw_lp_norm(double r, std::span<const Complex> v);

/// z/|z|, with the convention sign(0) = 1.
Complex complex_sign(Complex z) noexcept;

/// Closed-form duality map: c_i = conj(sign h_i) (|h_i| / ||h||)^(p-1).
/// Throws std::invalid_argument on the zero vector.
DualFunctional norming_functional(const LpSpace& space, std::span<const Complex> h);

Complex apply_functional(const DualFunctional& F, std::span<const Complex> x);

/// Operator norm of F on l_p^n, i.e. the l_{p/(p-1)} norm of its coefficients.
double dual_norm(const LpSpace& space, const DualFunctional& F);

/// Upper bound on the modulus of smoothness of l_p:
///   u^p / p          for p <= 2
///   (p - 1) u^2 / 2  for p >= 2
double rho_bound(const LpSpace& space, double u);

SmoothnessParams smoothness_params(const LpSpace& space);

/// Monte-Carlo lower estimate of rho(u) from n_samples random unit pairs.
/// The sample stream depends only on (space, n_samples, seed), so for a fixed
/// seed the estimate is nondecreasing in u.
double estimate_rho(const LpSpace& space, double u, std::size_t n_samples,
                    std::uint64_t seed);

// Small vector helpers shared by the other modules.
ComplexVector add(std::span<const Complex> a, std::span<const Complex> b);
ComplexVector sub(std::span<const Complex> a, std::span<const Complex> b);
ComplexVector scale(Complex s, std::span<const Complex> a);
/// a + s * b
ComplexVector axpy(std::span<const Complex> a, Complex s, std::span<const Complex> b);
bool all_finite(std::span<const Complex> v) noexcept;

} // namespace greedy
