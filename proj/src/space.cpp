#include "greedy/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace greedy {

LpSpace::LpSpace(double p, std::size_t dim) : p_(p), dim_(dim) {
  if (!(p > 1.0) || !(p <= kMaxExponent)) {
    throw std::invalid_argument("LpSpace: exponent p must lie in (1, " +
                                std::to_string(kMaxExponent) + "], got " +
                                std::to_string(p));
  }
  if (dim == 0) throw std::invalid_argument("LpSpace: dimension must be positive");
}

void LpSpace::require_dim(std::span<const Complex> v, const char* what) const {
  if (v.size() != dim_) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(dim_) + ", got " + std::to_string(v.size()));
  }
}

bool all_finite(std::span<const Complex> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double raw_lp_norm(double r, std::span<const Complex> v) {
  double largest = 0.0;
  for (Complex z : v) largest = std::max(largest, std::abs(z));
  if (largest == 0.0) return 0.0;
  double sum = 0.0;
  for (Complex z : v) sum += std::pow(std::abs(z) / largest, r);
  return largest * std::pow(sum, 1.0 / r);
}

double lp_norm(const LpSpace& space, std::span<const Complex> v) {
  space.require_dim(v, "lp_norm");
  if (!all_finite(v)) throw std::invalid_argument("lp_norm: non-finite coordinate");
  return raw_lp_norm(space.p(), v);
}

Complex complex_sign(Complex z) noexcept {
  const double r = std::abs(z);
  if (r == 0.0) return {1.0, 0.0};
  return z / r;
}

DualFunctional norming_functional(const LpSpace& space, std::span<const Complex> h) {
  const double norm = lp_norm(space, h);
  if (norm == 0.0) throw std::invalid_argument("norming_functional: zero vector");
  const double e = space.p() - 1.0;
  DualFunctional F;
  F.coeffs.reserve(h.size());
  for (Complex z : h) {
    const double a = std::abs(z);
    if (a == 0.0) {
      F.coeffs.emplace_back(0.0, 0.0);
    } else {
      F.coeffs.push_back(std::conj(z / a) * std::pow(a / norm, e));
    }
  }
  return F;
}

Complex apply_functional(const DualFunctional& F, std::span<const Complex> x) {
  if (x.size() != F.coeffs.size()) {
    throw DimensionMismatch("apply_functional: functional has dimension " +
                            std::to_string(F.coeffs.size()) + ", vector has " +
                            std::to_string(x.size()));
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) acc += F.coeffs[i] * x[i];
  return acc;
}

double dual_norm(const LpSpace& space, const DualFunctional& F) {
  space.require_dim(F.coeffs, "dual_norm");
  return raw_lp_norm(space.conjugate(), F.coeffs);
}

double rho_bound(const LpSpace& space, double u) {
  if (u < 0.0) throw std::invalid_argument("rho_bound: u must be nonnegative");
  const double p = space.p();
  if (p <= 2.0) return std::pow(u, p) / p;
  return (p - 1.0) * u * u / 2.0;
}

SmoothnessParams smoothness_params(const LpSpace& space) {
  const double p = space.p();
  SmoothnessParams s{};
  if (p <= 2.0) {
    s.q = p;
    s.gamma = 1.0 / p;
  } else {
    s.q = 2.0;
    s.gamma = (p - 1.0) / 2.0;
  }
  s.p_dual = s.q / (s.q - 1.0);
  return s;
}

namespace {

// Fills v with a random direction. Every third sample is supported on at most
// two coordinates; the extremal pairs of l_p tend to be sparse.
void draw_direction(std::mt19937_64& rng, std::size_t k, ComplexVector& v) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = v.size();
  if (k % 3 == 2 && n >= 2) {
    std::fill(v.begin(), v.end(), Complex{});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    v[i] = {gauss(rng), gauss(rng)};
    v[j] += Complex{gauss(rng), gauss(rng)};
  } else {
    for (auto& z : v) z = {gauss(rng), gauss(rng)};
  }
}

} // namespace

double estimate_rho(const LpSpace& space, double u, std::size_t n_samples,
                    std::uint64_t seed) {
  if (u < 0.0) throw std::invalid_argument("estimate_rho: u must be nonnegative");
  if (n_samples == 0) throw std::invalid_argument("estimate_rho: n_samples must be >= 1");
  if (u == 0.0) return 0.0;

  std::mt19937_64 rng(seed);
  ComplexVector x(space.dim()), y(space.dim());
  double best = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    draw_direction(rng, k, x);
    draw_direction(rng, k + 1, y);
    const double nx = raw_lp_norm(space.p(), x);
    const double ny = raw_lp_norm(space.p(), y);
    if (nx == 0.0 || ny == 0.0) continue;
    for (auto& z : x) z /= nx;
    for (auto& z : y) z /= ny;
    const double plus = raw_lp_norm(space.p(), axpy(x, u, y));
    const double minus = raw_lp_norm(space.p(), axpy(x, -u, y));
    best = std::max(best, 0.5 * (plus + minus) - 1.0);
  }
  return best;
}

ComplexVector add(std::span<const Complex> a, std::span<const Complex> b) {
  return axpy(a, 1.0, b);
}

ComplexVector sub(std::span<const Complex> a, std::span<const Complex> b) {
  return axpy(a, -1.0, b);
}

ComplexVector scale(Complex s, std::span<const Complex> a) {
  ComplexVector out(a.begin(), a.end());
  for (auto& z : out) z *= s;
  return out;
}

ComplexVector axpy(std::span<const Complex> a, Complex s, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("axpy: operand dimensions " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
  }
  ComplexVector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
  return out;
}

} // namespace greedy
