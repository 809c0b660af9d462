#include "greedy/inner_solver.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <functional>
#include <random>

using namespace greedy;
using doctest::Approx;

namespace {

ComplexVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

// Coarse-to-fine grid search over a complex scalar; independent of the solver.
Complex grid_argmin(const std::function<double(Complex)>& f, Complex centre, double radius) {
  Complex best = centre;
  double best_v = f(centre);
  for (int level = 0; level < 12; ++level) {
    const Complex c = best;
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const Complex z = c + Complex{i * radius / 20, j * radius / 20};
        const double v = f(z);
        if (v < best_v) {
          best_v = v;
          best = z;
        }
      }
    }
    radius /= 8;
  }
  return best;
}

// Hilbert projection of f onto span(basis) through the normal equations.
Eigen::VectorXcd normal_equations(const ComplexVector& f, const std::vector<ComplexVector>& basis) {
  const auto n = static_cast<Eigen::Index>(f.size());
  const auto k = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd B(n, k);
  Eigen::VectorXcd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = f[i];
    for (Eigen::Index j = 0; j < k; ++j) B(i, j) = basis[j][i];
  }
  return (B.adjoint() * B).ldlt().solve(B.adjoint() * y);
}

} // namespace

TEST_CASE("solver config validation names the field") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.grad_tol = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("solver.grad_tol"), std::invalid_argument);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("solver.max_iters"), std::invalid_argument);
  c = {};
  c.armijo_c = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("solver.armijo_c"), std::invalid_argument);
  c = {};
  c.backtrack_factor = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("solver.backtrack_factor"),
                       std::invalid_argument);
}

TEST_CASE("line minimization reference cases") {
  const SolverConfig cfg;
  const LpSpace l2(2, 2);
  SolveResult r = minimize_over_line(l2, ComplexVector{2.0, 0.0}, ComplexVector{1.0, 0.0}, cfg);
  CHECK(std::abs(r.minimizer[0] - Complex{2, 0}) < 1e-10);
  CHECK(r.value == 0.0);
  CHECK(r.converged);

  r = minimize_over_line(l2, ComplexVector{1.0, 1.0}, ComplexVector{1.0, 0.0}, cfg);
  CHECK(std::abs(r.minimizer[0] - Complex{1, 0}) < 1e-8);
  CHECK(r.value == Approx(1.0).epsilon(1e-12));

  const LpSpace l4(4, 2);
  const ComplexVector base{1.0, 1.0}, dir{1.0, 0.0};
  r = minimize_over_line(l4, base, dir, cfg);
  const Complex oracle = grid_argmin(
      [&](Complex z) { return lp_norm(l4, axpy(base, -z, dir)); }, Complex{0, 0}, 4.0);
  CHECK(std::abs(oracle - Complex{1, 0}) < 1e-6);
  CHECK(std::abs(r.minimizer[0] - oracle) < 1e-6);
  CHECK(r.value == Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(minimize_over_line(l2, base, ComplexVector{0.0, 0.0}, cfg),
                  std::invalid_argument);
}

TEST_CASE("line minimization matches a grid search for several exponents") {
  std::mt19937_64 rng(21);
  for (double p : {1.3, 1.5, 3.0, 6.0}) {
    const LpSpace s(p, 5);
    for (int k = 0; k < 5; ++k) {
      const ComplexVector base = random_vector(rng, 5), dir = random_vector(rng, 5);
      const SolveResult r = minimize_over_line(s, base, dir, SolverConfig{});
      auto obj = [&](Complex z) { return lp_norm(s, axpy(base, -z, dir)); };
      const Complex oracle = grid_argmin(obj, Complex{0, 0}, 4.0);
      CHECK(r.converged);
      CHECK(r.value <= obj(oracle) + 1e-10);
      CHECK(r.value == Approx(obj(oracle)).epsilon(1e-9));
    }
  }
}

TEST_CASE("free relaxation reference cases") {
  const SolverConfig cfg;
  const LpSpace l2(2, 2);
  const ComplexVector f{1.0, 1.0}, e1{1.0, 0.0}, e2{0.0, 1.0}, zero{0.0, 0.0};

  SolveResult r = minimize_free_relax(l2, f, zero, e1, cfg);
  CHECK(r.minimizer[0] == Complex{0, 0});
  CHECK(std::abs(r.minimizer[1] - Complex{1, 0}) < 1e-8);
  CHECK(r.value == Approx(1.0).epsilon(1e-12));

  r = minimize_free_relax(l2, f, e1, e2, cfg);
  CHECK(r.value == 0.0);
  CHECK(std::abs(r.minimizer[0]) < 1e-10);
  CHECK(std::abs(r.minimizer[1] - Complex{1, 0}) < 1e-10);

  r = minimize_free_relax(l2, f, f, e1, cfg);
  CHECK(r.value == 0.0);
  CHECK(r.minimizer[0] == Complex{0, 0});
  CHECK(r.minimizer[1] == Complex{0, 0});
}

TEST_CASE("free relaxation is insensitive to the starting point") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (double p : {1.5, 2.0, 3.0}) {
    const LpSpace s(p, 6);
    const ComplexVector f = random_vector(rng, 6), G = random_vector(rng, 6),
                        phi = random_vector(rng, 6);
    const double ref = minimize_free_relax(s, f, G, phi, SolverConfig{}).value;
    for (int k = 0; k < 8; ++k) {
      const SolveResult r = minimize_free_relax(s, f, G, phi, SolverConfig{},
                                                {g(rng), g(rng)}, {g(rng), g(rng)});
      CHECK(r.value == Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("subspace approximation matches the Hilbert projection") {
  const LpSpace l2(2, 3);
  const SubspaceApprox a =
      best_approx_subspace(l2, ComplexVector{1.0, 1.0, 1.0},
                           {ComplexVector{1.0, 0.0, 0.0}, ComplexVector{0.0, 1.0, 0.0}}, {});
  CHECK(std::abs(a.coeffs[0] - Complex{1, 0}) < 1e-10);
  CHECK(std::abs(a.coeffs[1] - Complex{1, 0}) < 1e-10);
  CHECK(std::abs(a.residual[2] - Complex{1, 0}) < 1e-10);
  CHECK(std::abs(a.residual[0]) < 1e-10);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 30; ++k) {
    const LpSpace s(2, 8);
    std::vector<ComplexVector> basis{random_vector(rng, 8), random_vector(rng, 8),
                                     random_vector(rng, 8)};
    const ComplexVector f = random_vector(rng, 8);
    const SubspaceApprox approx = best_approx_subspace(s, f, basis, {});
    const Eigen::VectorXcd oracle = normal_equations(f, basis);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      CHECK(std::abs(approx.coeffs[j] - oracle(static_cast<Eigen::Index>(j))) < 1e-8);
    }
  }
}

TEST_CASE("subspace approximation in span and degenerate bases") {
  std::mt19937_64 rng(6);
  const LpSpace s(3, 5);
  const ComplexVector b1 = random_vector(rng, 5), b2 = random_vector(rng, 5);
  const ComplexVector f = axpy(scale(Complex{0.3, -1.2}, b1), Complex{2.0, 0.5}, b2);
  const SubspaceApprox a = best_approx_subspace(s, f, {b1, b2}, {});
  CHECK(lp_norm(s, a.residual) <= 1e-8);

  CHECK_THROWS_AS(best_approx_subspace(s, f, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(best_approx_subspace(s, f, {b1, scale(Complex{0, 2}, b1)}, {}),
                  std::invalid_argument);
}

TEST_CASE("best approximant certificate and local optimality") {
  std::mt19937_64 rng(12);
  for (double p : {1.5, 3.0}) {
    for (int k = 0; k < 20; ++k) {
      const LpSpace s(p, 7);
      std::vector<ComplexVector> basis{random_vector(rng, 7), random_vector(rng, 7)};
      const ComplexVector f = random_vector(rng, 7);
      const SubspaceApprox a = best_approx_subspace(s, f, basis, {});
      CHECK(a.converged);
      const DualFunctional F = norming_functional(s, a.residual);
      for (const auto& b : basis) CHECK(std::abs(apply_functional(F, b)) <= 1e-7);
      // nudging any real or imaginary coefficient part by 1e-3 costs something
      for (std::size_t j = 0; j < basis.size(); ++j) {
        for (Complex d : {Complex{1e-3, 0}, Complex{-1e-3, 0}, Complex{0, 1e-3},
                          Complex{0, -1e-3}}) {
          const ComplexVector moved = axpy(a.residual, -d, basis[j]);
          CHECK(lp_norm(s, moved) > a.value);
        }
      }
    }
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  SolverConfig tight;
  tight.max_iters = 1;
  std::mt19937_64 rng(1);
  const LpSpace s(1.5, 6);
  const SolveResult r =
      minimize_over_line(s, random_vector(rng, 6), random_vector(rng, 6), tight);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 1);
  CHECK(r.minimizer.size() == 1);
}
