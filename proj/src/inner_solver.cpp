#include "greedy/inner_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

namespace greedy {

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("solver.grad_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("solver.max_iters must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("solver.armijo_c must lie in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("solver.backtrack_factor must lie in (0, 1)");
  }
}

namespace {

class AffineObjective {
public:
  AffineObjective(const LpSpace& space, std::span<const Complex> base,
                  const std::vector<ComplexVector>& dirs)
      : space_(space), base_(base), dirs_(dirs) {}

  ComplexVector residual(const std::vector<Complex>& z) const {
    ComplexVector r(base_.begin(), base_.end());
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= z[j] * dirs_[j][i];
    }
    return r;
  }

  double value(const ComplexVector& r) const { return raw_lp_norm(space_.p(), r); }

  // Gradient in complex form: component j is dphi/dRe z_j + i dphi/dIm z_j,
  // which works out to -conj(F_r(d_j)).
  std::vector<Complex> gradient(const ComplexVector& r) const {
    const DualFunctional F = norming_functional(space_, r);
    std::vector<Complex> g(dirs_.size());
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
      g[j] = -std::conj(apply_functional(F, dirs_[j]));
    }
    return g;
  }

private:
  const LpSpace& space_;
  std::span<const Complex> base_;
  const std::vector<ComplexVector>& dirs_;
};

} // namespace

SolveResult minimize_affine(const LpSpace& space, std::span<const Complex> base,
                            const std::vector<ComplexVector>& dirs,
                            std::vector<Complex> start, const SolverConfig& cfg) {
  cfg.validate();
  space.require_dim(base, "minimize_affine base");
  for (const auto& d : dirs) space.require_dim(d, "minimize_affine direction");
  if (start.size() != dirs.size()) {
    throw std::invalid_argument("minimize_affine: start has wrong length");
  }

  const AffineObjective obj(space, base, dirs);
  constexpr double kRoundoff = 4.0 * std::numeric_limits<double>::epsilon();
  const auto dim = static_cast<Eigen::Index>(2 * dirs.size());

  // Real coordinates (Re z_0, Im z_0, Re z_1, ...).
  auto to_real = [&](const std::vector<Complex>& c) {
    Eigen::VectorXd v(dim);
    for (std::size_t j = 0; j < c.size(); ++j) {
      v(2 * j) = c[j].real();
      v(2 * j + 1) = c[j].imag();
    }
    return v;
  };
  auto to_complex = [&](const Eigen::VectorXd& v) {
    std::vector<Complex> c(dirs.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = {v(2 * j), v(2 * j + 1)};
    return c;
  };

  SolveResult res;
  Eigen::VectorXd x = to_real(start);
  ComplexVector r = obj.residual(start);
  double phi = obj.value(r);
  Eigen::VectorXd g;
  double gnorm = 0.0;
  // Inverse Hessian estimate; empty until the first step fixes its scale.
  Eigen::MatrixXd H;

  for (int it = 0;; ++it) {
    res.iterations = it;
    if (phi < kZeroResidual) {
      res.converged = true;
      gnorm = 0.0;
      break;
    }
    if (g.size() == 0) g = to_real(obj.gradient(r));
    gnorm = g.norm();
    if (gnorm <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    // The first step (and any restart) is the Polyak step for optimal value 0,
    // exact on the cone-shaped objectives of representable targets.
    if (H.size() == 0) H = Eigen::MatrixXd::Identity(dim, dim) * (phi / (gnorm * gnorm));
    Eigen::VectorXd d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      H = Eigen::MatrixXd::Identity(dim, dim) * (phi / (gnorm * gnorm));
      d = -H * g;
      slope = g.dot(d);
    }

    bool accepted = false;
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    ComplexVector r_new;
    double phi_new = phi;
    Eigen::VectorXd g_new;
    while (alpha * d.norm() > 1e-300 && alpha > 1e-30) {
      x_new = x + alpha * d;
      r_new = obj.residual(to_complex(x_new));
      phi_new = obj.value(r_new);
      if (phi_new < kZeroResidual || phi_new <= phi + cfg.armijo_c * alpha * slope) {
        accepted = true;
        break;
      }
      // Near the minimizer the Armijo decrease drops below the resolution of
      // phi; accept a step that keeps phi within round-off and shrinks the
      // gradient instead.
      if (phi_new <= phi * (1.0 + kRoundoff)) {
        g_new = to_real(obj.gradient(r_new));
        if (g_new.norm() < gnorm) {
          accepted = true;
          break;
        }
        g_new.resize(0);
      }
      alpha *= cfg.backtrack_factor;
    }
    if (!accepted) break;

    if (g_new.size() == 0 && phi_new >= kZeroResidual) g_new = to_real(obj.gradient(r_new));
    if (g_new.size() != 0) {
      const Eigen::VectorXd s = x_new - x;
      const Eigen::VectorXd y = g_new - g;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
        H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
            rho * s * s.transpose();
      }
    }
    x = std::move(x_new);
    r = std::move(r_new);
    phi = phi_new;
    g = std::move(g_new);
    res.iterations = it + 1;
  }

  std::vector<Complex> z = to_complex(x);
  res.minimizer = std::move(z);
  res.value = phi < kZeroResidual ? 0.0 : phi;
  res.grad_norm = gnorm;
  return res;
}

SolveResult minimize_over_line(const LpSpace& space, std::span<const Complex> base,
                               std::span<const Complex> direction, const SolverConfig& cfg) {
  space.require_dim(direction, "minimize_over_line direction");
  if (raw_lp_norm(space.p(), direction) == 0.0) {
    throw std::invalid_argument("minimize_over_line: zero direction");
  }
  std::vector<ComplexVector> dirs{ComplexVector(direction.begin(), direction.end())};
  return minimize_affine(space, base, dirs, {Complex{}}, cfg);
}

SolveResult minimize_free_relax(const LpSpace& space, std::span<const Complex> f,
                                std::span<const Complex> G_prev, std::span<const Complex> phi,
                                const SolverConfig& cfg, Complex w0, Complex lambda0) {
  space.require_dim(f, "minimize_free_relax f");
  space.require_dim(G_prev, "minimize_free_relax G_prev");
  space.require_dim(phi, "minimize_free_relax phi");
  if (raw_lp_norm(space.p(), phi) == 0.0) {
    throw std::invalid_argument("minimize_free_relax: zero phi");
  }

  // f - ((1 - w) G + lambda phi) = (f - G) - (w (-G) + lambda phi)
  const ComplexVector base = sub(f, G_prev);
  const ComplexVector phi_v(phi.begin(), phi.end());

  if (raw_lp_norm(space.p(), G_prev) == 0.0) {
    SolveResult line = minimize_affine(space, base, {phi_v}, {lambda0}, cfg);
    line.minimizer.insert(line.minimizer.begin(), Complex{});
    return line;
  }
  const ComplexVector neg_G = scale(-1.0, G_prev);
  return minimize_affine(space, base, {neg_G, phi_v}, {w0, lambda0}, cfg);
}

SubspaceApprox best_approx_subspace(const LpSpace& space, std::span<const Complex> f,
                                    const std::vector<ComplexVector>& basis,
                                    const SolverConfig& cfg) {
  if (basis.empty()) throw std::invalid_argument("best_approx_subspace: empty basis");
  space.require_dim(f, "best_approx_subspace f");
  const auto n = static_cast<Eigen::Index>(space.dim());
  const auto k = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd B(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    space.require_dim(basis[j], "best_approx_subspace basis element");
    for (Eigen::Index i = 0; i < n; ++i) B(i, j) = basis[j][i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(B);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < k) {
    throw std::invalid_argument("best_approx_subspace: basis is linearly dependent (rank " +
                                std::to_string(qr.rank()) + " < " + std::to_string(k) + ")");
  }

  SolveResult sr = minimize_affine(space, f, basis, std::vector<Complex>(basis.size()), cfg);
  SubspaceApprox out;
  out.coeffs = sr.minimizer;
  out.residual = ComplexVector(f.begin(), f.end());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t i = 0; i < out.residual.size(); ++i) {
      out.residual[i] -= out.coeffs[j] * basis[j][i];
    }
  }
  out.value = sr.value;
  out.converged = sr.converged;
  out.iterations = sr.iterations;
  return out;
}

} // namespace greedy
