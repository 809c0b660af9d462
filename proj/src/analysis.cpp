#include "greedy/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace greedy {

namespace {

constexpr std::size_t kMaxDetails = 20;

ComplexVector gaussian_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(n);
  for (auto& z : v) z = {gauss(rng), gauss(rng)};
  return v;
}

void merge_into(CheckReport& total, const CheckReport& part) {
  total.worst_margin = std::min(total.worst_margin, part.worst_margin);
  total.samples += part.samples;
  total.skipped += part.skipped;
  for (const auto& d : part.details) {
    if (total.details.size() < kMaxDetails) total.details.push_back(d);
  }
  if (part.status == CheckStatus::NotApplicable) total.status = CheckStatus::NotApplicable;
}

} // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
  case CheckStatus::Pass: return "PASS";
  case CheckStatus::Fail: return "FAIL";
  case CheckStatus::NotApplicable: return "NOT_APPLICABLE";
  case CheckStatus::Diagnostic: return "DIAGNOSTIC";
  }
  return "?";
}

void CheckReport::observe(double lhs, double rhs, const std::string& where) {
  const double margin = rhs - lhs;
  if (std::isnan(margin)) {
    worst_margin = -std::numeric_limits<double>::infinity();
  } else {
    worst_margin = std::min(worst_margin, margin);
  }
  if (!(margin >= -tolerance) && details.size() < kMaxDetails) {
    details.push_back(where + ": " + format_double(lhs) + " > " + format_double(rhs));
  }
}

void CheckReport::finalize() {
  if (status == CheckStatus::Diagnostic || status == CheckStatus::NotApplicable) return;
  status = worst_margin >= -tolerance ? CheckStatus::Pass : CheckStatus::Fail;
}

double CheckReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  return std::nan("");
}

CheckReport check_ll0(const LpSpace& space, std::size_t n_samples, std::uint64_t seed,
                      double tol) {
  CheckReport rep;
  rep.name = "ll0_sandwich_p" + format_double(space.p());
  rep.tolerance = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);

  for (std::size_t k = 0; k < n_samples; ++k) {
    ComplexVector x = gaussian_vector(rng, space.dim());
    ComplexVector y = gaussian_vector(rng, space.dim());
    const double sx = std::exp(log_scale(rng));
    const double sy = std::exp(log_scale(rng));
    for (auto& z : x) z *= sx;
    for (auto& z : y) z *= sy;
    const double u = coef(rng);
    const double nx = lp_norm(space, x);
    if (nx == 0.0) continue;
    const double ny = lp_norm(space, y);
    const DualFunctional F = norming_functional(space, x);
    const double middle = lp_norm(space, axpy(x, u, y)) - nx -
                          (u * apply_functional(F, y)).real();
    const double upper = 2.0 * nx * rho_bound(space, std::abs(u) * ny / nx);
    const std::string where = "sample " + std::to_string(k) + " u=" + format_double(u);
    rep.observe(0.0, middle, where + " (lower)");
    rep.observe(middle, upper, where + " (upper)");
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

double mt2_optimal_lambda(const SmoothnessParams& params, double prev_norm, double A_eps,
                          double t) {
  const double q = params.q;
  const double e = 1.0 / (q - 1.0);
  return std::pow(prev_norm, q * e) * std::pow(5.0, -q * e) *
         std::pow(8.0 * params.gamma * A_eps, -e) * std::pow(t, e);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(101);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 100.0;
  return grid;
}

CheckReport check_ml1_step(const LpSpace& space, const GreedyTrace& trace, std::size_t m,
                           double A_eps, double eps, double t_m,
                           const std::vector<double>& lambda_grid, double slack) {
  if (m == 0 || m > trace.records.size()) {
    throw std::out_of_range("check_ml1_step: step " + std::to_string(m) + " out of range");
  }
  CheckReport rep;
  rep.name = "ml1_step";
  rep.tolerance = slack;
  if (!(A_eps >= eps) || !(A_eps > 0.0)) {
    rep.status = CheckStatus::NotApplicable;
    rep.details.push_back("requires A(eps) >= eps and A(eps) > 0");
    return rep;
  }
  const auto norms = trace.residual_norms();
  const double prev = norms[m - 1];
  const double cur = norms[m];

  std::vector<double> grid = lambda_grid;
  if (t_m > 0.0) grid.push_back(mt2_optimal_lambda(smoothness_params(space), prev, A_eps, t_m));
  for (double lambda : grid) {
    const double rhs = prev * (1.0 - lambda * t_m / A_eps * (1.0 - eps / prev) +
                               2.0 * rho_bound(space, 5.0 * lambda / prev));
    rep.observe(cur, rhs, "m=" + std::to_string(m) + " lambda=" + format_double(lambda));
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

CheckReport check_ml1(const LpSpace& space, const GreedyTrace& trace, double A_eps, double eps,
                      const WeaknessSequence& tau, const std::vector<double>& lambda_grid,
                      double slack) {
  CheckReport total;
  total.name = "ml1_recursion";
  total.tolerance = slack;
  for (std::size_t m = 1; m <= trace.records.size(); ++m) {
    merge_into(total,
               check_ml1_step(space, trace, m, A_eps, eps, tau.at(m), lambda_grid, slack));
  }
  total.finalize();
  return total;
}

CheckReport check_ml3_step(const LpSpace& space, const GreedyTrace& trace, std::size_t m,
                           double A_eps, double eps, double t, double r_m, double f_norm,
                           double slack) {
  if (m == 0 || m > trace.records.size()) {
    throw std::out_of_range("check_ml3_step: step " + std::to_string(m) + " out of range");
  }
  CheckReport rep;
  rep.name = "ml3_step";
  rep.tolerance = slack;
  const auto norms = trace.residual_norms();
  const double prev = norms[m - 1];
  const double cur = norms[m];
  if (r_m == 0.0 || prev <= eps) {
    rep.skipped = 1;
    rep.finalize();
    return rep;
  }
  const double u = r_m * (f_norm + A_eps / t) / ((1.0 - r_m) * prev);
  const double rhs = prev * (1.0 - r_m * (1.0 - eps / prev) + 2.0 * rho_bound(space, u));
  rep.observe(cur, rhs, "m=" + std::to_string(m) + " r=" + format_double(r_m));
  rep.samples = 1;
  rep.finalize();
  return rep;
}

CheckReport check_ml3(const LpSpace& space, const GreedyTrace& trace, double A_eps, double eps,
                      double t, const RelaxationSchedule& r, double slack) {
  CheckReport total;
  total.name = "ml3_recursion";
  total.tolerance = slack;
  for (std::size_t m = 1; m <= trace.records.size(); ++m) {
    merge_into(total, check_ml3_step(space, trace, m, A_eps, eps, t, r.at(m),
                                     trace.initial_norm, slack));
  }
  total.finalize();
  return total;
}

double mt2_constant(const SmoothnessParams& params) {
  const double q = params.q;
  return 4.0 * std::pow(8.0 * params.gamma, 1.0 / (q - 1.0)) * std::pow(5.0, q / (q - 1.0));
}

CheckReport check_mt2_bound(const GreedyTrace& trace, const SmoothnessParams& params,
                            double A_eps, double eps, const WeaknessSequence& tau,
                            double slack) {
  CheckReport rep;
  rep.name = "mt2_rate_bound";
  rep.tolerance = slack;
  const double p = params.p_dual;
  const double Aq = mt2_constant(params);
  const double scale = std::pow(Aq, 1.0 / p) * (A_eps + eps);
  const auto norms = trace.residual_norms();

  double sum = 0.0;
  double empirical = 0.0;
  for (std::size_t m = 0; m < norms.size(); ++m) {
    if (m > 0) sum += std::pow(tau.at(m), p);
    const double decay = std::pow(1.0 + sum, -1.0 / p);
    const double bound = std::max(2.0 * eps, scale * decay);
    rep.observe(norms[m], bound, "m=" + std::to_string(m));
    empirical = std::max(empirical, norms[m] / ((A_eps + eps) * decay));
    ++rep.samples;
  }
  rep.metrics.emplace_back("A_q", Aq);
  rep.metrics.emplace_back("empirical_constant", empirical);
  rep.finalize();
  return rep;
}

CheckReport check_hl1(const std::vector<double>& x_seq, double C1,
                      const std::vector<double>& a_seq, double tol) {
  CheckReport rep;
  rep.name = "hl1_sequence";
  rep.tolerance = tol;
  auto not_applicable = [&](const std::string& why) {
    rep.status = CheckStatus::NotApplicable;
    rep.details.push_back(why);
    return rep;
  };
  if (x_seq.empty()) return not_applicable("empty sequence");
  if (!(C1 > 0.0)) return not_applicable("C1 must be positive");
  if (a_seq.size() + 1 < x_seq.size()) return not_applicable("a_seq shorter than x_seq - 1");
  if (x_seq[0] > C1 * (1.0 + tol)) return not_applicable("x_0 > C1");
  for (std::size_t m = 0; m < x_seq.size(); ++m) {
    if (x_seq[m] < 0.0) return not_applicable("negative x_" + std::to_string(m));
  }
  for (std::size_t k = 0; k + 1 < x_seq.size(); ++k) {
    if (a_seq[k] < 0.0) return not_applicable("negative a_" + std::to_string(k + 1));
    const double bound = x_seq[k] * (1.0 - x_seq[k] * a_seq[k]);
    if (x_seq[k + 1] > bound + tol * std::max(1.0, std::abs(bound))) {
      return not_applicable("recursion violated at m=" + std::to_string(k + 1));
    }
  }

  double inv = 1.0 / C1;
  for (std::size_t m = 0; m < x_seq.size(); ++m) {
    if (m > 0) inv += a_seq[m - 1];
    rep.observe(x_seq[m], 1.0 / inv, "m=" + std::to_string(m));
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

double ml4_constant(double alpha) { return std::pow(2.0, 1.0 + alpha); }

CheckReport check_ml4(const std::vector<double>& a_seq, double alpha, double gamma_param,
                      double A, double tol) {
  CheckReport rep;
  rep.name = "ml4_sequence";
  rep.tolerance = tol;
  auto not_applicable = [&](const std::string& why) {
    rep.status = CheckStatus::NotApplicable;
    rep.details.push_back(why);
    return rep;
  };
  if (a_seq.empty()) return not_applicable("empty sequence");
  if (!(alpha > 0.0 && alpha < gamma_param && gamma_param <= 1.0)) {
    return not_applicable("requires 0 < alpha < gamma <= 1");
  }
  if (!(A > a_seq[0])) return not_applicable("requires A > a_1");

  // a_seq[n-1] holds a_n.
  const std::size_t N = a_seq.size();
  for (std::size_t n = 2; n <= N; ++n) {
    const double bound = a_seq[n - 2] + A * std::pow(static_cast<double>(n - 1), -alpha);
    if (a_seq[n - 1] > bound + tol * std::max(1.0, bound)) {
      return not_applicable("increment hypothesis violated at n=" + std::to_string(n));
    }
  }
  for (std::size_t v = 2; v + 1 <= N; ++v) {
    const double vd = static_cast<double>(v);
    if (a_seq[v - 1] >= A * std::pow(vd, -alpha)) {
      const double bound = a_seq[v - 1] * (1.0 - gamma_param / vd);
      if (a_seq[v] > bound + tol * std::max(1.0, bound)) {
        return not_applicable("contraction hypothesis violated at v=" + std::to_string(v));
      }
    }
  }

  const double C = ml4_constant(alpha);
  double worst_ratio = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double ratio = a_seq[n - 1] * std::pow(static_cast<double>(n), alpha) / A;
    worst_ratio = std::max(worst_ratio, ratio);
    rep.observe(ratio, C, "n=" + std::to_string(n));
    ++rep.samples;
  }
  rep.metrics.emplace_back("empirical_constant", worst_ratio);
  rep.metrics.emplace_back("lemma_constant", C);
  rep.finalize();
  return rep;
}

RateFit fit_log_slope(const std::vector<double>& residual_by_m, std::size_t m_lo,
                      std::size_t m_hi) {
  if (m_lo < 2) throw std::invalid_argument("fit_log_slope: m_lo must be >= 2");
  if (residual_by_m.empty()) throw std::invalid_argument("fit_log_slope: empty trace");
  RateFit fit;
  fit.m_lo = m_lo;
  fit.m_hi = std::min(m_hi, residual_by_m.size() - 1);
  for (std::size_t m = m_lo; m <= fit.m_hi; ++m) {
    if (!(residual_by_m[m] > 0.0)) {
      fit.m_hi = m - 1;
      fit.shrunk = true;
      break;
    }
  }
  if (fit.m_hi < m_lo + 1) {
    throw std::invalid_argument("fit_log_slope: fewer than two positive residuals in window");
  }

  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(fit.m_hi - m_lo + 1);
  for (std::size_t m = m_lo; m <= fit.m_hi; ++m) {
    sx += std::log(static_cast<double>(m));
    sy += std::log(residual_by_m[m]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t m = m_lo; m <= fit.m_hi; ++m) {
    const double dx = std::log(static_cast<double>(m)) - mx;
    const double dy = std::log(residual_by_m[m]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateFit fit_log_slope(const GreedyTrace& trace, std::size_t m_lo, std::size_t m_hi) {
  return fit_log_slope(trace.residual_norms(), m_lo, m_hi);
}

CheckReport check_orthogonality(const LpSpace& space, std::span<const Complex> f,
                                const std::vector<ComplexVector>& basis,
                                const SolverConfig& cfg, std::size_t n_competitors,
                                std::uint64_t seed) {
  const SubspaceApprox best = best_approx_subspace(space, f, basis, cfg);
  if (best.value < kZeroResidual) {
    throw std::invalid_argument("check_orthogonality: f lies in span(basis)");
  }
  CheckReport rep;
  rep.name = "ll1_orthogonality_p" + format_double(space.p());
  rep.tolerance = 0.0;

  const DualFunctional F = norming_functional(space, best.residual);
  double worst_value = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double v = std::abs(apply_functional(F, basis[i]));
    worst_value = std::max(worst_value, v);
    rep.observe(v, 1e-7, "|F(b_" + std::to_string(i) + ")|");
    ++rep.samples;
  }

  // Competitors f_L + delta with delta in L at several scales.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scales[] = {1e-3, 1e-2, 1e-1, 1.0};
  for (std::size_t k = 0; k < n_competitors; ++k) {
    ComplexVector g = sub(f, best.residual);
    const double s = scales[k % 4];
    for (const auto& b : basis) {
      const Complex c{s * gauss(rng), s * gauss(rng)};
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * b[i];
    }
    rep.observe(best.value, lp_norm(space, sub(f, g)) + 1e-9,
                "competitor " + std::to_string(k));
    ++rep.samples;
  }
  rep.metrics.emplace_back("max_functional_on_basis", worst_value);
  rep.metrics.emplace_back("solver_iterations", best.iterations);
  rep.finalize();
  return rep;
}

CheckReport check_dual_norm_supremum(const DualFunctional& F, const Dictionary& dict,
                                     std::size_t n_samples, std::uint64_t seed, double tol) {
  CheckReport rep;
  rep.name = "ll2_ll3_supremum";
  rep.tolerance = tol;

  const DualNormResult dn = dict_dual_norm(F, dict);
  std::vector<Complex> values(dict.size());
  std::size_t best_re = 0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    values[i] = apply_functional(F, dict[i]);
    if (values[i].real() > values[best_re].real()) best_re = i;
  }
  const double max_re = values[best_re].real();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<std::size_t> pick(0, dict.size() - 1);
  const std::size_t max_terms = std::min<std::size_t>(dict.size(), 8);
  std::uniform_int_distribution<std::size_t> terms(1, max_terms);

  const std::size_t n = dict.space().dim();
  double best_abs_sample = 0.0;
  double best_re_sample = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_samples; ++k) {
    // Sample 0 is the extreme element itself, which belongs to both hulls.
    ComplexVector a1(n), conv(n);
    if (k == 0) {
      a1 = dict[dn.argmax_index];
      conv = dict[best_re];
    } else {
      const std::size_t s = terms(rng);
      std::vector<std::size_t> idx(s);
      std::vector<double> w(s);
      double total = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        idx[j] = pick(rng);
        w[j] = unit(rng) + 1e-3;
        total += w[j];
      }
      const double radius = unit(rng) < 0.5 ? 1.0 : unit(rng);
      for (std::size_t j = 0; j < s; ++j) {
        const Complex a = std::polar(radius * w[j] / total, angle(rng));
        const double c = w[j] / total;
        for (std::size_t i = 0; i < n; ++i) {
          a1[i] += a * dict[idx[j]][i];
          conv[i] += c * dict[idx[j]][i];
        }
      }
    }
    const double abs_v = std::abs(apply_functional(F, a1));
    const double re_v = apply_functional(F, conv).real();
    best_abs_sample = std::max(best_abs_sample, abs_v);
    best_re_sample = std::max(best_re_sample, re_v);
    rep.observe(abs_v, dn.value, "A1 sample " + std::to_string(k));
    rep.observe(re_v, max_re, "conv sample " + std::to_string(k));
    ++rep.samples;
  }
  if (n_samples > 0) {
    rep.observe(dn.value, best_abs_sample + 1e-6, "A1 attainment");
    rep.observe(max_re, best_re_sample + 1e-6, "conv attainment");
  }
  rep.metrics.emplace_back("dictionary_norm", dn.value);
  rep.metrics.emplace_back("max_real_part", max_re);
  rep.finalize();
  return rep;
}

double inverse_s(const SmoothnessParams& params, double v) {
  if (v <= 0.0) return 0.0;
  return std::pow(v / params.gamma, 1.0 / (params.q - 1.0));
}

CheckReport check_weakness_series(const WeaknessSequence& tau, double theta, std::size_t n_terms,
                               const SmoothnessParams& params) {
  if (!(theta > 0.0)) throw std::invalid_argument("check_weakness_series: theta must be > 0");
  CheckReport rep;
  rep.name = "weakness_series_partial_sums";
  rep.status = CheckStatus::Diagnostic;
  if (n_terms == 0) return rep;

  double sum = 0.0, quarter = 0.0, half = 0.0;
  for (std::size_t m = 1; m <= n_terms; ++m) {
    const double t = tau.at(m);
    sum += t * inverse_s(params, theta * t);
    if (m == n_terms / 4) quarter = sum;
    if (m == n_terms / 2) half = sum;
  }
  rep.samples = n_terms;
  rep.metrics.emplace_back("partial_sum", sum);
  rep.metrics.emplace_back("partial_sum_half", half);
  rep.metrics.emplace_back("partial_sum_quarter", quarter);
  const double tail_share = sum > 0.0 ? (sum - half) / sum : 0.0;
  rep.metrics.emplace_back("tail_share", tail_share);
  std::string trend;
  if (sum == 0.0) {
    trend = "identically zero";
  } else if (tail_share >= 0.25) {
    trend = "growing at least linearly in the last half";
  } else if (tail_share >= 1e-3) {
    trend = "growing sublinearly";
  } else {
    trend = "flat; consistent with a convergent series";
  }
  rep.details.push_back("trend: " + trend);
  return rep;
}

CheckReport check_monotone(const GreedyTrace& trace, double slack) {
  CheckReport rep;
  rep.name = "monotone_residuals";
  rep.tolerance = slack;
  const auto norms = trace.residual_norms();
  for (std::size_t m = 1; m < norms.size(); ++m) {
    rep.observe(norms[m], norms[m - 1], "m=" + std::to_string(m));
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

CheckReport check_triviality_bound(const GreedyTrace& trace, double slack) {
  CheckReport rep;
  rep.name = "incremental_step_bound";
  rep.tolerance = slack;
  const auto norms = trace.residual_norms();
  for (std::size_t m = 1; m < norms.size(); ++m) {
    rep.observe(norms[m], norms[m - 1] + 2.0 / static_cast<double>(m), "m=" + std::to_string(m));
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

CheckReport check_barycentric(const Dictionary& dict, const GreedyTrace& trace) {
  CheckReport rep;
  rep.name = "barycentric_representation";
  rep.tolerance = 0.0;
  if (trace.approximants.size() != trace.records.size()) {
    rep.status = CheckStatus::NotApplicable;
    rep.details.push_back("trace carries no stored approximants");
    return rep;
  }
  const bool convex = trace.algorithm == Algorithm::Iacc;
  double worst_drift = 0.0;
  std::vector<double> counts(dict.size(), 0.0);
  for (std::size_t m = 1; m <= trace.records.size(); ++m) {
    const TraceRecord& rec = trace.records[m - 1];
    const std::string where = "m=" + std::to_string(m);
    rep.observe(std::abs(std::abs(rec.phase) - 1.0), 1e-12, where + " |phase|");
    if (convex) rep.observe(std::abs(rec.phase - Complex{1.0, 0.0}), 1e-12, where + " phase");
    counts[rec.selected_index] += 1.0;

    const ComplexVector rebuilt = barycentric_reconstruction(dict, trace, m);
    double drift = 0.0;
    for (std::size_t i = 0; i < rebuilt.size(); ++i) {
      drift = std::max(drift, std::abs(rebuilt[i] - trace.approximants[m - 1][i]));
    }
    worst_drift = std::max(worst_drift, drift);
    rep.observe(drift, kBarycentricTolerance, where + " reconstruction");

    double total = 0.0;
    for (double c : counts) {
      const double w = c / static_cast<double>(m);
      rep.observe(-w, 0.0, where + " weight sign");
      total += w;
    }
    rep.observe(std::abs(total - 1.0), 1e-12, where + " weight sum");
    ++rep.samples;
  }
  rep.metrics.emplace_back("max_reconstruction_error", worst_drift);
  rep.finalize();
  return rep;
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) {
    metrics[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  }
  return {{"name", r.name},
          {"status", to_string(r.status)},
          {"passed", r.passed()},
          {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin)
                                                          : nlohmann::json(nullptr)},
          {"tolerance", r.tolerance},
          {"samples", r.samples},
          {"skipped", r.skipped},
          {"details", r.details},
          {"metrics", metrics}};
}

CheckReport report_from_json(const nlohmann::json& j) {
  CheckReport r;
  r.name = j.at("name").get<std::string>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "PASS") r.status = CheckStatus::Pass;
  else if (status == "FAIL") r.status = CheckStatus::Fail;
  else if (status == "NOT_APPLICABLE") r.status = CheckStatus::NotApplicable;
  else if (status == "DIAGNOSTIC") r.status = CheckStatus::Diagnostic;
  else throw std::invalid_argument("unknown check status '" + status + "'");
  const auto& wm = j.at("worst_margin");
  r.worst_margin = wm.is_null() ? std::numeric_limits<double>::infinity() : wm.get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.samples = j.at("samples").get<std::size_t>();
  r.skipped = j.at("skipped").get<std::size_t>();
  r.details = j.at("details").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("metrics").items()) {
    r.metrics.emplace_back(k, v.is_null() ? std::nan("") : v.get<double>());
  }
  return r;
}

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

std::string reports_summary_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  os << "name,passed,worst_margin,samples\n";
  for (const auto& r : reports) {
    os << r.name << ',' << (r.passed() ? 1 : 0) << ','
       << (std::isfinite(r.worst_margin) ? format_double(r.worst_margin) : std::string())
       << ',' << r.samples << '\n';
  }
  return os.str();
}

} // namespace greedy
