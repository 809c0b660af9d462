#include "greedy/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace greedy;
using doctest::Approx;

namespace {

const SolverConfig kCfg;

GreedyTrace gaussian_wgafr(double p, std::uint64_t seed, double t, std::size_t iters,
                           Dictionary* out_dict = nullptr) {
  const LpSpace s(p, 16);
  Dictionary d = generate_dictionary(s, 48, DictionaryKind::Gaussian, seed);
  const TargetSpec target = make_target(d, Membership::A1, 4, 0.0, seed + 50);
  GreedyTrace tr = run_wgafr(d, target, WeaknessSequence::constant(t), iters,
                             SelectionPolicy::FirstQualifying, kCfg);
  if (out_dict) *out_dict = std::move(d);
  return tr;
}

} // namespace

TEST_CASE("report bookkeeping") {
  CheckReport r;
  r.tolerance = 1e-9;
  r.observe(1.0, 2.0, "a");
  r.observe(2.0, 2.0 - 5e-10, "b");
  r.finalize();
  CHECK(r.status == CheckStatus::Pass);
  CHECK(r.worst_margin == Approx(-5e-10));
  CHECK(r.details.empty());
  r.observe(3.0, 2.0, "c");
  r.finalize();
  CHECK(r.status == CheckStatus::Fail);
  CHECK_FALSE(r.passed());
  REQUIRE(r.details.size() == 1);
  r.observe(std::nan(""), 1.0, "nan");
  CHECK(r.worst_margin == -std::numeric_limits<double>::infinity());
  CHECK(std::isnan(r.metric("missing")));

  CheckReport diag;
  diag.status = CheckStatus::Diagnostic;
  diag.observe(5.0, 0.0, "x");
  diag.finalize();
  CHECK(diag.passed());
}

TEST_CASE("smoothness inequality hand case and random check") {
  const LpSpace s(2, 2);
  const ComplexVector x{1.0, 0.0}, y{0.0, 1.0};
  const double u = 1.0;
  const double middle = lp_norm(s, add(x, scale(u, y))) - lp_norm(s, x) -
                        (u * apply_functional(norming_functional(s, x), y)).real();
  CHECK(middle == Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(2.0 * lp_norm(s, x) * rho_bound(s, u) == Approx(1.0));

  for (double p : {1.5, 2.0, 3.0, 8.0}) {
    const CheckReport r = check_ll0(LpSpace(p, 6), 300, 7);
    CHECK(r.passed());
    CHECK(r.samples == 300);
  }
}

TEST_CASE("mt2 constant and optimal lambda") {
  const auto l2 = smoothness_params(LpSpace(2, 4));
  CHECK(mt2_constant(l2) == Approx(400.0).epsilon(1e-14));
  // A_q = 4 (8 gamma)^(1/(q-1)) 5^(q/(q-1)) at p = 1.5
  const auto l15 = smoothness_params(LpSpace(1.5, 4));
  const double oracle = 4.0 * std::pow(8.0 / 1.5, 2.0) * std::pow(5.0, 3.0);
  CHECK(mt2_constant(l15) == Approx(oracle).epsilon(1e-13));
  CHECK(mt2_constant(smoothness_params(LpSpace(4, 4))) == Approx(4.0 * 12.0 * 25.0));
  // MT2 bound 400/(1+m) with t = 1, A = 1, eps = 0 equals 2 (squared 4) at m = 99.
  CHECK(std::sqrt(400.0 / (1.0 + 99.0)) == Approx(2.0));
  CHECK(default_lambda_grid().size() == 101);
  CHECK(default_lambda_grid().back() == 1.0);
}

TEST_CASE("per-step recursions hold on greedy runs") {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (double t : {1.0, 0.5}) {
      const GreedyTrace tr = gaussian_wgafr(p, 3, t, 60);
      const auto tau = WeaknessSequence::constant(t);
      const LpSpace s(p, 16);
      CHECK(check_ml1(s, tr, 1.0, 0.0, tau, default_lambda_grid()).passed());
      CHECK(check_mt2_bound(tr, smoothness_params(s), 1.0, 0.0, tau).passed());
      CHECK(check_monotone(tr).passed());
    }
  }
  const LpSpace s(3, 16);
  const Dictionary d = generate_dictionary(s, 48, DictionaryKind::Gaussian, 9);
  const TargetSpec target = make_target(d, Membership::A1, 4, 0.0, 10);
  const GreedyTrace tr =
      run_gawr(d, target, WeaknessSequence::constant(1.0), RelaxationSchedule::standard(),
               80, SelectionPolicy::Argmax, kCfg);
  const CheckReport ml3 =
      check_ml3(s, tr, 1.0, 0.0, 1.0, RelaxationSchedule::standard());
  CHECK(ml3.passed());
  CHECK(ml3.samples > 0);
}

TEST_CASE("checkers reject a corrupted trace") {
  GreedyTrace tr = gaussian_wgafr(2.0, 4, 1.0, 30);
  REQUIRE(tr.records.size() > 5);
  tr.records[4].residual_norm = tr.records[3].residual_norm * 1.5;
  const LpSpace s(2, 16);
  const auto tau = WeaknessSequence::constant(1.0);
  CHECK_FALSE(check_monotone(tr).passed());
  CHECK_FALSE(check_ml1(s, tr, 1.0, 0.0, tau, default_lambda_grid()).passed());

  // A residual far above the rate bound.
  GreedyTrace big = gaussian_wgafr(2.0, 4, 1.0, 30);
  big.records[0].residual_norm = 100.0;
  CHECK_FALSE(check_mt2_bound(big, smoothness_params(s), 1.0, 0.0, tau).passed());
}

TEST_CASE("recursion lemma") {
  // x_{m+1} = x_m (1 - x_m a) with equality, a = 0.1
  const CheckReport ok = check_hl1({1.0, 0.9, 0.819}, 1.0, {0.1, 0.1});
  CHECK(ok.status == CheckStatus::Pass);
  CHECK(0.9 <= 1.0 / 1.1);
  CHECK(0.819 <= 1.0 / 1.2);

  CHECK(check_hl1({1.0, 0.95}, 1.0, {0.1}).status == CheckStatus::NotApplicable);
  CHECK(check_hl1({1.5, 0.5}, 1.0, {0.1}).status == CheckStatus::NotApplicable);

  std::vector<double> x{0.5}, a;
  for (int m = 1; m <= 200; ++m) {
    a.push_back(1.0 / m);
    x.push_back(x.back() * (1.0 - x.back() * a.back()) * 0.8);
  }
  CHECK(check_hl1(x, 0.5, a).status == CheckStatus::Pass);
}

TEST_CASE("decay lemma") {
  CHECK(ml4_constant(0.5) == Approx(std::pow(2.0, 1.5)));
  const double alpha = 0.5, A = 1.0;
  std::vector<double> half;
  for (int n = 1; n <= 500; ++n) half.push_back(A * std::pow(n, -alpha) / 2.0);
  const CheckReport r = check_ml4(half, alpha, 0.75, A);
  CHECK(r.status == CheckStatus::Pass);
  CHECK(r.metric("empirical_constant") == Approx(0.5));

  CHECK(check_ml4(std::vector<double>(50, 1.0), alpha, 0.75, 2.0).status ==
        CheckStatus::NotApplicable);
  CHECK(check_ml4(half, 0.8, 0.75, A).status == CheckStatus::NotApplicable);

  // A sequence that contracts by exactly (1 - gamma/v) while above the curve.
  std::vector<double> seq{0.9};
  const double gamma = 0.75;
  for (int v = 1; v < 400; ++v) {
    const double prev = seq.back();
    const double curve = A * std::pow(v, -alpha);
    seq.push_back(prev >= curve && v >= 2 ? prev * (1.0 - gamma / v)
                                          : prev + 0.99 * curve);
  }
  const CheckReport c = check_ml4(seq, alpha, gamma, A);
  CHECK(c.status == CheckStatus::Pass);
  CHECK(c.metric("empirical_constant") <= ml4_constant(alpha));
}

TEST_CASE("log-log slope fit") {
  std::vector<double> pw, cube;
  for (int m = 0; m <= 400; ++m) {
    pw.push_back(m == 0 ? 1.0 : std::pow(m, -0.5));
    cube.push_back(m == 0 ? 1.0 : 3.0 * std::pow(m, -1.0 / 3.0));
  }
  RateFit f = fit_log_slope(pw, 10, 400);
  CHECK(f.slope == Approx(-0.5).epsilon(1e-12));
  CHECK(f.r_squared == Approx(1.0));
  CHECK(f.m_lo == 10);
  CHECK(f.m_hi == 400);
  f = fit_log_slope(cube, 2, 1000);
  CHECK(f.slope == Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(f.intercept == Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.m_hi == 400);

  std::vector<double> zero = pw;
  zero[50] = 0.0;
  f = fit_log_slope(zero, 10, 400);
  CHECK(f.shrunk);
  CHECK(f.m_hi < 50);
  CHECK_THROWS(fit_log_slope(pw, 1, 400));
  CHECK_THROWS(fit_log_slope(std::vector<double>{}, 2, 10));
}

TEST_CASE("best approximation certificate") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (double p : {1.5, 3.0, 6.0}) {
    const LpSpace s(p, 8);
    std::vector<ComplexVector> basis(3, ComplexVector(8));
    for (auto& b : basis)
      for (auto& z : b) z = {N(rng), N(rng)};
    ComplexVector f(8);
    for (auto& z : f) z = {N(rng), N(rng)};
    const CheckReport r = check_orthogonality(s, f, basis, kCfg, 50, 1);
    CHECK(r.passed());
    CHECK(r.metric("max_functional_on_basis") <= 1e-7);
    CHECK_THROWS(check_orthogonality(s, add(basis[0], scale(2.0, basis[1])), basis, kCfg));
  }
}

TEST_CASE("dual norm supremum over the symmetric hull") {
  const LpSpace s(3, 5);
  const Dictionary d = generate_dictionary(s, 5, DictionaryKind::Canonical, 0);
  const Dictionary g = generate_dictionary(s, 20, DictionaryKind::Gaussian, 2);
  const DualFunctional F = norming_functional(s, ComplexVector{1.0, Complex{0, -2}, 0.5, 0.0, 3.0});
  CHECK(check_dual_norm_supremum(F, d, 200, 1).passed());
  CHECK(check_dual_norm_supremum(F, g, 200, 1).passed());
}

TEST_CASE("weakness series partial sums") {
  const auto l2 = smoothness_params(LpSpace(2, 1));
  CHECK(inverse_s(l2, 0.3) == Approx(0.6));
  const double theta = 0.1;
  const std::size_t n = 400;
  CheckReport r = check_weakness_series(WeaknessSequence::constant(1.0), theta, n, l2);
  CHECK(r.status == CheckStatus::Diagnostic);
  CHECK(r.metric("partial_sum") == Approx(2.0 * theta * n));
  CHECK(r.metric("tail_share") == Approx(0.5));

  r = check_weakness_series(WeaknessSequence::general(std::vector<double>(n, 0.0)), theta, n, l2);
  CHECK(r.metric("partial_sum") == 0.0);

  std::vector<double> harmonic;
  for (std::size_t m = 1; m <= n; ++m) harmonic.push_back(1.0 / static_cast<double>(m));
  r = check_weakness_series(WeaknessSequence::general(harmonic), theta, n, l2);
  CHECK(r.metric("partial_sum") < 2.0 * theta * std::numbers::pi * std::numbers::pi / 6.0);
  CHECK(r.metric("tail_share") < 0.01);
}

TEST_CASE("incremental trace checks") {
  const LpSpace s(2, 12);
  const Dictionary d = generate_dictionary(s, 30, DictionaryKind::Gaussian, 1);
  TargetSpec t = make_target(d, Membership::Conv, 5, 0.0, 2);
  GreedyTrace tr = run_iacc(d, t, 1.0, 60, SelectionPolicy::Argmax);
  CHECK(check_triviality_bound(tr).passed());
  CheckReport b = check_barycentric(d, tr);
  CHECK(b.status == CheckStatus::Pass);

  tr.records[10].phase = Complex{0, 1};
  CHECK_FALSE(check_barycentric(d, tr).passed());
  tr.approximants.clear();
  CHECK(check_barycentric(d, tr).status == CheckStatus::NotApplicable);

  GreedyTrace jump = run_iac(d, t, 1.0, 20, SelectionPolicy::Argmax);
  jump.records[5].residual_norm = jump.records[4].residual_norm + 2.0 / 6.0 + 1e-3;
  CHECK_FALSE(check_triviality_bound(jump).passed());
}

TEST_CASE("report serialization") {
  CheckReport r;
  r.name = "x";
  r.tolerance = 1e-9;
  r.samples = 3;
  r.skipped = 1;
  r.observe(1.0, 0.5, "bad");
  r.metrics.emplace_back("slope", -0.5);
  r.finalize();
  const CheckReport back = report_from_json(to_json(r));
  CHECK(back.name == "x");
  CHECK(back.status == CheckStatus::Fail);
  CHECK(back.worst_margin == r.worst_margin);
  CHECK(back.samples == 3);
  CHECK(back.skipped == 1);
  CHECK(back.details == r.details);
  CHECK(back.metric("slope") == -0.5);

  CheckReport empty;
  empty.name = "none";
  empty.status = CheckStatus::NotApplicable;
  const auto j = to_json(empty);
  CHECK(j.at("worst_margin").is_null());
  CHECK(j.at("status") == "NOT_APPLICABLE");
  CHECK(std::isinf(report_from_json(j).worst_margin));

  const std::string csv = reports_summary_csv({r, empty});
  CHECK(csv.rfind("name,passed,worst_margin,samples\n", 0) == 0);
  CHECK(reports_to_json({r, empty}).size() == 2);
}
