#include "greedy/harness.hpp"

#include <chrono>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace greedy {

namespace {

struct Sizes {
  std::size_t identities;
  std::size_t ll0;
  std::size_t ll1;
  std::size_t supremum;
  std::size_t runs;
  std::size_t sequences;
};

Sizes sizes(VerifyProfile profile) {
  if (profile == VerifyProfile::Full) return {1000, 10000, 200, 500, 50, 100};
  return {200, 2000, 20, 500, 6, 20};
}

ComplexVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

CheckReport identities(double p, std::size_t n, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "duality_identities_p" + format_double(p);
  rep.tolerance = 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dims(1, 64);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  for (std::size_t k = 0; k < n; ++k) {
    const LpSpace space(p, dims(rng));
    ComplexVector h = random_vector(rng, space.dim());
    const double s = std::exp(log_scale(rng));
    for (auto& z : h) z *= s;
    const double nh = lp_norm(space, h);
    const DualFunctional F = norming_functional(space, h);
    const Complex Fh = apply_functional(F, h);
    const std::string where = "sample " + std::to_string(k);
    rep.observe(std::abs(Fh - Complex{nh, 0.0}) / nh, 1e-9, where + " F(h)");
    rep.observe(std::abs(dual_norm(space, F) - 1.0), 1e-9, where + " ||F||");
    ++rep.samples;
  }
  // rho_bound dominates the sampled modulus.
  const LpSpace small(p, 4);
  for (double u : {0.05, 0.2, 0.5, 1.0, 2.0}) {
    rep.observe(estimate_rho(small, u, 2000, seed + 17), rho_bound(small, u),
                "rho u=" + format_double(u));
  }
  rep.finalize();
  return rep;
}

CheckReport orthogonality_battery(double p, std::size_t n, std::uint64_t seed) {
  CheckReport total;
  total.name = "ll1_certificate_p" + format_double(p);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dims(3, 12);
  for (std::size_t k = 0; k < n; ++k) {
    const LpSpace space(p, dims(rng));
    std::uniform_int_distribution<std::size_t> ks(1, std::min<std::size_t>(3, space.dim() - 1));
    std::vector<ComplexVector> basis(ks(rng));
    for (auto& b : basis) b = random_vector(rng, space.dim());
    const ComplexVector f = random_vector(rng, space.dim());
    const CheckReport r = check_orthogonality(space, f, basis, SolverConfig{}, 100, rng());
    total.worst_margin = std::min(total.worst_margin, r.worst_margin);
    total.samples += r.samples;
    for (const auto& d : r.details) {
      if (total.details.size() < 20) total.details.push_back("instance " + std::to_string(k) + " " + d);
    }
  }
  total.finalize();
  return total;
}

CheckReport supremum_battery(std::size_t n_samples, std::uint64_t seed) {
  CheckReport total;
  total.name = "ll2_ll3_sampling";
  total.tolerance = 1e-9;
  std::mt19937_64 rng(seed);
  for (double p : {1.5, 2.0, 3.0}) {
    const LpSpace space(p, 12);
    const Dictionary dict = generate_dictionary(space, 30, DictionaryKind::Gaussian, rng());
    for (int k = 0; k < 4; ++k) {
      const DualFunctional F = norming_functional(space, random_vector(rng, space.dim()));
      const CheckReport r = check_dual_norm_supremum(F, dict, n_samples, rng());
      total.worst_margin = std::min(total.worst_margin, r.worst_margin);
      total.samples += r.samples;
      for (const auto& d : r.details) {
        if (total.details.size() < 20) total.details.push_back(d);
      }
    }
  }
  total.finalize();
  return total;
}

void absorb(CheckReport& total, const CheckReport& r, const std::string& tag) {
  total.worst_margin = std::min(total.worst_margin, r.worst_margin);
  total.samples += r.samples;
  total.skipped += r.skipped;
  if (r.status == CheckStatus::Fail && total.details.size() < 20) {
    total.details.push_back(tag + ": " + (r.details.empty() ? r.name : r.details.front()));
  }
  if (r.status == CheckStatus::Fail) total.status = CheckStatus::Fail;
}

std::vector<CheckReport> greedy_runs(std::size_t n_runs, std::uint64_t seed) {
  CheckReport mono, ml1, ml3, mt2, bary, step;
  mono.name = "wgafr_monotone";
  ml1.name = "ml1_per_step";
  ml3.name = "ml3_per_step";
  mt2.name = "mt2_bound";
  bary.name = "iacc_barycentric";
  step.name = "iac_step_bound";
  for (auto* r : {&mono, &ml1, &ml3, &mt2}) r->tolerance = kSolverSlack;
  step.tolerance = 1e-10;

  const double ps[] = {1.5, 2.0, 3.0};
  for (std::size_t k = 0; k < n_runs; ++k) {
    const std::uint64_t s = splitmix64(seed + k);
    const LpSpace space(ps[k % 3], 16);
    const Dictionary dict = generate_dictionary(space, 48, DictionaryKind::Gaussian, s);
    const TargetSpec a1 = make_target(dict, Membership::A1, 4, 0.0, splitmix64(s));
    const TargetSpec conv = make_target(dict, Membership::Conv, 4, 0.0, splitmix64(s + 1));
    const double t = k % 2 ? 0.5 : 1.0;
    const WeaknessSequence tau = WeaknessSequence::constant(t);
    const std::string tag = "run " + std::to_string(k);

    const GreedyTrace w = run_wgafr(dict, a1, tau, 60, SelectionPolicy::Argmax, SolverConfig{});
    absorb(mono, check_monotone(w), tag);
    absorb(ml1, check_ml1(space, w, a1.A_eps, a1.eps, tau, default_lambda_grid()), tag);
    absorb(mt2, check_mt2_bound(w, smoothness_params(space), a1.A_eps, a1.eps, tau), tag);

    const GreedyTrace g = run_gawr(dict, a1, WeaknessSequence::constant(1.0),
                                   RelaxationSchedule::standard(), 60,
                                   SelectionPolicy::Argmax, SolverConfig{});
    absorb(ml3, check_ml3(space, g, a1.A_eps, a1.eps, 1.0, RelaxationSchedule::standard()),
           tag);

    const GreedyTrace ia = run_iac(dict, a1, 1.0, 100, SelectionPolicy::Argmax);
    absorb(step, check_triviality_bound(ia), tag);
    const GreedyTrace iacc = run_iacc(dict, conv, 1.0, 100, SelectionPolicy::Argmax);
    absorb(bary, check_barycentric(dict, iacc), tag);
    absorb(bary, check_barycentric(dict, ia), tag + " (IAc)");
  }
  std::vector<CheckReport> out{mono, ml1, ml3, mt2, step, bary};
  for (auto& r : out) r.finalize();
  return out;
}

CheckReport orthonormal_exactness(std::uint64_t seed) {
  CheckReport rep;
  rep.name = "orthonormal_exactness";
  std::mt19937_64 rng(seed);
  for (std::size_t k = 1; k <= 8; ++k) {
    const LpSpace space(2.0, 8);
    const Dictionary dict = generate_dictionary(space, 8, DictionaryKind::Canonical, 0);
    const TargetSpec target = make_target(dict, Membership::A1, k, 0.0, rng());
    const GreedyTrace tr =
        run_wgafr(dict, target, WeaknessSequence::constant(1.0), k, SelectionPolicy::Argmax,
                  SolverConfig{});
    const auto norms = tr.residual_norms();
    const std::string where = "k=" + std::to_string(k);
    rep.observe(static_cast<double>(k), static_cast<double>(tr.records.size()), where + " steps");
    rep.observe(norms[k], 1e-8, where + " residual at step k");
    rep.observe(1e-8, norms[k - 1], where + " residual at step k-1");
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

CheckReport sequence_lemmas(std::size_t n, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "hl1_ml4_synthetic";
  rep.tolerance = 1e-12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const bool equality = k % 2 == 0;
    const double slack = equality ? 0.0 : 0.2;
    const std::string tag = "sequence " + std::to_string(k);

    const double C1 = 0.5 + 1.5 * unit(rng);
    std::vector<double> x{C1 * (equality ? 1.0 : 0.5 + 0.5 * unit(rng))};
    std::vector<double> a;
    for (int m = 0; m < 200; ++m) {
      a.push_back(unit(rng) * 0.5 / C1);
      x.push_back(x.back() * (1.0 - x.back() * a.back()) * (1.0 - slack * unit(rng)));
    }
    const CheckReport h = check_hl1(x, C1, a);
    if (h.status == CheckStatus::NotApplicable) {
      rep.status = CheckStatus::Fail;
      rep.details.push_back(tag + ": hl1 hypotheses rejected");
    }
    rep.worst_margin = std::min(rep.worst_margin, h.worst_margin);

    const double gamma = 0.3 + 0.7 * unit(rng);
    const double alpha = gamma * (0.1 + 0.8 * unit(rng));
    const double A = 1.0;
    std::vector<double> s{A * 0.9 * unit(rng)};
    for (std::size_t m = 2; m <= 400; ++m) {
      const double v = static_cast<double>(m - 1);
      const double prev = s.back();
      double next = m - 1 >= 2 && prev >= A * std::pow(v, -alpha) ? prev * (1.0 - gamma / v)
                                                                   : prev + A * std::pow(v, -alpha);
      next *= 1.0 - slack * unit(rng);
      s.push_back(next);
    }
    const CheckReport l = check_ml4(s, alpha, gamma, A);
    if (l.status == CheckStatus::NotApplicable) {
      rep.status = CheckStatus::Fail;
      rep.details.push_back(tag + ": ml4 hypotheses rejected");
    }
    rep.worst_margin = std::min(rep.worst_margin, l.worst_margin);
    rep.samples += 2;
  }
  if (rep.status != CheckStatus::Fail) rep.finalize();
  return rep;
}

CheckReport determinism(std::uint64_t seed) {
  CheckReport rep;
  rep.name = "determinism";
  for (Algorithm algo : {Algorithm::Wgafr, Algorithm::Gawr, Algorithm::Iac, Algorithm::Iacc}) {
    ExperimentConfig c;
    c.p = 3.0;
    c.algorithm = algo;
    c.iters = 40;
    c.dict_seed = seed;
    c.target_seed = seed + 1;
    if (algo == Algorithm::Iacc) c.membership = Membership::Conv;
    const ExperimentResult a = run_experiment(c);
    const ExperimentResult b = run_experiment(c);
    const bool same = trace_to_csv(a.trace) == trace_to_csv(b.trace) &&
                      report_document(a).dump() == report_document(b).dump();
    rep.observe(same ? 0.0 : 1.0, 0.0, to_string(algo));
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

CheckReport corrupted_trace(std::uint64_t seed) {
  CheckReport rep;
  rep.name = "corrupted_trace_rejected";
  ExperimentConfig c;
  c.iters = 10;
  c.dict_seed = seed;
  const std::string csv = trace_to_csv(run_experiment(c).trace);
  // Line 8 is the third data row: four metadata lines, then the header.
  std::istringstream lines(csv);
  std::string out, line;
  for (std::size_t i = 1; std::getline(lines, line); ++i) {
    if (i == 8) line.replace(line.find(','), 1, ",x");
    out += line + "\n";
  }
  std::size_t reported = 0;
  try {
    std::istringstream is(out);
    read_trace_csv(is);
  } catch (const ParseError& e) {
    reported = e.line();
  }
  rep.observe(std::abs(static_cast<double>(reported) - 8.0), 0.0, "parse error line");
  rep.samples = 1;
  rep.finalize();
  return rep;
}

} // namespace

VerifyResult verify_suite(std::uint64_t seed, VerifyProfile profile, std::ostream& log) {
  const Sizes n = sizes(profile);
  VerifyResult result;
  auto record = [&](CheckReport r) {
    const auto& metrics = r.metrics;
    log << '[' << (r.passed() ? "PASS" : "FAIL") << "] " << r.name << " samples=" << r.samples
        << " worst_margin="
        << (std::isfinite(r.worst_margin) ? format_double(r.worst_margin) : std::string("n/a"));
    for (const auto& [k, v] : metrics) log << ' ' << k << '=' << format_double(v);
    log << '\n';
    for (const auto& d : r.details) log << "    " << d << '\n';
    result.reports.push_back(std::move(r));
  };

  std::uint64_t stream = seed;
  auto next_seed = [&] { return stream = splitmix64(stream); };

  for (double p : {1.5, 2.0, 3.0, 4.0}) record(identities(p, n.identities, next_seed()));
  for (double p : {1.5, 2.0, 3.0}) {
    record(check_ll0(LpSpace(p, 8), n.ll0, next_seed()));
  }
  for (double p : {1.5, 2.0, 3.0}) record(orthogonality_battery(p, n.ll1, next_seed()));
  record(supremum_battery(n.supremum, next_seed()));
  for (auto& r : greedy_runs(n.runs, next_seed())) record(std::move(r));
  record(orthonormal_exactness(next_seed()));
  record(sequence_lemmas(n.sequences, next_seed()));
  record(determinism(next_seed()));
  record(corrupted_trace(next_seed()));

  std::size_t failed = 0;
  for (const auto& r : result.reports) failed += r.passed() ? 0 : 1;
  log << (failed ? "verify: " + std::to_string(failed) + " check(s) failed" : std::string("verify: all checks passed"))
      << '\n';
  return result;
}

} // namespace greedy
