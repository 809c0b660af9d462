#include "greedy/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace greedy {

std::string to_string(Algorithm a) {
  switch (a) {
  case Algorithm::Wgafr: return "WGAFR";
  case Algorithm::Gawr: return "GAWR";
  case Algorithm::Iac: return "IAC";
  case Algorithm::Iacc: return "IACC";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "WGAFR") return Algorithm::Wgafr;
  if (s == "GAWR") return Algorithm::Gawr;
  if (s == "IAC") return Algorithm::Iac;
  if (s == "IACC") return Algorithm::Iacc;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

WeaknessSequence::WeaknessSequence(bool constant, std::vector<double> values)
    : constant_(constant), values_(std::move(values)) {}

WeaknessSequence WeaknessSequence::constant(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::invalid_argument("weakness: constant t must lie in (0, 1]");
  }
  return WeaknessSequence(true, {t});
}

WeaknessSequence WeaknessSequence::general(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("weakness: empty sequence");
  for (double t : values) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("weakness: t_m must lie in [0, 1]");
  }
  return WeaknessSequence(false, std::move(values));
}

double WeaknessSequence::at(std::size_t m) const {
  if (m == 0) throw std::out_of_range("weakness: index starts at 1");
  if (constant_) return values_.front();
  if (m > values_.size()) {
    throw std::out_of_range("weakness: sequence has only " + std::to_string(values_.size()) +
                            " terms, step " + std::to_string(m) + " requested");
  }
  return values_[m - 1];
}

RelaxationSchedule::RelaxationSchedule(Kind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {}

RelaxationSchedule RelaxationSchedule::standard() { return {Kind::Standard, {}}; }

RelaxationSchedule RelaxationSchedule::constant(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("relaxation: r must lie in [0, 1)");
  return {Kind::Constant, {r}};
}

RelaxationSchedule RelaxationSchedule::custom(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("relaxation: empty schedule");
  for (double r : values) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("relaxation: r_m must lie in [0, 1)");
  }
  return {Kind::Custom, std::move(values)};
}

double RelaxationSchedule::at(std::size_t m) const {
  if (m == 0) throw std::out_of_range("relaxation: index starts at 1");
  switch (kind_) {
  case Kind::Standard: return 2.0 / (static_cast<double>(m) + 2.0);
  case Kind::Constant: return values_.front();
  case Kind::Custom:
    if (m > values_.size()) {
      throw std::out_of_range("relaxation: schedule has only " + std::to_string(values_.size()) +
                              " terms");
    }
    return values_[m - 1];
  }
  return 0.0;
}

double epsilon_schedule(double K1, const SmoothnessParams& params, std::size_t n) {
  if (n == 0) throw std::invalid_argument("epsilon_schedule: n starts at 1");
  return K1 * std::pow(params.gamma, 1.0 / params.q) *
         std::pow(static_cast<double>(n), -1.0 / params.p_dual);
}

std::vector<double> GreedyTrace::residual_norms() const {
  std::vector<double> out;
  out.reserve(records.size() + 1);
  out.push_back(initial_norm);
  for (const auto& r : records) out.push_back(r.residual_norm);
  return out;
}

namespace {

void require_target(const Dictionary& dict, const TargetSpec& target, const char* who) {
  dict.space().require_dim(target.f, who);
  if (lp_norm(dict.space(), target.f) == 0.0) {
    throw std::invalid_argument(std::string(who) + ": target f must be nonzero");
  }
}

GreedyTrace start_trace(Algorithm a, const Dictionary& dict, const TargetSpec& target) {
  GreedyTrace trace;
  trace.algorithm = a;
  trace.initial_norm = lp_norm(dict.space(), target.f);
  trace.stop_reason = kStopIterationsReason;
  return trace;
}

// Shared loop of WGAFR and GAWR: weak selection followed by an inner solve
// that returns (G_m, record fields).
template <typename Update>
GreedyTrace run_weak_greedy(Algorithm a, const Dictionary& dict, const TargetSpec& target,
                            const WeaknessSequence& tau, std::size_t iters,
                            SelectionPolicy policy, Update&& update) {
  const LpSpace& space = dict.space();
  GreedyTrace trace = start_trace(a, dict, target);
  ComplexVector G(space.dim());
  ComplexVector residual = target.f;

  for (std::size_t m = 1; m <= iters; ++m) {
    const DualFunctional F = norming_functional(space, residual);
    const DualNormResult dn = dict_dual_norm(F, dict);
    if (dn.value == 0.0) {
      trace.stop_reason = kStopStagnationReason;
      break;
    }
    const Selection sel = weak_select(F, dict, tau.at(m), policy);

    TraceRecord rec;
    rec.m = m;
    rec.selected_index = sel.index;
    rec.phase = sel.phase;
    rec.dual_norm = dn.value;
    G = update(m, G, dict[sel.index], rec);
    residual = sub(target.f, G);
    rec.residual_norm = lp_norm(space, residual);
    trace.records.push_back(rec);
    trace.approximants.push_back(G);
    if (rec.residual_norm <= kStopResidual) {
      trace.stop_reason = kStopResidualReason;
      break;
    }
  }
  return trace;
}

// Shared loop of IAc and IAcc.
GreedyTrace run_incremental(Algorithm a, const Dictionary& dict, const TargetSpec& target,
                            double K1, std::size_t iters, SelectionPolicy policy, EpsMode mode) {
  const LpSpace& space = dict.space();
  if (!(K1 > 0.0)) throw std::invalid_argument("incremental algorithm: K1 must be > 0");
  if (target.eps != 0.0) {
    throw std::invalid_argument("incremental algorithm: target must have eps = 0");
  }
  const EpsilonSchedule schedule{K1, smoothness_params(space)};

  GreedyTrace trace = start_trace(a, dict, target);
  ComplexVector G(space.dim());
  ComplexVector residual = target.f;
  // Barycentric coefficients: G_m = sum_i coeff_i g_i.
  std::map<std::size_t, Complex> coeffs;

  for (std::size_t m = 1; m <= iters; ++m) {
    const double md = static_cast<double>(m);
    const DualFunctional F = norming_functional(space, residual);
    const DualNormResult dn = dict_dual_norm(F, dict);
    const double eps_m = schedule.at(m);
    const Selection sel = eps_select(F, dict, target.f, eps_m, mode, policy);

    // (1 - 1/m) G_{m-1} + nu_m phi_m / m; the factor vanishes at m = 1.
    const ComplexVector& phi = dict[sel.index];
    for (std::size_t i = 0; i < G.size(); ++i) {
      G[i] = (1.0 - 1.0 / md) * G[i] + sel.phase * phi[i] / md;
    }
    for (auto& [idx, c] : coeffs) c *= (1.0 - 1.0 / md);
    coeffs[sel.index] += sel.phase / md;

    ComplexVector rebuilt(space.dim());
    for (const auto& [idx, c] : coeffs) {
      for (std::size_t i = 0; i < rebuilt.size(); ++i) rebuilt[i] += c * dict[idx][i];
    }
    double drift = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) drift = std::max(drift, std::abs(G[i] - rebuilt[i]));
    if (drift > kBarycentricTolerance) {
      throw std::logic_error("incremental algorithm: barycentric representation drifted by " +
                             std::to_string(drift) + " at step " + std::to_string(m));
    }

    TraceRecord rec;
    rec.m = m;
    rec.selected_index = sel.index;
    rec.phase = sel.phase;
    rec.lambda = sel.phase / md;
    rec.w_or_r = 1.0 / md;
    rec.dual_norm = dn.value;
    rec.eps_m = eps_m;
    residual = sub(target.f, G);
    rec.residual_norm = lp_norm(space, residual);
    trace.records.push_back(rec);
    trace.approximants.push_back(G);
    if (rec.residual_norm <= kStopResidual) {
      trace.stop_reason = kStopResidualReason;
      break;
    }
  }
  return trace;
}

} // namespace

GreedyTrace run_wgafr(const Dictionary& dict, const TargetSpec& target,
                      const WeaknessSequence& tau, std::size_t iters, SelectionPolicy policy,
                      const SolverConfig& cfg) {
  if (iters < 1) throw std::invalid_argument("run_wgafr: iters must be >= 1");
  require_target(dict, target, "run_wgafr");
  const LpSpace& space = dict.space();
  return run_weak_greedy(
      Algorithm::Wgafr, dict, target, tau, iters, policy,
      [&](std::size_t, const ComplexVector& G, const ComplexVector& phi, TraceRecord& rec) {
        const SolveResult sol = minimize_free_relax(space, target.f, G, phi, cfg);
        const Complex w = sol.minimizer[0];
        const Complex lambda = sol.minimizer[1];
        rec.w_or_r = w;
        rec.lambda = lambda;
        rec.solver_converged = sol.converged;
        ComplexVector next(G.size());
        for (std::size_t i = 0; i < G.size(); ++i) next[i] = (1.0 - w) * G[i] + lambda * phi[i];
        return next;
      });
}

GreedyTrace run_gawr(const Dictionary& dict, const TargetSpec& target,
                     const WeaknessSequence& tau, const RelaxationSchedule& r, std::size_t iters,
                     SelectionPolicy policy, const SolverConfig& cfg) {
  if (iters < 1) throw std::invalid_argument("run_gawr: iters must be >= 1");
  require_target(dict, target, "run_gawr");
  const LpSpace& space = dict.space();
  return run_weak_greedy(
      Algorithm::Gawr, dict, target, tau, iters, policy,
      [&](std::size_t m, const ComplexVector& G, const ComplexVector& phi, TraceRecord& rec) {
        const double r_m = r.at(m);
        const ComplexVector shrunk = scale(1.0 - r_m, G);
        const SolveResult sol = minimize_over_line(space, sub(target.f, shrunk), phi, cfg);
        const Complex lambda = sol.minimizer[0];
        rec.w_or_r = r_m;
        rec.lambda = lambda;
        rec.solver_converged = sol.converged;
        return axpy(shrunk, lambda, phi);
      });
}

GreedyTrace run_iac(const Dictionary& dict, const TargetSpec& target, double K1,
                    std::size_t iters, SelectionPolicy policy) {
  if (iters < 1) throw std::invalid_argument("run_iac: iters must be >= 1");
  require_target(dict, target, "run_iac");
  return run_incremental(Algorithm::Iac, dict, target, K1, iters, policy, EpsMode::Circle);
}

GreedyTrace run_iacc(const Dictionary& dict, const TargetSpec& target, double K1,
                     std::size_t iters, SelectionPolicy policy) {
  if (iters < 1) throw std::invalid_argument("run_iacc: iters must be >= 1");
  require_target(dict, target, "run_iacc");
  if (target.membership != Membership::Conv) {
    throw std::invalid_argument("run_iacc: target membership must be CONV");
  }
  return run_incremental(Algorithm::Iacc, dict, target, K1, iters, policy, EpsMode::Plain);
}

ComplexVector barycentric_reconstruction(const Dictionary& dict, const GreedyTrace& trace,
                                         std::size_t m) {
  if (m == 0 || m > trace.records.size()) {
    throw std::out_of_range("barycentric_reconstruction: step out of range");
  }
  ComplexVector G(dict.space().dim());
  for (std::size_t j = 0; j < m; ++j) {
    const TraceRecord& rec = trace.records[j];
    const ComplexVector& g = dict[rec.selected_index];
    for (std::size_t i = 0; i < G.size(); ++i) G[i] += rec.phase * g[i];
  }
  for (auto& z : G) z /= static_cast<double>(m);
  return G;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const GreedyTrace& trace) {
  const std::string algo = to_string(trace.algorithm);
  os << "# config_hash=" << trace.config_hash << '\n'
     << "# algorithm=" << algo << '\n'
     << "# initial_norm=" << format_double(trace.initial_norm) << '\n'
     << "# stop_reason=" << trace.stop_reason << '\n'
     << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.m << ',' << algo << ',' << r.selected_index << ',' << format_double(r.phase.real())
       << ',' << format_double(r.phase.imag()) << ',' << format_double(r.lambda.real()) << ','
       << format_double(r.lambda.imag()) << ',' << format_double(r.w_or_r.real()) << ','
       << format_double(r.w_or_r.imag()) << ',' << format_double(r.residual_norm) << ','
       << format_double(r.dual_norm) << ',' << format_double(r.eps_m) << ','
       << (r.solver_converged ? 1 : 0) << '\n';
  }
}

std::string trace_to_csv(const GreedyTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

ParseError::ParseError(std::size_t line, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

double parse_number(const std::string& s, std::size_t line, const char* column) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("column ") + column + ": not a number: '" + s + "'");
  }
  if (used != s.size()) {
    throw ParseError(line, std::string("column ") + column + ": trailing characters in '" + s + "'");
  }
  return v;
}

std::size_t parse_index(const std::string& s, std::size_t line, const char* column) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(line, std::string("column ") + column + ": not a nonnegative integer: '" +
                               s + "'");
  }
  return static_cast<std::size_t>(std::stoull(s));
}

} // namespace

GreedyTrace read_trace_csv(std::istream& is) {
  GreedyTrace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  bool algo_seen = false;

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw ParseError(lineno, "comment after the header row");
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "malformed metadata line");
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "config_hash") {
        trace.config_hash = value;
      } else if (key == "algorithm") {
        try {
          trace.algorithm = parse_algorithm(value);
        } catch (const std::invalid_argument& e) {
          throw ParseError(lineno, e.what());
        }
        algo_seen = true;
      } else if (key == "initial_norm") {
        trace.initial_norm = parse_number(value, lineno, "initial_norm");
      } else if (key == "stop_reason") {
        trace.stop_reason = value;
      } else {
        throw ParseError(lineno, "unknown metadata key '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      if (line != kTraceCsvHeader) throw ParseError(lineno, "unexpected header row");
      header_seen = true;
      continue;
    }

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 13) {
      throw ParseError(lineno, "expected 13 columns, found " + std::to_string(cells.size()));
    }
    TraceRecord r;
    r.m = parse_index(cells[0], lineno, "m");
    if (algo_seen && cells[1] != to_string(trace.algorithm)) {
      throw ParseError(lineno, "algorithm column '" + cells[1] + "' disagrees with metadata");
    }
    r.selected_index = parse_index(cells[2], lineno, "selected_index");
    r.phase = {parse_number(cells[3], lineno, "phase_re"), parse_number(cells[4], lineno, "phase_im")};
    r.lambda = {parse_number(cells[5], lineno, "lambda_re"),
                parse_number(cells[6], lineno, "lambda_im")};
    r.w_or_r = {parse_number(cells[7], lineno, "w_or_r_re"),
                parse_number(cells[8], lineno, "w_or_r_im")};
    r.residual_norm = parse_number(cells[9], lineno, "residual_norm");
    r.dual_norm = parse_number(cells[10], lineno, "dual_norm");
    r.eps_m = parse_number(cells[11], lineno, "eps_m");
    if (cells[12] != "0" && cells[12] != "1") {
      throw ParseError(lineno, "column solver_converged: expected 0 or 1");
    }
    r.solver_converged = cells[12] == "1";
    const std::size_t expected = trace.records.size() + 1;
    if (r.m != expected) {
      throw ParseError(lineno, "m must increase by one from 1; expected " +
                                   std::to_string(expected) + ", found " + std::to_string(r.m));
    }
    if (!(r.residual_norm >= 0.0)) throw ParseError(lineno, "negative residual_norm");
    trace.records.push_back(r);
  }
  if (!header_seen) throw ParseError(lineno + 1, "missing header row");
  return trace;
}

nlohmann::json trace_to_json(const GreedyTrace& trace, const nlohmann::json& config) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"m", r.m},
                       {"selected_index", r.selected_index},
                       {"phase", {r.phase.real(), r.phase.imag()}},
                       {"lambda", {r.lambda.real(), r.lambda.imag()}},
                       {"w_or_r", {r.w_or_r.real(), r.w_or_r.imag()}},
                       {"residual_norm", r.residual_norm},
                       {"dual_norm", r.dual_norm},
                       {"eps_m", r.eps_m},
                       {"solver_converged", r.solver_converged}});
  }
  return {{"config_hash", trace.config_hash},
          {"algorithm", to_string(trace.algorithm)},
          {"config", config},
          {"initial_norm", trace.initial_norm},
          {"stop_reason", trace.stop_reason},
          {"records", records}};
}

} // namespace greedy
