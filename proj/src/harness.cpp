#include "greedy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace greedy {

ConfigError::ConfigError(std::string field, const std::string& msg)
    : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string list_text(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += format_double(xs[i]);
  }
  return s;
}

template <class F>
auto parse_enum(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      {"space.p", [](C& c, const std::string& v) { c.p = to_double("space.p", v); },
       [](const C& c) { return format_double(c.p); }},
      {"space.dim", [](C& c, const std::string& v) { c.dim = to_uint("space.dim", v); },
       [](const C& c) { return std::to_string(c.dim); }},
      {"dictionary.kind",
       [](C& c, const std::string& v) {
         c.dict_kind = parse_enum("dictionary.kind", [&] { return parse_dictionary_kind(v); });
       },
       [](const C& c) { return to_string(c.dict_kind); }},
      {"dictionary.count",
       [](C& c, const std::string& v) { c.dict_count = to_uint("dictionary.count", v); },
       [](const C& c) { return std::to_string(c.dict_count); }},
      {"dictionary.seed",
       [](C& c, const std::string& v) { c.dict_seed = to_uint("dictionary.seed", v); },
       [](const C& c) { return std::to_string(c.dict_seed); }},
      {"target.membership",
       [](C& c, const std::string& v) {
         c.membership = parse_enum("target.membership", [&] { return parse_membership(v); });
       },
       [](const C& c) { return to_string(c.membership); }},
      {"target.sparsity",
       [](C& c, const std::string& v) { c.sparsity = to_uint("target.sparsity", v); },
       [](const C& c) { return std::to_string(c.sparsity); }},
      {"target.eps", [](C& c, const std::string& v) { c.eps = to_double("target.eps", v); },
       [](const C& c) { return format_double(c.eps); }},
      {"target.seed",
       [](C& c, const std::string& v) { c.target_seed = to_uint("target.seed", v); },
       [](const C& c) { return std::to_string(c.target_seed); }},
      {"algorithm.id",
       [](C& c, const std::string& v) {
         c.algorithm = parse_enum("algorithm.id", [&] { return parse_algorithm(v); });
       },
       [](const C& c) { return to_string(c.algorithm); }},
      {"algorithm.tau", [](C& c, const std::string& v) { c.tau = to_list("algorithm.tau", v); },
       [](const C& c) { return list_text(c.tau); }},
      {"algorithm.r",
       [](C& c, const std::string& v) {
         c.r = v == "default" ? std::vector<double>{} : to_list("algorithm.r", v);
       },
       [](const C& c) { return c.r.empty() ? std::string("default") : list_text(c.r); }},
      {"algorithm.K1", [](C& c, const std::string& v) { c.K1 = to_double("algorithm.K1", v); },
       [](const C& c) { return format_double(c.K1); }},
      {"algorithm.iters",
       [](C& c, const std::string& v) { c.iters = to_uint("algorithm.iters", v); },
       [](const C& c) { return std::to_string(c.iters); }},
      {"algorithm.policy",
       [](C& c, const std::string& v) {
         c.policy = parse_enum("algorithm.policy", [&] { return parse_policy(v); });
       },
       [](const C& c) { return to_string(c.policy); }},
      {"solver.grad_tol",
       [](C& c, const std::string& v) { c.solver.grad_tol = to_double("solver.grad_tol", v); },
       [](const C& c) { return format_double(c.solver.grad_tol); }},
      {"solver.max_iters",
       [](C& c, const std::string& v) {
         const auto n = to_uint("solver.max_iters", v);
         if (n > 100000000) throw ConfigError("solver.max_iters", "too large");
         c.solver.max_iters = static_cast<int>(n);
       },
       [](const C& c) { return std::to_string(c.solver.max_iters); }},
      {"solver.armijo_c",
       [](C& c, const std::string& v) { c.solver.armijo_c = to_double("solver.armijo_c", v); },
       [](const C& c) { return format_double(c.solver.armijo_c); }},
      {"solver.backtrack_factor",
       [](C& c, const std::string& v) {
         c.solver.backtrack_factor = to_double("solver.backtrack_factor", v);
       },
       [](const C& c) { return format_double(c.solver.backtrack_factor); }},
      {"check.slack", [](C& c, const std::string& v) { c.slack = to_double("check.slack", v); },
       [](const C& c) { return format_double(c.slack); }},
      {"check.fit_lo", [](C& c, const std::string& v) { c.fit_lo = to_uint("check.fit_lo", v); },
       [](const C& c) { return std::to_string(c.fit_lo); }},
      {"check.fit_hi", [](C& c, const std::string& v) { c.fit_hi = to_uint("check.fit_hi", v); },
       [](const C& c) { return std::to_string(c.fit_hi); }},
      {"output.trace_csv", [](C& c, const std::string& v) { c.trace_csv = v; },
       [](const C& c) { return c.trace_csv; }},
      {"output.trace_json", [](C& c, const std::string& v) { c.trace_json = v; },
       [](const C& c) { return c.trace_json; }},
      {"output.report_json", [](C& c, const std::string& v) { c.report_json = v; },
       [](const C& c) { return c.report_json; }},
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(key, "unknown configuration key");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void flatten(const nlohmann::json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  std::string value;
  if (j.is_string()) {
    value = j.get<std::string>();
  } else if (j.is_number_unsigned() || j.is_number_integer()) {
    value = j.dump();
  } else if (j.is_number()) {
    value = format_double(j.get<double>());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) value += ',';
      if (!j[i].is_number()) throw ConfigError(prefix, "list entries must be numbers");
      value += j[i].is_number_float() ? format_double(j[i].get<double>()) : j[i].dump();
    }
  } else {
    throw ConfigError(prefix, "unsupported JSON value " + j.dump());
  }
  out.emplace_back(prefix, value);
}

} // namespace

void ExperimentConfig::validate() const {
  if (!(p > 1.0 && p <= kMaxExponent)) {
    throw ConfigError("space.p", "must lie in (1, " + format_double(kMaxExponent) + "]");
  }
  if (dim < 1) throw ConfigError("space.dim", "must be >= 1");
  if (dict_count < 1) throw ConfigError("dictionary.count", "must be >= 1");
  if (dict_kind == DictionaryKind::Canonical && dict_count != dim) {
    throw ConfigError("dictionary.count", "CANONICAL requires count == space.dim");
  }
  if (dict_kind == DictionaryKind::FourierFrame && dict_count < dim) {
    throw ConfigError("dictionary.count", "FOURIER_FRAME requires count >= space.dim");
  }
  if (sparsity < 1 || sparsity > dict_count) {
    throw ConfigError("target.sparsity", "must lie in [1, dictionary.count]");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("target.eps", "must be >= 0");
  const bool incremental = algorithm == Algorithm::Iac || algorithm == Algorithm::Iacc;
  if (incremental && eps != 0.0) {
    throw ConfigError("target.eps", "IAC and IACC require exact targets (eps = 0)");
  }
  if (algorithm == Algorithm::Iacc && membership != Membership::Conv) {
    throw ConfigError("target.membership", "IACC requires CONV targets");
  }
  if (tau.size() == 1) {
    if (!(tau[0] > 0.0 && tau[0] <= 1.0)) {
      throw ConfigError("algorithm.tau", "constant t must lie in (0, 1]");
    }
  } else {
    for (double t : tau) {
      if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("algorithm.tau", "t_m must lie in [0, 1]");
    }
    if (!incremental && tau.size() < iters) {
      throw ConfigError("algorithm.tau", "needs at least algorithm.iters terms");
    }
  }
  for (double x : r) {
    if (!(x >= 0.0 && x < 1.0)) throw ConfigError("algorithm.r", "r_m must lie in [0, 1)");
  }
  if (algorithm == Algorithm::Gawr && r.size() > 1 && r.size() < iters) {
    throw ConfigError("algorithm.r", "needs at least algorithm.iters terms");
  }
  if (!(K1 > 0.0) || !std::isfinite(K1)) throw ConfigError("algorithm.K1", "must be > 0");
  if (iters < 1) throw ConfigError("algorithm.iters", "must be >= 1");
  if (!(solver.grad_tol > 0.0)) throw ConfigError("solver.grad_tol", "must be > 0");
  if (solver.max_iters < 1) throw ConfigError("solver.max_iters", "must be >= 1");
  if (!(solver.armijo_c > 0.0 && solver.armijo_c < 1.0)) {
    throw ConfigError("solver.armijo_c", "must lie in (0, 1)");
  }
  if (!(solver.backtrack_factor > 0.0 && solver.backtrack_factor < 1.0)) {
    throw ConfigError("solver.backtrack_factor", "must lie in (0, 1)");
  }
  if (!(slack >= 0.0)) throw ConfigError("check.slack", "must be >= 0");
  if (fit_lo < 2) throw ConfigError("check.fit_lo", "must be >= 2");
  if (fit_hi != 0 && fit_hi <= fit_lo) throw ConfigError("check.fit_hi", "must exceed fit_lo");
  for (const auto& [key, name] : {std::pair{"output.trace_csv", &trace_csv},
                                  std::pair{"output.trace_json", &trace_json},
                                  std::pair{"output.report_json", &report_json}}) {
    if (name->empty()) throw ConfigError(key, "must not be empty");
  }
}

WeaknessSequence ExperimentConfig::weakness() const {
  return tau.size() == 1 ? WeaknessSequence::constant(tau[0]) : WeaknessSequence::general(tau);
}

RelaxationSchedule ExperimentConfig::relaxation() const {
  if (r.empty()) return RelaxationSchedule::standard();
  if (r.size() == 1) return RelaxationSchedule::constant(r[0]);
  return RelaxationSchedule::custom(r);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  field(key).set(c, trim(value));
}

std::string get_config_value(const ExperimentConfig& c, const std::string& key) {
  return field(key).get(c);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

ExperimentConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config JSON must be an object");
  std::vector<std::pair<std::string, std::string>> flat;
  flatten(j, "", flat);
  ExperimentConfig c;
  for (const auto& [k, v] : flat) set_config_value(c, k, v);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<json>", e.what());
    }
    return parse_config_json(j);
  }
  return parse_config_text(text);
}

std::string config_to_text(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) j[f.key] = f.get(c);
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config_to_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

bool ExperimentResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
}

namespace {

double expected_exponent(Algorithm a, const SmoothnessParams& params) {
  switch (a) {
  case Algorithm::Gawr: return -1.0 + 1.0 / params.q;
  default: return -1.0 / params.p_dual;
  }
}

CheckReport rate_report(const ExperimentConfig& c, const GreedyTrace& trace,
                        const SmoothnessParams& params) {
  CheckReport rep;
  rep.name = "rate_fit";
  rep.status = CheckStatus::Diagnostic;
  const std::size_t hi = c.fit_hi == 0 ? trace.records.size() : c.fit_hi;
  rep.metrics.emplace_back("expected_exponent", expected_exponent(c.algorithm, params));
  try {
    const RateFit fit = fit_log_slope(trace, c.fit_lo, hi);
    rep.metrics.emplace_back("slope", fit.slope);
    rep.metrics.emplace_back("intercept", fit.intercept);
    rep.metrics.emplace_back("r_squared", fit.r_squared);
    rep.metrics.emplace_back("m_lo", static_cast<double>(fit.m_lo));
    rep.metrics.emplace_back("m_hi", static_cast<double>(fit.m_hi));
    rep.samples = fit.m_hi - fit.m_lo + 1;
    if (fit.shrunk) rep.details.push_back("window cut at a zero residual");
  } catch (const std::invalid_argument& e) {
    rep.details.push_back(e.what());
  }
  return rep;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  out.config = config;
  out.hash = config_hash(config);

  const LpSpace space(config.p, config.dim);
  const SmoothnessParams params = smoothness_params(space);
  const Dictionary dict =
      generate_dictionary(space, config.dict_count, config.dict_kind, config.dict_seed);
  const TargetSpec target =
      make_target(dict, config.membership, config.sparsity, config.eps, config.target_seed);
  const WeaknessSequence tau = config.weakness();

  switch (config.algorithm) {
  case Algorithm::Wgafr:
    out.trace = run_wgafr(dict, target, tau, config.iters, config.policy, config.solver);
    out.reports.push_back(check_ml1(space, out.trace, target.A_eps, target.eps, tau,
                                    default_lambda_grid(), config.slack));
    out.reports.push_back(
        check_mt2_bound(out.trace, params, target.A_eps, target.eps, tau, config.slack));
    out.reports.push_back(check_monotone(out.trace, config.slack));
    break;
  case Algorithm::Gawr: {
    out.trace = run_gawr(dict, target, tau, config.relaxation(), config.iters, config.policy,
                         config.solver);
    if (tau.is_constant()) {
      out.reports.push_back(check_ml3(space, out.trace, target.A_eps, target.eps, tau.at(1),
                                      config.relaxation(), config.slack));
    } else {
      CheckReport rep;
      rep.name = "ml3_recursion";
      rep.status = CheckStatus::NotApplicable;
      rep.details.push_back("requires a constant weakness parameter");
      out.reports.push_back(rep);
    }
    break;
  }
  case Algorithm::Iac:
  case Algorithm::Iacc:
    out.trace = config.algorithm == Algorithm::Iac
                    ? run_iac(dict, target, config.K1, config.iters, config.policy)
                    : run_iacc(dict, target, config.K1, config.iters, config.policy);
    out.reports.push_back(check_triviality_bound(out.trace));
    out.reports.push_back(check_barycentric(dict, out.trace));
    break;
  }
  out.trace.config_hash = out.hash;
  out.reports.push_back(rate_report(config, out.trace, params));
  return out;
}

nlohmann::json report_document(const ExperimentResult& result) {
  const auto& recs = result.trace.records;
  return {{"config_hash", result.hash},
          {"config", config_to_json(result.config)},
          {"algorithm", to_string(result.trace.algorithm)},
          {"stop_reason", result.trace.stop_reason},
          {"iterations", recs.size()},
          {"final_residual", recs.empty() ? result.trace.initial_norm : recs.back().residual_norm},
          {"passed", result.passed()},
          {"checks", reports_to_json(result.reports)}};
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / result.config.trace_csv, trace_to_csv(result.trace));
  write_file(out_dir / result.config.trace_json,
             trace_to_json(result.trace, config_to_json(result.config)).dump(2) + "\n");
  write_file(out_dir / result.config.report_json, report_document(result).dump(2) + "\n");
}

LoadedRun load_run(const std::filesystem::path& trace_csv,
                   const std::filesystem::path& report_json) {
  LoadedRun run;
  {
    std::ifstream in(trace_csv);
    if (!in) throw std::runtime_error("cannot open " + trace_csv.string());
    run.trace = read_trace_csv(in);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(report_json));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, report_json.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("config_hash") || !doc.contains("checks")) {
    throw ParseError(0, report_json.string() + ": not a report document");
  }
  run.hash = doc.at("config_hash").get<std::string>();
  if (run.hash != run.trace.config_hash) {
    throw HashMismatch("config hash mismatch: trace has '" + run.trace.config_hash +
                       "', report has '" + run.hash + "'");
  }
  for (const auto& r : doc.at("checks")) run.reports.push_back(report_from_json(r));
  return run;
}

SweepSpec parse_sweep_text(const std::string& text) {
  SweepSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("base.", 0) == 0) {
      set_config_value(spec.base, key.substr(5), value);
    } else if (key.rfind("axis.", 0) == 0) {
      const std::string k = key.substr(5);
      field(k);
      if (k == "algorithm.tau" || k == "algorithm.r") {
        throw ConfigError(key, "list-valued keys cannot be swept");
      }
      auto values = split_list(value);
      if (values.empty() || std::any_of(values.begin(), values.end(),
                                        [](const auto& v) { return v.empty(); })) {
        throw ConfigError(key, "needs a comma-separated list of values");
      }
      for (const auto& [existing, vs] : spec.axes) {
        if (existing == k) throw ConfigError(key, "axis given twice");
      }
      spec.axes.emplace_back(k, std::move(values));
    } else if (key == "replicates") {
      spec.replicates = to_uint(key, value);
      if (spec.replicates < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "seed") {
      spec.seed = to_uint(key, value);
    } else {
      throw ConfigError(key, "unknown sweep key (expected base.*, axis.*, replicates, seed)");
    }
  }
  // Every axis value must produce a settable config on its own.
  for (const auto& [k, vs] : spec.axes) {
    for (const auto& v : vs) {
      ExperimentConfig probe = spec.base;
      set_config_value(probe, k, v);
    }
  }
  return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return parse_sweep_text(read_file(path)); }

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) {
    return !r.error.empty() || r.checks_passed != r.checks_total;
  }));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                      unsigned threads) {
  SweepResult result;
  std::size_t n_cells = 1;
  for (const auto& [k, vs] : spec.axes) {
    result.axis_keys.push_back(k);
    n_cells *= vs.size();
  }
  const bool seeds_swept =
      std::any_of(spec.axes.begin(), spec.axes.end(), [](const auto& a) {
        return a.first == "dictionary.seed" || a.first == "target.seed";
      });

  // Row i = cell * replicates + replicate; the first axis varies slowest.
  result.rows.resize(n_cells * spec.replicates);
  std::vector<ExperimentConfig> configs(result.rows.size(), spec.base);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    std::vector<std::string> values(spec.axes.size());
    std::size_t rem = cell;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& vs = spec.axes[a].second;
      values[a] = vs[rem % vs.size()];
      rem /= vs.size();
    }
    for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
      const std::size_t i = cell * spec.replicates + rep;
      SweepRow& row = result.rows[i];
      row.cell = cell;
      row.replicate = rep;
      row.axis_values = values;
      ExperimentConfig& c = configs[i];
      const std::uint64_t s = splitmix64(spec.seed ^ splitmix64(i));
      if (!seeds_swept) {
        c.dict_seed = s;
        c.target_seed = splitmix64(s);
      }
      try {
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
          set_config_value(c, spec.axes[a].first, values[a]);
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.dict_seed = c.dict_seed;
      row.target_seed = c.target_seed;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      SweepRow& row = result.rows[i];
      if (!row.error.empty()) continue;
      try {
        const ExperimentResult res = run_experiment(configs[i]);
        row.hash = res.hash;
        row.iterations = res.trace.records.size();
        row.final_residual = res.trace.records.empty() ? res.trace.initial_norm
                                                       : res.trace.records.back().residual_norm;
        for (const auto& rep : res.reports) {
          if (rep.name == "rate_fit") {
            const double s = rep.metric("slope");
            if (!std::isnan(s)) row.slope = s;
          }
          if (rep.status == CheckStatus::Pass || rep.status == CheckStatus::Fail) {
            ++row.checks_total;
            if (rep.passed()) ++row.checks_passed;
          }
        }
        if (!out_dir.empty()) {
          write_artifacts(res, out_dir / ("cell" + std::to_string(row.cell) + "_rep" +
                                          std::to_string(row.replicate)));
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, result.rows.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "summary.csv", sweep_summary_csv(result));
  }
  return result;
}

std::string sweep_summary_csv(const SweepResult& result) {
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  std::ostringstream os;
  os << "cell,replicate";
  for (const auto& k : result.axis_keys) os << ',' << k;
  os << ",dict_seed,target_seed,config_hash,iterations,final_residual,slope,checks_passed,"
        "checks_total,pass_rate,error\n";
  for (const auto& r : result.rows) {
    os << r.cell << ',' << r.replicate;
    for (const auto& v : r.axis_values) os << ',' << clean(v);
    os << ',' << r.dict_seed << ',' << r.target_seed << ',' << r.hash << ',';
    if (r.error.empty()) {
      os << r.iterations << ',' << format_double(r.final_residual) << ','
         << (r.slope ? format_double(*r.slope) : std::string()) << ',' << r.checks_passed << ','
         << r.checks_total << ','
         << (r.checks_total ? format_double(static_cast<double>(r.checks_passed) /
                                            static_cast<double>(r.checks_total))
                            : std::string())
         << ",\n";
    } else {
      os << ",,,,,," << clean(r.error) << '\n';
    }
  }
  return os.str();
}

VerifyProfile parse_profile(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "QUICK") return VerifyProfile::Quick;
  if (u == "FULL") return VerifyProfile::Full;
  throw std::invalid_argument("unknown verify profile '" + s + "'");
}

bool VerifyResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
}

} // namespace greedy
