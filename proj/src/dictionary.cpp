#include "greedy/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace greedy {

namespace {

// Absorbs round-off when the selection threshold is met with equality,
// e.g. when f itself is a dictionary element.
constexpr double kSelectionSlack = 1e-12;
constexpr double kElementNormSlack = 1e-12;

} // namespace

std::string to_string(DictionaryKind k) {
  switch (k) {
  case DictionaryKind::Gaussian: return "GAUSSIAN";
  case DictionaryKind::FourierFrame: return "FOURIER_FRAME";
  case DictionaryKind::Canonical: return "CANONICAL";
  }
  return "?";
}

std::string to_string(SelectionPolicy p) {
  return p == SelectionPolicy::Argmax ? "ARGMAX" : "FIRST_QUALIFYING";
}

std::string to_string(Membership m) { return m == Membership::A1 ? "A1" : "CONV"; }

DictionaryKind parse_dictionary_kind(const std::string& s) {
  if (s == "GAUSSIAN") return DictionaryKind::Gaussian;
  if (s == "FOURIER_FRAME") return DictionaryKind::FourierFrame;
  if (s == "CANONICAL") return DictionaryKind::Canonical;
  throw std::invalid_argument("unknown dictionary kind '" + s + "'");
}

SelectionPolicy parse_policy(const std::string& s) {
  if (s == "ARGMAX") return SelectionPolicy::Argmax;
  if (s == "FIRST_QUALIFYING") return SelectionPolicy::FirstQualifying;
  throw std::invalid_argument("unknown selection policy '" + s + "'");
}

Membership parse_membership(const std::string& s) {
  if (s == "A1") return Membership::A1;
  if (s == "CONV") return Membership::Conv;
  throw std::invalid_argument("unknown membership '" + s + "'");
}

Dictionary::Dictionary(LpSpace space, std::vector<ComplexVector> elements)
    : space_(space), elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("Dictionary: no elements");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    space_.require_dim(elements_[i], "Dictionary element");
    const double n = lp_norm(space_, elements_[i]);
    if (n > 1.0 + kElementNormSlack) {
      throw std::invalid_argument("Dictionary: element " + std::to_string(i) +
                                  " has norm " + std::to_string(n) + " > 1");
    }
  }
}

Dictionary generate_dictionary(const LpSpace& space, std::size_t count, DictionaryKind kind,
                               std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("generate_dictionary: count must be >= 1");
  const std::size_t n = space.dim();
  std::vector<ComplexVector> elements;
  elements.reserve(count);

  switch (kind) {
  case DictionaryKind::Canonical:
    if (count != n) {
      throw std::invalid_argument("generate_dictionary: CANONICAL requires count == dim");
    }
    for (std::size_t i = 0; i < n; ++i) {
      ComplexVector e(n);
      e[i] = 1.0;
      elements.push_back(std::move(e));
    }
    break;
  case DictionaryKind::FourierFrame: {
    if (count < n) {
      throw std::invalid_argument("generate_dictionary: FOURIER_FRAME requires count >= dim");
    }
    // Rows of the count x dim oversampled DFT matrix; every entry has modulus
    // one, so each row has l_p norm dim^(1/p).
    const double inv_norm = std::pow(static_cast<double>(n), -1.0 / space.p());
    for (std::size_t j = 0; j < count; ++j) {
      ComplexVector row(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % count) /
                             static_cast<double>(count);
        row[k] = std::polar(inv_norm, angle);
      }
      elements.push_back(std::move(row));
    }
    break;
  }
  case DictionaryKind::Gaussian: {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (elements.size() < count) {
      ComplexVector g(n);
      for (auto& z : g) z = {gauss(rng), gauss(rng)};
      const double nrm = raw_lp_norm(space.p(), g);
      if (nrm == 0.0) continue;
      for (auto& z : g) z /= nrm;
      elements.push_back(std::move(g));
    }
    break;
  }
  }
  return Dictionary(space, std::move(elements));
}

DualNormResult dict_dual_norm(const DualFunctional& F, const Dictionary& dict) {
  DualNormResult best;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    const double v = std::abs(apply_functional(F, dict[i]));
    if (v > best.value) {
      best.value = v;
      best.argmax_index = i;
    }
  }
  return best;
}

Selection weak_select(const DualFunctional& F, const Dictionary& dict, double t,
                      SelectionPolicy policy) {
  if (!(t >= 0.0) || t > 1.0) throw std::invalid_argument("weak_select: t must lie in [0, 1]");

  std::vector<Complex> values(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) values[i] = apply_functional(F, dict[i]);
  const DualNormResult dn = dict_dual_norm(F, dict);

  Selection s;
  if (dn.value == 0.0) return s;

  s.index = dn.argmax_index;
  if (policy == SelectionPolicy::FirstQualifying) {
    const double threshold = t * dn.value;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::abs(values[i]) >= threshold) {
        s.index = i;
        break;
      }
    }
  }
  s.value = values[s.index];
  s.phase = std::conj(complex_sign(s.value));
  return s;
}

Selection eps_select(const DualFunctional& F, const Dictionary& dict,
                     std::span<const Complex> f, double eps_m, EpsMode mode,
                     SelectionPolicy policy) {
  if (!(eps_m >= 0.0)) throw std::invalid_argument("eps_select: eps_m must be >= 0");
  const double baseline = apply_functional(F, f).real();

  // Score of element i: Re F(phi) for the best admissible phi built from g_i.
  auto score = [&](Complex v) { return mode == EpsMode::Circle ? std::abs(v) : v.real(); };

  std::vector<Complex> values(dict.size());
  std::size_t best = 0;
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    values[i] = apply_functional(F, dict[i]);
    if (score(values[i]) > score(values[best])) best = i;
    if (!first && score(values[i]) - baseline >= -eps_m - kSelectionSlack) first = i;
  }
  if (!first) {
    throw InfeasibleSelection("eps_select: no element satisfies Re F(phi - f) >= -" +
                              std::to_string(eps_m) + " (best margin " +
                              std::to_string(score(values[best]) - baseline) + ")");
  }

  Selection s;
  s.index = policy == SelectionPolicy::Argmax ? best : *first;
  s.value = values[s.index];
  s.phase = mode == EpsMode::Circle ? std::conj(complex_sign(s.value)) : Complex{1.0, 0.0};
  return s;
}

TargetSpec make_target(const Dictionary& dict, Membership membership, std::size_t sparsity,
                       double eps, std::uint64_t seed) {
  if (sparsity < 1 || sparsity > dict.size()) {
    throw std::invalid_argument("make_target: sparsity must lie in [1, " +
                                std::to_string(dict.size()) + "]");
  }
  if (!(eps >= 0.0)) throw std::invalid_argument("make_target: eps must be >= 0");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(dict.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(sparsity);

  std::uniform_real_distribution<double> magnitude(0.2, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> weights(sparsity);
  for (auto& w : weights) w = magnitude(rng);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<std::pair<std::size_t, Complex>> coeffs;
  coeffs.reserve(sparsity);
  for (std::size_t k = 0; k < sparsity; ++k) {
    const double w = weights[k] / total;
    const Complex a = membership == Membership::A1 ? std::polar(w, angle(rng)) : Complex{w, 0.0};
    coeffs.emplace_back(order[k], a);
  }

  TargetSpec t;
  t.membership = membership;
  t.eps = eps;
  t.A_eps = 1.0;
  t.f_eps.assign(dict.space().dim(), Complex{});
  for (const auto& [idx, a] : coeffs) {
    for (std::size_t i = 0; i < t.f_eps.size(); ++i) t.f_eps[i] += a * dict[idx][i];
  }
  t.f = t.f_eps;
  if (eps > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector noise(t.f.size());
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (auto& z : noise) z = {gauss(rng), gauss(rng)};
      nrm = raw_lp_norm(dict.space().p(), noise);
    }
    for (std::size_t i = 0; i < t.f.size(); ++i) t.f[i] += noise[i] * (eps / nrm);
  }
  t.true_coeffs = std::move(coeffs);
  return t;
}

nlohmann::json vector_to_json(std::span<const Complex> v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Complex z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

ComplexVector vector_from_json(const nlohmann::json& j) {
  ComplexVector v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) {
      throw std::invalid_argument("complex entry must be a [re, im] pair");
    }
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

nlohmann::json to_json(const Dictionary& dict) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& g : dict.elements()) elements.push_back(vector_to_json(g));
  return {{"p", dict.space().p()}, {"dim", dict.space().dim()}, {"elements", elements}};
}

Dictionary dictionary_from_json(const nlohmann::json& j) {
  LpSpace space(j.at("p").get<double>(), j.at("dim").get<std::size_t>());
  std::vector<ComplexVector> elements;
  for (const auto& e : j.at("elements")) elements.push_back(vector_from_json(e));
  return Dictionary(space, std::move(elements));
}

nlohmann::json to_json(const TargetSpec& target) {
  nlohmann::json j = {{"f", vector_to_json(target.f)},
                      {"f_eps", vector_to_json(target.f_eps)},
                      {"eps", target.eps},
                      {"A_eps", target.A_eps},
                      {"membership", to_string(target.membership)},
                      {"true_coeffs", nullptr}};
  if (target.true_coeffs) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& [idx, a] : *target.true_coeffs) {
      c.push_back({idx, {a.real(), a.imag()}});
    }
    j["true_coeffs"] = c;
  }
  return j;
}

TargetSpec target_from_json(const nlohmann::json& j) {
  TargetSpec t;
  t.f = vector_from_json(j.at("f"));
  t.f_eps = vector_from_json(j.at("f_eps"));
  t.eps = j.at("eps").get<double>();
  t.A_eps = j.at("A_eps").get<double>();
  t.membership = parse_membership(j.at("membership").get<std::string>());
  if (j.contains("true_coeffs") && !j.at("true_coeffs").is_null()) {
    std::vector<std::pair<std::size_t, Complex>> c;
    for (const auto& e : j.at("true_coeffs")) {
      c.emplace_back(e.at(0).get<std::size_t>(),
                     Complex{e.at(1).at(0).get<double>(), e.at(1).at(1).get<double>()});
    }
    t.true_coeffs = std::move(c);
  }
  return t;
}

} // namespace greedy
