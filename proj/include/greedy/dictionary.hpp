#pragma once

// Finite dictionaries, the dictionary norm ||F||_D and the selection oracles
// shared by the greedy algorithms.

#include "greedy/space.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace greedy {

enum class DictionaryKind { Gaussian, FourierFrame, Canonical };
enum class SelectionPolicy { Argmax, FirstQualifying };
enum class EpsMode { Circle, Plain };
enum class Membership { A1, Conv };

std::string to_string(DictionaryKind k);
std::string to_string(SelectionPolicy p);
std::string to_string(Membership m);
DictionaryKind parse_dictionary_kind(const std::string& s);
SelectionPolicy parse_policy(const std::string& s);
Membership parse_membership(const std::string& s);

/// No dictionary element meets an epsilon-selection threshold. This certifies
/// that the target is outside A_1(D) (circle mode) or conv(D) (plain mode).
class InfeasibleSelection : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ordered, nonempty list of elements of norm at most one.
class Dictionary {
public:
  Dictionary(LpSpace space, std::vector<ComplexVector> elements);

  const LpSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const ComplexVector& operator[](std::size_t i) const { return elements_.at(i); }
  const std::vector<ComplexVector>& elements() const noexcept { return elements_; }

private:
  LpSpace space_;
  std::vector<ComplexVector> elements_;
};

struct Selection {
  std::size_t index = 0;
  Complex phase{1.0, 0.0}; ///< unit multiplier applied to the selected element
  Complex value{0.0, 0.0}; ///< F(g_index) at selection time
};

struct DualNormResult {
  double value = 0.0;
  std::size_t argmax_index = 0;
};

struct TargetSpec {
  ComplexVector f;
  ComplexVector f_eps;
  double eps = 0.0;
  double A_eps = 1.0;
  Membership membership = Membership::A1;
  /// Generating coefficients of f_eps (A1) or of f (Conv).
  std::optional<std::vector<std::pair<std::size_t, Complex>>> true_coeffs;
};

Dictionary generate_dictionary(const LpSpace& space, std::size_t count, DictionaryKind kind,
                               std::uint64_t seed);

/// max_i |F(g_i)| with the smallest maximizing index.
DualNormResult dict_dual_norm(const DualFunctional& F, const Dictionary& dict);

/// Weak greedy step: an index with |F(g_i)| >= t * ||F||_D and the phase
/// conj(sign F(g_i)). When F vanishes on D, returns index 0 with phase 1.
Selection weak_select(const DualFunctional& F, const Dictionary& dict, double t,
                      SelectionPolicy policy);

/// Incremental-algorithm step: an element phi with
///   Re F(phi) - Re F(f) >= -eps_m
/// where phi ranges over the circle symmetrization of D (Circle, with the
/// optimal phase per element) or over D itself (Plain, phase fixed to 1).
/// Throws InfeasibleSelection when no element qualifies.
Selection eps_select(const DualFunctional& F, const Dictionary& dict,
                     std::span<const Complex> f, double eps_m, EpsMode mode,
                     SelectionPolicy policy);

/// Seeded synthetic target: A1 draws complex coefficients with sum |a_j| = 1,
/// Conv draws nonnegative weights summing to 1; f = f_eps + a perturbation of
/// norm eps.
TargetSpec make_target(const Dictionary& dict, Membership membership, std::size_t sparsity,
                       double eps, std::uint64_t seed);

// JSON snapshots; entries are written as [re, im] pairs.
nlohmann::json to_json(const Dictionary& dict);
Dictionary dictionary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TargetSpec& target);
TargetSpec target_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(std::span<const Complex> v);
ComplexVector vector_from_json(const nlohmann::json& j);

} // namespace greedy
