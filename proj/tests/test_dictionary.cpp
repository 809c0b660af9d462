#include "greedy/dictionary.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace greedy;
using doctest::Approx;

namespace {

ComplexVector vec(std::initializer_list<Complex> xs) { return ComplexVector(xs); }

} // namespace

TEST_CASE("canonical dictionary") {
  const LpSpace s(2, 3);
  const Dictionary d = generate_dictionary(s, 3, DictionaryKind::Canonical, 0);
  REQUIRE(d.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(d[i][j] == Complex(i == j ? 1.0 : 0.0, 0.0));
    CHECK(lp_norm(s, d[i]) == 1.0);
  }
  CHECK_THROWS_AS(generate_dictionary(s, 4, DictionaryKind::Canonical, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_dictionary(s, 0, DictionaryKind::Gaussian, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_dictionary(s, 2, DictionaryKind::FourierFrame, 0),
                  std::invalid_argument);
}

TEST_CASE("gaussian dictionary is deterministic in the seed") {
  const LpSpace s(2, 8);
  const Dictionary a = generate_dictionary(s, 32, DictionaryKind::Gaussian, 7);
  const Dictionary b = generate_dictionary(s, 32, DictionaryKind::Gaussian, 7);
  const Dictionary c = generate_dictionary(s, 32, DictionaryKind::Gaussian, 8);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_json(a).dump() != to_json(c).dump());
}

TEST_CASE("element norms stay within 1 + 1e-12") {
  const LpSpace s(3, 6);
  for (auto kind : {DictionaryKind::Gaussian, DictionaryKind::FourierFrame}) {
    const Dictionary d = generate_dictionary(s, 20, kind, 3);
    for (const auto& g : d.elements()) CHECK(lp_norm(s, g) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(Dictionary(LpSpace(2, 2), {vec({1.0, 1.0})}), std::invalid_argument);
  CHECK_THROWS_AS(Dictionary(LpSpace(2, 2), {}), std::invalid_argument);
  CHECK_THROWS_AS(Dictionary(LpSpace(2, 2), {vec({1.0})}), DimensionMismatch);
}

TEST_CASE("fourier frame rows have unit-modulus entries up to scale") {
  const LpSpace s(1.5, 4);
  const Dictionary d = generate_dictionary(s, 6, DictionaryKind::FourierFrame, 0);
  const double scale = std::pow(4.0, -1.0 / 1.5);
  for (const auto& g : d.elements()) {
    for (auto z : g) CHECK(std::abs(z) == Approx(scale));
    CHECK(lp_norm(s, g) == Approx(1.0).epsilon(1e-14));
  }
  CHECK(std::abs(d[1][1] - std::polar(scale, 2.0 * std::numbers::pi / 6.0)) < 1e-14);
}

TEST_CASE("dictionary dual norm") {
  const LpSpace s(2, 3);
  const Dictionary d = generate_dictionary(s, 3, DictionaryKind::Canonical, 0);
  auto r = dict_dual_norm(norming_functional(s, vec({1.0, 0.0, 0.0})), d);
  CHECK(r.value == Approx(1.0));
  CHECK(r.argmax_index == 0);

  r = dict_dual_norm(norming_functional(s, vec({1.0, 0.5, 0.0})), d);
  CHECK(r.value == Approx(0.894427190999915879).epsilon(1e-15));
  CHECK(r.argmax_index == 0);

  r = dict_dual_norm(DualFunctional{{0.0, 0.0, 0.0}}, d);
  CHECK(r.value == 0.0);
  CHECK(r.argmax_index == 0);

  // ties go to the smallest index
  r = dict_dual_norm(norming_functional(s, vec({0.0, 1.0, 1.0})), d);
  CHECK(r.argmax_index == 1);
}

TEST_CASE("weak selection") {
  const LpSpace s(2, 2);
  const Dictionary d = generate_dictionary(s, 2, DictionaryKind::Canonical, 0);
  const DualFunctional F = norming_functional(s, vec({1.0, 0.5}));

  Selection sel = weak_select(F, d, 1.0, SelectionPolicy::Argmax);
  CHECK(sel.index == 0);
  CHECK(std::abs(sel.phase - Complex{1, 0}) < 1e-15);

  sel = weak_select(F, d, 0.4, SelectionPolicy::FirstQualifying);
  CHECK(sel.index == 0);

  // First qualifying differs from argmax once the larger value sits later.
  const DualFunctional G = norming_functional(s, vec({0.5, 1.0}));
  CHECK(weak_select(G, d, 0.4, SelectionPolicy::FirstQualifying).index == 0);
  CHECK(weak_select(G, d, 0.6, SelectionPolicy::FirstQualifying).index == 1);
  CHECK(weak_select(G, d, 0.4, SelectionPolicy::Argmax).index == 1);

  const DualFunctional neg{{-2.0, 0.0}};
  sel = weak_select(neg, d, 1.0, SelectionPolicy::Argmax);
  CHECK(sel.phase == Complex{-1, 0});
  CHECK(std::abs(sel.phase * sel.value - Complex{2, 0}) < 1e-15);

  sel = weak_select(DualFunctional{{0.0, 0.0}}, d, 1.0, SelectionPolicy::Argmax);
  CHECK(sel.index == 0);
  CHECK(sel.phase == Complex{1, 0});
  CHECK(sel.value == Complex{0, 0});

  CHECK_THROWS_AS(weak_select(F, d, 1.5, SelectionPolicy::Argmax), std::invalid_argument);
  CHECK_THROWS_AS(weak_select(F, d, -0.1, SelectionPolicy::Argmax), std::invalid_argument);
}

TEST_CASE("argmax selection and phase contract on random functionals") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const LpSpace s(3, 10);
  const Dictionary d = generate_dictionary(s, 40, DictionaryKind::Gaussian, 5);
  for (int k = 0; k < 200; ++k) {
    ComplexVector h(10);
    for (auto& z : h) z = {g(rng), g(rng)};
    const DualFunctional F = norming_functional(s, h);
    const Selection sel = weak_select(F, d, 1.0, SelectionPolicy::Argmax);
    CHECK(sel.index == dict_dual_norm(F, d).argmax_index);
    CHECK(std::abs(std::abs(sel.phase) - 1.0) < 1e-12);
    const Complex aligned = sel.phase * sel.value;
    CHECK(std::abs(aligned.imag()) < 1e-12);
    CHECK(aligned.real() == Approx(std::abs(sel.value)).epsilon(1e-12));
    const Selection weak = weak_select(F, d, 0.3, SelectionPolicy::FirstQualifying);
    CHECK(std::abs(weak.value) >= 0.3 * dict_dual_norm(F, d).value);
  }
}

TEST_CASE("epsilon selection") {
  const LpSpace s(2, 2);
  const Dictionary d = generate_dictionary(s, 2, DictionaryKind::Canonical, 0);

  SUBCASE("target is a dictionary element") {
    const ComplexVector f = scale(Complex{0, 1}, d[0]);
    const DualFunctional F = norming_functional(s, f);
    const Selection sel = eps_select(F, d, f, 0.0, EpsMode::Circle, SelectionPolicy::Argmax);
    CHECK(sel.index == 0);
    CHECK(std::abs(sel.phase * sel.value - Complex{1, 0}) < 1e-15);
  }
  SUBCASE("tie between both coordinates") {
    const ComplexVector f = vec({0.5, 0.5});
    const DualFunctional F = norming_functional(s, f);
    // Re F(e_1 - f) = (0.5 - 0.5) / |f| = 0
    CHECK(apply_functional(F, sub(d[0], f)).real() == Approx(0.0));
    const Selection sel = eps_select(F, d, f, 0.0, EpsMode::Plain, SelectionPolicy::Argmax);
    CHECK(sel.index == 0);
    CHECK(sel.phase == Complex{1, 0});
    CHECK(eps_select(F, d, f, 0.0, EpsMode::Plain, SelectionPolicy::FirstQualifying).index == 0);
  }
  SUBCASE("target outside the hull") {
    const ComplexVector f = vec({2.0, 0.0});
    const DualFunctional F = norming_functional(s, f);
    CHECK_THROWS_AS(eps_select(F, d, f, 0.0, EpsMode::Plain, SelectionPolicy::Argmax),
                    InfeasibleSelection);
    CHECK_THROWS_AS(eps_select(F, d, f, 0.5, EpsMode::Circle, SelectionPolicy::Argmax),
                    InfeasibleSelection);
    // a loose enough tolerance admits e_1
    CHECK(eps_select(F, d, f, 1.0, EpsMode::Circle, SelectionPolicy::Argmax).index == 0);
  }
  SUBCASE("plain mode ignores phase") {
    const ComplexVector f = vec({-0.5, 0.0});
    const DualFunctional F = norming_functional(s, f);
    // Re F(e_1) = -1 and Re F(e_2) = 0; Re F(f) = 0.5.
    CHECK_THROWS_AS(eps_select(F, d, f, 0.4, EpsMode::Plain, SelectionPolicy::Argmax),
                    InfeasibleSelection);
    const Selection circ = eps_select(F, d, f, 0.0, EpsMode::Circle, SelectionPolicy::Argmax);
    CHECK(circ.index == 0);
    CHECK(circ.phase == Complex{-1, 0});
  }
  CHECK_THROWS_AS(eps_select(DualFunctional{{1.0, 0.0}}, d, vec({1.0, 0.0}), -1.0, EpsMode::Plain,
                             SelectionPolicy::Argmax),
                  std::invalid_argument);
}

TEST_CASE("targets honour their membership contracts") {
  const LpSpace s(3, 8);
  const Dictionary d = generate_dictionary(s, 20, DictionaryKind::Gaussian, 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t k = 1 + seed % 6;
    const double eps = (seed % 3) * 0.05;
    const TargetSpec a1 = make_target(d, Membership::A1, k, eps, seed);
    REQUIRE(a1.true_coeffs);
    double l1 = 0.0;
    ComplexVector rebuilt(8);
    for (const auto& [idx, a] : *a1.true_coeffs) {
      l1 += std::abs(a);
      for (std::size_t i = 0; i < 8; ++i) rebuilt[i] += a * d[idx][i];
    }
    CHECK(a1.true_coeffs->size() == k);
    CHECK(l1 == Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(s, sub(rebuilt, a1.f_eps)) < 1e-14);
    CHECK(lp_norm(s, sub(a1.f, a1.f_eps)) <= eps + 1e-12);
    CHECK(a1.A_eps == 1.0);

    const TargetSpec cv = make_target(d, Membership::Conv, k, 0.0, seed);
    double total = 0.0;
    for (const auto& [idx, a] : *cv.true_coeffs) {
      CHECK(a.imag() == 0.0);
      CHECK(a.real() >= 0.0);
      total += a.real();
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
    CHECK(cv.f == cv.f_eps);
  }
  const TargetSpec one = make_target(d, Membership::Conv, 1, 0.0, 9);
  CHECK(lp_norm(s, sub(one.f, d[one.true_coeffs->front().first])) < 1e-15);
  const TargetSpec one_a1 = make_target(d, Membership::A1, 1, 0.0, 9);
  CHECK(std::abs(one_a1.true_coeffs->front().second) == Approx(1.0));

  CHECK_THROWS_AS(make_target(d, Membership::A1, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_target(d, Membership::A1, 21, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_target(d, Membership::A1, 2, -1.0, 1), std::invalid_argument);
}

TEST_CASE("dictionary and target JSON round trip") {
  const LpSpace s(1.5, 5);
  const Dictionary d = generate_dictionary(s, 9, DictionaryKind::Gaussian, 2);
  const Dictionary back = dictionary_from_json(nlohmann::json::parse(to_json(d).dump()));
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(back[i] == d[i]);

  const TargetSpec t = make_target(d, Membership::A1, 3, 0.1, 4);
  const TargetSpec tb = target_from_json(nlohmann::json::parse(to_json(t).dump()));
  CHECK(tb.f == t.f);
  CHECK(tb.f_eps == t.f_eps);
  CHECK(tb.eps == t.eps);
  CHECK(tb.membership == t.membership);
  CHECK(*tb.true_coeffs == *t.true_coeffs);

  CHECK_THROWS(vector_from_json(nlohmann::json::parse("[[1, 2, 3]]")));
}

TEST_CASE("enum names") {
  CHECK(parse_dictionary_kind("FOURIER_FRAME") == DictionaryKind::FourierFrame);
  CHECK(to_string(SelectionPolicy::FirstQualifying) == "FIRST_QUALIFYING");
  CHECK(parse_membership("CONV") == Membership::Conv);
  CHECK_THROWS_AS(parse_policy("argmax"), std::invalid_argument);
}
