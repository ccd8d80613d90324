#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polarkey/capacity.hpp"
#include "polarkey/rng.hpp"

using namespace polarkey;

TEST_CASE("binary entropy and star") {
  CHECK(hb(0.0) == 0.0);
  CHECK(hb(1.0) == 0.0);
  CHECK(hb(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(star(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(star(0.3, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(star(0.1, 0.1) == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(hb(0.18) == doctest::Approx(0.68009).epsilon(1e-4));
  CHECK_THROWS_AS(hb(-0.1), StructuralError);
  CHECK_THROWS_AS(star(1.2, 0.1), StructuralError);

  auto rng = make_stream(1, "star");
  for (int t = 0; t < 200; ++t) {
    double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
    CHECK(star(star(a, b), c) == doctest::Approx(star(a, star(b, c))).epsilon(1e-12));
    CHECK(star(a, b) == doctest::Approx(star(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("unlimited-rate two-party value") {
  // Z independent of (X, Y): value reduces to I(X;Y)
  auto s_indep = JointSourceSpec::dbms_chain(0.5, 0.11, 0.5, true);
  auto r = cwsk_unlimited(s_indep);
  CHECK(r.value == doctest::Approx(1 - hb(0.11)).epsilon(1e-9));
  // Z = Y: zero
  auto s_zy = JointSourceSpec::dbms_chain(0.5, 0.11, 0.0, true);
  CHECK(cwsk_unlimited(s_zy).value == doctest::Approx(0.0).epsilon(1e-12));
  // chain with p = 0.11, q = 0.3
  auto s = JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true);
  double expected = (1 - hb(0.11)) - (1 - hb(star(0.11, 0.3)));
  CHECK(cwsk_unlimited(s).value == doctest::Approx(expected).epsilon(1e-9));
  CHECK(cwsk_unlimited(s).degraded);
  // no eavesdropper: plain I(X;Y)
  auto s_noz = JointSourceSpec::dbms_chain(0.5, 0.11, 0.0, false);
  CHECK(cwsk_unlimited(s_noz).value == doctest::Approx(1 - hb(0.11)).epsilon(1e-9));
}

TEST_CASE("rate-limited capacity formula") {
  // unconstrained branch
  auto r = example1_capacity(0.1, 0.1, hb(0.1) + 0.05);
  CHECK(r.value == doctest::Approx(hb(0.18) - hb(0.1)).epsilon(1e-9));
  CHECK(r.beta0 == 0.0);
  CHECK(r.value == doctest::Approx(0.2111).epsilon(1e-3));

  // boundary: R_p = Hb(p) solves with beta0 = 0; continuity across the seam
  auto at = example1_capacity(0.1, 0.1, hb(0.1));
  auto below = example1_capacity(0.1, 0.1, hb(0.1) - 1e-8);
  CHECK(std::abs(at.value - below.value) <= 1e-6);
  CHECK(below.beta0 <= 1e-3);

  // R_p -> 0 drives the value to 0 (beta0 -> 1/2)
  auto tiny = example1_capacity(0.1, 0.1, 1e-9);
  CHECK(tiny.value <= 1e-6);
  CHECK(tiny.beta0 >= 0.49);

  // monotone in R_p
  double prev = -1;
  for (double rp : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
    double v = example1_capacity(0.1, 0.1, rp).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  CHECK_THROWS_AS(example1_capacity(0.6, 0.1, 0.1), StructuralError);
  CHECK_THROWS_AS(example1_capacity(0.1, 0.1, -0.5), StructuralError);
}

TEST_CASE("broadcast and tree capacities") {
  auto star = JointSourceSpec::broadcast_star(0.5, {0.05, 0.2});
  auto r = broadcast_capacity(star);
  CHECK(r.value == doctest::Approx(1 - hb(0.2)).epsilon(1e-9));
  CHECK(r.arg_terminal == 3);
  // equal crossovers: lowest terminal wins the tie
  auto star_eq = JointSourceSpec::broadcast_star(0.5, {0.1, 0.1, 0.1});
  CHECK(broadcast_capacity(star_eq).arg_terminal == 2);

  auto tree = JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {2, 3, 0.2}});
  auto t = tree_capacity(tree);
  CHECK(t.value == doctest::Approx(1 - hb(0.2)).epsilon(1e-9));
  CHECK(t.arg_edge_i == 2);
  CHECK(t.arg_edge_j == 3);
}

TEST_CASE("rate point for a given test channel") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.1, 0.1, true);
  // identity channel: R_p = H(X|Y), key rate = Theorem-1 value
  auto id = model2_rate_point(spec, {{{1, 0}, {0, 1}}});
  CHECK(id.required_rp == doctest::Approx(hb(0.1)).epsilon(1e-9));
  CHECK(id.key_rate ==
        doctest::Approx((1 - hb(0.1)) - (1 - hb(star(0.1, 0.1)))).epsilon(1e-9));
  // independent channel: both zero
  auto indep = model2_rate_point(spec, {{{0.5, 0.5}, {0.5, 0.5}}});
  CHECK(indep.key_rate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(indep.required_rp == doctest::Approx(0.0).epsilon(1e-12));
  // BSC(beta0) test channel reproduces the closed-form capacity at its R_p
  for (double b0 : {0.05, 0.15, 0.3}) {
    auto rp = model2_rate_point(spec, {{{1 - b0, b0}, {b0, 1 - b0}}});
    auto cap = example1_capacity(0.1, 0.1, rp.required_rp);
    CHECK(rp.key_rate == doctest::Approx(cap.value).epsilon(1e-6));
    CHECK(cap.beta0 == doctest::Approx(b0).epsilon(1e-6));
  }
}
