#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polarkey/rng.hpp"
#include "polarkey/sources.hpp"

using namespace polarkey;

TEST_CASE("dbms chain pmf") {
  auto s = JointSourceSpec::dbms_chain(0.5, 0.0, 0.0, false);
  JointPmf p = joint_pmf(s);
  int t00[2] = {0, 0}, t11[2] = {1, 1}, t01[2] = {0, 1};
  CHECK(p.prob(t00) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.prob(t11) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.prob(t01) == doctest::Approx(0.0).epsilon(1e-12));

  auto s2 = JointSourceSpec::dbms_chain(0.5, 0.1, 0.0, false);
  JointPmf p2 = joint_pmf(s2);
  CHECK(p2.prob(t00) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(p2.prob(t01) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("markov tree path factorization and uniform marginals") {
  auto s = JointSourceSpec::markov_tree(
      3, {{1, 2, 0.1}, {2, 3, 0.1}});
  JointPmf p = joint_pmf(s);
  int t000[3] = {0, 0, 0};
  CHECK(p.prob(t000) == doctest::Approx(0.5 * 0.9 * 0.9).epsilon(1e-12));
  // every single-terminal marginal is exactly (1/2, 1/2)
  for (int t = 1; t <= 3; ++t) {
    double m1 = 0;
    for (size_t i = 0; i < p.tuple_count(); ++i)
      if (p.bit_of(i, t)) m1 += p.p[i];
    CHECK(m1 == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("every variant's pmf sums to one") {
  std::vector<JointSourceSpec> specs;
  specs.push_back(JointSourceSpec::dbms_chain(0.4, 0.11, 0.3, true));
  specs.push_back(JointSourceSpec::broadcast_star(0.5, {0.05, 0.2, 0.1}));
  specs.push_back(JointSourceSpec::markov_tree(4, {{1, 2, 0.1}, {2, 3, 0.2}, {2, 4, 0.05}}));
  {
    JointPmf t;
    t.m = 2;
    t.has_z = true;
    t.p = {0.1, 0.2, 0.05, 0.15, 0.2, 0.1, 0.1, 0.1};
    specs.push_back(JointSourceSpec::generic_table(t));
  }
  for (const auto& s : specs) {
    JointPmf p = joint_pmf(s);
    double sum = 0;
    for (double v : p.p) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("broadcast star with equal crossovers has identical pair pmfs") {
  auto s = JointSourceSpec::broadcast_star(0.3, {0.15, 0.15, 0.15});
  JointPmf p = joint_pmf(s);
  auto ref = pair_pmf(p, 1, 2);
  for (int j = 3; j <= 4; ++j) {
    auto q = pair_pmf(p, 1, j);
    for (int c = 0; c < 4; ++c) CHECK(q[c] == doctest::Approx(ref[c]).epsilon(1e-12));
  }
}

TEST_CASE("tree validation") {
  CHECK_THROWS_AS(JointSourceSpec::markov_tree(3, {{1, 2, 0.1}}), ValidationError);
  CHECK_THROWS_AS(JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {1, 2, 0.2}}), ValidationError);
  CHECK_THROWS_AS(JointSourceSpec::markov_tree(4, {{1, 2, 0.1}, {3, 4, 0.2}, {2, 1, 0.3}}),
                  ValidationError);
  JointPmf bad;
  bad.m = 1;
  bad.p = {0.5, 0.4};
  CHECK_THROWS_AS(JointSourceSpec::generic_table(bad), ValidationError);
}

TEST_CASE("sampling determinism and noiseless edge") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.0, 0.2, true);
  auto r1 = make_stream(5, "sample");
  auto r2 = make_stream(5, "sample");
  auto a = sample_block(spec, 64, r1);
  auto b = sample_block(spec, 64, r2);
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.x[1] == b.x[1]);
  CHECK(*a.z == *b.z);
  CHECK(a.x[0] == a.x[1]);  // p = 0: Y equals X exactly
}

TEST_CASE("empirical symbol frequency matches the pmf within 3 sigma") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.1, 0.0, false);
  auto rng = make_stream(11, "freq");
  const size_t n = 1u << 14;   // per block
  const int blocks = 61;       // ~1e6 symbols total
  uint64_t c01 = 0, total = 0;
  for (int b = 0; b < blocks; ++b) {
    auto blk = sample_block(spec, n, rng);
    for (size_t i = 1; i <= n; ++i) {
      c01 += (blk.x[0].get(i) == 0 && blk.x[1].get(i) == 1);
      ++total;
    }
  }
  double expected = 0.05;
  double sigma = std::sqrt(expected * (1 - expected) / double(total));
  CHECK(std::abs(double(c01) / double(total) - expected) <= 3 * sigma);
}

TEST_CASE("per-edge tree sampler agrees with the pmf") {
  auto spec = JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {2, 3, 0.25}});
  JointPmf p = joint_pmf(spec);
  auto rng = make_stream(12, "tree-edge");
  const size_t n = 1u << 14;
  const int blocks = 12;
  std::vector<uint64_t> counts(8, 0);
  for (int b = 0; b < blocks; ++b) {
    auto blk = sample_block_per_edge(spec, n, rng);
    for (size_t i = 1; i <= n; ++i) {
      size_t t = size_t(blk.x[0].get(i)) << 2 | size_t(blk.x[1].get(i)) << 1 |
                 size_t(blk.x[2].get(i));
      ++counts[t];
    }
  }
  double total = double(n) * blocks;
  for (size_t t = 0; t < 8; ++t) {
    double sigma = std::sqrt(p.p[t] * (1 - p.p[t]) / total);
    CHECK(std::abs(counts[t] / total - p.p[t]) <= 4 * sigma);
  }
}

TEST_CASE("degrade check") {
  CHECK(degrade_check(JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true)).markov_chain_xyz);
  CHECK(degrade_check(JointSourceSpec::broadcast_star(0.5, {0.1})).markov_chain_xyz);
  // Z = X ^ Y parity: not a chain
  {
    JointPmf t;
    t.m = 2;
    t.has_z = true;
    t.p.assign(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double pxy = (x == y ? 0.45 : 0.05);
        int xs[2] = {x, y};
        t.p[t.index(xs, x ^ y)] = pxy;
      }
    CHECK_FALSE(degrade_check(JointSourceSpec::generic_table(t)).markov_chain_xyz);
  }
  // generic table actually encoding a chain
  {
    auto chain = joint_pmf(JointSourceSpec::dbms_chain(0.4, 0.15, 0.2, true));
    CHECK(degrade_check(JointSourceSpec::generic_table(chain)).markov_chain_xyz);
  }
}

TEST_CASE("test channel augmentation") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.1, 0.2, true);
  JointPmf aug = augment_with_test_channel(joint_pmf(spec), {{{0.75, 0.25}, {0.25, 0.75}}});
  CHECK(aug.m == 3);
  CHECK(aug.has_z);
  double sum = 0;
  for (double v : aug.p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // U marginal is uniform for a symmetric channel on a uniform input
  double u1 = 0;
  for (size_t t = 0; t < aug.tuple_count(); ++t)
    if (aug.bit_of(t, 1)) u1 += aug.p[t];
  CHECK(u1 == doctest::Approx(0.5).epsilon(1e-12));
  // identity channel keeps U = X
  JointPmf id = augment_with_test_channel(joint_pmf(spec), {{{1, 0}, {0, 1}}});
  for (size_t t = 0; t < id.tuple_count(); ++t)
    if (id.bit_of(t, 1) != id.bit_of(t, 2)) CHECK(id.p[t] == 0.0);
}

TEST_CASE("bit side joints") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true);
  JointPmf p = joint_pmf(spec);
  auto jy = bit_side_joint(p, 1, SideSel::term(2));
  CHECK(jy.at(0, 1) == doctest::Approx(0.5 * 0.11).epsilon(1e-12));
  CHECK(conditional_entropy_bits(jy) == doctest::Approx(binary_entropy(0.11)).epsilon(1e-12));
  auto jn = bit_side_joint(p, 1, SideSel::none());
  CHECK(conditional_entropy_bits(jn) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(bit_side_joint(joint_pmf(JointSourceSpec::broadcast_star(0.5, {0.1})), 1,
                                 SideSel::eve()),
                  ValidationError);
}
