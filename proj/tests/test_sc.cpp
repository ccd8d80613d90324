#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "polarkey/metrics.hpp"
#include "polarkey/polarization.hpp"
#include "polarkey/rng.hpp"
#include "polarkey/sc.hpp"
#include "polarkey/sources.hpp"

using namespace polarkey;

namespace {

BitVec u32_to_vec(uint32_t v, size_t n) {
  BitVec b(n);
  for (size_t i = 0; i < n; ++i)
    if ((v >> i) & 1u) b.set(i + 1, 1);
  return b;
}

// Brute-force sequential MAP oracle: p(u_i | u^{1:i-1}, y) by summing the
// joint over all source blocks whose transform matches the prefix.
struct BruteSc {
  size_t n;
  const BitSideJoint& model;
  std::vector<uint8_t> side;

  double prefix_mass(const std::vector<int>& prefix) const {
    double total = 0;
    for (uint32_t x = 0; x < (uint32_t{1} << n); ++x) {
      BitVec u = polar_transform(u32_to_vec(x, n));
      bool match = true;
      for (size_t i = 0; i < prefix.size() && match; ++i)
        if (u.get(i + 1) != prefix[i]) match = false;
      if (!match) continue;
      double w = 1;
      for (size_t j = 0; j < n; ++j) w *= model.at((x >> j) & 1u, side[j]);
      total += w;
    }
    return total;
  }

  // returns (decisions, posteriors of bit = 1)
  std::pair<BitVec, std::vector<double>> decode(const FrozenMap& frozen) const {
    auto ftab = frozen.table();
    std::vector<int> prefix;
    std::vector<double> post(n);
    for (size_t i = 0; i < n; ++i) {
      prefix.push_back(0);
      double q0 = prefix_mass(prefix);
      prefix.back() = 1;
      double q1 = prefix_mass(prefix);
      double p1 = (q0 + q1) > 0 ? q1 / (q0 + q1) : 0.5;
      post[i] = p1;
      int bit = ftab[i] >= 0 ? ftab[i] : (p1 > 0.5 ? 1 : 0);
      prefix.back() = bit;
    }
    BitVec out(n);
    for (size_t i = 0; i < n; ++i)
      if (prefix[i]) out.set(i + 1, 1);
    return {out, post};
  }
};

BitSideJoint chain_xy(double p, double px = 0.5) {
  auto spec = JointSourceSpec::dbms_chain(px, p, 0.0, false);
  return bit_side_joint(joint_pmf(spec), 1, SideSel::term(2));
}

}  // namespace

TEST_CASE("freezing everything reproduces the frozen word") {
  auto rng = make_stream(1, "sc");
  auto model = chain_xy(0.2);
  for (int t = 0; t < 20; ++t) {
    BitVec word = random_bits(16, rng), y = random_bits(16, rng);
    FrozenMap fm = FrozenMap::from(IndexSet::full_set(16), word);
    CHECK(sc_decode(y, fm, model) == word);
  }
}

TEST_CASE("noiseless side information recovers the transform exactly") {
  auto rng = make_stream(2, "sc");
  auto model = chain_xy(0.0);
  for (int t = 0; t < 20; ++t) {
    BitVec x = random_bits(32, rng);
    CHECK(sc_decode(x, FrozenMap(32, {}), model) == polar_transform(x));
  }
}

TEST_CASE("decisions and posteriors match the sequential-MAP oracle") {
  const size_t n = 4;
  auto model = chain_xy(0.11);
  auto pm = joint_pmf(JointSourceSpec::dbms_chain(0.5, 0.11, 0.0, false));
  auto stats = exact_index_stats(model, n);
  IndexSet H = high_set(stats, 0.1);

  for (uint32_t x = 0; x < 16; ++x)
    for (uint32_t y = 0; y < 16; ++y) {
      BitVec xb = u32_to_vec(x, n), yb = u32_to_vec(y, n);
      BitVec utrue = polar_transform(xb);
      FrozenMap frozen = FrozenMap::from(H, extract(utrue, H));
      BruteSc oracle{n, model, {}};
      oracle.side.resize(n);
      for (size_t j = 0; j < n; ++j) oracle.side[j] = uint8_t(yb.get(j + 1));
      auto [odec, opost] = oracle.decode(frozen);
      std::vector<double> post;
      BitVec dec = sc_decode_traced(oracle.side, frozen, model, &post);
      for (size_t i = 0; i < n; ++i) {
        CHECK(post[i] == doctest::Approx(opost[i]).epsilon(1e-9));
        // compare decisions away from exact posterior ties
        if (std::abs(opost[i] - 0.5) > 1e-9) CHECK(dec.get(i + 1) == odec.get(i + 1));
      }
    }
}

TEST_CASE("posterior trace: point masses and validity") {
  auto model = chain_xy(0.0);
  auto rng = make_stream(3, "trace");
  BitVec x = random_bits(16, rng);
  auto post = posterior_trace(polar_transform(x), x, model);
  for (double p : post) CHECK((p == doctest::Approx(1.0) || p == doctest::Approx(0.0)));

  auto noisy = chain_xy(0.23);
  BitVec y = random_bits(16, rng);
  auto post2 = posterior_trace(polar_transform(x), y, noisy);
  for (double p : post2) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("decoding determinism") {
  auto model = chain_xy(0.13);
  auto rng = make_stream(4, "det");
  BitVec y = random_bits(64, rng);
  auto stats = mc_index_stats(model, 64, 2000, rng);
  IndexSet H = high_set(stats, 0.1);
  BitVec vals = random_bits(H.size(), rng);
  FrozenMap fm = FrozenMap::from(H, vals);
  CHECK(sc_decode(y, fm, model) == sc_decode(y, fm, model));
}

TEST_CASE("error monotonicity: larger frozen sets never hurt") {
  const size_t n = 256;
  auto model = chain_xy(0.05);
  auto rng = make_stream(5, "mono");
  auto stats = mc_index_stats(model, n, 20000, rng);
  // order indices by decreasing conditional entropy; nested frozen sets
  std::vector<uint32_t> order(n);
  for (uint32_t i = 0; i < n; ++i) order[i] = i + 1;
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return stats.h_cond[a - 1] > stats.h_cond[b - 1];
  });
  size_t base = 0;
  for (uint32_t i = 1; i <= n; ++i)
    if (stats.h_cond[i - 1] >= 0.06) ++base;
  IndexSet small(std::vector<uint32_t>(order.begin(), order.begin() + base), n);
  IndexSet big(std::vector<uint32_t>(order.begin(),
                                     order.begin() + std::min(n, base + n / 8)),
               n);

  auto spec = JointSourceSpec::dbms_chain(0.5, 0.05, 0.0, false);
  const uint64_t trials = 10000;
  uint64_t fail_small = 0, fail_big = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    auto blk = sample_block(spec, n, rng);
    BitVec u = polar_transform(blk.x[0]);
    // same realization decoded with both frozen sets
    if (sc_decode(blk.x[1], FrozenMap::from(small, extract(u, small)), model) != u) ++fail_small;
    if (sc_decode(blk.x[1], FrozenMap::from(big, extract(u, big)), model) != u) ++fail_big;
  }
  double ps = double(fail_small) / trials, pb = double(fail_big) / trials;
  double sigma = std::sqrt(std::max(ps * (1 - ps), 1e-9) / trials) +
                 std::sqrt(std::max(pb * (1 - pb), 1e-9) / trials);
  CHECK(pb <= ps + 2 * sigma);
}

TEST_CASE("stochastic encode: identity test channel is deterministic") {
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.1, 0.0, false);
  JointPmf aug = augment_with_test_channel(joint_pmf(spec), {{{1, 0}, {0, 1}}});
  BitSideJoint ux = bit_side_joint(aug, 1, SideSel::term(2));
  // uniform X: H_U = everything, V_UX empty
  EncodeSets sets{IndexSet::empty_set(8), IndexSet::full_set(8), IndexSet::empty_set(8)};
  auto rng = make_stream(6, "enc");
  for (int t = 0; t < 20; ++t) {
    BitVec x = random_bits(8, rng);
    BitVec v = sc_stochastic_encode(x, BitVec(0), sets, ux, rng);
    CHECK(v == polar_transform(x));
    CHECK(sc_encode_prob(x, v, BitVec(0), sets, ux) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stochastic encode: all-prior sets reproduce the product prior") {
  // degenerate labeling: every position drawn from the prior only
  BitSideJoint ux;
  ux.side_card = 2;
  ux.pr = {0.28, 0.12, 0.18, 0.42};  // p(u,x), p(u=0) = 0.4
  EncodeSets sets{IndexSet::empty_set(4), IndexSet::empty_set(4), IndexSet::full_set(4)};
  auto rng = make_stream(7, "prior");
  BitVec x = random_bits(4, rng);
  // exact: sum over v of encode probability = 1, and each v has prior weight
  double total = 0;
  for (uint32_t v = 0; v < 16; ++v) {
    BitVec vb = u32_to_vec(v, 4);
    double pv = sc_encode_prob(x, vb, BitVec(0), sets, ux);
    total += pv;
    CHECK(pv > 0);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // empirical draw frequencies agree loosely with sc_encode_prob
  std::map<uint32_t, int> counts;
  const int draws = 20000;
  for (int t = 0; t < draws; ++t) {
    BitVec v = sc_stochastic_encode(x, BitVec(0), sets, ux, rng);
    counts[uint32_t(v.as_u64())]++;
  }
  for (auto [v, c] : counts) {
    double pv = sc_encode_prob(x, u32_to_vec(v, 4), BitVec(0), sets, ux);
    double sigma = std::sqrt(pv * (1 - pv) / draws);
    CHECK(std::abs(double(c) / draws - pv) <= 5 * sigma + 1e-3);
  }
}

TEST_CASE("encoder-induced distribution is close to the true one (divergence bound)") {
  const size_t n = 8;
  auto spec = JointSourceSpec::dbms_chain(0.5, 0.0, 0.0, false);
  TestChannel tc = TestChannel::bsc(0.1);
  JointPmf aug = augment_with_test_channel(joint_pmf(spec), tc.pu_given_x);
  BitSideJoint ux = bit_side_joint(aug, 1, SideSel::term(2));

  DeltaPolicy dp;
  auto stats_none = exact_index_stats(bit_side_joint(aug, 1, SideSel::none()), n);
  auto stats_x = exact_index_stats(ux, n);
  IndexSet HU = high_set(stats_none, dp.dh(n));
  IndexSet VUX = very_high_set(stats_x, dp.dv(n));
  EncodeSets sets{VUX, HU.subtract(VUX), HU.complement()};
  sets.validate();

  // exact p(x, v) and encoder-induced p~(x, v) by full enumeration
  size_t space = size_t{1} << n;
  std::vector<double> p_true(space * space, 0.0), p_enc(space * space, 0.0);
  double px[2] = {0.5, 0.5};
  double rw = std::exp2(-double(VUX.size()));
  for (uint32_t x = 0; x < space; ++x) {
    BitVec xb = u32_to_vec(x, n);
    double wx = 1;
    for (size_t j = 0; j < n; ++j) wx *= px[(x >> j) & 1u];
    for (uint32_t v = 0; v < space; ++v) {
      BitVec vb = u32_to_vec(v, n);
      // true joint: u = transform(v), per-symbol p(u_j | x_j)
      BitVec ub = polar_transform(vb);
      double w = wx;
      for (size_t j = 0; j < n; ++j) {
        double pux = ux.at(ub.get(j + 1), xb.get(j + 1));
        w *= pux / px[xb.get(j + 1)];
      }
      p_true[size_t(x) * space + v] = w;
      // encoder-induced: average over the public randomness R1
      double we = 0;
      for (uint64_t r = 0; r < (uint64_t{1} << VUX.size()); ++r) {
        BitVec rb(VUX.size());
        for (size_t i = 0; i < VUX.size(); ++i)
          if ((r >> i) & 1u) rb.set(i + 1, 1);
        we += sc_encode_prob(xb, vb, rb, sets, ux) * rw;
      }
      p_enc[size_t(x) * space + v] = wx * we;
    }
  }
  double dkl = kl_divergence_bits(p_true, p_enc);
  double tv = variational_distance(p_true, p_enc);
  double nd = double(n) * delta_n(n, dp.beta);
  CHECK(dkl >= 0.0);
  CHECK(dkl <= nd);
  CHECK(tv <= std::sqrt(2 * std::log(2.0)) * std::sqrt(nd));
  // the decomposition also bounds the V-marginal coupling distance
  std::vector<double> pv_true(space, 0.0), pv_enc(space, 0.0);
  for (size_t x = 0; x < space; ++x)
    for (size_t v = 0; v < space; ++v) {
      pv_true[v] += p_true[x * space + v];
      pv_enc[v] += p_enc[x * space + v];
    }
  CHECK(variational_distance(pv_true, pv_enc) <= tv + 1e-12);
}

TEST_CASE("encode sets validation") {
  EncodeSets bad{IndexSet({1}, 4), IndexSet({1, 2}, 4), IndexSet({3, 4}, 4)};
  CHECK_THROWS_AS(bad.validate(), StructuralError);
  EncodeSets hole{IndexSet({1}, 4), IndexSet({2}, 4), IndexSet({4}, 4)};
  CHECK_THROWS_AS(hole.validate(), StructuralError);
}
