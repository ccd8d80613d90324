#include "polarkey/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polarkey/capacity.hpp"
#include "polarkey/rng.hpp"
#include "polarkey/sc.hpp"

namespace polarkey {

namespace {

uint32_t transform_u32(uint32_t x, size_t n) {
  // same stage structure as polar_transform, on an n-bit word (LSB = index 1)
  for (size_t h = 1; h < n; h <<= 1) {
    uint32_t mask = 0;
    for (size_t j = 0; j < n; ++j)
      if (!(j & h)) mask |= 1u << j;
    x ^= (x >> h) & mask;
  }
  return x;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

PolarIndexStats exact_index_stats(const BitSideJoint& joint, size_t n_block) {
  joint.validate(1e-9);
  if (!is_pow2(n_block)) throw StructuralError("exact_index_stats: N not a power of 2");
  if (n_block > 12)
    throw CapacityError(
        "exact_index_stats: enumeration budget is N <= 12; use mc_index_stats");
  size_t n = n_block;
  size_t s_card = size_t(joint.side_card);
  size_t s_pow = 1;
  for (size_t j = 0; j < n; ++j) {
    s_pow *= s_card;
    if (s_pow > (size_t{1} << 26)) throw CapacityError("exact_index_stats: side alphabet too large");
  }
  size_t cells = (size_t{1} << n) * s_pow;
  if (cells > (size_t{1} << 27))
    throw CapacityError("exact_index_stats: joint table exceeds memory budget");

  // table[utop * s_pow + y] = p(U-block, side-block); utop packs u_1 as MSB
  std::vector<double> table(cells, 0.0);
  std::vector<int> ydig(n);
  for (uint32_t x = 0; x < (uint32_t{1} << n); ++x) {
    uint32_t u = transform_u32(x, n);
    size_t utop = 0;
    for (size_t j = 0; j < n; ++j) utop = (utop << 1) | ((u >> j) & 1u);
    for (size_t y = 0; y < s_pow; ++y) {
      size_t yy = y;
      double w = 1.0;
      for (size_t j = 0; j < n; ++j) {
        w *= joint.at((x >> j) & 1u, int(yy % s_card));
        yy /= s_card;
      }
      table[utop * s_pow + y] += w;
    }
  }

  PolarIndexStats st;
  st.block_len = uint32_t(n);
  st.method = "exact";
  st.h_cond.assign(n, 0.0);
  st.z.assign(n, 0.0);
  // marginalize the last u-bit repeatedly: at step i the table holds
  // p(u^{1:i}, y); pull H(U^i | U^{1:i-1}, Y^{1:N}) and Z likewise.
  for (size_t i = n; i >= 1; --i) {
    size_t prefixes = size_t{1} << (i - 1);
    double h = 0.0, zz = 0.0;
    for (size_t p = 0; p < prefixes; ++p)
      for (size_t y = 0; y < s_pow; ++y) {
        double a = table[(2 * p) * s_pow + y];
        double b = table[(2 * p + 1) * s_pow + y];
        double t = a + b;
        if (a > 0) h += a * std::log2(t / a);
        if (b > 0) h += b * std::log2(t / b);
        zz += 2.0 * std::sqrt(a * b);
        table[p * s_pow + y] = t;
      }
    st.h_cond[i - 1] = clamp01(h);
    st.z[i - 1] = clamp01(zz);
  }
  return st;
}

PolarIndexStats mc_index_stats(const BitSideJoint& joint, size_t n_block, uint64_t samples,
                               std::mt19937_64& rng) {
  joint.validate(1e-9);
  if (!is_pow2(n_block)) throw StructuralError("mc_index_stats: N not a power of 2");
  if (samples < 1) throw StructuralError("mc_index_stats: need samples >= 1");
  size_t n = n_block;
  int s_card = joint.side_card;
  std::vector<double> cdf(joint.pr.size());
  std::partial_sum(joint.pr.begin(), joint.pr.end(), cdf.begin());
  cdf.back() = 1.0;

  PolarIndexStats st;
  st.block_len = uint32_t(n);
  st.method = "mc";
  st.samples = samples;
  st.h_cond.assign(n, 0.0);
  st.z.assign(n, 0.0);

  BitVec xblk(n);
  std::vector<uint8_t> side(n);
  for (uint64_t it = 0; it < samples; ++it) {
    for (size_t j = 1; j <= n; ++j) {
      double u = uniform01(rng);
      size_t cell = size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (cell >= cdf.size()) cell = cdf.size() - 1;
      xblk.set(j, int(cell / s_card));
      side[j - 1] = uint8_t(cell % s_card);
    }
    BitVec utrue = polar_transform(xblk);
    auto post = posterior_trace(utrue, side, joint);
    for (size_t i = 0; i < n; ++i) {
      double pt = post[i];  // posterior of the true bit
      st.z[i] += 2.0 * std::sqrt(pt * (1.0 - pt));
      st.h_cond[i] += binary_entropy(pt);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    st.z[i] = clamp01(st.z[i] / double(samples));
    st.h_cond[i] = clamp01(st.h_cond[i] / double(samples));
  }
  return st;
}

double bhattacharyya(const BitSideJoint& joint) {
  joint.validate(1e-9);
  double z = 0.0;
  for (int s = 0; s < joint.side_card; ++s) z += 2.0 * std::sqrt(joint.at(0, s) * joint.at(1, s));
  return clamp01(z);
}

CombineBoundReport check_combine_bound(const BitSideJoint& joint) {
  joint.validate(1e-9);
  double z = bhattacharyya(joint);
  int s = joint.side_card;
  // joint of (X1 ^ X2, (Y1, Y2)) over two independent drawings
  double lhs = 0.0;
  for (int y1 = 0; y1 < s; ++y1)
    for (int y2 = 0; y2 < s; ++y2) {
      double q0 = joint.at(0, y1) * joint.at(0, y2) + joint.at(1, y1) * joint.at(1, y2);
      double q1 = joint.at(0, y1) * joint.at(1, y2) + joint.at(1, y1) * joint.at(0, y2);
      lhs += 2.0 * std::sqrt(q0 * q1);
    }
  double rhs = std::sqrt(std::max(0.0, 2.0 * z * z - z * z * z * z));
  return {lhs, rhs, lhs - rhs};
}

CombineBoundReport check_combine_bound_random(uint64_t trials, int side_card,
                                              std::mt19937_64& rng) {
  CombineBoundReport worst{0, 0, 1e9};
  for (uint64_t t = 0; t < trials; ++t) {
    BitSideJoint j;
    j.side_card = side_card;
    j.pr.resize(2 * side_card);
    double s = 0;
    for (auto& v : j.pr) {
      v = -std::log(std::max(uniform01(rng), 1e-300));  // ~Exp(1) -> Dirichlet
      s += v;
    }
    for (auto& v : j.pr) v /= s;
    auto r = check_combine_bound(j);
    if (r.margin < worst.margin) worst = r;
  }
  return worst;
}

double DeltaPolicy::dh(size_t n_block) const {
  if (delta_h) return *delta_h;
  if (beta <= 0.0 || beta >= 0.5) throw ValidationError("DeltaPolicy: beta must be in (0, 1/2)");
  return std::exp2(-std::pow(double(n_block), beta));
}

double DeltaPolicy::dv(size_t n_block) const {
  if (delta_v) return *delta_v;
  if (beta <= 0.0 || beta >= 0.5) throw ValidationError("DeltaPolicy: beta must be in (0, 1/2)");
  return std::exp2(-std::pow(double(n_block), beta));
}

const IndexSet& IndexSetBundle::at(const std::string& name) const {
  auto it = sets.find(name);
  if (it == sets.end()) throw StructuralError("IndexSetBundle: missing set " + name);
  return it->second;
}

IndexSet high_set(const PolarIndexStats& s, double delta) {
  std::vector<uint32_t> idx;
  for (uint32_t i = 1; i <= s.block_len; ++i)
    if (s.h_cond[i - 1] >= delta) idx.push_back(i);
  return IndexSet(std::move(idx), s.block_len);
}

IndexSet very_high_set(const PolarIndexStats& s, double delta) {
  std::vector<uint32_t> idx;
  for (uint32_t i = 1; i <= s.block_len; ++i)
    if (s.h_cond[i - 1] >= 1.0 - delta) idx.push_back(i);
  return IndexSet(std::move(idx), s.block_len);
}

namespace {

void check_same_n(std::initializer_list<const PolarIndexStats*> all) {
  uint32_t n = 0;
  for (auto* s : all) {
    if (!s) continue;
    if (n == 0) n = s->block_len;
    if (s->block_len != n) throw StructuralError("index stats disagree on N");
  }
}

// Deterministic pick: `need` indices from `pool`, preferring the highest
// score (conditional entropy under the eavesdropper's context), ties broken
// by lowest index.
IndexSet pick_best(const IndexSet& pool, size_t need, const PolarIndexStats& score) {
  std::vector<uint32_t> idx(pool.indices);
  std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    double sa = score.h_cond[a - 1], sb = score.h_cond[b - 1];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  idx.resize(need);
  return IndexSet(std::move(idx), pool.n_total);
}

}  // namespace

IndexSetBundle build_model1_sets(const PolarIndexStats& given_eve,
                                 const PolarIndexStats& given_y, const DeltaPolicy& dp) {
  check_same_n({&given_eve, &given_y});
  uint32_t n = given_eve.block_len;
  IndexSetBundle b;
  b.model = "model1";
  b.block_len = n;
  b.beta = dp.beta;
  b.delta_h = dp.dh(n);
  b.delta_v = dp.dv(n);
  IndexSet V = very_high_set(given_eve, b.delta_v);
  IndexSet H = high_set(given_y, b.delta_h);
  IndexSet VnoH = V.subtract(H);
  IndexSet HnoV = H.subtract(V);
  if (VnoH.size() < HnoV.size())
    throw InfeasibleConfiguration("model1: |V\\H| = " + std::to_string(VnoH.size()) +
                                  " < |H\\V| = " + std::to_string(HnoV.size()) +
                                  "; the one-time-pad set A does not exist at this N/delta");
  IndexSet A = pick_best(VnoH, HnoV.size(), given_eve);
  b.sets["V"] = V;
  b.sets["H"] = H;
  b.sets["A"] = A;
  b.sets["K"] = VnoH.subtract(A);
  b.sets["F"] = V.intersect(H);
  b.sets["Fp"] = HnoV;
  return b;
}

IndexSetBundle build_model2_sets(const PolarIndexStats& given_none,
                                 const PolarIndexStats& given_x,
                                 const PolarIndexStats& given_y,
                                 const PolarIndexStats* given_eve, const DeltaPolicy& dp) {
  check_same_n({&given_none, &given_x, &given_y, given_eve});
  uint32_t n = given_none.block_len;
  IndexSetBundle b;
  b.model = given_eve ? "model2" : "bio-gen";
  b.block_len = n;
  b.beta = dp.beta;
  b.delta_h = dp.dh(n);
  b.delta_v = dp.dv(n);
  if (b.delta_h > 1.0 - b.delta_v)
    throw ValidationError("model2: delta_h > 1 - delta_v breaks V_{U|X} subset H_U");
  IndexSet HU = high_set(given_none, b.delta_h);
  IndexSet VU = very_high_set(given_none, b.delta_v);
  IndexSet VUX = very_high_set(given_x, b.delta_v);
  IndexSet HUX = high_set(given_x, b.delta_h);
  IndexSet HUY = high_set(given_y, b.delta_h);
  IndexSet VUY = very_high_set(given_y, b.delta_v);
  const PolarIndexStats& eve = given_eve ? *given_eve : given_none;
  IndexSet VUZ = very_high_set(eve, b.delta_v);
  IndexSet helper = HUY.subtract(VUX);          // H_{U|Y} \ V_{U|X}
  IndexSet Fp = helper.subtract(VUZ);           // one-time padded part
  IndexSet F = helper.intersect(VUZ);           // plain public part
  IndexSet key_pool = VUZ.subtract(HUY);
  if (key_pool.size() < Fp.size())
    throw InfeasibleConfiguration("model2: |V_{U|Z}\\H_{U|Y}| = " +
                                  std::to_string(key_pool.size()) + " < |Fp| = " +
                                  std::to_string(Fp.size()) + "; A does not exist");
  IndexSet A = pick_best(key_pool, Fp.size(), eve);
  b.sets["H_U"] = HU;
  b.sets["V_U"] = VU;
  b.sets["V_UX"] = VUX;
  b.sets["H_UX"] = HUX;
  b.sets["H_UY"] = HUY;
  b.sets["V_UY"] = VUY;
  b.sets["V_UZ"] = VUZ;
  b.sets["A"] = A;
  b.sets["K"] = key_pool.subtract(A);
  b.sets["F"] = F;
  b.sets["Fp"] = Fp;
  b.sets["P"] = helper;  // zero-leakage pad positions
  return b;
}

IndexSetBundle build_model3_star_sets(const PolarIndexStats& given_none,
                                      const std::vector<PolarIndexStats>& given_xj,
                                      const std::vector<double>& pairwise_mi,
                                      const DeltaPolicy& dp) {
  if (given_xj.empty() || given_xj.size() != pairwise_mi.size())
    throw StructuralError("model3-star: need stats and MI per receiver");
  std::initializer_list<const PolarIndexStats*> probe{&given_none, &given_xj[0]};
  check_same_n(probe);
  for (const auto& s : given_xj)
    if (s.block_len != given_none.block_len) throw StructuralError("index stats disagree on N");
  uint32_t n = given_none.block_len;
  size_t imin_pos = 0;
  for (size_t j = 1; j < pairwise_mi.size(); ++j)
    if (pairwise_mi[j] < pairwise_mi[imin_pos]) imin_pos = j;
  IndexSetBundle b;
  b.model = "model3-star";
  b.block_len = n;
  b.beta = dp.beta;
  b.delta_h = dp.dh(n);
  b.delta_v = dp.dv(n);
  IndexSet V = very_high_set(given_none, b.delta_v);
  IndexSet Hmin = high_set(given_xj[imin_pos], b.delta_h);
  b.sets["V"] = V;
  b.sets["H_min"] = Hmin;
  b.sets["K"] = V.subtract(Hmin);
  b.sets["F"] = V.intersect(Hmin);
  b.sets["Fp"] = Hmin.subtract(V);
  for (size_t j = 0; j < given_xj.size(); ++j)
    b.sets["H_" + std::to_string(j + 2)] = high_set(given_xj[j], b.delta_h);
  b.meta["i_min"] = int64_t(imin_pos + 2);  // terminal label
  return b;
}

IndexSetBundle build_model3_tri_sets(const PolarIndexStats& given_none,
                                     const PolarIndexStats& given_x1,
                                     const PolarIndexStats& given_x3, const DeltaPolicy& dp) {
  check_same_n({&given_none, &given_x1, &given_x3});
  uint32_t n = given_none.block_len;
  IndexSetBundle b;
  b.model = "model3-tri";
  b.block_len = n;
  b.beta = dp.beta;
  b.delta_h = dp.dh(n);
  b.delta_v = dp.dv(n);
  IndexSet V = very_high_set(given_none, b.delta_v);
  IndexSet H1 = high_set(given_x1, b.delta_h);
  IndexSet H3 = high_set(given_x3, b.delta_h);
  IndexSet VnoH1 = V.subtract(H1);
  IndexSet K = VnoH1.subtract(H3);
  IndexSet Kbar = VnoH1.intersect(H3);
  IndexSet F21 = H1.intersect(V), Fbar21 = H1.subtract(V);
  IndexSet F23 = H3.intersect(V), Fbar23 = H3.subtract(V);
  IndexSet pool = F21.subtract(F23);
  if (pool.size() < Kbar.size())
    throw InfeasibleConfiguration(
        "model3-tri: |F_21\\F_23| = " + std::to_string(pool.size()) + " < |Kbar| = " +
        std::to_string(Kbar.size()) + "; F_M does not exist (check the terminal labeling)");
  // lowest-index subset of the required size
  std::vector<uint32_t> fm(pool.indices.begin(), pool.indices.begin() + Kbar.size());
  b.sets["V"] = V;
  b.sets["H_1"] = H1;
  b.sets["H_3"] = H3;
  b.sets["K"] = K;
  b.sets["Kbar"] = Kbar;
  b.sets["F_21"] = F21;
  b.sets["Fbar_21"] = Fbar21;
  b.sets["F_23"] = F23;
  b.sets["Fbar_23"] = Fbar23;
  b.sets["F_M"] = IndexSet(std::move(fm), n);
  b.sets["Fp"] = Fbar21.unite(Fbar23);
  return b;
}

Model4Plan plan_markov_tree(const JointSourceSpec& tree) {
  if (tree.variant != SourceVariant::MarkovTree)
    throw StructuralError("plan_markov_tree: MarkovTree sources only");
  tree.validate();
  int m = tree.m_vertices;
  // Noise comparator: H_b(p); min MI = max H_b. Ties: lexicographic edge.
  auto noise = [](double p) { return binary_entropy(p); };
  size_t best = 0;
  for (size_t e = 1; e < tree.edges.size(); ++e) {
    double nb = noise(tree.edges[e].p), nbest = noise(tree.edges[best].p);
    if (nb > nbest) best = e;
  }
  Model4Plan plan;
  int a = tree.edges[best].i, bv = tree.edges[best].j;
  plan.root = std::min(a, bv);
  plan.n1 = std::max(a, bv);

  std::vector<std::vector<std::pair<int, double>>> adj(m + 1);
  for (const auto& e : tree.edges) {
    adj[e.i].push_back({e.j, e.p});
    adj[e.j].push_back({e.i, e.p});
  }
  plan.parent.assign(m + 1, 0);
  plan.depth.assign(m + 1, -1);
  plan.depth[plan.root] = 0;
  std::vector<int> order{plan.root}, frontier{plan.root};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int v : frontier)
      for (auto [w, pe] : adj[v])
        if (plan.depth[w] < 0) {
          plan.depth[w] = plan.depth[v] + 1;
          plan.parent[w] = v;
          next.push_back(w);
          order.push_back(w);
        }
    frontier = std::move(next);
  }
  // publishers: every vertex with children, paired with its noisiest child
  for (int v : order) {
    int jstar = 0;
    double best_noise = -1.0;
    for (auto [w, pe] : adj[v])
      if (plan.parent[w] == v) {
        double nz = noise(pe);
        if (nz > best_noise || (nz == best_noise && w < jstar)) {
          best_noise = nz;
          jstar = w;
        }
      }
    if (jstar != 0) plan.publishers.push_back({v, jstar});
  }
  // By construction the root's noisiest child is n1 (the min-MI edge is
  // incident to the root); keep the plan honest anyway.
  if (!plan.publishers.empty() && plan.publishers[0].first == plan.root)
    plan.n1 = plan.publishers[0].second;
  return plan;
}

IndexSetBundle build_model4_sets(
    const Model4Plan& plan,
    const std::map<std::pair<int, int>, PolarIndexStats>& stats_for, const DeltaPolicy& dp) {
  if (plan.publishers.empty()) throw StructuralError("model4: tree has no edges");
  uint32_t n = 0;
  IndexSetBundle b;
  b.model = "model4";
  for (auto [j, jstar] : plan.publishers) {
    auto it = stats_for.find({j, jstar});
    if (it == stats_for.end())
      throw StructuralError("model4: missing stats for publisher (" + std::to_string(j) + "," +
                            std::to_string(jstar) + ")");
    if (n == 0) {
      n = it->second.block_len;
      b.block_len = n;
      b.beta = dp.beta;
      b.delta_h = dp.dh(n);
      b.delta_v = dp.dv(n);
    }
    if (it->second.block_len != n) throw StructuralError("index stats disagree on N");
    b.sets["H_" + std::to_string(j)] = high_set(it->second, b.delta_h);
  }
  b.sets["K"] = b.at("H_" + std::to_string(plan.root)).complement();
  b.meta["root"] = plan.root;
  b.meta["n1"] = plan.n1;
  b.meta["m"] = int64_t(plan.parent.size()) - 1;
  for (size_t v = 1; v < plan.parent.size(); ++v)
    b.meta["parent_" + std::to_string(v)] = plan.parent[v];
  for (auto [j, jstar] : plan.publishers) b.meta["jstar_" + std::to_string(j)] = jstar;
  return b;
}

namespace {

PolarIndexStats stats_for_joint(const BitSideJoint& j, size_t n, const ConstructOptions& opt,
                                std::mt19937_64& rng) {
  if (opt.method == "exact") return exact_index_stats(j, n);
  if (opt.method == "mc") return mc_index_stats(j, n, opt.samples, rng);
  throw ValidationError("construction method must be exact or mc");
}

}  // namespace

IndexSetBundle construct_sets(const std::string& model, const JointSourceSpec& spec,
                              size_t n_block, const ConstructOptions& opt,
                              std::mt19937_64& rng) {
  JointPmf pmf = joint_pmf(spec);
  if (model == "model1") {
    if (pmf.m != 2) throw ValidationError("model1 needs a two-terminal source");
    auto eve = pmf.has_z ? bit_side_joint(pmf, 1, SideSel::eve())
                         : bit_side_joint(pmf, 1, SideSel::none());
    auto y = bit_side_joint(pmf, 1, SideSel::term(2));
    return build_model1_sets(stats_for_joint(eve, n_block, opt, rng),
                             stats_for_joint(y, n_block, opt, rng), opt.delta);
  }
  if (model == "model2" || model == "bio-gen" || model == "bio-zero") {
    if (pmf.m != 2) throw ValidationError("model2/bio needs a two-terminal source");
    if (model == "model2" && !pmf.has_z)
      throw ValidationError("model2 needs an eavesdropper bit (use bio-gen otherwise)");
    std::array<std::array<double, 2>, 2> tc{
        {{1.0 - opt.test_flip, opt.test_flip}, {opt.test_flip, 1.0 - opt.test_flip}}};
    JointPmf aug = augment_with_test_channel(pmf, tc);
    // aug terminals: 1 = U, 2 = X, 3 = Y
    auto none = bit_side_joint(aug, 1, SideSel::none());
    auto gx = bit_side_joint(aug, 1, SideSel::term(2));
    auto gy = bit_side_joint(aug, 1, SideSel::term(3));
    PolarIndexStats sn = stats_for_joint(none, n_block, opt, rng);
    PolarIndexStats sx = stats_for_joint(gx, n_block, opt, rng);
    PolarIndexStats sy = stats_for_joint(gy, n_block, opt, rng);
    if (model == "model2") {
      auto gz = bit_side_joint(aug, 1, SideSel::eve());
      PolarIndexStats sz = stats_for_joint(gz, n_block, opt, rng);
      return build_model2_sets(sn, sx, sy, &sz, opt.delta);
    }
    IndexSetBundle b = build_model2_sets(sn, sx, sy, nullptr, opt.delta);
    if (model == "bio-zero") b.model = "bio-zero";
    return b;
  }
  if (model == "model3-star") {
    if (spec.variant != SourceVariant::BroadcastStar)
      throw ValidationError("model3-star needs a BroadcastStar source");
    auto none = bit_side_joint(pmf, 1, SideSel::none());
    PolarIndexStats sn = stats_for_joint(none, n_block, opt, rng);
    std::vector<PolarIndexStats> per;
    std::vector<double> mi;
    for (int j = 2; j <= pmf.m; ++j) {
      per.push_back(stats_for_joint(bit_side_joint(pmf, 1, SideSel::term(j)), n_block, opt, rng));
      mi.push_back(pair_mutual_information(pair_pmf(pmf, 1, j)));
    }
    return build_model3_star_sets(sn, per, mi, opt.delta);
  }
  if (model == "model3-tri") {
    if (pmf.m != 3) throw ValidationError("model3-tri needs exactly three terminals");
    // WLOG labeling check: terminal 2 encodes; I(X2;X1) must be the max-min
    // and I(X2;X1) <= I(X2;X3).
    double i12 = pair_mutual_information(pair_pmf(pmf, 1, 2));
    double i13 = pair_mutual_information(pair_pmf(pmf, 1, 3));
    double i23 = pair_mutual_information(pair_pmf(pmf, 2, 3));
    double maxmin = std::max({std::min(i12, i13), std::min(i12, i23), std::min(i13, i23)});
    if (std::min(i12, i23) < maxmin - 1e-12 || i12 > i23 + 1e-12)
      throw ValidationError(
          "model3-tri: terminal labeling must satisfy I(X1;X2) = max_j min_i I(Xj;Xi) "
          "with I(X2;X1) <= I(X2;X3); relabel the terminals");
    auto none = bit_side_joint(pmf, 2, SideSel::none());
    auto g1 = bit_side_joint(pmf, 2, SideSel::term(1));
    auto g3 = bit_side_joint(pmf, 2, SideSel::term(3));
    return build_model3_tri_sets(stats_for_joint(none, n_block, opt, rng),
                                 stats_for_joint(g1, n_block, opt, rng),
                                 stats_for_joint(g3, n_block, opt, rng), opt.delta);
  }
  if (model == "model4") {
    Model4Plan plan = plan_markov_tree(spec);
    std::map<std::pair<int, int>, PolarIndexStats> stats;
    for (auto [j, jstar] : plan.publishers) {
      auto pj = pair_pmf(pmf, j, jstar);
      BitSideJoint bj;
      bj.side_card = 2;
      bj.pr = {pj[0], pj[1], pj[2], pj[3]};
      stats[{j, jstar}] = stats_for_joint(bj, n_block, opt, rng);
    }
    return build_model4_sets(plan, stats, opt.delta);
  }
  throw ValidationError("unknown model tag: " + model);
}

}  // namespace polarkey
