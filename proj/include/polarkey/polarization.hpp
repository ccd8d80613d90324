#pragma once

// Per-index polarized statistics (conditional entropies and Bhattacharyya
// parameters) and the derived index sets each protocol needs.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polarkey/bitvec.hpp"
#include "polarkey/sources.hpp"

namespace polarkey {

struct PolarIndexStats {
  uint32_t block_len = 0;
  std::string method;  // "exact" | "mc"
  uint64_t samples = 0;
  std::vector<double> h_cond;  // h_cond[i-1] = H(U^i | U^{1:i-1}, Side^{1:N}), bits
  std::vector<double> z;       // z[i-1]      = Z(U^i | U^{1:i-1}, Side^{1:N})
};

// Exact statistics by enumerating every (source block, side block) pair,
// transforming, and marginalizing. O((2S)^N * N); capped at N <= 12 per the
// enumeration budget, so callers above that use mc_index_stats.
PolarIndexStats exact_index_stats(const BitSideJoint& joint, size_t n_block);

// Genie-aided Monte-Carlo construction: sample blocks, run the SC recursion
// with true bits revealed, and average the per-index Bhattacharyya functional
// 2*sqrt(p0*p1) (for z) and binary entropy (for h_cond) of the posteriors.
PolarIndexStats mc_index_stats(const BitSideJoint& joint, size_t n_block, uint64_t samples,
                               std::mt19937_64& rng);

// Z(X|Y) = 2 sum_y p(y) sqrt(p(0|y) p(1|y)), in [0,1].
double bhattacharyya(const BitSideJoint& joint);

// Both sides of Z(X1 ^ X2 | Y^2) >= sqrt(2 Z^2 - Z^4), exactly, by
// enumerating two independent drawings of (X, Y).
struct CombineBoundReport {
  double lhs = 0, rhs = 0, margin = 0;  // margin = lhs - rhs
};
CombineBoundReport check_combine_bound(const BitSideJoint& joint);
// Worst margin over `trials` random joints with the given side alphabet.
CombineBoundReport check_combine_bound_random(uint64_t trials, int side_card,
                                              std::mt19937_64& rng);

// delta_N = 2^{-N^beta} by default; both thresholds can be overridden
// separately (the high-entropy ">= delta" and very-high ">= 1 - delta" cuts).
struct DeltaPolicy {
  double beta = 0.25;
  std::optional<double> delta_h;
  std::optional<double> delta_v;
  double dh(size_t n_block) const;
  double dv(size_t n_block) const;
};

struct IndexSetBundle {
  std::string model;
  uint32_t block_len = 0;
  double beta = 0.25, delta_h = 0, delta_v = 0;
  std::map<std::string, IndexSet> sets;
  std::map<std::string, int64_t> meta;  // e.g. i_min, root, n1, parents

  const IndexSet& at(const std::string& name) const;
  bool has(const std::string& name) const { return sets.count(name) != 0; }
};

// Thresholded primitives
IndexSet high_set(const PolarIndexStats& s, double delta);       // h >= delta
IndexSet very_high_set(const PolarIndexStats& s, double delta);  // h >= 1 - delta

// Model 1 (Algorithms of the two-party rate-unlimited scheme).
// given_eve: stats conditioned on Z (or on nothing when Z is absent).
// Sets: V, H, A, K = (V\H)\A, F = V&H, Fp = H\V. Throws
// InfeasibleConfiguration when |V\H| < |H\V|.
IndexSetBundle build_model1_sets(const PolarIndexStats& given_eve,
                                 const PolarIndexStats& given_y, const DeltaPolicy& dp);

// Model 2 / biometric generated-secret (eve = none folds V_UZ into V_U).
// Sets: H_U, V_U, V_UX, H_UX, H_UY, V_UY, V_UZ, A, K, F, Fp, plus P (pad set
// H_UY\V_UX) used by the zero-leakage variant.
IndexSetBundle build_model2_sets(const PolarIndexStats& given_none,
                                 const PolarIndexStats& given_x,
                                 const PolarIndexStats& given_y,
                                 const PolarIndexStats* given_eve, const DeltaPolicy& dp);

// Model 3 broadcast star: given_xj[j] conditions on terminal j+2's block.
// i_min is picked by minimum I(X_1;X_j) (max noise); sets V, H_min, K, F, Fp
// and H_j for every receiver (universality checks).
IndexSetBundle build_model3_star_sets(const PolarIndexStats& given_none,
                                      const std::vector<PolarIndexStats>& given_xj,
                                      const std::vector<double>& pairwise_mi,
                                      const DeltaPolicy& dp);

// Model 3 three-terminal extension; terminal 2 encodes. Sets: V, H_1, H_3,
// K, Kbar, F_21, Fbar_21, F_23, Fbar_23, F_M, Fp = Fbar_21 | Fbar_23.
IndexSetBundle build_model3_tri_sets(const PolarIndexStats& given_none,
                                     const PolarIndexStats& given_x1,
                                     const PolarIndexStats& given_x3, const DeltaPolicy& dp);

// Markov tree: rooted plan at the minimum-MI edge plus per-publisher sets.
struct Model4Plan {
  int root = 0, n1 = 0;
  std::vector<int> parent;                      // parent[v], 0 for root; index 1..m
  std::vector<int> depth;                       // depth[v]
  std::vector<std::pair<int, int>> publishers;  // (vertex j, noisiest child j*), BFS order;
                                                // the root entry is (root, n1)
};
Model4Plan plan_markov_tree(const JointSourceSpec& tree);

// Stats provider: stats_for(j, jstar) = stats of U_j given X_{jstar}.
IndexSetBundle build_model4_sets(
    const Model4Plan& plan,
    const std::map<std::pair<int, int>, PolarIndexStats>& stats_for, const DeltaPolicy& dp);

// Convenience: compute the stats a model needs (exact or MC) and build its
// bundle. test_flip configures the BSC test channel p(u|x) for model2/bio.
struct ConstructOptions {
  std::string method = "exact";  // "exact" | "mc"
  uint64_t samples = 100000;
  DeltaPolicy delta;
  double test_flip = 0.25;
};
IndexSetBundle construct_sets(const std::string& model, const JointSourceSpec& spec,
                              size_t n_block, const ConstructOptions& opt,
                              std::mt19937_64& rng);

}  // namespace polarkey
