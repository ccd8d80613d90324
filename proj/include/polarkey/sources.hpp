#pragma once

// Memoryless multi-terminal binary sources: explicit joint distributions over
// one symbol of all terminals' bits (plus an optional eavesdropper bit) and
// i.i.d. block samplers.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polarkey/bitvec.hpp"

namespace polarkey {

// pmf over (x_1, ..., x_m [, z]); index packs x_1 as the most significant bit
// and z (when present) as the least significant bit.
struct JointPmf {
  int m = 0;
  bool has_z = false;
  std::vector<double> p;

  size_t tuple_count() const { return size_t{1} << (m + (has_z ? 1 : 0)); }
  size_t index(std::span<const int> x, int z = 0) const;
  double prob(std::span<const int> x, int z = 0) const { return p[index(x, z)]; }
  int bit_of(size_t tuple, int terminal) const {  // terminal in [1,m]
    return int(tuple >> (m - terminal + (has_z ? 1 : 0))) & 1;
  }
  int z_of(size_t tuple) const { return has_z ? int(tuple & 1) : 0; }
  void validate(double tol = 1e-12) const;
};

enum class SourceVariant { DbmsChain, BroadcastStar, MarkovTree, GenericTable };

struct TreeEdge {
  int i = 0, j = 0;
  double p = 0.0;
};

struct JointSourceSpec {
  SourceVariant variant = SourceVariant::DbmsChain;

  // DbmsChain: X ~ B(px); Y = X ^ B(p); Z = Y ^ B(q) when z_present.
  double px = 0.5, p = 0.0, q = 0.0;
  bool z_present = false;

  // BroadcastStar: X_1 ~ B(px1); X_j = X_1 ^ B(crossovers[j-2]), j = 2..m.
  double px1 = 0.5;
  std::vector<double> crossovers;

  // MarkovTree: uniform marginals, per-edge BSC crossovers; must be a tree.
  int m_vertices = 0;
  std::vector<TreeEdge> edges;

  // GenericTable: explicit pmf (caps at 8 bits of joint alphabet).
  JointPmf table;

  int terminal_count() const;
  bool has_eve() const;
  void validate() const;

  static JointSourceSpec dbms_chain(double px, double p, double q, bool z_present = true);
  static JointSourceSpec broadcast_star(double px1, std::vector<double> crossovers);
  static JointSourceSpec markov_tree(int m, std::vector<TreeEdge> edges);
  static JointSourceSpec generic_table(JointPmf table);
};

JointPmf joint_pmf(const JointSourceSpec& spec);

struct SampleBlock {
  std::vector<BitVec> x;  // x[t-1] is terminal t's block
  std::optional<BitVec> z;
};

// N i.i.d. tuples via inverse-CDF over the joint pmf; deterministic given rng.
SampleBlock sample_block(const JointSourceSpec& spec, size_t n_block, std::mt19937_64& rng);

// MarkovTree only: sample by walking the tree edge-by-edge (generative story).
SampleBlock sample_block_per_edge(const JointSourceSpec& spec, size_t n_block,
                                  std::mt19937_64& rng);

struct DegradeFlags {
  bool markov_chain_xyz = false;
};

// True iff the joint factorizes as p(x) p(y|x) p(z|y) within tol; vacuously
// true when there is no eavesdropper bit. Requires m == 2 when z is present.
DegradeFlags degrade_check(const JointSourceSpec& spec, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Per-symbol (bit, side) joints: the leaf distributions everything downstream
// (index stats, SC decoding) consumes. side_card == 1 means no side info.
// ---------------------------------------------------------------------------

struct BitSideJoint {
  int side_card = 1;
  std::vector<double> pr;  // pr[b * side_card + s]
  double at(int b, int s) const { return pr[size_t(b) * side_card + s]; }
  double& at(int b, int s) { return pr[size_t(b) * side_card + s]; }
  double p_bit(int b) const;
  void validate(double tol = 1e-12) const;
};

struct SideSel {
  enum Kind { None, Terminal, Eve } kind = None;
  int terminal = 0;  // 1-based, for Kind::Terminal
  static SideSel none() { return {None, 0}; }
  static SideSel term(int t) { return {Terminal, t}; }
  static SideSel eve() { return {Eve, 0}; }
};

// Joint over (bit of `bit_terminal`, side symbol) marginalized from the pmf.
BitSideJoint bit_side_joint(const JointPmf& pmf, int bit_terminal, SideSel side);

// Marginal pmf over the pair (a, b) of terminals (1-based).
std::array<double, 4> pair_pmf(const JointPmf& pmf, int a, int b);

// Prepend a binary test-channel variable U with conditional pu_given_x[x][u]
// applied to terminal 1; the result has terminals (U, X_1, ..., X_m) and the
// same eavesdropper bit.
JointPmf augment_with_test_channel(const JointPmf& base,
                                   const std::array<std::array<double, 2>, 2>& pu_given_x);

double binary_entropy(double p);  // bits; 0 at the endpoints

// H(bit | side) in bits computed directly from the per-symbol joint.
double conditional_entropy_bits(const BitSideJoint& j);

}  // namespace polarkey
