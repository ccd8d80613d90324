#include "polarkey/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polarkey/rng.hpp"

namespace polarkey {

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw StructuralError("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

size_t JointPmf::index(std::span<const int> x, int z) const {
  if (int(x.size()) != m) throw StructuralError("JointPmf::index: wrong tuple arity");
  size_t idx = 0;
  for (int t = 0; t < m; ++t) idx = (idx << 1) | unsigned(x[t] & 1);
  if (has_z) idx = (idx << 1) | unsigned(z & 1);
  return idx;
}

void JointPmf::validate(double tol) const {
  if (m < 1) throw ValidationError("JointPmf: need at least one terminal");
  if (m + (has_z ? 1 : 0) > 8)
    throw ValidationError("JointPmf: joint alphabet capped at 8 bits");
  if (p.size() != tuple_count()) throw ValidationError("JointPmf: wrong table size");
  double s = 0.0;
  for (double v : p) {
    if (v < -tol || v > 1.0 + tol) throw ValidationError("JointPmf: probability outside [0,1]");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) throw ValidationError("JointPmf: pmf does not sum to 1");
}

static void check_prob(double v, const char* what) {
  if (v < 0.0 || v > 1.0) throw ValidationError(std::string(what) + " outside [0,1]");
}

int JointSourceSpec::terminal_count() const {
  switch (variant) {
    case SourceVariant::DbmsChain:
      return 2;
    case SourceVariant::BroadcastStar:
      return int(crossovers.size()) + 1;
    case SourceVariant::MarkovTree:
      return m_vertices;
    case SourceVariant::GenericTable:
      return table.m;
  }
  return 0;
}

bool JointSourceSpec::has_eve() const {
  switch (variant) {
    case SourceVariant::DbmsChain:
      return z_present;
    case SourceVariant::GenericTable:
      return table.has_z;
    default:
      return false;
  }
}

void JointSourceSpec::validate() const {
  switch (variant) {
    case SourceVariant::DbmsChain:
      check_prob(px, "px");
      check_prob(p, "p");
      check_prob(q, "q");
      break;
    case SourceVariant::BroadcastStar:
      check_prob(px1, "px1");
      if (crossovers.empty()) throw ValidationError("BroadcastStar: need at least one receiver");
      for (double c : crossovers) check_prob(c, "crossover");
      break;
    case SourceVariant::MarkovTree: {
      if (m_vertices < 2) throw ValidationError("MarkovTree: need at least two vertices");
      if (int(edges.size()) != m_vertices - 1)
        throw ValidationError("MarkovTree: a tree on m vertices has m-1 edges");
      std::vector<std::vector<int>> adj(m_vertices + 1);
      for (const auto& e : edges) {
        if (e.i < 1 || e.i > m_vertices || e.j < 1 || e.j > m_vertices || e.i == e.j)
          throw ValidationError("MarkovTree: bad edge endpoints");
        check_prob(e.p, "edge crossover");
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
      }
      // connectivity
      std::vector<int> seen(m_vertices + 1, 0), stack{1};
      seen[1] = 1;
      int count = 1;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
          if (!seen[w]) {
            seen[w] = 1;
            ++count;
            stack.push_back(w);
          }
      }
      if (count != m_vertices) throw ValidationError("MarkovTree: edges do not form a tree");
      break;
    }
    case SourceVariant::GenericTable:
      table.validate();
      break;
  }
}

JointSourceSpec JointSourceSpec::dbms_chain(double px, double p, double q, bool z_present) {
  JointSourceSpec s;
  s.variant = SourceVariant::DbmsChain;
  s.px = px;
  s.p = p;
  s.q = q;
  s.z_present = z_present;
  s.validate();
  return s;
}

JointSourceSpec JointSourceSpec::broadcast_star(double px1, std::vector<double> crossovers) {
  JointSourceSpec s;
  s.variant = SourceVariant::BroadcastStar;
  s.px1 = px1;
  s.crossovers = std::move(crossovers);
  s.validate();
  return s;
}

JointSourceSpec JointSourceSpec::markov_tree(int m, std::vector<TreeEdge> edges) {
  JointSourceSpec s;
  s.variant = SourceVariant::MarkovTree;
  s.m_vertices = m;
  s.edges = std::move(edges);
  s.validate();
  return s;
}

JointSourceSpec JointSourceSpec::generic_table(JointPmf table) {
  JointSourceSpec s;
  s.variant = SourceVariant::GenericTable;
  s.table = std::move(table);
  s.validate();
  return s;
}

JointPmf joint_pmf(const JointSourceSpec& spec) {
  spec.validate();
  JointPmf out;
  switch (spec.variant) {
    case SourceVariant::DbmsChain: {
      out.m = 2;
      out.has_z = spec.z_present;
      out.p.assign(out.tuple_count(), 0.0);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          double pxy = (x ? spec.px : 1.0 - spec.px) * (x == y ? 1.0 - spec.p : spec.p);
          if (!spec.z_present) {
            int xs[2] = {x, y};
            out.p[out.index(xs)] += pxy;
          } else {
            for (int z = 0; z < 2; ++z) {
              int xs[2] = {x, y};
              out.p[out.index(xs, z)] += pxy * (y == z ? 1.0 - spec.q : spec.q);
            }
          }
        }
      break;
    }
    case SourceVariant::BroadcastStar: {
      int m = spec.terminal_count();
      out.m = m;
      out.has_z = false;
      out.p.assign(out.tuple_count(), 0.0);
      std::vector<int> xs(m);
      for (size_t t = 0; t < out.tuple_count(); ++t) {
        for (int j = 1; j <= m; ++j) xs[j - 1] = out.bit_of(t, j);
        double w = xs[0] ? spec.px1 : 1.0 - spec.px1;
        for (int j = 2; j <= m; ++j) {
          double c = spec.crossovers[j - 2];
          w *= (xs[j - 1] == xs[0]) ? 1.0 - c : c;
        }
        out.p[t] = w;
      }
      break;
    }
    case SourceVariant::MarkovTree: {
      int m = spec.m_vertices;
      if (m > 12) throw CapacityError("MarkovTree joint_pmf: m capped at 12");
      out.m = m;
      out.has_z = false;
      out.p.assign(out.tuple_count(), 0.0);
      for (size_t t = 0; t < out.tuple_count(); ++t) {
        double w = 0.5;  // uniform root marginal; tree factorization
        for (const auto& e : spec.edges) {
          int xi = out.bit_of(t, e.i), xj = out.bit_of(t, e.j);
          w *= (xi == xj) ? 1.0 - e.p : e.p;
        }
        out.p[t] = w;
      }
      break;
    }
    case SourceVariant::GenericTable:
      out = spec.table;
      break;
  }
  out.validate(1e-9);
  return out;
}

SampleBlock sample_block(const JointSourceSpec& spec, size_t n_block, std::mt19937_64& rng) {
  if (!is_pow2(n_block)) throw StructuralError("sample_block: N must be a power of 2");
  JointPmf pmf = joint_pmf(spec);
  std::vector<double> cdf(pmf.p.size());
  std::partial_sum(pmf.p.begin(), pmf.p.end(), cdf.begin());
  cdf.back() = 1.0;

  int m = pmf.m;
  SampleBlock blk;
  blk.x.assign(m, BitVec(n_block));
  if (pmf.has_z) blk.z = BitVec(n_block);
  for (size_t i = 1; i <= n_block; ++i) {
    double u = uniform01(rng);
    size_t t = size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (t >= pmf.p.size()) t = pmf.p.size() - 1;
    for (int j = 1; j <= m; ++j)
      if (pmf.bit_of(t, j)) blk.x[j - 1].set(i, 1);
    if (pmf.has_z && pmf.z_of(t)) blk.z->set(i, 1);
  }
  return blk;
}

SampleBlock sample_block_per_edge(const JointSourceSpec& spec, size_t n_block,
                                  std::mt19937_64& rng) {
  if (spec.variant != SourceVariant::MarkovTree)
    throw StructuralError("sample_block_per_edge: MarkovTree sources only");
  spec.validate();
  if (!is_pow2(n_block)) throw StructuralError("sample_block_per_edge: N must be a power of 2");
  int m = spec.m_vertices;
  std::vector<std::vector<std::pair<int, double>>> adj(m + 1);
  for (const auto& e : spec.edges) {
    adj[e.i].push_back({e.j, e.p});
    adj[e.j].push_back({e.i, e.p});
  }
  SampleBlock blk;
  blk.x.assign(m, BitVec(n_block));
  std::vector<int> val(m + 1, -1);
  for (size_t i = 1; i <= n_block; ++i) {
    std::fill(val.begin(), val.end(), -1);
    val[1] = uniform01(rng) < 0.5 ? 0 : 1;
    std::vector<int> stack{1};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, pe] : adj[v])
        if (val[w] < 0) {
          val[w] = (uniform01(rng) < pe) ? 1 - val[v] : val[v];
          stack.push_back(w);
        }
    }
    for (int j = 1; j <= m; ++j)
      if (val[j]) blk.x[j - 1].set(i, 1);
  }
  return blk;
}

DegradeFlags degrade_check(const JointSourceSpec& spec, double tol) {
  // Chain variants are degraded by construction; no-eve sources vacuously so.
  if (spec.variant == SourceVariant::DbmsChain) return {true};
  if (!spec.has_eve()) return {true};
  JointPmf pmf = joint_pmf(spec);
  if (pmf.m != 2)
    throw StructuralError("degrade_check: X->Y->Z factorization needs exactly two terminals");
  // p(x,y,z) p(y) == p(x,y) p(y,z) for all entries
  for (int y = 0; y < 2; ++y) {
    double py = 0, pxy[2] = {0, 0}, pyz[2] = {0, 0};
    for (int x = 0; x < 2; ++x)
      for (int z = 0; z < 2; ++z) {
        int xs[2] = {x, y};
        double v = pmf.prob(xs, z);
        py += v;
        pxy[x] += v;
        pyz[z] += v;
      }
    for (int x = 0; x < 2; ++x)
      for (int z = 0; z < 2; ++z) {
        int xs[2] = {x, y};
        if (std::abs(pmf.prob(xs, z) * py - pxy[x] * pyz[z]) > tol) return {false};
      }
  }
  return {true};
}

double BitSideJoint::p_bit(int b) const {
  double s = 0;
  for (int k = 0; k < side_card; ++k) s += at(b, k);
  return s;
}

void BitSideJoint::validate(double tol) const {
  if (side_card < 1 || side_card > 16)
    throw ValidationError("BitSideJoint: side alphabet must have 1..16 symbols");
  if (pr.size() != size_t(2 * side_card)) throw ValidationError("BitSideJoint: wrong table size");
  double s = 0;
  for (double v : pr) {
    if (v < -tol) throw ValidationError("BitSideJoint: negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) throw ValidationError("BitSideJoint: pmf does not sum to 1");
}

BitSideJoint bit_side_joint(const JointPmf& pmf, int bit_terminal, SideSel side) {
  if (bit_terminal < 1 || bit_terminal > pmf.m)
    throw StructuralError("bit_side_joint: terminal out of range");
  BitSideJoint j;
  switch (side.kind) {
    case SideSel::None:
      j.side_card = 1;
      break;
    case SideSel::Terminal:
      if (side.terminal < 1 || side.terminal > pmf.m || side.terminal == bit_terminal)
        throw StructuralError("bit_side_joint: bad side terminal");
      j.side_card = 2;
      break;
    case SideSel::Eve:
      if (!pmf.has_z) throw ValidationError("bit_side_joint: source has no eavesdropper bit");
      j.side_card = 2;
      break;
  }
  j.pr.assign(2 * j.side_card, 0.0);
  for (size_t t = 0; t < pmf.tuple_count(); ++t) {
    int b = pmf.bit_of(t, bit_terminal);
    int s = 0;
    if (side.kind == SideSel::Terminal) s = pmf.bit_of(t, side.terminal);
    if (side.kind == SideSel::Eve) s = pmf.z_of(t);
    j.at(b, s) += pmf.p[t];
  }
  return j;
}

std::array<double, 4> pair_pmf(const JointPmf& pmf, int a, int b) {
  if (a < 1 || a > pmf.m || b < 1 || b > pmf.m || a == b)
    throw StructuralError("pair_pmf: bad terminal pair");
  std::array<double, 4> out{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    out[2 * pmf.bit_of(t, a) + pmf.bit_of(t, b)] += pmf.p[t];
  return out;
}

JointPmf augment_with_test_channel(const JointPmf& base,
                                   const std::array<std::array<double, 2>, 2>& pu_given_x) {
  base.validate(1e-9);
  for (int x = 0; x < 2; ++x) {
    double s = pu_given_x[x][0] + pu_given_x[x][1];
    if (std::abs(s - 1.0) > 1e-12 || pu_given_x[x][0] < 0 || pu_given_x[x][1] < 0)
      throw ValidationError("test channel rows must be distributions");
  }
  JointPmf out;
  out.m = base.m + 1;
  out.has_z = base.has_z;
  if (out.m + (out.has_z ? 1 : 0) > 8)
    throw ValidationError("augment_with_test_channel: joint alphabet capped at 8 bits");
  out.p.assign(out.tuple_count(), 0.0);
  int zbits = base.has_z ? 1 : 0;
  for (size_t t = 0; t < base.tuple_count(); ++t) {
    int x1 = base.bit_of(t, 1);
    for (int u = 0; u < 2; ++u) {
      // new tuple = (u, old bits...) with u as the new most significant bit
      size_t nt = (size_t(u) << (base.m + zbits)) | t;
      out.p[nt] = base.p[t] * pu_given_x[x1][u];
    }
  }
  return out;
}

double conditional_entropy_bits(const BitSideJoint& j) {
  double h = 0;
  for (int s = 0; s < j.side_card; ++s) {
    double p0 = j.at(0, s), p1 = j.at(1, s), ps = p0 + p1;
    if (ps <= 0) continue;
    if (p0 > 0) h += p0 * std::log2(ps / p0);
    if (p1 > 0) h += p1 * std::log2(ps / p1);
  }
  return h;
}

}  // namespace polarkey
