#pragma once

// Test-side enumeration sweeps: exact joint histograms for the chained
// two-party schemes at small N, independent of the library's own exact
// backends wherever they serve as an oracle for it.

#include "polarkey/metrics.hpp"
#include "polarkey/protocols.hpp"
#include "polarkey/sources.hpp"

namespace pktest {

using namespace polarkey;

inline BitVec u32v(uint32_t v, size_t n) {
  BitVec b(n);
  for (size_t i = 0; i < n; ++i)
    if ((v >> i) & 1u) b.set(i + 1, 1);
  return b;
}

// k = 1 sweep of the rate-unlimited scheme: components
// [0] = U[V\H] (key ++ next-seed material), [1] = M = F ++ (F' ^ seed),
// [2] = Z block (width 0 without an eavesdropper).
inline FlatHist model1_block_joint(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                   size_t n) {
  JointPmf pmf = joint_pmf(spec);
  bool hz = pmf.has_z;
  const IndexSet &V = sets.at("V"), &H = sets.at("H"), &F = sets.at("F"), &Fp = sets.at("Fp");
  IndexSet VnoH = V.subtract(H);
  std::array<double, 4> pxz{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    pxz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];
  int sbits = int(Fp.size());
  FlatHist out({int(VnoH.size()), int(F.size() + Fp.size()), hz ? int(n) : 0});
  for (uint32_t x = 0; x < (1u << n); ++x) {
    BitVec u = polar_transform(u32v(x, n));
    uint64_t kk = extract(u, VnoH).as_u64();
    uint64_t fb = extract(u, F).as_u64();
    uint64_t fpb = extract(u, Fp).as_u64();
    for (uint32_t z = 0; z < (hz ? (1u << n) : 1u); ++z) {
      double w = 1;
      for (size_t j = 0; j < n; ++j)
        w *= hz ? pxz[2 * ((x >> j) & 1u) + ((z >> j) & 1u)]
                : pxz[2 * ((x >> j) & 1u)] + pxz[2 * ((x >> j) & 1u) + 1];
      if (w == 0) continue;
      for (uint64_t seed = 0; seed < (1u << sbits); ++seed) {
        uint64_t m = fb | ((fpb ^ seed) << F.size());
        uint64_t comps[3] = {kk, m, z};
        out.add(comps, w * std::exp2(-double(sbits)));
      }
    }
  }
  out.normalize();
  return out;
}

// k = 2 sweep: components [K1, Kt1, K2, Kt2, M1, M2, Z1, Z2].
inline FlatHist model1_two_block_joint(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                       size_t n) {
  JointPmf pmf = joint_pmf(spec);
  if (!pmf.has_z) throw StructuralError("two-block sweep expects an eavesdropper bit");
  const IndexSet &K = sets.at("K"), &A = sets.at("A"), &F = sets.at("F"), &Fp = sets.at("Fp");
  std::array<double, 4> pxz{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    pxz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];
  int sbits = int(Fp.size());
  int mbits = int(F.size() + Fp.size());
  FlatHist out({int(K.size()), int(A.size()), int(K.size()), int(A.size()), mbits, mbits,
                int(n), int(n)});
  size_t space = size_t{1} << n;
  std::vector<double> wtab(space * space);
  for (size_t x = 0; x < space; ++x)
    for (size_t z = 0; z < space; ++z) {
      double w = 1;
      for (size_t j = 0; j < n; ++j) w *= pxz[2 * ((x >> j) & 1u) + ((z >> j) & 1u)];
      wtab[x * space + z] = w;
    }
  for (size_t x1 = 0; x1 < space; ++x1)
    for (size_t x2 = 0; x2 < space; ++x2) {
      BitVec u1 = polar_transform(u32v(uint32_t(x1), n));
      BitVec u2 = polar_transform(u32v(uint32_t(x2), n));
      uint64_t k1 = extract(u1, K).as_u64(), kt1 = extract(u1, A).as_u64();
      uint64_t k2 = extract(u2, K).as_u64(), kt2 = extract(u2, A).as_u64();
      uint64_t f1 = extract(u1, F).as_u64(), fp1 = extract(u1, Fp).as_u64();
      uint64_t f2 = extract(u2, F).as_u64(), fp2 = extract(u2, Fp).as_u64();
      for (uint64_t seed = 0; seed < (1u << sbits); ++seed) {
        uint64_t m1 = f1 | ((fp1 ^ seed) << F.size());
        uint64_t m2 = f2 | ((fp2 ^ kt1) << F.size());  // block 2 padded by block 1's seed part
        for (size_t z1 = 0; z1 < space; ++z1) {
          double w1 = wtab[x1 * space + z1];
          if (w1 == 0) continue;
          for (size_t z2 = 0; z2 < space; ++z2) {
            double w = w1 * wtab[x2 * space + z2] * std::exp2(-double(sbits));
            if (w == 0) continue;
            uint64_t comps[8] = {k1, kt1, k2, kt2, m1, m2, z1, z2};
            out.add(comps, w);
          }
        }
      }
    }
  out.normalize();
  return out;
}

// Quantized-scheme sweep at k = 1 with the encoder enumerated exactly:
// components [0] = V~[sel], [1] = Z block. R1 is pinned to V~[V_UX].
inline FlatHist quantized_sel_vs_z(const JointSourceSpec& spec, const TestChannel& tc,
                                   const IndexSetBundle& sets, size_t n,
                                   const IndexSet& sel) {
  JointPmf pmf = joint_pmf(spec);
  if (!pmf.has_z) throw StructuralError("sweep expects an eavesdropper bit");
  const IndexSet &VUX = sets.at("V_UX"), &HU = sets.at("H_U");
  EncodeSets enc{VUX, HU.subtract(VUX), HU.complement()};
  BitSideJoint ux = encode_joint_model2(spec, tc);
  std::array<double, 4> pxz{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    pxz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];
  double px[2] = {pxz[0] + pxz[1], pxz[2] + pxz[3]};
  FlatHist out({int(sel.size()), int(n)});
  size_t space = size_t{1} << n;
  for (size_t x = 0; x < space; ++x) {
    BitVec xb = u32v(uint32_t(x), n);
    double wx = 1;
    for (size_t j = 0; j < n; ++j) wx *= px[(x >> j) & 1u];
    if (wx == 0) continue;
    for (size_t v = 0; v < space; ++v) {
      BitVec vb = u32v(uint32_t(v), n);
      double pv = sc_encode_prob(xb, vb, extract(vb, VUX), enc, ux);
      if (pv == 0) continue;
      double w0 = wx * pv * std::exp2(-double(VUX.size()));
      uint64_t svals = extract(vb, sel).as_u64();
      for (size_t z = 0; z < space; ++z) {
        double wz = 1;
        for (size_t j = 0; j < n; ++j) {
          int xj = int(x >> j) & 1;
          wz *= pxz[2 * xj + ((z >> j) & 1u)] / px[xj];
        }
        uint64_t comps[2] = {svals, uint64_t(z)};
        out.add(comps, w0 * wz);
      }
    }
  }
  out.normalize();
  return out;
}

}  // namespace pktest
