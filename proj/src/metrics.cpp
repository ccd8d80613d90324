#include "polarkey/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "polarkey/protocols.hpp"
#include "polarkey/rng.hpp"
#include "polarkey/sc.hpp"

namespace polarkey {

FlatHist::FlatHist(std::vector<int> w) : widths(std::move(w)) {
  int total = total_bits();
  if (total > 26) throw CapacityError("FlatHist: histogram exceeds the 26-bit budget");
  p.assign(size_t{1} << total, 0.0);
}

int FlatHist::total_bits() const {
  int t = 0;
  for (int w : widths) t += w;
  return t;
}

void FlatHist::add(std::span<const uint64_t> comps, double weight) {
  if (comps.size() != widths.size()) throw StructuralError("FlatHist::add: arity mismatch");
  size_t idx = 0;
  for (size_t c = 0; c < comps.size(); ++c) {
    if (widths[c] < 64 && comps[c] >> widths[c])
      throw StructuralError("FlatHist::add: component exceeds its width");
    idx = (idx << widths[c]) | comps[c];
  }
  p[idx] += weight;
}

double FlatHist::sum() const {
  double s = 0;
  for (double v : p) s += v;
  return s;
}

void FlatHist::normalize() {
  double s = sum();
  if (s <= 0) throw StructuralError("FlatHist::normalize: empty histogram");
  for (double& v : p) v /= s;
}

FlatHist FlatHist::marginal(std::span<const size_t> keep) const {
  std::vector<int> w;
  for (size_t c : keep) w.push_back(widths.at(c));
  FlatHist out(w);
  // precompute shifts of each component in the flat index
  std::vector<int> shift(widths.size());
  int acc = 0;
  for (size_t c = widths.size(); c-- > 0;) {
    shift[c] = acc;
    acc += widths[c];
  }
  for (size_t idx = 0; idx < p.size(); ++idx) {
    if (p[idx] == 0) continue;
    size_t oidx = 0;
    for (size_t c : keep)
      oidx = (oidx << widths[c]) | ((idx >> shift[c]) & ((size_t{1} << widths[c]) - 1));
    out.p[oidx] += p[idx];
  }
  return out;
}

double entropy_bits(std::span<const double> p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

double FlatHist::entropy_bits() const { return polarkey::entropy_bits(p); }

double FlatHist::mutual_information_bits(size_t n_left) const {
  if (n_left == 0 || n_left >= widths.size())
    throw StructuralError("mutual_information_bits: bad split");
  std::vector<size_t> left, right;
  for (size_t c = 0; c < widths.size(); ++c) (c < n_left ? left : right).push_back(c);
  double h1 = marginal(left).entropy_bits();
  double h2 = marginal(right).entropy_bits();
  return h1 + h2 - entropy_bits();
}

double variational_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw StructuralError("variational_distance: support mismatch");
  double v = 0;
  for (size_t i = 0; i < p.size(); ++i) v += std::abs(p[i] - q[i]);
  return v;
}

double kl_divergence_bits(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw StructuralError("kl_divergence: support mismatch");
  double d = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    if (q[i] <= 0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

double ErrorRate::sigma() const {
  if (trials == 0) return 0;
  return std::sqrt(std::max(rate * (1 - rate), 1e-12) / double(trials));
}

ErrorRate wilson_interval(uint64_t failures, uint64_t trials) {
  ErrorRate r;
  r.failures = failures;
  r.trials = trials;
  if (trials == 0) return r;
  double z = 1.959963984540054;  // 95%
  double nn = double(trials), ph = double(failures) / nn;
  double denom = 1 + z * z / nn;
  double center = (ph + z * z / (2 * nn)) / denom;
  double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / denom;
  r.rate = ph;
  r.lo = std::max(0.0, center - half);
  r.hi = std::min(1.0, center + half);
  return r;
}

ErrorRate empirical_error_rate(const std::function<bool(std::mt19937_64&)>& trial_fails,
                               uint64_t trials, std::mt19937_64& rng) {
  if (trials < 1) throw StructuralError("empirical_error_rate: trials >= 1");
  uint64_t fails = 0;
  for (uint64_t t = 0; t < trials; ++t)
    if (trial_fails(rng)) ++fails;
  return wilson_interval(fails, trials);
}

namespace {

uint64_t hash_bits(const BitVec& b) {
  uint64_t h = 0xcbf29ce484222325ull ^ b.size();
  for (uint64_t w : b.words()) {
    h ^= w;
    h *= 0x100000001b3ull;
    h = splitmix64(h);
  }
  return h;
}

}  // namespace

SecrecyReport plug_in_secrecy(const std::vector<std::pair<BitVec, BitVec>>& key_view_pairs,
                              int bucket_bits) {
  if (key_view_pairs.empty()) throw StructuralError("plug_in_secrecy: no samples");
  if (bucket_bits < 1 || bucket_bits > 24) throw StructuralError("plug_in_secrecy: bucket_bits");
  uint64_t mask = (uint64_t{1} << bucket_bits) - 1;
  size_t key_len = key_view_pairs[0].first.size();
  bool raw_keys = key_len <= size_t(bucket_bits);
  std::unordered_map<uint64_t, double> joint, pk, pv;
  double n = double(key_view_pairs.size());
  for (const auto& [k, v] : key_view_pairs) {
    uint64_t kb = raw_keys ? k.as_u64() : (hash_bits(k) & mask);
    uint64_t vb = hash_bits(v) & mask;
    joint[(kb << 32) | vb] += 1.0 / n;
    pk[kb] += 1.0 / n;
    pv[vb] += 1.0 / n;
  }
  double mi = 0;
  for (auto& [kv, pj] : joint) {
    double a = pk[kv >> 32], b = pv[kv & 0xffffffffull];
    mi += pj * std::log2(pj / (a * b));
  }
  double hk = 0;
  for (auto& [kb, pp] : pk) hk -= pp * std::log2(pp);
  SecrecyReport rep;
  rep.method = "plug_in";
  rep.count = key_view_pairs.size();
  rep.leakage_bits = std::max(0.0, mi);
  rep.uniformity_bits = std::max(0.0, double(key_len) - hk);
  return rep;
}

double delta_n(size_t n_block, double beta) {
  return std::exp2(-std::pow(double(n_block), beta));
}

namespace {
const double kSqrt2Log2 = std::sqrt(2.0 * std::log(2.0));
double xlog_shape(double x, size_t n_block) {
  // x * (N - log2 x), the recurring bound shape
  return x * (double(n_block) - std::log2(x));
}
}  // namespace

double delta_star(size_t n_block, double beta) {
  // -3 sqrt(2N ln2) * N * 2^{-N^beta/2} * log2(3 sqrt(2N ln2) * 2^{-N^beta/2})
  double t = 3.0 * std::sqrt(2.0 * double(n_block) * std::log(2.0)) *
             std::exp2(-std::pow(double(n_block), beta) / 2.0);
  return -double(n_block) * t * std::log2(t);
}

double delta1(size_t n_block, double beta) {
  double v = 2.0 * kSqrt2Log2 * std::sqrt(double(n_block) * delta_n(n_block, beta));
  return xlog_shape(v, n_block);
}

double delta2(size_t n_block, double beta) {
  double v = 6.0 * kSqrt2Log2 * std::sqrt(double(n_block) * delta_n(n_block, beta));
  return xlog_shape(v, n_block);
}

double delta3(size_t n_block, double beta) {
  double v = 3.0 * kSqrt2Log2 * std::sqrt(double(n_block) * delta_n(n_block, beta));
  return xlog_shape(v, n_block);
}

// ---------------------------------------------------------------------------
// Exact protocol distributions
// ---------------------------------------------------------------------------

double ExactJoint::leakage_bits() const {
  if (transcript_bits + eve_bits == 0) return 0.0;
  return std::max(0.0, hist.mutual_information_bits(1));
}

double ExactJoint::uniformity_bits() const {
  std::array<size_t, 1> keep{0};
  FlatHist km = hist.marginal(keep);
  return std::max(0.0, double(key_bits) - km.entropy_bits());
}

namespace {

uint32_t transform_u32_m(uint32_t x, size_t n) {
  for (size_t h = 1; h < n; h <<= 1) {
    uint32_t mask = 0;
    for (size_t j = 0; j < n; ++j)
      if (!(j & h)) mask |= 1u << j;
    x ^= (x >> h) & mask;
  }
  return x;
}

uint64_t gather_u32(uint32_t word, const IndexSet& s) {
  uint64_t out = 0;
  for (size_t j = 0; j < s.indices.size(); ++j)
    out |= uint64_t((word >> (s.indices[j] - 1)) & 1u) << j;
  return out;
}

void check_budget(int bits, const char* what) {
  if (bits > 26)
    throw CapacityError(std::string("exact_protocol_distribution: ") + what +
                        " exceeds the 26-bit enumeration budget; use the empirical path");
}

BitVec bitvec_of_u32(uint32_t v, size_t n) {
  BitVec b(n);
  for (size_t i = 0; i < n; ++i)
    if ((v >> i) & 1u) b.set(i + 1, 1);
  return b;
}

// Model 1 / Prop-2 / Prop-3 instances: K and M are per-block functions of the
// encoder block; Z is enumerated jointly with X.
ExactJoint exact_model1(const JointSourceSpec& spec, const IndexSetBundle& sets, size_t n,
                        size_t k) {
  JointPmf pmf = joint_pmf(spec);
  bool hz = pmf.has_z;
  const IndexSet &A = sets.at("A"), &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp");
  int seed_bits = int(Fp.size());
  int enum_bits = int(k * n) * (hz ? 2 : 1) + seed_bits;
  check_budget(enum_bits, "model1 source+seed enumeration");

  // per-symbol p(x, z) marginal
  std::array<double, 4> pxz{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    pxz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];

  size_t xspace = size_t{1} << n;
  // weight table over (x block, z block)
  std::vector<double> wx(hz ? xspace * xspace : xspace);
  for (size_t x = 0; x < xspace; ++x) {
    if (!hz) {
      double w = 1;
      for (size_t j = 0; j < n; ++j) w *= pxz[2 * ((x >> j) & 1u)] + pxz[2 * ((x >> j) & 1u) + 1];
      wx[x] = w;
    } else {
      for (size_t z = 0; z < xspace; ++z) {
        double w = 1;
        for (size_t j = 0; j < n; ++j) w *= pxz[2 * ((x >> j) & 1u) + ((z >> j) & 1u)];
        wx[x * xspace + z] = w;
      }
    }
  }
  // per-x extracts
  std::vector<uint64_t> exK(xspace), exA(xspace), exF(xspace), exFp(xspace);
  for (size_t x = 0; x < xspace; ++x) {
    uint32_t u = transform_u32_m(uint32_t(x), n);
    exK[x] = gather_u32(u, K);
    exA[x] = gather_u32(u, A);
    exF[x] = gather_u32(u, F);
    exFp[x] = gather_u32(u, Fp);
  }

  int kb = int(k * K.size());
  int mb = int(k * (F.size() + Fp.size()));
  int zb = hz ? int(k * n) : 0;
  ExactJoint out;
  out.key_bits = kb;
  out.transcript_bits = mb;
  out.eve_bits = zb;
  out.hist = FlatHist({kb, mb, zb});

  double seed_w = std::exp2(-double(seed_bits));
  std::vector<size_t> xr(k, 0), zr(k, 0);
  // odometer over k block realizations (x and, when present, z), then seeds
  size_t blocks_total = 1;
  for (size_t i = 0; i < k; ++i) blocks_total *= hz ? xspace * xspace : xspace;
  for (size_t code = 0; code < blocks_total; ++code) {
    size_t c = code;
    double w = 1;
    for (size_t i = 0; i < k; ++i) {
      size_t cell = c % (hz ? xspace * xspace : xspace);
      c /= (hz ? xspace * xspace : xspace);
      xr[i] = hz ? cell / xspace : cell;
      zr[i] = hz ? cell % xspace : 0;
      w *= wx[cell];
    }
    if (w == 0) continue;
    for (uint64_t seed = 0; seed < (uint64_t{1} << seed_bits); ++seed) {
      uint64_t kbits = 0, mbits = 0, zbits = 0;
      uint64_t prev = seed;
      for (size_t i = 0; i < k; ++i) {
        kbits |= exK[xr[i]] << (i * K.size());
        uint64_t mi = exF[xr[i]] | ((exFp[xr[i]] ^ prev) << F.size());
        mbits |= mi << (i * (F.size() + Fp.size()));
        if (hz) zbits |= uint64_t(zr[i]) << (i * n);
        prev = exA[xr[i]];
      }
      uint64_t comps[3] = {kbits, mbits, zbits};
      out.hist.add(comps, w * seed_w);
    }
  }
  out.hist.normalize();
  return out;
}

ExactJoint exact_model3_star(const JointSourceSpec& spec, const IndexSetBundle& sets, size_t n) {
  JointPmf pmf = joint_pmf(spec);
  const IndexSet &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp");
  int seed_bits = int(Fp.size());
  check_budget(int(n) + seed_bits, "model3-star enumeration");
  double p1 = 0;  // P(X_1 = 1)
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    if (pmf.bit_of(t, 1)) p1 += pmf.p[t];
  size_t xspace = size_t{1} << n;
  ExactJoint out;
  out.key_bits = int(K.size());
  out.transcript_bits = int(F.size() + Fp.size());
  out.eve_bits = 0;
  out.hist = FlatHist({out.key_bits, out.transcript_bits, 0});
  double seed_w = std::exp2(-double(seed_bits));
  for (size_t x = 0; x < xspace; ++x) {
    double w = 1;
    for (size_t j = 0; j < n; ++j) w *= ((x >> j) & 1u) ? p1 : 1 - p1;
    if (w == 0) continue;
    uint32_t u = transform_u32_m(uint32_t(x), n);
    uint64_t kbits = gather_u32(u, K), fb = gather_u32(u, F), fpb = gather_u32(u, Fp);
    for (uint64_t seed = 0; seed < (uint64_t{1} << seed_bits); ++seed) {
      uint64_t comps[3] = {kbits, fb | ((fpb ^ seed) << F.size()), 0};
      out.hist.add(comps, w * seed_w);
    }
  }
  out.hist.normalize();
  return out;
}

ExactJoint exact_model4(const JointSourceSpec& spec, const IndexSetBundle& sets, size_t n) {
  JointPmf pmf = joint_pmf(spec);
  int m = pmf.m;
  check_budget(int(size_t(m) * n), "model4 tuple enumeration");
  const IndexSet& K = sets.at("K");
  std::vector<std::pair<int, const IndexSet*>> pubs;  // (vertex, set) in message order
  int root = int(sets.meta.at("root"));
  for (int v = 1; v <= m; ++v)
    if (sets.has("H_" + std::to_string(v))) pubs.push_back({v, &sets.at("H_" + std::to_string(v))});
  int mb = 0;
  for (auto& [v, s] : pubs) mb += int(s->size());
  ExactJoint out;
  out.key_bits = int(K.size());
  out.transcript_bits = mb;
  out.eve_bits = 0;
  out.hist = FlatHist({out.key_bits, mb, 0});

  size_t tuples = pmf.tuple_count();
  std::vector<size_t> digit(n, 0);
  std::vector<uint32_t> xw(m + 1, 0);
  // odometer over the N tuple digits
  double w = 1;
  for (size_t j = 0; j < n; ++j) w *= pmf.p[0];
  while (true) {
    if (w > 0) {
      for (int v = 1; v <= m; ++v) {
        uint32_t xv = 0;
        for (size_t j = 0; j < n; ++j) xv |= uint32_t(pmf.bit_of(digit[j], v)) << j;
        xw[v] = transform_u32_m(xv, n);
      }
      uint64_t kbits = gather_u32(xw[root], K);
      uint64_t mbits = 0;
      int off = 0;
      for (auto& [v, s] : pubs) {
        mbits |= gather_u32(xw[v], *s) << off;
        off += int(s->size());
      }
      uint64_t comps[3] = {kbits, mbits, 0};
      out.hist.add(comps, w);
    }
    // advance odometer, maintaining the weight product incrementally
    size_t j = 0;
    for (; j < n; ++j) {
      double old = pmf.p[digit[j]];
      if (++digit[j] < tuples) {
        if (old > 0)
          w = w / old * pmf.p[digit[j]];
        else {
          w = 1;  // recompute; zero factors break the incremental product
          for (size_t jj = 0; jj < n; ++jj) w *= pmf.p[digit[jj]];
        }
        break;
      }
      digit[j] = 0;
      if (old > 0)
        w = w / old * pmf.p[0];
      else {
        w = 1;
        for (size_t jj = 0; jj < n; ++jj) w *= pmf.p[digit[jj]];
      }
    }
    if (j == n) break;
  }
  out.hist.normalize();
  return out;
}

// Rate-limited chain (and biometric generated-secret), k = 1: enumerate
// (x block, quantized block), with R1 pinned to the quantized values.
ExactJoint exact_quantized_k1(const JointSourceSpec& spec, const IndexSetBundle& sets, size_t n,
                              const TestChannel& tc, bool zero_leakage) {
  JointPmf pmf = joint_pmf(spec);
  bool hz = pmf.has_z;
  const IndexSet &F = sets.at("F"), &Fp = sets.at("Fp"), &VUX = sets.at("V_UX"),
                 &HU = sets.at("H_U");
  EncodeSets enc{VUX, HU.subtract(VUX), HU.complement()};
  BitSideJoint ux = encode_joint_model2(spec, tc);
  int r_bits = int(VUX.size());

  // secret definition differs between the two systems
  IndexSet keyset = zero_leakage ? sets.at("V_U").subtract(sets.at("H_UY")) : sets.at("K");
  const IndexSet& P = sets.at("P");
  int pad_bits = zero_leakage ? int(P.size()) : int(Fp.size());
  int kb = int(keyset.size()) + (zero_leakage ? int(F.size()) : 0);
  int mb = r_bits + (zero_leakage ? int(P.size()) : int(F.size() + Fp.size()));
  int zb = hz ? int(n) : 0;
  check_budget(int(2 * n) + pad_bits + zb, "quantized-scheme enumeration");

  ExactJoint out;
  out.key_bits = kb;
  out.transcript_bits = mb;
  out.eve_bits = zb;
  out.hist = FlatHist({kb, mb, zb});

  // per-symbol p(x) and p(z|x)
  std::array<double, 4> pxz{0, 0, 0, 0};
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    pxz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];
  double px[2] = {pxz[0] + pxz[1], pxz[2] + pxz[3]};

  size_t space = size_t{1} << n;
  double rw = std::exp2(-double(r_bits));
  double padw = std::exp2(-double(pad_bits));
  std::vector<double> pz_given_x(hz ? space : 0);
  for (size_t x = 0; x < space; ++x) {
    double wx = 1;
    for (size_t j = 0; j < n; ++j) wx *= px[(x >> j) & 1u];
    if (wx == 0) continue;
    if (hz)
      for (size_t z = 0; z < space; ++z) {
        double wz = 1;
        for (size_t j = 0; j < n; ++j) {
          int xj = (x >> j) & 1u;
          wz *= pxz[2 * xj + ((z >> j) & 1u)] / px[xj];
        }
        pz_given_x[z] = wz;
      }
    BitVec xb = bitvec_of_u32(uint32_t(x), n);
    for (size_t v = 0; v < space; ++v) {
      BitVec vb = bitvec_of_u32(uint32_t(v), n);
      BitVec r1 = extract(vb, VUX);
      double pv = sc_encode_prob(xb, vb, r1, enc, ux);
      if (pv == 0) continue;
      double w0 = wx * pv * rw * padw;
      uint64_t kbits = extract(vb, keyset).as_u64();
      if (zero_leakage) kbits |= extract(vb, F).as_u64() << keyset.size();
      uint64_t r1b = r1.as_u64();
      uint64_t helper = zero_leakage
                            ? extract(vb, P).as_u64()
                            : (extract(vb, F).as_u64() |
                               (extract(vb, Fp).as_u64() << F.size()));
      for (uint64_t pad = 0; pad < (uint64_t{1} << pad_bits); ++pad) {
        // zero-leakage pads the whole helper word; otherwise only the F' part
        uint64_t masked = zero_leakage ? helper ^ pad : helper ^ (pad << F.size());
        uint64_t mbits = r1b | (masked << r_bits);
        if (!hz) {
          uint64_t comps[3] = {kbits, mbits, 0};
          out.hist.add(comps, w0);
        } else {
          for (size_t z = 0; z < space; ++z) {
            if (pz_given_x[z] == 0) continue;
            uint64_t comps[3] = {kbits, mbits, uint64_t(z)};
            out.hist.add(comps, w0 * pz_given_x[z]);
          }
        }
      }
    }
  }
  out.hist.normalize();
  return out;
}

ExactJoint exact_model3_tri(const JointSourceSpec& spec, const IndexSetBundle& sets, size_t n,
                            size_t k) {
  JointPmf pmf = joint_pmf(spec);
  const IndexSet &K = sets.at("K"), &Kbar = sets.at("Kbar"), &FM = sets.at("F_M"),
                 &F21 = sets.at("F_21"), &Fp = sets.at("Fp"), &F23 = sets.at("F_23");
  IndexSet KuFM = K.unite(FM);
  IndexSet F2set = F21.subtract(FM);
  IndexSet Fbar_set = F23.subtract(F21);
  int seed_bits = int(Fp.size());
  check_budget(int(k * n) + int(k) * seed_bits, "model3-tri enumeration");
  // K and M depend only on terminal 2's blocks and the seeds
  double p2 = 0;
  for (size_t t = 0; t < pmf.tuple_count(); ++t)
    if (pmf.bit_of(t, 2)) p2 += pmf.p[t];

  int kb = int(K.size() + (k - 1) * KuFM.size());
  int mb = int(F21.size() + Fp.size()) +
           int((k - 1) * (FM.size() + F2set.size() + Fp.size())) + int(Fbar_set.size());
  ExactJoint out;
  out.key_bits = kb;
  out.transcript_bits = mb;
  out.eve_bits = 0;
  out.hist = FlatHist({kb, mb, 0});

  size_t space = size_t{1} << n;
  size_t blocks_total = 1;
  for (size_t i = 0; i < k; ++i) blocks_total *= space;
  double seed_w = std::exp2(-double(int(k) * seed_bits));
  std::vector<uint32_t> uu(k);
  std::vector<uint64_t> seeds(k);
  for (size_t code = 0; code < blocks_total; ++code) {
    size_t c = code;
    double w = 1;
    for (size_t i = 0; i < k; ++i) {
      uint32_t x2 = uint32_t(c % space);
      c /= space;
      for (size_t j = 0; j < n; ++j) w *= ((x2 >> j) & 1u) ? p2 : 1 - p2;
      uu[i] = transform_u32_m(x2, n);
    }
    if (w == 0) continue;
    size_t seed_total = size_t{1} << (int(k) * seed_bits);
    for (size_t sc = 0; sc < seed_total; ++sc) {
      size_t s = sc;
      for (size_t i = 0; i < k; ++i) {
        seeds[i] = s & ((uint64_t{1} << seed_bits) - 1);
        s >>= seed_bits;
      }
      uint64_t kbits = gather_u32(uu[0], K);
      int koff = int(K.size());
      uint64_t mbits = gather_u32(uu[0], F21) |
                       ((gather_u32(uu[0], Fp) ^ seeds[0]) << F21.size());
      int moff = int(F21.size() + Fp.size());
      for (size_t i = 1; i < k; ++i) {
        kbits |= gather_u32(uu[i], KuFM) << koff;
        koff += int(KuFM.size());
        uint64_t kbar_prev = gather_u32(uu[i - 1], Kbar);
        uint64_t mi = (gather_u32(uu[i], FM) ^ kbar_prev) |
                      (gather_u32(uu[i], F2set) << FM.size()) |
                      ((gather_u32(uu[i], Fp) ^ seeds[i]) << (FM.size() + F2set.size()));
        mbits |= mi << moff;
        moff += int(FM.size() + F2set.size() + Fp.size());
        if (i + 1 == k) {
          mbits |= gather_u32(uu[i], Fbar_set) << moff;
          moff += int(Fbar_set.size());
        }
      }
      uint64_t comps[3] = {kbits, mbits, 0};
      out.hist.add(comps, w * seed_w);
    }
  }
  out.hist.normalize();
  return out;
}

}  // namespace

ExactJoint exact_protocol_distribution(const std::string& model, const JointSourceSpec& spec,
                                       const IndexSetBundle& sets, size_t n_block, size_t k,
                                       const TestChannel* tc) {
  if (model == "model1") return exact_model1(spec, sets, n_block, k);
  if (model == "model3-star") {
    if (k != 1) throw StructuralError("model3-star runs a single block");
    return exact_model3_star(spec, sets, n_block);
  }
  if (model == "model4") {
    if (k != 1) throw StructuralError("model4 runs a single block");
    return exact_model4(spec, sets, n_block);
  }
  if (model == "model3-tri") return exact_model3_tri(spec, sets, n_block, k);
  if (model == "model2" || model == "bio-gen" || model == "bio-zero") {
    if (!tc) throw StructuralError("quantized schemes need a test channel");
    if (k != 1)
      throw CapacityError(
          "exact quantized-scheme enumeration supports k = 1; use the empirical path");
    return exact_quantized_k1(spec, sets, n_block, *tc, model == "bio-zero");
  }
  throw ValidationError("exact_protocol_distribution: unknown model " + model);
}

}  // namespace polarkey
