#include "polarkey/sc.hpp"

#include <algorithm>
#include <cmath>

#include "polarkey/rng.hpp"

namespace polarkey {

namespace {

// Normalized (p(bit=0,obs), p(bit=1,obs)) message.
struct Pair {
  double q0, q1;
};

inline Pair minus_combine(Pair a, Pair b) {
  // joint of (s = a-bit ^ b-bit) with both observations; stays normalized
  return {a.q0 * b.q0 + a.q1 * b.q1, a.q0 * b.q1 + a.q1 * b.q0};
}

inline Pair plus_combine(Pair a, Pair b, int s) {
  Pair r{(s ? a.q1 : a.q0) * b.q0, (s ? a.q0 : a.q1) * b.q1};
  double t = r.q0 + r.q1;
  if (t > 0) {
    r.q0 /= t;
    r.q1 /= t;
  } else {
    // contradictory frozen evidence (e.g. corrupted seed we still must decode
    // through); fall back to an uninformative message
    r.q0 = r.q1 = 0.5;
  }
  return r;
}

// Depth-first SC pass over up to two probability tracks, natural order:
// u^{1:N} = [T(a ^ b), T(b)] for halves a, b of the source block. The left
// child works on the per-position minus-combined messages; once its span is
// decided, the inverse transform of those decisions gives s = a ^ b, and the
// right child proceeds with the plus-combined messages.
class ScPass {
 public:
  ScPass(size_t tracks, size_t n_block) : t_(tracks), n_(n_block) {
    if (!is_pow2(n_)) throw StructuralError("SC pass: block length not a power of 2");
    if (t_ < 1 || t_ > 2) throw StructuralError("SC pass: 1 or 2 tracks");
    size_t levels = 1;
    for (size_t len = n_; len > 1; len >>= 1) ++levels;
    work_.resize(levels);
    srcbits_.resize(levels);
    for (size_t l = 0, len = n_; l < levels; ++l, len >>= 1) {
      work_[l].resize(len * t_);
      srcbits_[l].resize(len);
    }
  }

  void set_leaf(size_t track, size_t pos, double q0, double q1) {
    double s = q0 + q1;
    if (s <= 0) throw StructuralError("SC pass: leaf with zero mass");
    work_[0][pos * t_ + track] = {q0 / s, q1 / s};
  }

  // decide(idx0 /*0-based*/, p1 /*per-track posterior of bit=1*/) -> 0/1
  template <typename Decide>
  BitVec run(Decide&& decide) {
    out_ = BitVec(n_);
    cursor_ = 0;
    solve(0, n_, decide);
    return out_;
  }

 private:
  size_t t_, n_;
  std::vector<std::vector<Pair>> work_;
  std::vector<std::vector<uint8_t>> srcbits_;
  BitVec out_;
  size_t cursor_ = 0;

  template <typename Decide>
  void solve(size_t lvl, size_t len, Decide& decide) {
    auto& cur = work_[lvl];
    if (len == 1) {
      double p1[2];
      for (size_t t = 0; t < t_; ++t) {
        Pair q = cur[t];
        double s = q.q0 + q.q1;
        p1[t] = s > 0 ? q.q1 / s : 0.5;
      }
      int bit = decide(cursor_, std::span<const double>(p1, t_));
      out_.set(cursor_ + 1, bit);
      ++cursor_;
      srcbits_[lvl][0] = uint8_t(bit);
      return;
    }
    size_t half = len / 2;
    auto& nxt = work_[lvl + 1];
    for (size_t j = 0; j < half; ++j)
      for (size_t t = 0; t < t_; ++t)
        nxt[j * t_ + t] = minus_combine(cur[j * t_ + t], cur[(j + half) * t_ + t]);
    solve(lvl + 1, half, decide);
    auto& sb = srcbits_[lvl];
    auto& sbn = srcbits_[lvl + 1];
    std::copy(sbn.begin(), sbn.begin() + half, sb.begin());  // s = a ^ b
    for (size_t j = 0; j < half; ++j)
      for (size_t t = 0; t < t_; ++t)
        nxt[j * t_ + t] = plus_combine(cur[j * t_ + t], cur[(j + half) * t_ + t], sb[j]);
    solve(lvl + 1, half, decide);
    for (size_t j = 0; j < half; ++j) {  // unsplit: a = s ^ b, b
      uint8_t b = sbn[j];
      sb[j + half] = b;
      sb[j] = uint8_t(sb[j] ^ b);
    }
  }
};

void load_side_leaves(ScPass& pass, size_t track, std::span<const uint8_t> side,
                      const BitSideJoint& model, size_t n) {
  model.validate(1e-9);
  if (model.side_card == 1) {
    for (size_t j = 0; j < n; ++j) pass.set_leaf(track, j, model.at(0, 0), model.at(1, 0));
    return;
  }
  if (side.size() != n) throw StructuralError("SC: side block length mismatch");
  for (size_t j = 0; j < n; ++j) {
    if (side[j] >= model.side_card) throw StructuralError("SC: side symbol out of range");
    pass.set_leaf(track, j, model.at(0, side[j]), model.at(1, side[j]));
  }
}

std::vector<uint8_t> side_from_bits(const BitVec& b) {
  std::vector<uint8_t> v(b.size());
  for (size_t i = 1; i <= b.size(); ++i) v[i - 1] = uint8_t(b.get(i));
  return v;
}

}  // namespace

FrozenMap::FrozenMap(uint32_t n, std::vector<std::pair<uint32_t, int>> entries)
    : block_len(n), bits(std::move(entries)) {
  std::sort(bits.begin(), bits.end());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i].first < 1 || bits[i].first > n)
      throw StructuralError("FrozenMap index out of range");
    if (i > 0 && bits[i].first == bits[i - 1].first)
      throw StructuralError("FrozenMap duplicate index");
    if (bits[i].second != 0 && bits[i].second != 1)
      throw StructuralError("FrozenMap bit not in {0,1}");
  }
}

FrozenMap FrozenMap::from(const IndexSet& s, const BitVec& vals) {
  if (vals.size() != s.size()) throw StructuralError("FrozenMap: value length mismatch");
  std::vector<std::pair<uint32_t, int>> e;
  e.reserve(s.size());
  for (size_t j = 0; j < s.indices.size(); ++j)
    e.push_back({s.indices[j], vals.get(j + 1)});
  return FrozenMap(s.n_total, std::move(e));
}

std::vector<int8_t> FrozenMap::table() const {
  std::vector<int8_t> t(block_len, -1);
  for (auto [i, b] : bits) t[i - 1] = int8_t(b);
  return t;
}

BitVec sc_decode_traced(std::span<const uint8_t> side, const FrozenMap& frozen,
                        const BitSideJoint& model, std::vector<double>* posteriors) {
  size_t n = frozen.block_len;
  ScPass pass(1, n);
  load_side_leaves(pass, 0, side, model, n);
  auto ftab = frozen.table();
  if (posteriors) posteriors->assign(n, 0.0);
  return pass.run([&](size_t idx, std::span<const double> p1) {
    if (posteriors) (*posteriors)[idx] = p1[0];
    if (ftab[idx] >= 0) return int(ftab[idx]);
    return p1[0] > 0.5 ? 1 : 0;
  });
}

BitVec sc_decode(std::span<const uint8_t> side, const FrozenMap& frozen,
                 const BitSideJoint& model) {
  return sc_decode_traced(side, frozen, model, nullptr);
}

BitVec sc_decode(const BitVec& side, const FrozenMap& frozen, const BitSideJoint& model) {
  auto s = side_from_bits(side);
  return sc_decode_traced(s, frozen, model, nullptr);
}

std::vector<double> posterior_trace(const BitVec& u_true, std::span<const uint8_t> side,
                                    const BitSideJoint& model) {
  size_t n = u_true.size();
  if (!is_pow2(n)) throw StructuralError("posterior_trace: length not a power of 2");
  ScPass pass(1, n);
  load_side_leaves(pass, 0, side, model, n);
  std::vector<double> post(n);
  pass.run([&](size_t idx, std::span<const double> p1) {
    int bit = u_true.get(idx + 1);
    post[idx] = bit ? p1[0] : 1.0 - p1[0];
    return bit;
  });
  return post;
}

std::vector<double> posterior_trace(const BitVec& u_true, const BitVec& side,
                                    const BitSideJoint& model) {
  auto s = side_from_bits(side);
  return posterior_trace(u_true, s, model);
}

void EncodeSets::validate() const {
  uint32_t n = given.n_total;
  if (posterior.n_total != n || prior.n_total != n)
    throw StructuralError("EncodeSets: ambient size mismatch");
  if (given.intersect(posterior).size() || given.intersect(prior).size() ||
      posterior.intersect(prior).size())
    throw StructuralError("EncodeSets: sets overlap");
  if (given.size() + posterior.size() + prior.size() != n)
    throw StructuralError("EncodeSets: sets do not cover [1,N]");
}

namespace {

BitSideJoint prior_of(const BitSideJoint& ux) {
  BitSideJoint p;
  p.side_card = 1;
  p.pr = {ux.p_bit(0), ux.p_bit(1)};
  return p;
}

// labels per 0-based index: 0 = given, 1 = posterior, 2 = prior
std::vector<uint8_t> encode_labels(const EncodeSets& sets) {
  sets.validate();
  std::vector<uint8_t> lab(sets.given.n_total, 2);
  for (uint32_t i : sets.given.indices) lab[i - 1] = 0;
  for (uint32_t i : sets.posterior.indices) lab[i - 1] = 1;
  return lab;
}

}  // namespace

BitVec sc_stochastic_encode(const BitVec& x_block, const BitVec& r_bits,
                            const EncodeSets& sets, const BitSideJoint& ux_joint,
                            std::mt19937_64& rng) {
  size_t n = x_block.size();
  if (sets.given.n_total != n) throw StructuralError("sc_stochastic_encode: size mismatch");
  if (r_bits.size() != sets.given.size())
    throw StructuralError("sc_stochastic_encode: |r_bits| != |given set|");
  auto lab = encode_labels(sets);
  ScPass pass(2, n);
  auto xs = side_from_bits(x_block);
  load_side_leaves(pass, 0, xs, ux_joint, n);
  load_side_leaves(pass, 1, {}, prior_of(ux_joint), n);
  std::vector<int8_t> rv(n, -1);
  for (size_t j = 0; j < sets.given.indices.size(); ++j)
    rv[sets.given.indices[j] - 1] = int8_t(r_bits.get(j + 1));
  return pass.run([&](size_t idx, std::span<const double> p1) {
    switch (lab[idx]) {
      case 0:
        return int(rv[idx]);
      case 1:
        return uniform01(rng) < p1[0] ? 1 : 0;
      default:
        return uniform01(rng) < p1[1] ? 1 : 0;
    }
  });
}

double sc_encode_prob(const BitVec& x_block, const BitVec& v_cand, const BitVec& r_bits,
                      const EncodeSets& sets, const BitSideJoint& ux_joint) {
  size_t n = x_block.size();
  if (v_cand.size() != n) throw StructuralError("sc_encode_prob: candidate length mismatch");
  if (r_bits.size() != sets.given.size())
    throw StructuralError("sc_encode_prob: |r_bits| != |given set|");
  auto lab = encode_labels(sets);
  ScPass pass(2, n);
  auto xs = side_from_bits(x_block);
  load_side_leaves(pass, 0, xs, ux_joint, n);
  load_side_leaves(pass, 1, {}, prior_of(ux_joint), n);
  std::vector<int8_t> rv(n, -1);
  for (size_t j = 0; j < sets.given.indices.size(); ++j)
    rv[sets.given.indices[j] - 1] = int8_t(r_bits.get(j + 1));
  double w = 1.0;
  pass.run([&](size_t idx, std::span<const double> p1) {
    int bit = v_cand.get(idx + 1);
    switch (lab[idx]) {
      case 0:
        if (bit != rv[idx]) w = 0.0;
        break;
      case 1:
        w *= bit ? p1[0] : 1.0 - p1[0];
        break;
      default:
        w *= bit ? p1[1] : 1.0 - p1[1];
        break;
    }
    return bit;
  });
  return w;
}

}  // namespace polarkey
