#include "polarkey/bitvec.hpp"

#include <algorithm>
#include <bit>

namespace polarkey {

bool is_pow2(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

BitVec BitVec::from_bits(std::span<const int> bits) {
  BitVec v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw StructuralError("bit not in {0,1}");
    if (bits[i]) v.set(i + 1, 1);
  }
  return v;
}

BitVec BitVec::from_string(std::string_view s) {
  BitVec v(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      v.set(i + 1, 1);
    else if (s[i] != '0')
      throw StructuralError("bit string must contain only 0/1");
  }
  return v;
}

BitVec BitVec::operator^(const BitVec& o) const {
  BitVec r = *this;
  r ^= o;
  return r;
}

BitVec& BitVec::operator^=(const BitVec& o) {
  if (n_ != o.n_) throw StructuralError("xor length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

bool BitVec::operator==(const BitVec& o) const {
  return n_ == o.n_ && w_ == o.w_;
}

BitVec BitVec::concat(const BitVec& o) const {
  BitVec r(n_ + o.n_);
  for (size_t i = 1; i <= n_; ++i) r.set(i, get(i));
  for (size_t i = 1; i <= o.n_; ++i) r.set(n_ + i, o.get(i));
  return r;
}

size_t BitVec::popcount() const {
  size_t c = 0;
  for (uint64_t w : w_) c += std::popcount(w);
  return c;
}

bool BitVec::all_zero() const {
  for (uint64_t w : w_)
    if (w) return false;
  return true;
}

uint64_t BitVec::as_u64() const {
  if (n_ > 64) throw StructuralError("as_u64 requires length <= 64");
  return w_.empty() ? 0 : w_[0];
}

std::string BitVec::to_string01() const {
  std::string s(n_, '0');
  for (size_t i = 1; i <= n_; ++i)
    if (get(i)) s[i - 1] = '1';
  return s;
}

std::string BitVec::to_hex() const {
  static const char* kHex = "0123456789abcdef";
  size_t nbytes = (n_ + 7) / 8;
  std::string s;
  s.reserve(2 * nbytes);
  for (size_t b = 0; b < nbytes; ++b) {
    unsigned byte = 0;
    for (size_t j = 0; j < 8; ++j) {
      size_t idx = 8 * b + j + 1;
      if (idx <= n_ && get(idx)) byte |= 0x80u >> j;  // lowest index = MSB
    }
    s.push_back(kHex[byte >> 4]);
    s.push_back(kHex[byte & 0xf]);
  }
  return s;
}

BitVec BitVec::from_hex(size_t n, std::string_view hex) {
  size_t nbytes = (n + 7) / 8;
  if (hex.size() != 2 * nbytes)
    throw StructuralError("hex string length does not match bit length");
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return unsigned(c - '0');
    if (c >= 'a' && c <= 'f') return unsigned(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return unsigned(c - 'A' + 10);
    throw StructuralError("invalid hex digit");
  };
  BitVec v(n);
  for (size_t b = 0; b < nbytes; ++b) {
    unsigned byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
    for (size_t j = 0; j < 8; ++j) {
      size_t idx = 8 * b + j + 1;
      bool bit = (byte >> (7 - j)) & 1u;
      if (idx <= n) {
        if (bit) v.set(idx, 1);
      } else if (bit) {
        throw StructuralError("nonzero padding bits in hex string");
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Polar transform. G_N = product over h in {1,2,...,N/2} of the stage
// S_h: x[j] ^= x[j+h] for every j with (j & h) == 0 (0-based). Stages act on
// distinct Kronecker factors, so their order is irrelevant.
// ---------------------------------------------------------------------------

namespace {
constexpr uint64_t kStageMask[6] = {
    0x5555555555555555ull,  // h = 1
    0x3333333333333333ull,  // h = 2
    0x0f0f0f0f0f0f0f0full,  // h = 4
    0x00ff00ff00ff00ffull,  // h = 8
    0x0000ffff0000ffffull,  // h = 16
    0x00000000ffffffffull,  // h = 32
};
}

BitVec polar_transform(const BitVec& x) {
  size_t n = x.size();
  if (!is_pow2(n)) throw StructuralError("polar_transform: length not a power of 2");
  BitVec u = x;
  auto& w = u.w_;
  // In-word stages
  for (size_t h = 1, s = 0; h < 64 && h < n; h <<= 1, ++s)
    for (auto& word : w) word ^= (word >> h) & kStageMask[s];
  // Cross-word stages: h in words
  for (size_t hw = 1; hw * 64 < n; hw <<= 1)
    for (size_t blk = 0; blk < w.size(); blk += 2 * hw)
      for (size_t j = 0; j < hw; ++j) w[blk + j] ^= w[blk + j + hw];
  return u;
}

// ---------------------------------------------------------------------------
// IndexSet
// ---------------------------------------------------------------------------

IndexSet::IndexSet(std::vector<uint32_t> idx, uint32_t n) : indices(std::move(idx)), n_total(n) {
  std::sort(indices.begin(), indices.end());
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > n_total)
      throw StructuralError("IndexSet index out of range [1,N]");
    if (i > 0 && indices[i] == indices[i - 1])
      throw StructuralError("IndexSet indices must be unique");
  }
}

IndexSet IndexSet::full_set(uint32_t n) {
  std::vector<uint32_t> v(n);
  for (uint32_t i = 0; i < n; ++i) v[i] = i + 1;
  return IndexSet(std::move(v), n);
}

bool IndexSet::contains(uint32_t i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

bool IndexSet::is_subset_of(const IndexSet& o) const {
  return std::includes(o.indices.begin(), o.indices.end(), indices.begin(), indices.end());
}

IndexSet IndexSet::unite(const IndexSet& o) const {
  if (n_total != o.n_total) throw StructuralError("IndexSet ambient size mismatch");
  std::vector<uint32_t> r;
  std::set_union(indices.begin(), indices.end(), o.indices.begin(), o.indices.end(),
                 std::back_inserter(r));
  return IndexSet(std::move(r), n_total);
}

IndexSet IndexSet::intersect(const IndexSet& o) const {
  if (n_total != o.n_total) throw StructuralError("IndexSet ambient size mismatch");
  std::vector<uint32_t> r;
  std::set_intersection(indices.begin(), indices.end(), o.indices.begin(), o.indices.end(),
                        std::back_inserter(r));
  return IndexSet(std::move(r), n_total);
}

IndexSet IndexSet::subtract(const IndexSet& o) const {
  if (n_total != o.n_total) throw StructuralError("IndexSet ambient size mismatch");
  std::vector<uint32_t> r;
  std::set_difference(indices.begin(), indices.end(), o.indices.begin(), o.indices.end(),
                      std::back_inserter(r));
  return IndexSet(std::move(r), n_total);
}

IndexSet IndexSet::complement() const {
  std::vector<uint32_t> r;
  r.reserve(n_total - indices.size());
  size_t k = 0;
  for (uint32_t i = 1; i <= n_total; ++i) {
    if (k < indices.size() && indices[k] == i)
      ++k;
    else
      r.push_back(i);
  }
  return IndexSet(std::move(r), n_total);
}

std::vector<uint8_t> IndexSet::mask() const {
  std::vector<uint8_t> m(n_total, 0);
  for (uint32_t i : indices) m[i - 1] = 1;
  return m;
}

BitVec extract(const BitVec& u, const IndexSet& s) {
  if (s.n_total != u.size()) throw StructuralError("extract: ambient size mismatch");
  BitVec r(s.size());
  for (size_t j = 0; j < s.indices.size(); ++j)
    if (u.get(s.indices[j])) r.set(j + 1, 1);
  return r;
}

BitVec scatter(const BitVec& u, const IndexSet& s, const BitVec& vals) {
  if (s.n_total != u.size()) throw StructuralError("scatter: ambient size mismatch");
  if (vals.size() != s.size()) throw StructuralError("scatter: value length mismatch");
  BitVec r = u;
  for (size_t j = 0; j < s.indices.size(); ++j) r.set(s.indices[j], vals.get(j + 1));
  return r;
}

BitVec xor_pad(const BitVec& a, const BitVec& b) { return a ^ b; }

}  // namespace polarkey
