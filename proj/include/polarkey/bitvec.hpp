#pragma once

// Packed GF(2) bit vectors, 1-based index sets, and the source polarization
// transform G_N = [[1,0],[1,1]]^{(x)n} in natural (Kronecker) index order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarkey/errors.hpp"

namespace polarkey {

// Bit i (1-based, i in [1,n]) lives at word[(i-1)/64], bit (i-1)%64.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  static BitVec from_bits(std::span<const int> bits);
  static BitVec from_string(std::string_view zeros_ones);  // e.g. "0110"
  static BitVec from_hex(size_t n, std::string_view hex);

  size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  int get(size_t i) const {
    check_index(i);
    return (w_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1u;
  }
  void set(size_t i, int bit) {
    check_index(i);
    uint64_t m = uint64_t{1} << ((i - 1) & 63);
    if (bit)
      w_[(i - 1) >> 6] |= m;
    else
      w_[(i - 1) >> 6] &= ~m;
  }
  void flip(size_t i) {
    check_index(i);
    w_[(i - 1) >> 6] ^= uint64_t{1} << ((i - 1) & 63);
  }

  BitVec operator^(const BitVec& o) const;
  BitVec& operator^=(const BitVec& o);
  bool operator==(const BitVec& o) const;
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  BitVec concat(const BitVec& o) const;
  size_t popcount() const;
  bool all_zero() const;

  // Packs bit i at position (i-1); requires n <= 64.
  uint64_t as_u64() const;

  std::string to_string01() const;
  // Lowercase hex, most-significant bit of each byte = lowest index; the last
  // byte is zero-padded in its low bits when n is not a multiple of 8.
  std::string to_hex() const;

  std::span<const uint64_t> words() const { return w_; }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> w_;
  void check_index(size_t i) const {
    if (i < 1 || i > n_) throw StructuralError("BitVec index out of range");
  }
  friend BitVec polar_transform(const BitVec&);
};

// Sorted unique indices in [1, n_total].
struct IndexSet {
  std::vector<uint32_t> indices;  // sorted ascending, 1-based
  uint32_t n_total = 0;

  IndexSet() = default;
  IndexSet(std::vector<uint32_t> idx, uint32_t n);
  static IndexSet empty_set(uint32_t n) { return IndexSet({}, n); }
  static IndexSet full_set(uint32_t n);

  size_t size() const { return indices.size(); }
  bool contains(uint32_t i) const;
  bool is_subset_of(const IndexSet& o) const;

  IndexSet unite(const IndexSet& o) const;
  IndexSet intersect(const IndexSet& o) const;
  IndexSet subtract(const IndexSet& o) const;
  IndexSet complement() const;

  // 0/1 membership table indexed by (i-1), length n_total.
  std::vector<uint8_t> mask() const;

  bool operator==(const IndexSet& o) const = default;
};

// u = x * G_N over GF(2); length must be a power of 2. Involution.
BitVec polar_transform(const BitVec& x);

// Bits of u at the set's indices, in ascending index order.
BitVec extract(const BitVec& u, const IndexSet& s);

// Copy of u with positions s overwritten by vals (in ascending index order).
BitVec scatter(const BitVec& u, const IndexSet& s, const BitVec& vals);

// Elementwise XOR of equal-length sequences.
BitVec xor_pad(const BitVec& a, const BitVec& b);

bool is_pow2(size_t n);

}  // namespace polarkey
