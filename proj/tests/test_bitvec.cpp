#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polarkey/bitvec.hpp"
#include "polarkey/rng.hpp"

using namespace polarkey;

namespace {

// Independent oracle: build G_N by Kronecker recursion and multiply.
std::vector<std::vector<int>> kron_gn(size_t n) {
  std::vector<std::vector<int>> g{{1}};
  for (size_t len = 1; len < n; len *= 2) {
    std::vector<std::vector<int>> g2(2 * len, std::vector<int>(2 * len, 0));
    for (size_t r = 0; r < len; ++r)
      for (size_t c = 0; c < len; ++c) {
        // G2 = [[1,0],[1,1]]: blocks (1,1), (2,1), (2,2) carry G
        g2[r][c] = g[r][c];
        g2[r + len][c] = g[r][c];
        g2[r + len][c + len] = g[r][c];
      }
    g = std::move(g2);
  }
  return g;
}

BitVec matmul_oracle(const BitVec& x) {
  size_t n = x.size();
  auto g = kron_gn(n);
  BitVec u(n);
  for (size_t c = 0; c < n; ++c) {
    int acc = 0;
    for (size_t r = 0; r < n; ++r) acc ^= x.get(r + 1) & g[r][c];
    if (acc) u.set(c + 1, 1);
  }
  return u;
}

}  // namespace

TEST_CASE("transform basics") {
  CHECK(polar_transform(BitVec(8)) == BitVec(8));  // linearity: zero maps to zero
  CHECK(polar_transform(BitVec::from_string("10")) == BitVec::from_string("10"));
  CHECK(polar_transform(BitVec::from_string("01")) == BitVec::from_string("11"));
  CHECK_THROWS_AS(polar_transform(BitVec(3)), StructuralError);
  CHECK_THROWS_AS(polar_transform(BitVec(0)), StructuralError);
}

TEST_CASE("transform matches the Kronecker-matrix oracle exhaustively for N <= 16") {
  for (size_t n : {1u, 2u, 4u, 8u, 16u}) {
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
      BitVec v(n);
      for (size_t i = 0; i < n; ++i)
        if ((x >> i) & 1) v.set(i + 1, 1);
      REQUIRE(polar_transform(v) == matmul_oracle(v));
    }
  }
}

TEST_CASE("involution and linearity on random vectors up to 2^14") {
  auto rng = make_stream(42, "bitvec");
  for (size_t n : {32u, 64u, 128u, 4096u, 16384u}) {
    for (int t = 0; t < 20; ++t) {
      BitVec a = random_bits(n, rng), b = random_bits(n, rng);
      CHECK(polar_transform(polar_transform(a)) == a);
      CHECK(polar_transform(a ^ b) == (polar_transform(a) ^ polar_transform(b)));
    }
  }
}

TEST_CASE("transform matches oracle on random vectors at larger N") {
  auto rng = make_stream(43, "bitvec-oracle");
  for (size_t n : {32u, 128u}) {
    for (int t = 0; t < 5; ++t) {
      BitVec a = random_bits(n, rng);
      CHECK(polar_transform(a) == matmul_oracle(a));
    }
  }
}

TEST_CASE("extract and scatter") {
  BitVec u = BitVec::from_string("1011");
  IndexSet s({1, 3}, 4);
  CHECK(extract(u, s) == BitVec::from_string("11"));
  CHECK(extract(u, IndexSet::empty_set(4)) == BitVec(0));
  CHECK(extract(u, IndexSet::full_set(4)) == u);

  CHECK(scatter(BitVec(4), IndexSet({2, 4}, 4), BitVec::from_string("11")) ==
        BitVec::from_string("0101"));
  CHECK(scatter(u, IndexSet::empty_set(4), BitVec(0)) == u);

  auto rng = make_stream(7, "scatter");
  for (int t = 0; t < 50; ++t) {
    BitVec base = random_bits(16, rng);
    std::vector<uint32_t> idx;
    for (uint32_t i = 1; i <= 16; ++i)
      if (rng() & 1) idx.push_back(i);
    IndexSet ss(idx, 16);
    BitVec vals = random_bits(ss.size(), rng);
    CHECK(extract(scatter(base, ss, vals), ss) == vals);  // round trip
  }

  CHECK_THROWS_AS(extract(u, IndexSet({1}, 8)), StructuralError);
  CHECK_THROWS_AS(scatter(u, s, BitVec(3)), StructuralError);
  CHECK_THROWS_AS(IndexSet({0}, 4), StructuralError);
  CHECK_THROWS_AS(IndexSet({5}, 4), StructuralError);
  CHECK_THROWS_AS(IndexSet({2, 2}, 4), StructuralError);
}

TEST_CASE("xor_pad") {
  BitVec a = BitVec::from_string("101"), b = BitVec::from_string("110");
  CHECK(xor_pad(a, BitVec(3)) == a);
  CHECK(xor_pad(a, a) == BitVec(3));
  CHECK(xor_pad(a, b) == BitVec::from_string("011"));
  CHECK_THROWS_AS(xor_pad(a, BitVec(4)), StructuralError);
}

TEST_CASE("index set algebra") {
  IndexSet a({1, 2, 5}, 8), b({2, 5, 7}, 8);
  CHECK(a.unite(b) == IndexSet({1, 2, 5, 7}, 8));
  CHECK(a.intersect(b) == IndexSet({2, 5}, 8));
  CHECK(a.subtract(b) == IndexSet({1}, 8));
  CHECK(a.complement() == IndexSet({3, 4, 6, 7, 8}, 8));
  CHECK(IndexSet({2, 5}, 8).is_subset_of(a));
  CHECK_FALSE(a.is_subset_of(b));
}

TEST_CASE("hex serialization convention") {
  // indices 1..8 = 1011'0000 -> 0xb0
  CHECK(BitVec::from_string("10110000").to_hex() == "b0");
  CHECK(BitVec::from_string("1").to_hex() == "80");  // padded low bits
  CHECK(BitVec::from_hex(8, "b0") == BitVec::from_string("10110000"));
  CHECK(BitVec::from_hex(1, "80") == BitVec::from_string("1"));
  CHECK_THROWS_AS(BitVec::from_hex(1, "c0"), StructuralError);  // nonzero padding
  CHECK_THROWS_AS(BitVec::from_hex(8, "b"), StructuralError);
  auto rng = make_stream(1, "hex");
  for (int t = 0; t < 50; ++t) {
    BitVec v = random_bits(1 + (rng() % 77), rng);
    CHECK(BitVec::from_hex(v.size(), v.to_hex()) == v);
  }
}
