#pragma once

// Successive-cancellation decoding with side information and stochastic
// successive-cancellation encoding (the vector quantizer), both written
// against the natural Kronecker ordering of the polar transform.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polarkey/bitvec.hpp"
#include "polarkey/sources.hpp"

namespace polarkey {

struct FrozenMap {
  uint32_t block_len = 0;
  std::vector<std::pair<uint32_t, int>> bits;  // sorted by index, unique

  FrozenMap() = default;
  FrozenMap(uint32_t n, std::vector<std::pair<uint32_t, int>> entries);
  static FrozenMap from(const IndexSet& s, const BitVec& vals);
  // -1 where unfrozen, else the frozen bit, indexed by (i-1).
  std::vector<int8_t> table() const;
};

// MAP-per-index SC decoder: frozen positions copy the map, the rest take the
// argmax of the exact posterior given side_block and previous decisions.
// Ties decode 0. `side` holds one symbol in [0, model.side_card) per position.
BitVec sc_decode(std::span<const uint8_t> side, const FrozenMap& frozen,
                 const BitSideJoint& model);
BitVec sc_decode(const BitVec& side, const FrozenMap& frozen, const BitSideJoint& model);

// Same decisions plus the per-index posterior P(bit = 1 | past, side) that
// each decision was taken from (test/diagnostic surface).
BitVec sc_decode_traced(std::span<const uint8_t> side, const FrozenMap& frozen,
                        const BitSideJoint& model, std::vector<double>* posteriors);

// Genie-aided pass: reveal the true polarized bits and report each index's
// posterior of the true bit value.
std::vector<double> posterior_trace(const BitVec& u_true, std::span<const uint8_t> side,
                                    const BitSideJoint& model);
std::vector<double> posterior_trace(const BitVec& u_true, const BitVec& side,
                                    const BitSideJoint& model);

// Stochastic SC encoding: position labels choose where each bit comes from.
struct EncodeSets {
  IndexSet given;      // positions copied from r_bits (V_{U|X})
  IndexSet posterior;  // positions drawn from p(v | past, x-block) (H_U \ V_{U|X})
  IndexSet prior;      // positions drawn from p(v | past) only (H_U^c)
  void validate() const;  // the three sets must partition [1,N]
};

// ux_joint is the per-symbol p(u, x); the prior track uses its u-marginal.
// Returns the quantized transform-domain block V~^{1:N}.
BitVec sc_stochastic_encode(const BitVec& x_block, const BitVec& r_bits,
                            const EncodeSets& sets, const BitSideJoint& ux_joint,
                            std::mt19937_64& rng);

// Probability that the encoder emits exactly v_cand given (x_block, r_bits);
// 0 when v_cand disagrees with r_bits on the given positions. The `given`
// positions themselves contribute no factor (they are inputs, not draws).
double sc_encode_prob(const BitVec& x_block, const BitVec& v_cand, const BitVec& r_bits,
                      const EncodeSets& sets, const BitSideJoint& ux_joint);

}  // namespace polarkey
