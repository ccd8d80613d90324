#pragma once

// The protocol state machines: two-party chained schemes (rate-unlimited and
// rate-limited/quantized), broadcast star, three-terminal chained scheme,
// Markov tree, and the two biometric systems. Each runner is a pure function
// of its inputs; sampling convenience wrappers draw the inputs from an rng.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polarkey/bitvec.hpp"
#include "polarkey/metrics.hpp"
#include "polarkey/polarization.hpp"
#include "polarkey/sc.hpp"
#include "polarkey/sources.hpp"

namespace polarkey {

struct PublicMessage {
  int block = 0;            // 1-based; 0 for pre-block messages (R1)
  std::string sender;
  std::string label;        // "F", "F'", "F'+pad", "R1", "F1+pad", "F2", "Fbar"
  BitVec bits;
};

struct Transcript {
  std::vector<PublicMessage> messages;
  size_t total_bits() const;
  const BitVec& find(int block, std::string_view label) const;
  BitVec concat_all() const;
};

struct RateAccounting {
  uint64_t key_bits = 0, seed_bits = 0, public_bits = 0, randomness_bits = 0;
  uint32_t n_block = 0, k_blocks = 0;
  double key_rate() const { return double(key_bits) / (double(n_block) * k_blocks); }
  double seed_rate() const { return double(seed_bits) / (double(n_block) * k_blocks); }
  double public_rate() const { return double(public_bits) / (double(n_block) * k_blocks); }
};

struct BlockDiag {
  std::map<std::string, bool> decode_ok;  // per decoding terminal
};

struct ProtocolReport {
  std::string model;
  std::map<std::string, BitVec> keys;  // per terminal, blocks concatenated
  bool agreement = true;
  Transcript transcript;
  RateAccounting rates;
  std::vector<BlockDiag> blocks;
  std::vector<BitVec> z_blocks;            // eavesdropper's source view
  std::vector<BitVec> encoder_key_blocks;  // per-block keys at the encoder
  // reclaimable seed bits in the last block (no next block to seed)
  uint64_t reclaimable_last_block_bits = 0;
};

// ---- Model 1: two-party, rate-unlimited public communication --------------

struct Model1Inputs {
  std::vector<SampleBlock> blocks;  // one per chained block
  BitVec seed;                      // |Fp| bits
};
Model1Inputs model1_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                size_t n_block, size_t k, std::mt19937_64& rng);
ProtocolReport model1_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                          const Model1Inputs& in);
// Decoder side alone (replay / corrupt-seed harness).
struct Model1BobResult {
  BitVec key;
  std::vector<BitVec> decoded_u;
  std::vector<BitVec> frozen_values;  // the H_{X|Y} values fed to the decoder
};
Model1BobResult model1_bob(const JointSourceSpec& spec, const IndexSetBundle& sets,
                           const Transcript& transcript, const std::vector<BitVec>& y_blocks,
                           const BitVec& seed);

// ---- Model 2: two-party, rate-limited (quantized) --------------------------

struct Model2Inputs {
  std::vector<SampleBlock> blocks;
  BitVec seed;                   // |Fp| bits
  BitVec r1;                     // |V_UX| bits, transmitted publicly
  std::vector<BitVec> forced_v;  // optional: bypass the stochastic encoder
};
Model2Inputs model2_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                size_t n_block, size_t k, std::mt19937_64& rng);
ProtocolReport model2_run(const JointSourceSpec& spec, const TestChannel& tc,
                          const IndexSetBundle& sets, const Model2Inputs& in,
                          std::mt19937_64* rng);

// ---- Model 3 star: 1-to-m broadcast ----------------------------------------

struct Model3StarInputs {
  SampleBlock block;  // all m terminals
  BitVec seed;        // |Fp| bits
};
Model3StarInputs model3_star_draw_inputs(const JointSourceSpec& spec,
                                         const IndexSetBundle& sets, size_t n_block,
                                         std::mt19937_64& rng);
ProtocolReport model3_star_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                               const Model3StarInputs& in);

// ---- Model 3 three-terminal extension ---------------------------------------

struct Model3TriInputs {
  std::vector<SampleBlock> blocks;  // k blocks of (X1, X2, X3)
  std::vector<BitVec> seeds;        // k independent seeds, |Fp| bits each
};
Model3TriInputs model3_tri_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                       size_t n_block, size_t k, std::mt19937_64& rng);
ProtocolReport model3_tri_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                              const Model3TriInputs& in);

// ---- Model 4: Markov tree ---------------------------------------------------

struct Model4Inputs {
  SampleBlock block;  // all m terminals
};
Model4Inputs model4_draw_inputs(const JointSourceSpec& spec, size_t n_block,
                                std::mt19937_64& rng);
ProtocolReport model4_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                          const Model4Inputs& in);

// ---- Biometric systems ------------------------------------------------------

// Generated-secret: the rate-limited scheme with no eavesdropper bit.
ProtocolReport bio_gen_run(const JointSourceSpec& spec, const TestChannel& tc,
                           const IndexSetBundle& sets, const Model2Inputs& in,
                           std::mt19937_64* rng);

struct BioZeroInputs {
  std::vector<SampleBlock> blocks;
  BitVec r1;
  std::vector<BitVec> pads;  // k pads, |P| bits each
  std::vector<BitVec> forced_v;
};
BioZeroInputs bio_zero_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                   size_t n_block, size_t k, std::mt19937_64& rng);
ProtocolReport bio_zero_run(const JointSourceSpec& spec, const TestChannel& tc,
                            const IndexSetBundle& sets, const BioZeroInputs& in,
                            std::mt19937_64* rng);

// Per-symbol joints the runners decode with.
BitSideJoint decode_joint_model1(const JointSourceSpec& spec);               // p(x, y)
BitSideJoint decode_joint_model2(const JointSourceSpec& spec, const TestChannel& tc);  // p(u, y)
BitSideJoint encode_joint_model2(const JointSourceSpec& spec, const TestChannel& tc);  // p(u, x)

}  // namespace polarkey
