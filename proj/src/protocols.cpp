#include "polarkey/protocols.hpp"

#include <algorithm>

#include "polarkey/rng.hpp"

namespace polarkey {

size_t Transcript::total_bits() const {
  size_t s = 0;
  for (const auto& m : messages) s += m.bits.size();
  return s;
}

const BitVec& Transcript::find(int block, std::string_view label) const {
  for (const auto& m : messages)
    if (m.block == block && m.label == label) return m.bits;
  throw StructuralError("Transcript: missing message " + std::string(label) + " in block " +
                        std::to_string(block));
}

BitVec Transcript::concat_all() const {
  BitVec out;
  for (const auto& m : messages) out = out.concat(m.bits);
  return out;
}

namespace {

// Assemble frozen values for `frozen_set` from (set, values) fragments laid
// over the block, then freeze exactly frozen_set.
FrozenMap assemble_frozen(uint32_t n, const IndexSet& frozen_set,
                          std::initializer_list<std::pair<const IndexSet*, const BitVec*>> parts) {
  BitVec scaffold(n);
  for (auto& [s, v] : parts) scaffold = scatter(scaffold, *s, *v);
  return FrozenMap::from(frozen_set, extract(scaffold, frozen_set));
}

void require(bool cond, const char* msg) {
  if (!cond) throw StructuralError(msg);
}

}  // namespace

BitSideJoint decode_joint_model1(const JointSourceSpec& spec) {
  return bit_side_joint(joint_pmf(spec), 1, SideSel::term(2));
}

BitSideJoint decode_joint_model2(const JointSourceSpec& spec, const TestChannel& tc) {
  JointPmf aug = augment_with_test_channel(joint_pmf(spec), tc.pu_given_x);
  return bit_side_joint(aug, 1, SideSel::term(3));  // (U, Y)
}

BitSideJoint encode_joint_model2(const JointSourceSpec& spec, const TestChannel& tc) {
  JointPmf aug = augment_with_test_channel(joint_pmf(spec), tc.pu_given_x);
  return bit_side_joint(aug, 1, SideSel::term(2));  // (U, X)
}

// ---------------------------------------------------------------------------
// Model 1
// ---------------------------------------------------------------------------

Model1Inputs model1_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                size_t n_block, size_t k, std::mt19937_64& rng) {
  Model1Inputs in;
  for (size_t i = 0; i < k; ++i) in.blocks.push_back(sample_block(spec, n_block, rng));
  in.seed = random_bits(sets.at("Fp").size(), rng);
  return in;
}

ProtocolReport model1_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                          const Model1Inputs& in) {
  const uint32_t n = sets.block_len;
  const size_t k = in.blocks.size();
  require(k >= 1, "model1: need at least one block");
  const IndexSet &A = sets.at("A"), &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp");
  require(in.seed.size() == Fp.size(), "model1: seed size must be |H\\V|");

  ProtocolReport rep;
  rep.model = "model1";
  rep.rates.n_block = n;
  rep.rates.k_blocks = uint32_t(k);
  rep.rates.seed_bits = in.seed.size();

  // Alice
  std::vector<BitVec> u_true(k);
  std::vector<BitVec> y_blocks(k);
  BitVec k_prev = in.seed;
  BitVec alice_key;
  for (size_t i = 0; i < k; ++i) {
    const SampleBlock& blk = in.blocks[i];
    require(blk.x.size() >= 2 && blk.x[0].size() == n, "model1: bad sample block");
    y_blocks[i] = blk.x[1];
    if (blk.z) rep.z_blocks.push_back(*blk.z);
    u_true[i] = polar_transform(blk.x[0]);
    BitVec k_tilde = extract(u_true[i], A);
    BitVec key_i = extract(u_true[i], K);
    rep.encoder_key_blocks.push_back(key_i);
    alice_key = alice_key.concat(key_i);
    rep.transcript.messages.push_back({int(i) + 1, "alice", "F", extract(u_true[i], F)});
    rep.transcript.messages.push_back(
        {int(i) + 1, "alice", "F'+pad", extract(u_true[i], Fp) ^ k_prev});
    k_prev = k_tilde;
  }
  rep.keys["alice"] = alice_key;
  rep.rates.key_bits = alice_key.size();
  rep.rates.public_bits = rep.transcript.total_bits();
  rep.reclaimable_last_block_bits = A.size();

  // Bob (error propagation through his own decoded seeds)
  auto bob = model1_bob(spec, sets, rep.transcript, y_blocks, in.seed);
  rep.keys["bob"] = bob.key;
  rep.blocks.resize(k);
  for (size_t i = 0; i < k; ++i)
    rep.blocks[i].decode_ok["bob"] = (bob.decoded_u[i] == u_true[i]);
  rep.agreement = (bob.key == alice_key);
  return rep;
}

Model1BobResult model1_bob(const JointSourceSpec& spec, const IndexSetBundle& sets,
                           const Transcript& transcript, const std::vector<BitVec>& y_blocks,
                           const BitVec& seed) {
  const uint32_t n = sets.block_len;
  const IndexSet &A = sets.at("A"), &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp"),
                 &H = sets.at("H");
  BitSideJoint dj = decode_joint_model1(spec);
  Model1BobResult out;
  BitVec k_prev = seed;
  for (size_t i = 0; i < y_blocks.size(); ++i) {
    BitVec f_vals = transcript.find(int(i) + 1, "F");
    BitVec fp_vals = transcript.find(int(i) + 1, "F'+pad") ^ k_prev;
    FrozenMap frozen = assemble_frozen(n, H, {{&F, &f_vals}, {&Fp, &fp_vals}});
    out.frozen_values.push_back(extract(scatter(scatter(BitVec(n), F, f_vals), Fp, fp_vals), H));
    BitVec u_hat = sc_decode(y_blocks[i], frozen, dj);
    out.decoded_u.push_back(u_hat);
    out.key = out.key.concat(extract(u_hat, K));
    k_prev = extract(u_hat, A);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model 2 and the biometric generated-secret system
// ---------------------------------------------------------------------------

Model2Inputs model2_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                size_t n_block, size_t k, std::mt19937_64& rng) {
  Model2Inputs in;
  for (size_t i = 0; i < k; ++i) in.blocks.push_back(sample_block(spec, n_block, rng));
  in.seed = random_bits(sets.at("Fp").size(), rng);
  in.r1 = random_bits(sets.at("V_UX").size(), rng);
  return in;
}

namespace {

ProtocolReport quantized_chain_run(const std::string& model_name, const JointSourceSpec& spec,
                                   const TestChannel& tc, const IndexSetBundle& sets,
                                   const Model2Inputs& in, std::mt19937_64* rng) {
  const uint32_t n = sets.block_len;
  const size_t k = in.blocks.size();
  require(k >= 1, "model2: need at least one block");
  const IndexSet &A = sets.at("A"), &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp"),
                 &HUY = sets.at("H_UY"), &VUX = sets.at("V_UX"), &HU = sets.at("H_U");
  require(in.seed.size() == Fp.size(), "model2: seed size must be |Fp|");
  require(in.r1.size() == VUX.size(), "model2: |R1| must be |V_UX|");
  require(in.forced_v.empty() || in.forced_v.size() == k,
          "model2: forced_v must cover every block");
  if (in.forced_v.empty()) require(rng != nullptr, "model2: need an rng to draw the encoder");

  EncodeSets enc{VUX, HU.subtract(VUX), HU.complement()};
  BitSideJoint ux = encode_joint_model2(spec, tc);
  BitSideJoint uy = decode_joint_model2(spec, tc);

  ProtocolReport rep;
  rep.model = model_name;
  rep.rates.n_block = n;
  rep.rates.k_blocks = uint32_t(k);
  rep.rates.seed_bits = in.seed.size();
  rep.rates.randomness_bits = uint64_t(k) * (enc.posterior.size() + enc.prior.size());
  rep.transcript.messages.push_back({0, "alice", "R1", in.r1});

  std::vector<BitVec> v_tilde(k);
  BitVec k_prev = in.seed;
  BitVec alice_key;
  for (size_t i = 0; i < k; ++i) {
    const SampleBlock& blk = in.blocks[i];
    require(blk.x.size() >= 2 && blk.x[0].size() == n, "model2: bad sample block");
    if (blk.z) rep.z_blocks.push_back(*blk.z);
    v_tilde[i] = in.forced_v.empty() ? sc_stochastic_encode(blk.x[0], in.r1, enc, ux, *rng)
                                     : in.forced_v[i];
    require(v_tilde[i].size() == n, "model2: forced block has wrong length");
    BitVec k_tilde = extract(v_tilde[i], A);
    BitVec key_i = extract(v_tilde[i], K);
    rep.encoder_key_blocks.push_back(key_i);
    alice_key = alice_key.concat(key_i);
    rep.transcript.messages.push_back({int(i) + 1, "alice", "F", extract(v_tilde[i], F)});
    rep.transcript.messages.push_back(
        {int(i) + 1, "alice", "F'+pad", extract(v_tilde[i], Fp) ^ k_prev});
    k_prev = k_tilde;
  }
  rep.keys["alice"] = alice_key;
  rep.rates.key_bits = alice_key.size();
  rep.rates.public_bits = rep.transcript.total_bits();
  rep.reclaimable_last_block_bits = A.size();

  // Bob
  BitVec bob_key;
  BitVec k_prev_hat = in.seed;
  rep.blocks.resize(k);
  for (size_t i = 0; i < k; ++i) {
    BitVec f_vals = rep.transcript.find(int(i) + 1, "F");
    BitVec fp_vals = rep.transcript.find(int(i) + 1, "F'+pad") ^ k_prev_hat;
    FrozenMap frozen =
        assemble_frozen(n, HUY, {{&VUX, &in.r1}, {&F, &f_vals}, {&Fp, &fp_vals}});
    BitVec v_hat = sc_decode(in.blocks[i].x[1], frozen, uy);
    rep.blocks[i].decode_ok["bob"] = (v_hat == v_tilde[i]);
    bob_key = bob_key.concat(extract(v_hat, K));
    k_prev_hat = extract(v_hat, A);
  }
  rep.keys["bob"] = bob_key;
  rep.agreement = (bob_key == alice_key);
  return rep;
}

}  // namespace

ProtocolReport model2_run(const JointSourceSpec& spec, const TestChannel& tc,
                          const IndexSetBundle& sets, const Model2Inputs& in,
                          std::mt19937_64* rng) {
  return quantized_chain_run("model2", spec, tc, sets, in, rng);
}

ProtocolReport bio_gen_run(const JointSourceSpec& spec, const TestChannel& tc,
                           const IndexSetBundle& sets, const Model2Inputs& in,
                           std::mt19937_64* rng) {
  require(!spec.has_eve(), "bio-gen: biometric sources carry no eavesdropper bit");
  return quantized_chain_run("bio-gen", spec, tc, sets, in, rng);
}

// ---------------------------------------------------------------------------
// Model 3 star
// ---------------------------------------------------------------------------

Model3StarInputs model3_star_draw_inputs(const JointSourceSpec& spec,
                                         const IndexSetBundle& sets, size_t n_block,
                                         std::mt19937_64& rng) {
  return {sample_block(spec, n_block, rng), random_bits(sets.at("Fp").size(), rng)};
}

ProtocolReport model3_star_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                               const Model3StarInputs& in) {
  const uint32_t n = sets.block_len;
  const IndexSet &K = sets.at("K"), &F = sets.at("F"), &Fp = sets.at("Fp"),
                 &Hmin = sets.at("H_min");
  require(in.seed.size() == Fp.size(), "model3-star: seed size must be |H_min\\V|");
  JointPmf pmf = joint_pmf(spec);
  const int m = pmf.m;
  require(int(in.block.x.size()) == m, "model3-star: bad sample block");

  ProtocolReport rep;
  rep.model = "model3-star";
  rep.rates.n_block = n;
  rep.rates.k_blocks = 1;
  rep.rates.seed_bits = in.seed.size();

  BitVec u = polar_transform(in.block.x[0]);
  BitVec key = extract(u, K);
  rep.keys["T1"] = key;
  rep.encoder_key_blocks.push_back(key);
  rep.transcript.messages.push_back({1, "T1", "F", extract(u, F)});
  rep.transcript.messages.push_back({1, "T1", "F'+pad", extract(u, Fp) ^ in.seed});
  rep.rates.key_bits = key.size();
  rep.rates.public_bits = rep.transcript.total_bits();

  BitVec f_vals = rep.transcript.find(1, "F");
  BitVec fp_vals = rep.transcript.find(1, "F'+pad") ^ in.seed;
  FrozenMap frozen = assemble_frozen(n, Hmin, {{&F, &f_vals}, {&Fp, &fp_vals}});
  rep.blocks.resize(1);
  rep.agreement = true;
  for (int j = 2; j <= m; ++j) {
    BitSideJoint dj = bit_side_joint(pmf, 1, SideSel::term(j));
    BitVec u_hat = sc_decode(in.block.x[j - 1], frozen, dj);
    std::string t = "T" + std::to_string(j);
    rep.blocks[0].decode_ok[t] = (u_hat == u);
    rep.keys[t] = extract(u_hat, K);
    if (rep.keys[t] != key) rep.agreement = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Model 3 three-terminal extension
// ---------------------------------------------------------------------------

Model3TriInputs model3_tri_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                       size_t n_block, size_t k, std::mt19937_64& rng) {
  Model3TriInputs in;
  for (size_t i = 0; i < k; ++i) in.blocks.push_back(sample_block(spec, n_block, rng));
  for (size_t i = 0; i < k; ++i) in.seeds.push_back(random_bits(sets.at("Fp").size(), rng));
  return in;
}

ProtocolReport model3_tri_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                              const Model3TriInputs& in) {
  const uint32_t n = sets.block_len;
  const size_t k = in.blocks.size();
  require(k >= 2, "model3-tri: chaining needs k >= 2 blocks");
  require(in.seeds.size() == k, "model3-tri: need one seed per block");
  const IndexSet &K = sets.at("K"), &Kbar = sets.at("Kbar"), &FM = sets.at("F_M"),
                 &F21 = sets.at("F_21"), &F23 = sets.at("F_23"), &Fp = sets.at("Fp"),
                 &H1 = sets.at("H_1"), &H3 = sets.at("H_3");
  for (const auto& s : in.seeds)
    require(s.size() == Fp.size(), "model3-tri: seed size must be |Fbar_21 u Fbar_23|");
  IndexSet KuFM = K.unite(FM);
  IndexSet F2set = F21.subtract(FM);            // label "F2"
  IndexSet Fbar_set = F23.subtract(F21);        // label "Fbar"; equals Kbar
  IndexSet F23cap21 = F23.intersect(F21);
  IndexSet Fbar23 = sets.at("Fbar_23");
  JointPmf pmf = joint_pmf(spec);

  ProtocolReport rep;
  rep.model = "model3-tri";
  rep.rates.n_block = n;
  rep.rates.k_blocks = uint32_t(k);
  rep.rates.seed_bits = uint64_t(k) * Fp.size();

  // ---- Terminal 2 encodes
  std::vector<BitVec> u_true(k);
  BitVec t2_key;
  std::vector<BitVec> kbar(k);
  for (size_t i = 0; i < k; ++i) {
    require(in.blocks[i].x.size() == 3, "model3-tri: need three terminals per block");
    u_true[i] = polar_transform(in.blocks[i].x[1]);  // terminal 2 encodes
    const BitVec& u = u_true[i];
    int b = int(i) + 1;
    BitVec key_i;
    if (i == 0) {
      key_i = extract(u, K);
      kbar[i] = extract(u, Kbar);
      rep.transcript.messages.push_back({b, "T2", "F", extract(u, F21)});
      rep.transcript.messages.push_back({b, "T2", "F'+pad", extract(u, Fp) ^ in.seeds[i]});
    } else {
      key_i = extract(u, KuFM);
      if (i + 1 < k) kbar[i] = extract(u, Kbar);
      rep.transcript.messages.push_back({b, "T2", "F1+pad", extract(u, FM) ^ kbar[i - 1]});
      rep.transcript.messages.push_back({b, "T2", "F2", extract(u, F2set)});
      rep.transcript.messages.push_back({b, "T2", "F'+pad", extract(u, Fp) ^ in.seeds[i]});
      if (i + 1 == k)
        rep.transcript.messages.push_back({b, "T2", "Fbar", extract(u, Fbar_set)});
    }
    rep.encoder_key_blocks.push_back(key_i);
    t2_key = t2_key.concat(key_i);
  }
  rep.keys["T2"] = t2_key;
  rep.rates.key_bits = t2_key.size();
  rep.rates.public_bits = rep.transcript.total_bits();
  rep.blocks.resize(k);

  // ---- Terminal 1 decodes forward
  {
    BitSideJoint dj = bit_side_joint(pmf, 2, SideSel::term(1));
    BitVec key;
    BitVec kbar_prev;  // decoded estimate of U_{i-1}[Kbar]
    for (size_t i = 0; i < k; ++i) {
      int b = int(i) + 1;
      BitVec fp_vals = rep.transcript.find(b, "F'+pad") ^ in.seeds[i];
      FrozenMap frozen;
      if (i == 0) {
        BitVec f_vals = rep.transcript.find(b, "F");
        frozen = assemble_frozen(n, H1, {{&F21, &f_vals}, {&Fp, &fp_vals}});
      } else {
        BitVec f1_vals = rep.transcript.find(b, "F1+pad") ^ kbar_prev;
        BitVec f2_vals = rep.transcript.find(b, "F2");
        frozen = assemble_frozen(n, H1, {{&FM, &f1_vals}, {&F2set, &f2_vals}, {&Fp, &fp_vals}});
      }
      BitVec u_hat = sc_decode(in.blocks[i].x[0], frozen, dj);
      rep.blocks[i].decode_ok["T1"] = (u_hat == u_true[i]);
      key = key.concat(extract(u_hat, i == 0 ? K : KuFM));
      kbar_prev = extract(u_hat, Kbar);
    }
    rep.keys["T1"] = key;
  }

  // ---- Terminal 3 decodes backward
  {
    BitSideJoint dj = bit_side_joint(pmf, 2, SideSel::term(3));
    std::vector<BitVec> key_parts(k);
    BitVec u_next;  // decoded block i+1
    for (size_t ii = k; ii >= 1; --ii) {
      size_t i = ii - 1;
      int b = int(i) + 1;
      BitVec fp_vals = rep.transcript.find(b, "F'+pad") ^ in.seeds[i];
      BitVec fp_part = extract(scatter(BitVec(n), Fp, fp_vals), Fbar23);
      FrozenMap frozen;
      if (i + 1 == k) {
        BitVec f2_vals = rep.transcript.find(b, "F2");
        BitVec f2_part = extract(scatter(BitVec(n), F2set, f2_vals), F23cap21);
        BitVec fbar_vals = rep.transcript.find(b, "Fbar");
        frozen = assemble_frozen(
            n, H3, {{&F23cap21, &f2_part}, {&Fbar_set, &fbar_vals}, {&Fbar23, &fp_part}});
      } else {
        // recover U_i[Kbar] from the next block's padded F1 and our estimate
        BitVec kbar_i = rep.transcript.find(b + 1, "F1+pad") ^ extract(u_next, FM);
        BitVec f2_part, f_vals;
        if (i == 0) {
          f_vals = rep.transcript.find(b, "F");
          f2_part = extract(scatter(BitVec(n), F21, f_vals), F23cap21);
        } else {
          BitVec f2_vals = rep.transcript.find(b, "F2");
          f2_part = extract(scatter(BitVec(n), F2set, f2_vals), F23cap21);
        }
        frozen = assemble_frozen(
            n, H3, {{&F23cap21, &f2_part}, {&Kbar, &kbar_i}, {&Fbar23, &fp_part}});
      }
      BitVec u_hat = sc_decode(in.blocks[i].x[2], frozen, dj);
      rep.blocks[i].decode_ok["T3"] = (u_hat == u_true[i]);
      key_parts[i] = extract(u_hat, i == 0 ? K : KuFM);
      u_next = u_hat;
    }
    BitVec key;
    for (size_t i = 0; i < k; ++i) key = key.concat(key_parts[i]);
    rep.keys["T3"] = key;
  }

  rep.agreement = (rep.keys["T1"] == t2_key) && (rep.keys["T3"] == t2_key);
  return rep;
}

// ---------------------------------------------------------------------------
// Model 4: Markov tree
// ---------------------------------------------------------------------------

Model4Inputs model4_draw_inputs(const JointSourceSpec& spec, size_t n_block,
                                std::mt19937_64& rng) {
  return {sample_block(spec, n_block, rng)};
}

ProtocolReport model4_run(const JointSourceSpec& spec, const IndexSetBundle& sets,
                          const Model4Inputs& in) {
  require(spec.variant == SourceVariant::MarkovTree, "model4: MarkovTree source expected");
  const uint32_t n = sets.block_len;
  JointPmf pmf = joint_pmf(spec);
  const int m = pmf.m;
  require(int(in.block.x.size()) == m, "model4: bad sample block");
  const int root = int(sets.meta.at("root"));
  std::vector<int> parent(m + 1, 0);
  for (int v = 1; v <= m; ++v) parent[v] = int(sets.meta.at("parent_" + std::to_string(v)));

  ProtocolReport rep;
  rep.model = "model4";
  rep.rates.n_block = n;
  rep.rates.k_blocks = 1;

  // every vertex with children publishes the bits its noisiest child needs
  std::vector<BitVec> u(m + 1);
  for (int v = 1; v <= m; ++v) u[v] = polar_transform(in.block.x[v - 1]);
  for (int v = 1; v <= m; ++v) {
    std::string hname = "H_" + std::to_string(v);
    if (!sets.has(hname)) continue;
    rep.transcript.messages.push_back(
        {1, "T" + std::to_string(v), "F", extract(u[v], sets.at(hname))});
  }
  const IndexSet& K = sets.at("K");
  BitVec key = extract(u[root], K);
  rep.encoder_key_blocks.push_back(key);
  rep.rates.key_bits = key.size();
  rep.rates.public_bits = rep.transcript.total_bits();

  rep.blocks.resize(1);
  rep.agreement = true;
  for (int t = 1; t <= m; ++t) {
    std::string name = "T" + std::to_string(t);
    if (t == root) {
      rep.keys[name] = key;
      rep.blocks[0].decode_ok[name] = true;
      continue;
    }
    // climb the path to the root, reconstructing each parent in turn
    BitVec est = in.block.x[t - 1];
    int child = t;
    bool ok = true;
    while (child != root) {
      int par = parent[child];
      const IndexSet& H = sets.at("H_" + std::to_string(par));
      // locate the parent's published message
      const BitVec* payload = nullptr;
      for (const auto& msg : rep.transcript.messages)
        if (msg.sender == "T" + std::to_string(par)) payload = &msg.bits;
      require(payload != nullptr, "model4: missing published message");
      FrozenMap frozen = FrozenMap::from(H, *payload);
      auto pj = pair_pmf(pmf, par, child);
      BitSideJoint dj;
      dj.side_card = 2;
      dj.pr = {pj[0], pj[1], pj[2], pj[3]};
      BitVec u_hat = sc_decode(est, frozen, dj);
      est = polar_transform(u_hat);  // back to the source domain
      ok = ok && (est == in.block.x[par - 1]);
      child = par;
    }
    rep.blocks[0].decode_ok[name] = ok;
    rep.keys[name] = extract(polar_transform(est), K);
    if (rep.keys[name] != key) rep.agreement = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Biometric generated-secret with zero leakage
// ---------------------------------------------------------------------------

BioZeroInputs bio_zero_draw_inputs(const JointSourceSpec& spec, const IndexSetBundle& sets,
                                   size_t n_block, size_t k, std::mt19937_64& rng) {
  BioZeroInputs in;
  for (size_t i = 0; i < k; ++i) in.blocks.push_back(sample_block(spec, n_block, rng));
  in.r1 = random_bits(sets.at("V_UX").size(), rng);
  for (size_t i = 0; i < k; ++i) in.pads.push_back(random_bits(sets.at("P").size(), rng));
  return in;
}

ProtocolReport bio_zero_run(const JointSourceSpec& spec, const TestChannel& tc,
                            const IndexSetBundle& sets, const BioZeroInputs& in,
                            std::mt19937_64* rng) {
  require(!spec.has_eve(), "bio-zero: biometric sources carry no eavesdropper bit");
  const uint32_t n = sets.block_len;
  const size_t k = in.blocks.size();
  require(k >= 1, "bio-zero: need at least one block");
  const IndexSet &F = sets.at("F"), &Fp = sets.at("Fp"), &P = sets.at("P"),
                 &HUY = sets.at("H_UY"), &VUX = sets.at("V_UX"), &HU = sets.at("H_U"),
                 &VU = sets.at("V_U");
  IndexSet pool = VU.subtract(HUY);  // secret positions
  require(in.r1.size() == VUX.size(), "bio-zero: |R1| must be |V_UX|");
  require(in.pads.size() == k, "bio-zero: need one pad per block");
  for (const auto& p : in.pads)
    if (p.size() != P.size()) throw StructuralError("bio-zero: pad size must be |H_UY\\V_UX|");
  require(in.forced_v.empty() || in.forced_v.size() == k,
          "bio-zero: forced_v must cover every block");
  if (in.forced_v.empty()) require(rng != nullptr, "bio-zero: need an rng to draw the encoder");

  EncodeSets enc{VUX, HU.subtract(VUX), HU.complement()};
  BitSideJoint ux = encode_joint_model2(spec, tc);
  BitSideJoint uy = decode_joint_model2(spec, tc);

  ProtocolReport rep;
  rep.model = "bio-zero";
  rep.rates.n_block = n;
  rep.rates.k_blocks = uint32_t(k);
  rep.rates.seed_bits = uint64_t(k) * P.size();  // pre-shared pads
  rep.rates.randomness_bits = uint64_t(k) * (enc.posterior.size() + enc.prior.size());
  rep.transcript.messages.push_back({0, "enroll", "R1", in.r1});

  std::vector<BitVec> v_tilde(k);
  BitVec secret;
  for (size_t i = 0; i < k; ++i) {
    require(in.blocks[i].x.size() >= 2 && in.blocks[i].x[0].size() == n,
            "bio-zero: bad sample block");
    v_tilde[i] = in.forced_v.empty()
                     ? sc_stochastic_encode(in.blocks[i].x[0], in.r1, enc, ux, *rng)
                     : in.forced_v[i];
    BitVec f_i = extract(v_tilde[i], F);
    // helper data [F_i, F_i'] laid out over P = F u Fp in ascending index order
    rep.transcript.messages.push_back(
        {int(i) + 1, "enroll", "M", extract(v_tilde[i], P) ^ in.pads[i]});
    BitVec s_i = extract(v_tilde[i], pool).concat(f_i);
    rep.encoder_key_blocks.push_back(s_i);
    secret = secret.concat(s_i);
  }
  rep.keys["enroll"] = secret;
  rep.rates.key_bits = secret.size();
  rep.rates.public_bits = rep.transcript.total_bits();

  BitVec auth_secret;
  rep.blocks.resize(k);
  for (size_t i = 0; i < k; ++i) {
    BitVec unpadded = rep.transcript.find(int(i) + 1, "M") ^ in.pads[i];
    FrozenMap frozen = assemble_frozen(n, HUY, {{&VUX, &in.r1}, {&P, &unpadded}});
    BitVec v_hat = sc_decode(in.blocks[i].x[1], frozen, uy);
    rep.blocks[i].decode_ok["auth"] = (v_hat == v_tilde[i]);
    BitVec f_hat = extract(scatter(BitVec(n), P, unpadded), F);
    auth_secret = auth_secret.concat(extract(v_hat, pool).concat(f_hat));
  }
  rep.keys["auth"] = auth_secret;
  rep.agreement = (auth_secret == secret);
  return rep;
}

}  // namespace polarkey
