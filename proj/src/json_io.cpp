#include "polarkey/json_io.hpp"

#include <fstream>

namespace polarkey {

json to_json(const BitVec& v) {
  return json{{"len", v.size()}, {"hex", v.to_hex()}};
}

BitVec bitvec_from_json(const json& j) {
  return BitVec::from_hex(j.at("len").get<size_t>(), j.at("hex").get<std::string>());
}

json to_json(const JointSourceSpec& spec) {
  json j;
  switch (spec.variant) {
    case SourceVariant::DbmsChain:
      j["variant"] = "dbms_chain";
      j["px"] = spec.px;
      j["p"] = spec.p;
      j["q"] = spec.q;
      j["z_present"] = spec.z_present;
      break;
    case SourceVariant::BroadcastStar:
      j["variant"] = "broadcast_star";
      j["px1"] = spec.px1;
      j["crossovers"] = spec.crossovers;
      break;
    case SourceVariant::MarkovTree: {
      j["variant"] = "markov_tree";
      j["m"] = spec.m_vertices;
      json es = json::array();
      for (const auto& e : spec.edges) es.push_back({{"i", e.i}, {"j", e.j}, {"p", e.p}});
      j["edges"] = es;
      break;
    }
    case SourceVariant::GenericTable:
      j["variant"] = "generic_table";
      j["m"] = spec.table.m;
      j["z_present"] = spec.table.has_z;
      j["pmf"] = spec.table.p;
      break;
  }
  return j;
}

JointSourceSpec spec_from_json(const json& j) {
  std::string v = j.at("variant").get<std::string>();
  if (v == "dbms_chain")
    return JointSourceSpec::dbms_chain(j.at("px").get<double>(), j.at("p").get<double>(),
                                       j.value("q", 0.0), j.value("z_present", false));
  if (v == "broadcast_star")
    return JointSourceSpec::broadcast_star(j.at("px1").get<double>(),
                                           j.at("crossovers").get<std::vector<double>>());
  if (v == "markov_tree") {
    std::vector<TreeEdge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(), e.at("p").get<double>()});
    return JointSourceSpec::markov_tree(j.at("m").get<int>(), std::move(edges));
  }
  if (v == "generic_table") {
    JointPmf t;
    t.m = j.at("m").get<int>();
    t.has_z = j.value("z_present", false);
    t.p = j.at("pmf").get<std::vector<double>>();
    return JointSourceSpec::generic_table(std::move(t));
  }
  throw ValidationError("unknown source variant: " + v);
}

json to_json(const IndexSetBundle& b) {
  json sets;
  for (const auto& [name, s] : b.sets) sets[name] = s.indices;
  json meta;
  for (const auto& [name, v] : b.meta) meta[name] = v;
  return json{{"model", b.model},   {"n", b.block_len}, {"beta", b.beta},
              {"delta_h", b.delta_h}, {"delta_v", b.delta_v}, {"sets", sets},
              {"meta", meta}};
}

IndexSetBundle bundle_from_json(const json& j) {
  IndexSetBundle b;
  b.model = j.at("model").get<std::string>();
  b.block_len = j.at("n").get<uint32_t>();
  b.beta = j.at("beta").get<double>();
  b.delta_h = j.at("delta_h").get<double>();
  b.delta_v = j.at("delta_v").get<double>();
  for (const auto& [name, arr] : j.at("sets").items())
    b.sets[name] = IndexSet(arr.get<std::vector<uint32_t>>(), b.block_len);
  if (j.contains("meta"))
    for (const auto& [name, v] : j.at("meta").items()) b.meta[name] = v.get<int64_t>();
  return b;
}

json to_json(const Transcript& t) {
  json msgs = json::array();
  for (const auto& m : t.messages)
    msgs.push_back({{"block", m.block},
                    {"sender", m.sender},
                    {"label", m.label},
                    {"bits", to_json(m.bits)}});
  return json{{"messages", msgs}};
}

Transcript transcript_from_json(const json& j) {
  Transcript t;
  for (const auto& m : j.at("messages"))
    t.messages.push_back({m.at("block").get<int>(), m.at("sender").get<std::string>(),
                          m.at("label").get<std::string>(), bitvec_from_json(m.at("bits"))});
  return t;
}

json to_json(const ProtocolReport& r) {
  json keys;
  for (const auto& [t, k] : r.keys) keys[t] = to_json(k);
  json diag = json::array();
  for (const auto& b : r.blocks) {
    json d;
    for (const auto& [t, ok] : b.decode_ok) d[t] = ok;
    diag.push_back(d);
  }
  return json{{"model", r.model},
              {"keys", keys},
              {"agreement", r.agreement},
              {"transcript", to_json(r.transcript)},
              {"rates",
               {{"key_bits", r.rates.key_bits},
                {"seed_bits", r.rates.seed_bits},
                {"public_bits", r.rates.public_bits},
                {"randomness_bits", r.rates.randomness_bits},
                {"n", r.rates.n_block},
                {"k", r.rates.k_blocks},
                {"key_rate", r.rates.key_rate()},
                {"seed_rate", r.rates.seed_rate()},
                {"public_rate", r.rates.public_rate()}}},
              {"blocks", diag},
              {"reclaimable_last_block_bits", r.reclaimable_last_block_bits}};
}

json to_json(const ExperimentConfig& c) {
  json j{{"model", c.model},       {"source", to_json(c.source)},
         {"n", c.n_block},         {"k", c.k},
         {"beta", c.beta},         {"method", c.method},
         {"samples", c.samples},   {"trials", c.trials},
         {"seed", c.seed},         {"test_flip", c.test_flip},
         {"out_dir", c.out_dir},   {"dump_transcript", c.dump_transcript}};
  if (c.delta) j["delta"] = *c.delta;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.model = j.value("model", std::string("model1"));
  if (j.contains("source")) c.source = spec_from_json(j.at("source"));
  c.n_block = j.value("n", 8u);
  c.k = j.value("k", 1u);
  c.beta = j.value("beta", 0.25);
  if (j.contains("delta") && !j.at("delta").is_null()) c.delta = j.at("delta").get<double>();
  c.method = j.value("method", std::string("exact"));
  c.samples = j.value("samples", uint64_t{100000});
  c.trials = j.value("trials", uint64_t{100});
  c.seed = j.value("seed", uint64_t{1});
  c.test_flip = j.value("test_flip", 0.25);
  c.out_dir = j.value("out_dir", std::string());
  c.dump_transcript = j.value("dump_transcript", false);
  if (!is_pow2(c.n_block)) throw ValidationError("config: n must be a power of 2");
  if (c.k < 1) throw ValidationError("config: k >= 1");
  if (c.trials < 1) throw ValidationError("config: trials >= 1");
  return c;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace polarkey
