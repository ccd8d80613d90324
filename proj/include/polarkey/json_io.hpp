#pragma once

// JSON (de)serialization for source specs, index-set bundles, transcripts,
// protocol reports, and experiment configs. Formats are documented in the
// README; hex payloads follow the BitVec convention (lowest index = MSB of
// the first byte).

#include <optional>
#include <string>

#include <json.hpp>

#include "polarkey/metrics.hpp"
#include "polarkey/polarization.hpp"
#include "polarkey/protocols.hpp"
#include "polarkey/sources.hpp"

namespace polarkey {

using json = nlohmann::json;

json to_json(const BitVec& v);
BitVec bitvec_from_json(const json& j);

json to_json(const JointSourceSpec& spec);
JointSourceSpec spec_from_json(const json& j);

json to_json(const IndexSetBundle& b);
IndexSetBundle bundle_from_json(const json& j);

json to_json(const Transcript& t);
Transcript transcript_from_json(const json& j);

json to_json(const ProtocolReport& r);

struct ExperimentConfig {
  std::string model = "model1";
  JointSourceSpec source;
  uint32_t n_block = 8;
  uint32_t k = 1;
  double beta = 0.25;
  std::optional<double> delta;  // absolute override for both thresholds
  std::string method = "exact";
  uint64_t samples = 100000;
  uint64_t trials = 100;
  uint64_t seed = 1;
  double test_flip = 0.25;
  std::string out_dir;  // empty -> POLARKEY_OUT_DIR or "."
  bool dump_transcript = false;
};

json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace polarkey
