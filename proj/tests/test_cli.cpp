#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polarkey/json_io.hpp"

using namespace polarkey;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string tmp = (fs::temp_directory_path() / ("pk_cli_out_" + std::to_string(counter++))).string();
  std::string cmd = std::string(PK_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(tmp);
  return {WEXITSTATUS(rc), ss.str()};
}

std::string write_config(const json& j, const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pk_cli_test";
  fs::create_directories(dir);
  std::string path = (dir / name).string();
  save_json_file(path, j);
  return path;
}

json base_config() {
  ExperimentConfig cfg;
  cfg.model = "model1";
  cfg.source = JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true);
  cfg.n_block = 8;
  cfg.k = 1;
  cfg.trials = 25;
  cfg.seed = 77;
  cfg.out_dir = (fs::temp_directory_path() / "pk_cli_test" / "out").string();
  return to_json(cfg);
}

}  // namespace

TEST_CASE("construct: round trip, determinism, predicted rate") {
  fs::remove_all(fs::temp_directory_path() / "pk_cli_test");
  auto cfgj = base_config();
  std::string cfg = write_config(cfgj, "cfg.json");
  std::string sets1 = (fs::temp_directory_path() / "pk_cli_test" / "sets1.json").string();
  auto r = run_cli("construct --config " + cfg + " --out " + sets1);
  REQUIRE(r.exit_code == 0);

  // file round-trips through the bundle codec
  json raw = load_json_file(sets1);
  IndexSetBundle b = bundle_from_json(raw);
  json again = to_json(b);
  for (auto& [name, arr] : raw.at("sets").items())
    CHECK(again.at("sets").at(name) == arr);

  // printed predicted key rate equals (|V|-|H|)/N from the file
  json summary = json::parse(r.out);
  double expect =
      double(b.at("V").size() - b.at("H").size()) / double(b.block_len);
  CHECK(summary.at("predicted_key_rate").get<double>() ==
        doctest::Approx(expect).epsilon(1e-12));

  // MC construction is byte-identical under the same master seed
  json mc = cfgj;
  mc["method"] = "mc";
  mc["samples"] = 5000;
  std::string mccfg = write_config(mc, "cfg_mc.json");
  std::string s2 = (fs::temp_directory_path() / "pk_cli_test" / "sets2.json").string();
  std::string s3 = (fs::temp_directory_path() / "pk_cli_test" / "sets3.json").string();
  REQUIRE(run_cli("construct --config " + mccfg + " --out " + s2).exit_code == 0);
  REQUIRE(run_cli("construct --config " + mccfg + " --out " + s3).exit_code == 0);
  std::ifstream f2(s2), f3(s3);
  std::stringstream b2, b3;
  b2 << f2.rdbuf();
  b3 << f3.rdbuf();
  CHECK(b2.str() == b3.str());
}

TEST_CASE("run: aggregate output, exact secrecy for the tree model, csv row") {
  ExperimentConfig cfg;
  cfg.model = "model4";
  cfg.source = JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {2, 3, 0.2}});
  cfg.n_block = 8;
  cfg.trials = 1;
  cfg.seed = 5;
  cfg.out_dir = (fs::temp_directory_path() / "pk_cli_test" / "m4out").string();
  std::string cpath = write_config(to_json(cfg), "m4.json");
  std::string sets = (fs::temp_directory_path() / "pk_cli_test" / "m4sets.json").string();
  REQUIRE(run_cli("construct --config " + cpath + " --out " + sets).exit_code == 0);
  auto r = run_cli("run --config " + cpath + " --sets " + sets);
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out.at("secrecy_method") == "exact");
  CHECK(out.at("leakage_bits").get<double>() <= 1e-10);
  CHECK(out.at("uniformity_bits").get<double>() <= 1e-10);
  std::ifstream csv(cfg.out_dir + "/results.csv");
  std::string line1, line2, line3;
  std::getline(csv, line1);
  std::getline(csv, line2);
  std::getline(csv, line3);
  CHECK(line1.substr(0, 1) == "#");  // versioned header comment
  CHECK(line3.substr(0, 7) == "model4,");
}

TEST_CASE("run + replay: dumped records re-verify deterministically") {
  auto cfgj = base_config();
  cfgj["trials"] = 3;
  cfgj["dump_transcript"] = true;
  cfgj["out_dir"] = (fs::temp_directory_path() / "pk_cli_test" / "replay").string();
  std::string cpath = write_config(cfgj, "rp.json");
  std::string sets = (fs::temp_directory_path() / "pk_cli_test" / "rpsets.json").string();
  REQUIRE(run_cli("construct --config " + cpath + " --out " + sets).exit_code == 0);
  REQUIRE(run_cli("run --config " + cpath + " --sets " + sets).exit_code == 0);
  std::string rec = cfgj["out_dir"].get<std::string>() + "/run_1.json";
  REQUIRE(fs::exists(rec));
  auto r = run_cli("replay --record " + rec);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("replay OK") != std::string::npos);
  // tampering with the stored report breaks the replay
  json j = load_json_file(rec);
  j["report"]["agreement"] = !j["report"]["agreement"].get<bool>();
  save_json_file(rec, j);
  CHECK(run_cli("replay --record " + rec).exit_code == 4);
}

TEST_CASE("oracle: default battery passes; corrupted sets fail with exit 4") {
  auto r = run_cli("oracle --n 4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("chain_rule") != std::string::npos);

  // corrupt a constructed sets file: steal one index from K into A
  auto cfgj = base_config();
  std::string cpath = write_config(cfgj, "oc.json");
  std::string sets = (fs::temp_directory_path() / "pk_cli_test" / "ocsets.json").string();
  REQUIRE(run_cli("construct --config " + cpath + " --out " + sets).exit_code == 0);
  json j = load_json_file(sets);
  auto kv = j["sets"]["K"].get<std::vector<uint32_t>>();
  REQUIRE(!kv.empty());
  auto av = j["sets"]["A"].get<std::vector<uint32_t>>();
  av.push_back(kv.back());
  kv.pop_back();
  j["sets"]["K"] = kv;
  j["sets"]["A"] = av;
  save_json_file(sets, j);
  auto bad = run_cli("oracle --sets " + sets);
  CHECK(bad.exit_code == 4);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("exit codes: infeasible construction and invalid config") {
  ExperimentConfig cfg;
  cfg.model = "model1";
  cfg.source = JointSourceSpec::dbms_chain(0.5, 0.11, 0.0, true);  // Z = Y
  cfg.n_block = 8;
  cfg.delta = 0.05;
  std::string cpath = write_config(to_json(cfg), "infeasible.json");
  CHECK(run_cli("construct --config " + cpath).exit_code == 3);

  json badj = base_config();
  badj["n"] = 12;  // not a power of two
  std::string bpath = write_config(badj, "badn.json");
  CHECK(run_cli("construct --config " + bpath).exit_code == 2);
}

TEST_CASE("capacity subcommand prints reference values") {
  auto cfgj = base_config();
  std::string cpath = write_config(cfgj, "cap.json");
  auto r = run_cli("capacity --config " + cpath);
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  double expect = (1 - binary_entropy(0.11)) -
                  (1 - binary_entropy(0.11 * 0.7 + 0.89 * 0.3));
  CHECK(out.at("value_bits").get<double>() == doctest::Approx(expect).epsilon(1e-9));
  CHECK(out.at("degraded").get<bool>());
}
