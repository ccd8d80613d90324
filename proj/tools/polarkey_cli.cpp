// Command-line orchestration: set construction, protocol simulation sweeps,
// closed-form capacities, exact-oracle verification, and replay.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "polarkey/capacity.hpp"
#include "polarkey/json_io.hpp"
#include "polarkey/metrics.hpp"
#include "polarkey/protocols.hpp"
#include "polarkey/rng.hpp"

using namespace polarkey;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInvariant = 4;
constexpr int kExitBudget = 5;

std::string out_dir_of(const ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("POLARKEY_OUT_DIR")) return env;
  return ".";
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

ConstructOptions construct_options(const ExperimentConfig& cfg) {
  ConstructOptions opt;
  opt.method = cfg.method;
  opt.samples = cfg.samples;
  opt.delta.beta = cfg.beta;
  if (cfg.delta) {
    opt.delta.delta_h = cfg.delta;
    opt.delta.delta_v = cfg.delta;
  }
  opt.test_flip = cfg.test_flip;
  return opt;
}

// ---- run -------------------------------------------------------------------

struct TrialResult {
  bool failed = false;
  BitVec key, eve_view;
};

TrialResult run_one(const ExperimentConfig& cfg, const IndexSetBundle& sets, uint64_t trial,
                    ProtocolReport* rep_out) {
  auto rng = make_stream(cfg.seed, "trial", trial);
  ProtocolReport rep;
  TestChannel tc = TestChannel::bsc(cfg.test_flip);
  if (cfg.model == "model1") {
    auto in = model1_draw_inputs(cfg.source, sets, cfg.n_block, cfg.k, rng);
    rep = model1_run(cfg.source, sets, in);
  } else if (cfg.model == "model2") {
    auto in = model2_draw_inputs(cfg.source, sets, cfg.n_block, cfg.k, rng);
    rep = model2_run(cfg.source, tc, sets, in, &rng);
  } else if (cfg.model == "model3-star") {
    auto in = model3_star_draw_inputs(cfg.source, sets, cfg.n_block, rng);
    rep = model3_star_run(cfg.source, sets, in);
  } else if (cfg.model == "model3-tri") {
    auto in = model3_tri_draw_inputs(cfg.source, sets, cfg.n_block, cfg.k, rng);
    rep = model3_tri_run(cfg.source, sets, in);
  } else if (cfg.model == "model4") {
    auto in = model4_draw_inputs(cfg.source, cfg.n_block, rng);
    rep = model4_run(cfg.source, sets, in);
  } else if (cfg.model == "bio-gen") {
    auto in = model2_draw_inputs(cfg.source, sets, cfg.n_block, cfg.k, rng);
    rep = bio_gen_run(cfg.source, tc, sets, in, &rng);
  } else if (cfg.model == "bio-zero") {
    auto in = bio_zero_draw_inputs(cfg.source, sets, cfg.n_block, cfg.k, rng);
    rep = bio_zero_run(cfg.source, tc, sets, in, &rng);
  } else {
    throw ValidationError("unknown model: " + cfg.model);
  }
  TrialResult r;
  r.failed = !rep.agreement;
  r.key = rep.keys.begin()->second;
  BitVec view = rep.transcript.concat_all();
  for (const auto& z : rep.z_blocks) view = view.concat(z);
  r.eve_view = view;
  if (rep_out) *rep_out = rep;
  return r;
}

int cmd_run(const std::string& config_path, const std::string& sets_path,
            uint64_t trials_override, const std::string& out_override, bool dump_transcript) {
  ExperimentConfig cfg = load_config(config_path);
  if (trials_override) cfg.trials = trials_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (dump_transcript) cfg.dump_transcript = true;
  IndexSetBundle sets = bundle_from_json(load_json_file(sets_path));
  if (sets.block_len != cfg.n_block)
    throw ValidationError("sets file block length does not match the config");

  fs::create_directories(out_dir_of(cfg));
  uint64_t fails = 0;
  std::vector<std::pair<BitVec, BitVec>> kv_pairs;
  RateAccounting rates;
  for (uint64_t t = 0; t < cfg.trials; ++t) {
    ProtocolReport rep;
    auto res = run_one(cfg, sets, t, &rep);
    if (res.failed) ++fails;
    kv_pairs.push_back({res.key, res.eve_view});
    rates = rep.rates;
    if (cfg.dump_transcript) {
      json rec{{"config", to_json(cfg)},
               {"sets", to_json(sets)},
               {"trial", t},
               {"report", to_json(rep)}};
      save_json_file(out_dir_of(cfg) + "/run_" + std::to_string(t) + ".json", rec);
    }
  }
  auto pe = wilson_interval(fails, cfg.trials);

  // exact secrecy when the enumeration budget allows, plug-in otherwise
  SecrecyReport sec;
  try {
    TestChannel tc = TestChannel::bsc(cfg.test_flip);
    auto ex = exact_protocol_distribution(cfg.model, cfg.source, sets, cfg.n_block, cfg.k, &tc);
    sec.method = "exact";
    sec.leakage_bits = ex.leakage_bits();
    sec.uniformity_bits = ex.uniformity_bits();
    sec.count = 0;
  } catch (const CapacityError&) {
    sec = plug_in_secrecy(kv_pairs);
  } catch (const StructuralError&) {
    sec = plug_in_secrecy(kv_pairs);
  }

  json out{{"model", cfg.model},
           {"n", cfg.n_block},
           {"k", cfg.k},
           {"seed", cfg.seed},
           {"trials", cfg.trials},
           {"pe", pe.rate},
           {"pe_lo", pe.lo},
           {"pe_hi", pe.hi},
           {"key_rate", rates.key_rate()},
           {"seed_rate", rates.seed_rate()},
           {"public_rate", rates.public_rate()},
           {"leakage_bits", sec.leakage_bits},
           {"uniformity_bits", sec.uniformity_bits},
           {"secrecy_method", sec.method}};
  if (sec.method == "plug_in") out["warning"] = "plug_in secrecy estimate (budget exceeded)";
  std::cout << out.dump(2) << "\n";

  std::string csv = out_dir_of(cfg) + "/results.csv";
  bool fresh = !fs::exists(csv);
  std::ofstream f(csv, std::ios::app);
  if (fresh)
    f << "# polarkey results schema v1\n"
         "model,n,k,seed,trials,pe,pe_lo,pe_hi,key_rate,seed_rate,public_rate,"
         "leakage_bits,uniformity_bits,secrecy_method\n";
  f << cfg.model << ',' << cfg.n_block << ',' << cfg.k << ',' << cfg.seed << ','
    << cfg.trials << ',' << pe.rate << ',' << pe.lo << ',' << pe.hi << ','
    << rates.key_rate() << ',' << rates.seed_rate() << ',' << rates.public_rate() << ','
    << sec.leakage_bits << ',' << sec.uniformity_bits << ',' << sec.method << "\n";
  return 0;
}

// ---- capacity ---------------------------------------------------------------

int cmd_capacity(const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  json out{{"model", cfg.model}};
  if (cfg.model == "model1") {
    auto r = cwsk_unlimited(cfg.source);
    out["value_bits"] = r.value;
    out["degraded"] = r.degraded;
    if (!r.degraded) out["warning"] = "source is not degraded; value is not the capacity";
  } else if (cfg.model == "model2" || cfg.model == "bio-gen" || cfg.model == "bio-zero") {
    TestChannel tc = TestChannel::bsc(cfg.test_flip);
    auto rp = model2_rate_point(cfg.source, tc.pu_given_x);
    out["key_rate"] = rp.key_rate;
    out["required_rp"] = rp.required_rp;
    if (cfg.source.variant == SourceVariant::DbmsChain && cfg.source.px == 0.5 &&
        cfg.source.z_present && cfg.source.p > 0 && cfg.source.p < 0.5 && cfg.source.q > 0 &&
        cfg.source.q < 0.5) {
      auto cap = example1_capacity(cfg.source.p, cfg.source.q, rp.required_rp);
      out["chain_capacity_at_rp"] = cap.value;
      out["beta0"] = cap.beta0;
    }
  } else if (cfg.model == "model3-star") {
    auto r = broadcast_capacity(cfg.source);
    out["value_bits"] = r.value;
    out["argmin_terminal"] = r.arg_terminal;
  } else if (cfg.model == "model4") {
    auto r = tree_capacity(cfg.source);
    out["value_bits"] = r.value;
    out["argmin_edge"] = json::array({r.arg_edge_i, r.arg_edge_j});
  } else if (cfg.model == "model3-tri") {
    JointPmf pm = joint_pmf(cfg.source);
    double i12 = pair_mutual_information(pair_pmf(pm, 1, 2));
    double i13 = pair_mutual_information(pair_pmf(pm, 1, 3));
    double i23 = pair_mutual_information(pair_pmf(pm, 2, 3));
    out["value_bits"] = std::max({std::min(i12, i13), std::min(i12, i23), std::min(i13, i23)});
  } else {
    throw ValidationError("unknown model: " + cfg.model);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---- oracle -----------------------------------------------------------------

struct OracleCheck {
  std::string name;
  bool pass;
  double margin;
};

int cmd_oracle(const std::string& config_path, const std::string& sets_path, uint32_t n) {
  std::vector<OracleCheck> checks;
  auto push = [&](std::string name, bool pass, double margin) {
    checks.push_back({std::move(name), pass, margin});
  };

  // chain-rule conservation across the source battery
  {
    std::vector<std::pair<std::string, BitSideJoint>> joints;
    auto chain = joint_pmf(JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true));
    joints.push_back({"dbms|Y", bit_side_joint(chain, 1, SideSel::term(2))});
    joints.push_back({"dbms|Z", bit_side_joint(chain, 1, SideSel::eve())});
    auto star = joint_pmf(JointSourceSpec::broadcast_star(0.5, {0.05, 0.2}));
    joints.push_back({"star|X3", bit_side_joint(star, 1, SideSel::term(3))});
    auto tree = joint_pmf(JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {2, 3, 0.2}}));
    joints.push_back({"tree|X1", bit_side_joint(tree, 2, SideSel::term(1))});
    for (auto& [name, j] : joints) {
      double worst = 0;
      for (size_t nn : {size_t{2}, size_t{4}, std::max<size_t>(4, n)}) {
        auto st = exact_index_stats(j, nn);
        double sum = 0;
        for (double h : st.h_cond) sum += h;
        worst = std::max(worst, std::abs(sum - double(nn) * conditional_entropy_bits(j)));
      }
      push("chain_rule[" + name + "]", worst <= 1e-9, worst);
    }
  }
  // combining bound on random joints
  {
    auto rng = make_stream(1234, "oracle-combine");
    auto worst = check_combine_bound_random(200, 3, rng);
    push("combine_bound", worst.margin >= -1e-12, worst.margin);
  }
  // star and tree inclusions on exact stats
  {
    auto star = JointSourceSpec::broadcast_star(0.5, {0.05, 0.2});
    auto pm = joint_pmf(star);
    DeltaPolicy dp;
    auto h2 = high_set(exact_index_stats(bit_side_joint(pm, 1, SideSel::term(2)), n), dp.dh(n));
    auto h3 = high_set(exact_index_stats(bit_side_joint(pm, 1, SideSel::term(3)), n), dp.dh(n));
    push("star_inclusion", h2.is_subset_of(h3), 0);
    auto tree = JointSourceSpec::markov_tree(3, {{1, 2, 0.1}, {2, 3, 0.2}});
    auto plan = plan_markov_tree(tree);
    auto tpm = joint_pmf(tree);
    auto hroot = high_set(
        exact_index_stats(bit_side_joint(tpm, plan.root, SideSel::term(plan.n1)), n), dp.dh(n));
    bool ok = true;
    for (int c = 1; c <= 3; ++c)
      if (plan.parent[c] == plan.root)
        ok = ok &&
             high_set(exact_index_stats(bit_side_joint(tpm, plan.root, SideSel::term(c)), n),
                      dp.dh(n))
                 .is_subset_of(hroot);
    push("tree_inclusion", ok, 0);
  }
  // constructed-set algebra (either the provided file or a fresh build)
  {
    IndexSetBundle b;
    if (!sets_path.empty()) {
      b = bundle_from_json(load_json_file(sets_path));
    } else {
      ExperimentConfig cfg;
      if (!config_path.empty())
        cfg = load_config(config_path);
      else
        cfg.source = JointSourceSpec::dbms_chain(0.5, 0.11, 0.3, true);
      auto rng = make_stream(cfg.seed, "oracle-construct");
      b = construct_sets(cfg.model, cfg.source, n, construct_options(cfg), rng);
    }
    bool ok = true;
    if (b.model == "model1" || b.model == "model2" || b.model == "bio-gen" ||
        b.model == "bio-zero") {
      const IndexSet& V = b.has("V") ? b.at("V") : b.at("V_UZ");
      const IndexSet& H = b.has("H") ? b.at("H") : b.at("H_UY");
      IndexSet helper = b.has("V_UX") ? H.subtract(b.at("V_UX")) : H;
      ok = ok && (b.at("Fp") == helper.subtract(V));
      ok = ok && (b.at("F") == helper.intersect(V));
      ok = ok && (b.at("A").size() == b.at("Fp").size());
      ok = ok && b.at("A").is_subset_of(V.subtract(H));
      ok = ok && (b.at("K") == V.subtract(H).subtract(b.at("A")));
      ok = ok && (b.at("K").intersect(b.at("A")).size() == 0);
    } else if (b.model == "model3-star") {
      ok = ok && (b.at("K") == b.at("V").subtract(b.at("H_min")));
      ok = ok && (b.at("F") == b.at("V").intersect(b.at("H_min")));
      ok = ok && (b.at("Fp") == b.at("H_min").subtract(b.at("V")));
    } else if (b.model == "model3-tri") {
      IndexSet vnoh = b.at("V").subtract(b.at("H_1"));
      ok = ok && (b.at("K").unite(b.at("Kbar")) == vnoh);
      ok = ok && (b.at("K").intersect(b.at("Kbar")).size() == 0);
      ok = ok && (b.at("Kbar") == b.at("F_23").subtract(b.at("F_21")));
      ok = ok && (b.at("F_M").size() == b.at("Kbar").size());
      ok = ok && b.at("F_M").is_subset_of(b.at("F_21").subtract(b.at("F_23")));
    } else if (b.model == "model4") {
      int root = int(b.meta.at("root"));
      ok = ok && (b.at("K") == b.at("H_" + std::to_string(root)).complement());
    }
    push("set_algebra[" + b.model + "]", ok, 0);
  }

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " margin=" << c.margin << "\n";
    all = all && c.pass;
  }
  return all ? 0 : kExitInvariant;
}

// ---- replay -----------------------------------------------------------------

int cmd_replay(const std::string& record_path) {
  json rec = load_json_file(record_path);
  ExperimentConfig cfg = config_from_json(rec.at("config"));
  IndexSetBundle sets = bundle_from_json(rec.at("sets"));
  uint64_t trial = rec.at("trial").get<uint64_t>();
  ProtocolReport rep;
  run_one(cfg, sets, trial, &rep);
  std::string fresh = to_json(rep).dump();
  std::string stored = rec.at("report").dump();
  if (fresh == stored) {
    std::cout << "replay OK: byte-identical report\n";
    return 0;
  }
  std::cout << "replay MISMATCH\n";
  return kExitInvariant;
}

int cmd_construct(const std::string& config_path, const std::string& out_path) {
  ExperimentConfig cfg = load_config(config_path);
  auto rng = make_stream(cfg.seed, "construct");
  IndexSetBundle b = construct_sets(cfg.model, cfg.source, cfg.n_block,
                                    construct_options(cfg), rng);
  json j = to_json(b);
  j["method"] = cfg.method;
  j["samples"] = cfg.method == "mc" ? cfg.samples : 0;
  j["source"] = to_json(cfg.source);
  j["test_flip"] = cfg.test_flip;
  std::string path = out_path.empty() ? out_dir_of(cfg) + "/sets.json" : out_path;
  if (!fs::path(path).parent_path().empty())
    fs::create_directories(fs::path(path).parent_path());
  save_json_file(path, j);
  json sizes;
  for (const auto& [name, s] : b.sets) sizes[name] = s.size();
  double key_rate = b.has("K") ? double(b.at("K").size()) / b.block_len : 0.0;
  json summary{{"sets_file", path}, {"sizes", sizes}, {"predicted_key_rate", key_rate}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polar-coding toolkit for multiterminal secret-key generation"};
  app.require_subcommand(1);

  std::string config_path, sets_path, out_path, record_path;
  uint64_t trials = 0;
  uint32_t oracle_n = 4;
  bool dump_transcript = false;

  auto* c_construct = app.add_subcommand("construct", "compute index sets from a config");
  c_construct->add_option("--config", config_path)->required();
  c_construct->add_option("--out", out_path);

  auto* c_run = app.add_subcommand("run", "simulate protocol trials against a sets file");
  c_run->add_option("--config", config_path)->required();
  c_run->add_option("--sets", sets_path)->required();
  c_run->add_option("--trials", trials);
  c_run->add_option("--out", out_path);
  c_run->add_flag("--dump-transcript", dump_transcript);

  auto* c_cap = app.add_subcommand("capacity", "closed-form reference values");
  c_cap->add_option("--config", config_path)->required();

  auto* c_oracle = app.add_subcommand("oracle", "run the exact-enumeration invariant suite");
  c_oracle->add_option("--config", config_path);
  c_oracle->add_option("--sets", sets_path);
  c_oracle->add_option("--n", oracle_n);

  auto* c_replay = app.add_subcommand("replay", "re-execute a dumped run and compare");
  c_replay->add_option("--record", record_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_construct->parsed()) return cmd_construct(config_path, out_path);
    if (c_run->parsed()) return cmd_run(config_path, sets_path, trials, out_path, dump_transcript);
    if (c_cap->parsed()) return cmd_capacity(config_path);
    if (c_oracle->parsed()) return cmd_oracle(config_path, sets_path, oracle_n);
    if (c_replay->parsed()) return cmd_replay(record_path);
  } catch (const InfeasibleConfiguration& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const CapacityError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StructuralError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
