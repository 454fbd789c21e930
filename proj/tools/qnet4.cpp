// qnet4 — build four-node network states, analyze state files, run the
// certification suites, and emit machine-readable reports.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnet/certify.hpp"
#include "qnet/channels.hpp"
#include "qnet/infotheory.hpp"
#include "qnet/layout.hpp"
#include "qnet/netbuild.hpp"
#include "qnet/report.hpp"
#include "qnet/rng.hpp"
#include "qnet/statefile.hpp"

namespace {

using namespace qnet;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  std::string topology = "iqn";
  i64 d = 2;
  std::uint64_t seed = 42;
  int trials = 50;
  std::string check = "all";
  std::string unitaries = "haar"; // haar | identity
  int mixture = 0;                // classical-mixture support size; 0/1 = none
  std::string out;
  double tol_entropy = tol::kCertEntropy;
  double tol_rank = tol::kRankRel;
  std::map<std::string, std::string> source_spec; // label -> spec string
  std::map<std::string, std::string> channel;     // node letter -> channel string
};

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw StateIoError("cannot open config: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + " is not key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "topology") cfg.topology = val;
    else if (key == "d") cfg.d = std::stoll(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "trials") cfg.trials = std::stoi(val);
    else if (key == "check") cfg.check = val;
    else if (key == "unitaries") cfg.unitaries = val;
    else if (key == "mixture") cfg.mixture = std::stoi(val);
    else if (key == "out") cfg.out = val;
    else if (key == "tol_entropy") cfg.tol_entropy = std::stod(val);
    else if (key == "tol_rank") cfg.tol_rank = std::stod(val);
    else if (key.rfind("source.", 0) == 0) cfg.source_spec[key.substr(7)] = val;
    else if (key.rfind("channel.", 0) == 0) cfg.channel[key.substr(8)] = val;
    else throw std::invalid_argument("unknown config key: " + key);
  }
}

SourceSpec parse_source_spec(const std::string& text, int arity, i64 d) {
  if (text == "bell") {
    if (arity != 2) throw std::invalid_argument("bell sources are bipartite");
    return SourceSpec::bell_class(d);
  }
  if (text == "product") {
    SourceSpec s{arity, d, true, 1, std::vector<int>(static_cast<std::size_t>(arity), 1), false};
    return s;
  }
  if (text == "ghz") {
    if (arity != 3) throw std::invalid_argument("ghz sources are tripartite");
    return SourceSpec::ghz(d);
  }
  if (text == "generic") {
    return arity == 2 ? SourceSpec::bell_class(d) : SourceSpec::generic_tripartite(d);
  }
  // pure:m=a,b[,c]   or   mixed:r=N:m=a,b[,c]
  std::stringstream ss(text);
  std::string head;
  std::getline(ss, head, ':');
  SourceSpec spec{arity, d, true, 1, {}, false};
  if (head == "mixed") spec.pure = false;
  else if (head != "pure") throw std::invalid_argument("bad source spec: " + text);
  std::string field;
  while (std::getline(ss, field, ':')) {
    if (field.rfind("r=", 0) == 0) {
      spec.rank = std::stoi(field.substr(2));
    } else if (field.rfind("m=", 0) == 0) {
      std::stringstream ms(field.substr(2));
      std::string item;
      while (std::getline(ms, item, ',')) spec.marginal_ranks.push_back(std::stoi(item));
    } else if (field == "ghz") {
      spec.ghz_class = true;
    } else {
      throw std::invalid_argument("bad source spec field: " + field);
    }
  }
  if (spec.marginal_ranks.empty()) {
    spec.marginal_ranks.assign(static_cast<std::size_t>(arity), static_cast<int>(d));
  }
  if (static_cast<int>(spec.marginal_ranks.size()) != arity) {
    throw std::invalid_argument("marginal rank count does not match arity in: " + text);
  }
  return spec;
}

KrausChannel parse_channel(const std::string& text, i64 node_dim, int particles, Rng& rng) {
  std::stringstream ss(text);
  std::string kind, param;
  std::getline(ss, kind, ':');
  std::getline(ss, param);
  if (kind == "depolarizing") return preset_depolarizing(node_dim, std::stod(param));
  if (kind == "amp_damp") {
    const double gamma = std::stod(param);
    KrausChannel ch = preset_amplitude_damping(gamma);
    for (int p = 1; p < particles; ++p) ch = tensor(ch, preset_amplitude_damping(gamma));
    if (ch.dim != node_dim) throw std::invalid_argument("amp_damp needs qubit particles");
    return ch;
  }
  if (kind == "random") return sample_channel(node_dim, std::stoi(param), rng);
  throw std::invalid_argument("unknown channel preset: " + kind);
}

std::vector<SourceSample> draw_config_sources(const SystemLayout& lay, const RunConfig& cfg,
                                              Rng& rng) {
  std::vector<SourceSample> samples;
  for (std::size_t s = 0; s < lay.sources.size(); ++s) {
    const int arity = static_cast<int>(lay.sources[s].nodes.size());
    std::string text = "generic";
    if (auto it = cfg.source_spec.find(lay.sources[s].label); it != cfg.source_spec.end()) {
      text = it->second;
    } else if (auto def = cfg.source_spec.find("default"); def != cfg.source_spec.end()) {
      text = def->second;
    }
    samples.push_back(sample_source(parse_source_spec(text, arity, cfg.d), rng));
  }
  return samples;
}

std::vector<ComplexMatrix> config_unitaries(const SystemLayout& lay, const RunConfig& cfg,
                                            Rng& rng) {
  std::vector<ComplexMatrix> us(kNumNodes);
  if (cfg.unitaries == "identity") return us; // rows==0 → identity
  if (cfg.unitaries != "haar") throw std::invalid_argument("unitaries must be haar or identity");
  for (int node = 0; node < kNumNodes; ++node) us[static_cast<std::size_t>(node)] = haar_unitary(lay.node_dim(node), rng);
  return us;
}

void emit(const ordered_json& j, const RunConfig& cfg) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw StateIoError("cannot open for writing: " + cfg.out);
    out << text;
  }
}

int cmd_build(const RunConfig& cfg, const std::string& state_path) {
  const Topology t = parse_topology(cfg.topology);
  SystemLayout lay = incidence(t, cfg.d);
  Rng rng(cfg.seed);
  NetworkState state = [&] {
    if (cfg.mixture >= 2) {
      std::vector<MixtureBranch> branches;
      const auto w = rng.mixture_weights(cfg.mixture);
      for (int b = 0; b < cfg.mixture; ++b) {
        branches.push_back({w[static_cast<std::size_t>(b)], draw_config_sources(lay, cfg, rng),
                            config_unitaries(lay, cfg, rng)});
      }
      return build_mixture(t, std::move(branches));
    }
    return build_network(t, draw_config_sources(lay, cfg, rng), config_unitaries(lay, cfg, rng));
  }();
  if (!cfg.channel.empty()) {
    ChannelPlacement placement;
    for (const auto& [node_s, text] : cfg.channel) {
      if (node_s.size() != 1) throw std::invalid_argument("channel node must be A..D");
      int node = -1;
      for (int n = 0; n < kNumNodes; ++n) {
        if (node_s[0] == kNodeNames[static_cast<std::size_t>(n)]) node = n;
      }
      if (node < 0) throw std::invalid_argument("channel node must be A..D");
      placement.node_channel[static_cast<std::size_t>(node)] = parse_channel(
          text, state.layout.node_dim(node),
          static_cast<int>(state.layout.node_particles(node).size()), rng);
    }
    state = apply(placement, state);
  }
  save_state(state_path, state);
  std::cerr << "built " << topology_id(t) << " state: " << state.layout.particles.size()
            << " particles (" << state.layout.network_particles << " network), rep="
            << (state.pure_rep ? "pure" : "density") << ", dim="
            << (state.pure_rep ? state.psi.dim : state.rho.rows) << " -> " << state_path << "\n";
  return kExitPass;
}

int cmd_analyze(const RunConfig& cfg, const std::string& state_path) {
  const StateFile f = load_state(state_path);
  const SystemView view = f.view();
  for (int node = 0; node < kNumNodes; ++node) {
    if (view.particles_of(1u << node).empty()) {
      throw StateIoError("state file does not populate node " +
                         std::string(1, kNodeNames[static_cast<std::size_t>(node)]));
    }
  }
  const MarginalReport rep = marginal_report(view, cfg.tol_rank);
  EntropyTable table(view);
  ordered_json j;
  j["tool"] = "qnet4";
  j["format"] = "report/1";
  j["command"] = "analyze";
  j["state"] = {{"path", state_path},
                {"topology", f.topology},
                {"rep", f.pure ? "pure" : "density"},
                {"particles", f.particles.size()}};
  ordered_json ent, rank;
  for (NodeMask m : nonempty_node_masks()) {
    ent[subset_name(m)] = rep.entropy_bits[m];
    rank[subset_name(m)] = rep.rank[m];
  }
  j["entropy_bits"] = std::move(ent);
  j["rank"] = std::move(rank);
  ordered_json mi;
  auto record = [&](std::span<const NodeMask> parts) {
    const MutualInfoValue v = mutual_information_value(table, parts);
    mi["I" + std::to_string(v.n) + "(" + v.parts + ")"] = v.bits;
  };
  const NodeMask singles[4] = {1, 2, 4, 8};
  for (int x = 0; x < 4; ++x) {
    for (int y = x + 1; y < 4; ++y) {
      const NodeMask pair[] = {singles[x], singles[y]};
      record(pair);
    }
  }
  for (int skip = 3; skip >= 0; --skip) {
    NodeMask parts[3];
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) parts[k++] = singles[i];
    }
    record(parts);
  }
  record(std::span<const NodeMask>(singles, 4));
  j["mutual_information_bits"] = std::move(mi);
  ordered_json neg;
  const bool has_env = [&] {
    for (int n : view.node_of) {
      if (n < 0) return true;
    }
    return false;
  }();
  for (int node = 0; node < kNumNodes; ++node) {
    const std::string cut = std::string(1, kNodeNames[static_cast<std::size_t>(node)]) + "|rest";
    if (view.psi && !has_env) {
      neg[cut] = log_negativity_pure(*view.psi, view.dims, view.particles_of(1u << node));
    } else {
      const ComplexMatrix rho = reduced_density(view, kAllNodes);
      if (rho.rows >= 1024) {
        std::cerr << "warning: dense log-negativity on a " << rho.rows << "-dim density is slow\n";
      }
      std::vector<i64> net_dims;
      std::vector<int> net_nodes;
      for (std::size_t p = 0; p < view.dims.size(); ++p) {
        if (view.node_of[p] >= 0) {
          net_dims.push_back(view.dims[p]);
          net_nodes.push_back(view.node_of[p]);
        }
      }
      std::vector<int> side;
      for (int p = 0; p < static_cast<int>(net_nodes.size()); ++p) {
        if (net_nodes[static_cast<std::size_t>(p)] == node) side.push_back(p);
      }
      neg[cut] = log_negativity(rho, net_dims, side);
    }
  }
  j["log_negativity_bits"] = std::move(neg);
  j["tolerances"] = {{"entropy", cfg.tol_entropy}, {"rank", cfg.tol_rank}};
  j["i4_within_tol"] = std::abs(i4(table)) <= cfg.tol_entropy;
  j["i4_bits"] = i4(table);
  emit(j, cfg);
  std::cerr << "analyze: S(ABCD)=" << rep.global_entropy << " bits, rk=" << rep.global_rank
            << ", I4=" << i4(table) << " bits ("
            << (std::abs(i4(table)) <= cfg.tol_entropy ? "zero" : "nonzero") << " at tol "
            << cfg.tol_entropy << ")\n";
  return kExitPass;
}

int cmd_verify(const RunConfig& cfg) {
  VerifySpec spec;
  spec.check = cfg.check;
  spec.topology = parse_topology(cfg.topology);
  spec.seed = cfg.seed;
  spec.trials = cfg.trials;
  const auto suites = run_checks(spec);
  emit(verify_report(spec, suites), cfg);
  bool all_pass = true;
  for (const auto& s : suites) {
    for (const auto& it : s.items) {
      const char* tag = it.informational ? "INFO" : (it.pass ? "PASS" : "FAIL");
      std::cerr << "[" << tag << "] " << s.suite << "/" << it.name << ": measured=" << it.measured;
      if (!it.informational) std::cerr << " limit=" << it.limit;
      if (!it.note.empty()) std::cerr << " (" << it.note << ")";
      std::cerr << "\n";
    }
    all_pass = all_pass && s.pass();
  }
  return all_pass ? kExitPass : kExitCheckFailure;
}

int cmd_witness(const RunConfig& cfg, const std::string& state_path) {
  const StateFile f = load_state(state_path);
  if (!f.pure || f.psi.dim != 16 || f.particles.size() != 4) {
    std::cerr << "witness needs a 4-qubit pure state file\n";
    return kExitUsage;
  }
  const Topology t = parse_topology(cfg.topology);
  const bool gme = gme_check(f.psi);
  const bool unsat = gme_witness_unsat(t);
  const bool incompatible = gme && unsat;
  ordered_json j;
  j["tool"] = "qnet4";
  j["format"] = "report/1";
  j["command"] = "witness";
  j["state"] = state_path;
  j["topology"] = std::string(topology_id(t));
  j["gme_check"] = gme;
  j["witness_unsat"] = unsat;
  j["verdict"] = incompatible ? "INCOMPATIBLE" : "INCONCLUSIVE";
  emit(j, cfg);
  std::cerr << (incompatible ? "INCOMPATIBLE" : "INCONCLUSIVE") << "\n";
  return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"four-node quantum network states: build, analyze, verify, witness"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, state_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--topology", cfg.topology, "iqn | itcn1 | itcn2 (default iqn)");
    sub->add_option("--seed", cfg.seed, "master seed; fully determines all randomness (default 42)");
    sub->add_option("--trials", cfg.trials, "trials per check (default 50)");
    sub->add_option("--out", cfg.out, "also write the JSON report/state to this path");
    sub->add_option("--tol-entropy", cfg.tol_entropy,
                    "entropy tolerance used by analyze summaries (default 1e-7)");
    sub->add_option("--tol-rank", cfg.tol_rank, "relative numerical-rank tolerance (default 1e-8)");
  };

  auto* build = app.add_subcommand("build", "sample sources and write a network state file");
  add_common(build);
  build->add_option("--d", cfg.d, "local particle dimension (default 2)");
  build->add_option("--unitaries", cfg.unitaries, "haar | identity (default haar)");
  build->add_option("--mixture", cfg.mixture, "classical mixture support size L (default none)");
  build->add_option("state", state_path, "output state file")->required();

  auto* analyze = app.add_subcommand("analyze", "entropies, mutual information, ranks, negativity");
  add_common(analyze);
  analyze->add_option("state", state_path, "input state file")->required();

  auto* verify = app.add_subcommand("verify", "run certification suites");
  add_common(verify);
  verify->add_option("--check", cfg.check,
                     "i4zero | channels | bounds | ranks | additivity | gme | ssa | identities | all");

  auto* witness = app.add_subcommand("witness", "GME witness verdict for a 4-qubit pure state");
  add_common(witness);
  witness->add_option("state", state_path, "input state file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      RunConfig merged;
      load_config_file(config_path, merged);
      // command line wins over the file for keys it actually set
      CLI::App* sub = app.get_subcommands().front();
      auto flag_given = [&](const char* name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      if (flag_given("--topology")) merged.topology = cfg.topology;
      if (flag_given("--seed")) merged.seed = cfg.seed;
      if (flag_given("--trials")) merged.trials = cfg.trials;
      if (flag_given("--out")) merged.out = cfg.out;
      if (flag_given("--tol-entropy")) merged.tol_entropy = cfg.tol_entropy;
      if (flag_given("--tol-rank")) merged.tol_rank = cfg.tol_rank;
      if (flag_given("--d")) merged.d = cfg.d;
      if (flag_given("--unitaries")) merged.unitaries = cfg.unitaries;
      if (flag_given("--mixture")) merged.mixture = cfg.mixture;
      if (flag_given("--check")) merged.check = cfg.check;
      cfg = merged;
    }
    if (build->parsed()) return cmd_build(cfg, state_path);
    if (analyze->parsed()) return cmd_analyze(cfg, state_path);
    if (verify->parsed()) return cmd_verify(cfg);
    if (witness->parsed()) return cmd_witness(cfg, state_path);
  } catch (const StateIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
