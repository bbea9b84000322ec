// crsig command-line tool. Exit codes: 0 ok, 1 usage, 2 validation or
// verification failure, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "crsig/crsig.hpp"

namespace fs = std::filesystem;
using namespace crsig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output is staged next to the target and renamed into place, so a failed
// command never leaves a partial file behind.
class StagedFiles {
 public:
  StagedFiles() = default;
  StagedFiles(const StagedFiles&) = delete;
  StagedFiles& operator=(const StagedFiles&) = delete;
  ~StagedFiles() {
    for (const auto& [tmp, dst] : files_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }

  void add(const std::string& path, const std::string& content, bool secret = false) {
    const fs::path dst(path);
    fs::path tmp = dst;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write '" + path + "'");
      files_.emplace_back(tmp, dst);
      out << content;
      if (!out.flush()) throw ConfigError("cannot write '" + path + "'");
    }
    if (secret) {
      fs::permissions(tmp, fs::perms::owner_read | fs::perms::owner_write,
                      fs::perm_options::replace);
    }
  }

  void commit() {
    for (const auto& [tmp, dst] : files_) fs::rename(tmp, dst);
    files_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> files_;
};

void write_one(const std::string& path, const std::string& content, bool secret = false) {
  StagedFiles f;
  f.add(path, content, secret);
  f.commit();
}

// Standard output, or a file when a path is given.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_one(path, content);
  }
}

Seed random_seed() {
  std::random_device rd;
  Seed s;
  for (auto& b : s) b = static_cast<std::uint8_t>(rd());
  return s;
}

Seed seed_from_hex(const std::string& hex) {
  const Digest d = digest_from_hex(hex);
  return d.bytes;
}

// Key file: alg, preimage and auth as `key = value` lines.
struct KeyFile {
  HashAlg alg = HashAlg::kSha256;
  Preimage x;
  AuthId y;
};

std::string format_key(const KeyFile& k) {
  return "# crsig secret key; keep private\nalg = " + std::string(to_string(k.alg)) +
         "\npreimage = " + to_hex(k.x.view()) + "\nauth = " + to_hex(k.y) + "\n";
}

KeyFile load_key(const std::string& path) {
  const auto kv = parse_kv(read_file(path));
  KeyFile k;
  k.alg = parse_hash_alg(kv_require(kv, "alg"));
  k.x.bytes = digest_from_hex(kv_require(kv, "preimage")).bytes;
  k.y = auth_from_hex(kv_require(kv, "auth"));
  if (auth_id(k.x, k.alg) != k.y) {
    throw ValidationError("key file '" + path + "': auth does not match preimage");
  }
  return k;
}

struct CommitFile {
  HashAlg alg = HashAlg::kSha256;
  AuthId account;
  Commitment c;
};

CommitFile load_commit(const std::string& path) {
  const auto kv = parse_kv(read_file(path));
  CommitFile f;
  f.alg = parse_hash_alg(kv_require(kv, "alg"));
  f.account = auth_from_hex(kv_require(kv, "account"));
  f.c = parse_commitment(from_hex(kv_require(kv, "commitment")), f.account);
  return f;
}

struct RevealFile {
  HashAlg alg = HashAlg::kSha256;
  AuthId account;
  Reveal r;
};

RevealFile load_reveal(const std::string& path) {
  const auto kv = parse_kv(read_file(path));
  RevealFile f;
  f.alg = parse_hash_alg(kv_require(kv, "alg"));
  f.account = auth_from_hex(kv_require(kv, "account"));
  f.r = parse_reveal(from_hex(kv_require(kv, "reveal")));
  return f;
}

Action transfer(const std::string& dest_hex, std::uint64_t amount) {
  Action m{ActionKind::kTransfer, auth_from_hex(dest_hex), amount};
  if (!is_well_formed(m)) {
    throw ValidationError("transfer needs a positive amount and a non-burn destination");
  }
  return m;
}

// Cost commands fall back to $CRSIG_CONFIG_DIR/cost.json, then to defaults.
cost::CostModel load_cost(const std::string& path) {
  std::string p = path;
  if (p.empty()) {
    if (const char* dir = std::getenv("CRSIG_CONFIG_DIR")) {
      const fs::path candidate = fs::path(dir) / "cost.json";
      if (fs::exists(candidate)) p = candidate.string();
    }
  }
  return p.empty() ? cost::CostModel{} : cost::parse_cost_model(read_file(p));
}

// Scenario paths that do not exist are retried under $CRSIG_CONFIG_DIR.
SimConfig load_scenario(const std::string& path) {
  fs::path p(path);
  if (!fs::exists(p) && p.is_relative()) {
    if (const char* dir = std::getenv("CRSIG_CONFIG_DIR")) {
      if (fs::exists(fs::path(dir) / p)) p = fs::path(dir) / p;
    }
  }
  return parse_scenario(read_file(p.string()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commit-reveal authorization toolkit: keys, ledger, simulation and cost model"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "Create a preimage/auth key file");
  std::string kg_seed, kg_out, kg_alg = "sha256";
  keygen_cmd->add_option("--seed", kg_seed, "32-byte seed as 64 hex digits (random if omitted)");
  keygen_cmd->add_option("--out", kg_out, "Secret key file to write")->required();
  keygen_cmd->add_option("--alg", kg_alg, "sha256 | blake2s256 | sha3-256");

  // commit
  auto* commit_cmd = app.add_subcommand("commit", "Build a commitment to a transfer");
  std::string c_key, c_dest, c_out, c_mode = "full";
  std::uint64_t c_amount = 0;
  commit_cmd->add_option("--key", c_key, "Key file")->required();
  commit_cmd->add_option("--dest", c_dest, "Destination auth (hex)")->required();
  commit_cmd->add_option("--amount", c_amount, "Amount")->required();
  commit_cmd->add_option("--mode", c_mode, "full | compact");
  commit_cmd->add_option("--out", c_out, "Commitment file to write")->required();

  // reveal
  auto* reveal_cmd = app.add_subcommand("reveal", "Build the reveal for a committed transfer");
  std::string r_key, r_dest, r_out, r_next_seed, r_next_out;
  std::uint64_t r_amount = 0;
  bool r_final = false;
  reveal_cmd->add_option("--key", r_key, "Key file")->required();
  reveal_cmd->add_option("--dest", r_dest, "Destination auth (hex)")->required();
  reveal_cmd->add_option("--amount", r_amount, "Amount")->required();
  reveal_cmd->add_option("--out", r_out, "Reveal file to write")->required();
  reveal_cmd->add_option("--next-seed", r_next_seed, "Seed for the rotated key (random if omitted)");
  auto* next_opt =
      reveal_cmd->add_option("--next-key-out", r_next_out, "Secret file for the rotated key");
  auto* final_opt =
      reveal_cmd->add_flag("--final", r_final, "Rotate to the burn sentinel (empties the account)");
  next_opt->excludes(final_opt);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check a reveal against a commitment");
  std::string v_commit, v_reveal;
  verify_cmd->add_option("--commit", v_commit, "Commitment file")->required();
  verify_cmd->add_option("--reveal", v_reveal, "Reveal file")->required();

  // ledger run
  auto* ledger_cmd = app.add_subcommand("ledger", "Ledger operations");
  ledger_cmd->require_subcommand(1);
  auto* ledger_run = ledger_cmd->add_subcommand("run", "Apply a scenario script, print final state");
  std::string l_script, l_export;
  ledger_run->add_option("scenario", l_script, "Scenario script")->required();
  ledger_run->add_option("--export", l_export, "Write the state JSON here instead of stdout");

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "Network simulation");
  sim_cmd->require_subcommand(1);
  auto* sim_run = sim_cmd->add_subcommand("run", "Run a scenario and print metrics");
  std::string s_config, s_format = "json", s_out, s_nodes;
  sim_run->add_option("config", s_config, "Scenario script")->required();
  sim_run->add_option("--format", s_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sim_run->add_option("--out", s_out, "Write metrics here instead of stdout");
  sim_run->add_option("--nodes-csv", s_nodes, "Also write per-node CSV");

  auto* sim_sweep = sim_cmd->add_subcommand("sweep", "Footprint ratio over envelope sizes");
  std::string sw_config, sw_out;
  std::uint64_t sw_min = 64, sw_max = 256, sw_step = 16;
  unsigned sw_jobs = 1;
  sim_sweep->add_option("config", sw_config, "Scenario script")->required();
  sim_sweep->add_option("--envelope-min", sw_min, "Smallest envelope (bytes)");
  sim_sweep->add_option("--envelope-max", sw_max, "Largest envelope (bytes)");
  sim_sweep->add_option("--step", sw_step, "Envelope increment (bytes)");
  sim_sweep->add_option("--jobs", sw_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sim_sweep->add_option("--out", sw_out, "Write CSV here instead of stdout");

  auto* sim_attacks = sim_cmd->add_subcommand("attacks", "Run every attack at every position");
  std::string a_config;
  sim_attacks->add_option("config", a_config, "Scenario script with attack events")->required();

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "Storage and infrastructure cost model");
  cost_cmd->require_subcommand(1);
  std::string k_config;
  auto* cost_report = cost_cmd->add_subcommand("report", "Full cost report");
  std::string k_format = "text", k_out;
  cost_report->add_option("--format", k_format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cost_report->add_option("--out", k_out, "Write here instead of stdout");
  cost_report->add_option("--config", k_config, "Cost model JSON (defaults embedded)");
  auto* cost_figure = cost_cmd->add_subcommand("figure", "Figure/table data as CSV");
  std::string k_fig, k_fig_out;
  cost_figure->add_option("name", k_fig, "fig1 | fig2 | table2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "table2"}));
  cost_figure->add_option("--out", k_fig_out, "Write here instead of stdout");
  cost_figure->add_option("--config", k_config, "Cost model JSON (defaults embedded)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*keygen_cmd) {
      KeyFile k;
      k.alg = parse_hash_alg(kg_alg);
      std::tie(k.x, k.y) = keygen(kg_seed.empty() ? random_seed() : seed_from_hex(kg_seed), k.alg);
      write_one(kg_out, format_key(k), true);
      std::cout << to_hex(k.y) << "\n";

    } else if (*commit_cmd) {
      const KeyFile k = load_key(c_key);
      const Commitment c =
          make_commit(k.x, transfer(c_dest, c_amount), parse_commit_mode(c_mode), k.alg);
      const std::string hex = to_hex(serialize(c));
      write_one(c_out, "alg = " + std::string(to_string(k.alg)) + "\naccount = " +
                           to_hex(k.y) + "\ncommitment = " + hex + "\n");
      std::cout << hex << "\n";

    } else if (*reveal_cmd) {
      if (!r_final && r_next_out.empty()) {
        std::cerr << "reveal: pass --next-key-out FILE, or --final to empty the account\n";
        return kExitUsage;
      }
      const KeyFile k = load_key(r_key);
      const Action m = transfer(r_dest, r_amount);
      Reveal r;
      KeyFile next;
      if (r_final) {
        r = make_final_reveal(k.x, m);
      } else {
        const Seed s = r_next_seed.empty() ? random_seed() : seed_from_hex(r_next_seed);
        std::tie(r, next.x) = make_reveal(k.x, m, s, k.alg);
        next.alg = k.alg;
        next.y = r.next_auth;
      }
      StagedFiles files;
      files.add(r_out, "alg = " + std::string(to_string(k.alg)) + "\naccount = " +
                           to_hex(k.y) + "\nreveal = " + to_hex(serialize(r)) + "\n");
      if (!r_final) files.add(r_next_out, format_key(next), true);
      files.commit();
      std::cout << to_hex(r.next_auth) << "\n";

    } else if (*verify_cmd) {
      const CommitFile c = load_commit(v_commit);
      const RevealFile r = load_reveal(v_reveal);
      if (c.alg != r.alg) throw ValidationError("commit and reveal use different hash algorithms");
      if (c.account != r.account) {
        std::cout << "invalid: AccountMismatch\n";
        return kExitInvalid;
      }
      const Verdict v = verify_reveal(c.c, r.r, c.alg);
      if (!v) {
        std::cout << "invalid: " << to_string(*v.reason) << "\n";
        return kExitInvalid;
      }
      std::cout << "valid\n";

    } else if (*ledger_run) {
      const SimConfig cfg = load_scenario(l_script);
      ScenarioRunner runner(cfg);
      nlohmann::ordered_json txs = nlohmann::ordered_json::array();
      for (const Event& e : cfg.events) {
        for (const TxRecord& rec : runner.step(e)) {
          txs.push_back({{"line", e.line},
                         {"event", format_event(e)},
                         {"kind", rec.kind == TxKind::kCommit ? "commit" : "reveal"},
                         {"from", rec.account},
                         {"result", rec.outcome ? rec.outcome->describe() : "accepted"}});
        }
      }
      nlohmann::ordered_json j;
      nlohmann::ordered_json wallets = nlohmann::ordered_json::object();
      for (const auto& [name, bal] : runner.balances()) {
        wallets[name] = {{"auth", to_hex(runner.current_auth(name))}, {"balance", bal}};
      }
      j["wallets"] = std::move(wallets);
      j["transactions"] = std::move(txs);
      j["state"] = export_state(runner.state());
      emit(l_export, j.dump(2) + "\n");

    } else if (*sim_run) {
      const SimMetrics m = run_simulation(load_scenario(s_config));
      StagedFiles files;
      if (!s_nodes.empty()) files.add(s_nodes, nodes_csv(m));
      const std::string body = s_format == "csv" ? metrics_csv(m) : metrics_json(m).dump(2) + "\n";
      if (!s_out.empty()) files.add(s_out, body);
      files.commit();
      if (s_out.empty()) std::cout << body;

    } else if (*sim_sweep) {
      const auto rows =
          footprint_sweep(load_scenario(sw_config), sw_min, sw_max, sw_step, sw_jobs);
      std::string out = "envelope_bytes,cr_bytes_per_auth,baseline_bytes_per_auth,ratio\n";
      for (const auto& r : rows) {
        out += fmt::format("{},{},{},{:.6f}\n", r.envelope_bytes, cost::num(r.cr_bytes_per_auth),
                           cost::num(r.baseline_bytes_per_auth), r.ratio);
      }
      emit(sw_out, out);

    } else if (*sim_attacks) {
      const AttackSuiteReport rep = run_attack_suite(load_scenario(a_config));
      nlohmann::ordered_json j;
      j["orderings"] = rep.orderings;
      j["inapplicable"] = rep.inapplicable;
      j["all_rejected"] = rep.all_rejected();
      auto& per = j["verdicts"] = nlohmann::ordered_json::array();
      for (const auto& v : rep.verdicts) per.push_back(to_json(v));
      std::cout << j.dump(2) << "\n";
      if (!rep.all_rejected()) return kExitInvalid;

    } else if (*cost_report) {
      const cost::CostReport r = cost::build_report(load_cost(k_config));
      const std::string body = k_format == "csv"    ? cost::report_csv(r)
                               : k_format == "json" ? cost::report_json(r).dump(2) + "\n"
                                                    : cost::report_text(r);
      emit(k_out, body);

    } else if (*cost_figure) {
      const cost::CostModel m = load_cost(k_config);
      const std::string body = k_fig == "fig1"   ? cost::fig1_csv(m)
                               : k_fig == "fig2" ? cost::fig2_csv(m)
                                                 : cost::table2_csv(m);
      emit(k_fig_out, body);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
