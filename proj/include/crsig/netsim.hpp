#pragma once

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsig/errors.hpp"
#include "crsig/hashing.hpp"
#include "crsig/ledger.hpp"
#include "crsig/protocol.hpp"
#include "crsig/scenario.hpp"

namespace crsig {

// ---------------------------------------------------------------------------
// Modeled transaction sizes

inline std::uint64_t cr_commit_bytes(const SizeModel& s, CommitMode mode) {
  return s.envelope_bytes + (mode == CommitMode::kFull ? 2 : 1) * kDigestSize;
}

/// x and next_auth; the action itself rides in the envelope.
inline std::uint64_t cr_reveal_bytes(const SizeModel& s) {
  return s.envelope_bytes + 2 * kDigestSize;
}

inline std::uint64_t signed_tx_bytes(const SizeModel& s, std::uint64_t auth_bytes) {
  return s.envelope_bytes + auth_bytes;
}

/// Closed form of the per-authorization footprint ratio.
inline double footprint_ratio(const SizeModel& s, CommitMode mode,
                              std::uint64_t baseline_auth_bytes) {
  const std::uint64_t base = signed_tx_bytes(s, baseline_auth_bytes);
  if (base == 0) throw DomainError("baseline transaction has zero size");
  return static_cast<double>(cr_commit_bytes(s, mode) + cr_reveal_bytes(s)) /
         static_cast<double>(base);
}

// ---------------------------------------------------------------------------
// Metrics

struct NodeMetrics {
  NodeClass cls = NodeClass::kFull;
  std::uint64_t tx_bytes = 0;
  std::uint64_t header_bytes = 0;
  std::uint64_t state_snapshots = 0;  // archive nodes only

  friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

struct AttackVerdict {
  AttackKind kind = AttackKind::kReplaySpent;
  std::string target;
  bool rejected = true;
  std::vector<Outcome> outcomes;  // one per attack transaction

  friend bool operator==(const AttackVerdict&, const AttackVerdict&) = default;
};

struct TxRecord {
  TxKind kind = TxKind::kCommit;  // signed transfers are recorded as kReveal
  std::string account;
  std::uint64_t size_bytes = 0;
  bool adversarial = false;
  Outcome outcome;

  friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

/// total_bytes_stored is the sum of tx_bytes over every node, which equals
/// accepted_tx_bytes times the number of storing nodes.
struct SimMetrics {
  std::vector<NodeMetrics> nodes;
  std::uint64_t total_bytes_stored = 0;
  std::uint64_t total_header_bytes = 0;
  std::uint64_t total_bytes_transmitted = 0;
  std::uint64_t accepted_txs = 0;
  std::uint64_t rejected_txs = 0;
  std::uint64_t accepted_tx_bytes = 0;
  std::uint64_t authorization_events = 0;
  double footprint_per_auth_bytes = 0.0;
  std::uint64_t blocks = 0;
  std::uint64_t rejected_attack_count = 0;
  std::vector<AttackVerdict> attacks;
  std::vector<TxRecord> txs;
  std::map<std::string, std::uint64_t> final_balances;

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

// ---------------------------------------------------------------------------
// Scenario execution

namespace detail {

inline Seed seed_from(const Digest& d) { return d.bytes; }

inline Bytes u64_be(std::uint64_t v) {
  Bytes b;
  put_u64_be(b, v);
  return b;
}

}  // namespace detail

/// Replays a scenario against a commit–reveal ledger. Named wallets rotate
/// their key on every successful reveal; the name always refers to the
/// wallet's current AuthId.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    LedgerConfig lc;
    lc.alg = cfg.alg;
    lc.confirmation_depth = cfg.confirmation_depth;
    lc.commit_ttl = cfg.commit_ttl;
    for (const auto& [name, balance] : cfg.accounts) {
      Wallet w;
      w.name = name;
      rekey(w);
      lc.allocations.emplace_back(w.auth, balance);
      wallets_.emplace(name, std::move(w));
    }
    state_ = genesis(std::move(lc));
  }

  /// Executes one event and returns the transactions it produced.
  std::vector<TxRecord> step(const Event& e) {
    std::vector<TxRecord> out;
    switch (e.kind) {
      case EventKind::kAdvance:
        advance_height(state_, e.blocks);
        break;
      case EventKind::kCommit:
        out.push_back(commit(e));
        break;
      case EventKind::kReveal:
        out.push_back(reveal(e));
        break;
      case EventKind::kAttack: {
        AttackVerdict v = attack(e, out);
        verdicts_.push_back(std::move(v));
        break;
      }
    }
    return out;
  }

  const LedgerState& state() const { return state_; }
  const std::vector<AttackVerdict>& verdicts() const { return verdicts_; }

  AuthId current_auth(const std::string& name) const {
    return wallets_.at(name).auth;
  }

  std::map<std::string, std::uint64_t> balances() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [name, w] : wallets_) {
      const Account* a = state_.find(w.auth);
      out[name] = a ? a->balance : 0;
    }
    return out;
  }

  /// Modeled on-chain size of an envelope under the configured size model.
  std::uint64_t modeled_size(const TxEnvelope& env) const {
    if (env.kind == TxKind::kReveal) return cr_reveal_bytes(cfg_.sizes);
    const bool compact =
        !env.payload.empty() &&
        env.payload[0] == static_cast<std::uint8_t>(CommitMode::kCompact);
    return cr_commit_bytes(cfg_.sizes,
                           compact ? CommitMode::kCompact : CommitMode::kFull);
  }

 private:
  struct Prepared {
    Action m;
    Reveal reveal;
    Preimage next_key;
  };

  struct Wallet {
    std::string name;
    std::uint32_t generation = 0;
    Preimage key;
    AuthId auth;
    std::optional<Prepared> prepared;
    std::optional<TxEnvelope> last_reveal;
    std::optional<Preimage> last_revealed_key;
  };

  Seed wallet_seed(const std::string& name, std::uint32_t generation) const {
    const Bytes seed = detail::u64_be(cfg_.seed);
    const Bytes len = detail::u64_be(name.size());
    const Bytes gen = detail::u64_be(generation);
    const ByteView name_bytes(reinterpret_cast<const std::uint8_t*>(name.data()),
                              name.size());
    return detail::seed_from(
        derive_digest("crsig/sim/wallet/v1", {seed, len, name_bytes, gen}));
  }

  void rekey(Wallet& w) {
    auto [x, y] = keygen(wallet_seed(w.name, w.generation), cfg_.alg);
    w.key = x;
    w.auth = y;
  }

  Wallet& wallet(const std::string& name) {
    const auto it = wallets_.find(name);
    if (it == wallets_.end()) throw ConfigError("unknown wallet '" + name + "'");
    return it->second;
  }

  TxRecord submit(const std::string& who, const TxEnvelope& env,
                  bool adversarial) {
    return TxRecord{env.kind, who, modeled_size(env), adversarial,
                    apply(state_, env)};
  }

  TxRecord commit(const Event& e) {
    Wallet& w = wallet(e.account);
    const Action m{ActionKind::kTransfer, wallet(e.dest).auth, e.amount};
    const Commitment c = make_commit(w.key, m, cfg_.scheme.mode, cfg_.alg);
    TxRecord rec = submit(w.name, commit_tx(c), false);
    if (!rec.outcome) {
      auto [r, next] = make_reveal(w.key, m, wallet_seed(w.name, w.generation + 1),
                                   cfg_.alg);
      w.prepared = Prepared{m, r, next};
    }
    return rec;
  }

  TxRecord reveal(const Event& e) {
    Wallet& w = wallet(e.account);
    if (!w.prepared) {
      throw ConfigError("line " + std::to_string(e.line) + ": '" + w.name +
                        "' has no prepared reveal");
    }
    const TxEnvelope env = reveal_tx(w.auth, w.prepared->reveal);
    TxRecord rec = submit(w.name, env, false);
    if (!rec.outcome) {
      w.last_reveal = env;
      w.last_revealed_key = w.key;
      w.key = w.prepared->next_key;
      w.auth = w.prepared->reveal.next_auth;
      ++w.generation;
      w.prepared.reset();
    }
    return rec;
  }

  AuthId adversary_auth() {
    const Bytes seed = detail::u64_be(cfg_.seed);
    const Bytes n = detail::u64_be(adversary_keys_++);
    return keygen(detail::seed_from(
                      derive_digest("crsig/sim/adversary/v1", {seed, n})),
                  cfg_.alg)
        .second;
  }

  Preimage random_preimage() {
    Preimage x;
    for (std::size_t i = 0; i < x.bytes.size(); i += 8) {
      const std::uint64_t v = rng_();
      for (std::size_t j = 0; j < 8; ++j) {
        x.bytes[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
      }
    }
    return x;
  }

  AttackVerdict attack(const Event& e, std::vector<TxRecord>& out) {
    Wallet& w = wallet(e.account);
    AttackVerdict v;
    v.kind = e.attack;
    v.target = w.name;
    auto record = [&](TxRecord rec) {
      v.outcomes.push_back(rec.outcome);
      if (!rec.outcome) v.rejected = false;
      out.push_back(std::move(rec));
    };
    const std::string who = "adversary";

    switch (e.attack) {
      case AttackKind::kReplaySpent: {
        if (!w.last_reveal) {
          throw ConfigError("line " + std::to_string(e.line) +
                            ": replay needs an earlier successful reveal by '" +
                            w.name + "'");
        }
        record(submit(who, *w.last_reveal, true));
        break;
      }
      case AttackKind::kFrontRunAfterRevealObserved: {
        // The observable reveal is either still in flight (its commit is
        // live on chain) or already executed.
        std::optional<std::pair<Preimage, AuthId>> leak;
        const Account* acct = state_.find(w.auth);
        if (w.prepared && acct && detail::pending_live(*acct, state_.height)) {
          leak.emplace(w.prepared->reveal.x, w.auth);
        } else if (w.last_reveal) {
          leak.emplace(*w.last_revealed_key, w.last_reveal->account);
        } else {
          throw ConfigError("line " + std::to_string(e.line) +
                            ": no reveal by '" + w.name + "' to observe");
        }
        const auto& [x, account] = *leak;
        const Account* victim = state_.find(account);
        const std::uint64_t take = std::max<std::uint64_t>(victim ? victim->balance : 0, 1);
        const Action stolen{ActionKind::kTransfer, adversary_auth(), take};
        record(submit(who, commit_tx(make_commit(x, stolen, cfg_.scheme.mode, cfg_.alg)),
                      true));
        const Reveal r{x, stolen, adversary_auth()};
        record(submit(who, reveal_tx(account, r), true));
        break;
      }
      case AttackKind::kForgeWithoutPreimage: {
        const Preimage guess = random_preimage();
        const Reveal r{guess, Action{ActionKind::kTransfer, adversary_auth(), 1},
                       adversary_auth()};
        record(submit(who, reveal_tx(w.auth, r), true));
        break;
      }
    }
    return v;
  }

  SimConfig cfg_;
  std::mt19937_64 rng_;
  LedgerState state_;
  std::map<std::string, Wallet> wallets_;
  std::vector<AttackVerdict> verdicts_;
  std::uint64_t adversary_keys_ = 0;
};

namespace detail {

/// Per-class storage accrual; nodes of one class are interchangeable
/// because there is no topology.
class NodeLedger {
 public:
  explicit NodeLedger(const NodeCounts& n) : counts_(n) {}

  void relay(std::uint64_t size, bool accepted, SimMetrics& m) {
    m.total_bytes_transmitted += size * counts_.storing();
    if (accepted) stored_tx_ += size;
  }

  void blocks(std::uint64_t n, std::uint64_t header, SimMetrics& m) {
    headers_ += n * header;
    snapshots_ += n;
    m.total_bytes_transmitted += n * header * counts_.total();
  }

  void finish(SimMetrics& m) const {
    m.nodes.reserve(counts_.total());
    auto emit = [&](NodeClass c, std::uint64_t count) {
      for (std::uint64_t i = 0; i < count; ++i) {
        NodeMetrics nm{c, stores_tx_bodies(c) ? stored_tx_ : 0, headers_,
                       c == NodeClass::kArchive ? snapshots_ : 0};
        m.total_bytes_stored += nm.tx_bytes;
        m.total_header_bytes += nm.header_bytes;
        m.nodes.push_back(nm);
      }
    };
    emit(NodeClass::kLight, counts_.light);
    emit(NodeClass::kFull, counts_.full);
    emit(NodeClass::kArchive, counts_.archive);
  }

 private:
  NodeCounts counts_;
  std::uint64_t stored_tx_ = 0;
  std::uint64_t headers_ = 0;
  std::uint64_t snapshots_ = 0;
};

inline void tally(SimMetrics& m, NodeLedger& nodes, const TxRecord& rec) {
  const bool ok = !rec.outcome;
  nodes.relay(rec.size_bytes, ok, m);
  if (ok) {
    ++m.accepted_txs;
    m.accepted_tx_bytes += rec.size_bytes;
  } else {
    ++m.rejected_txs;
  }
}

inline SimMetrics run_cr(const SimConfig& cfg) {
  SimMetrics m;
  NodeLedger nodes(cfg.nodes);
  ScenarioRunner runner(cfg);
  for (const Event& e : cfg.events) {
    for (const TxRecord& rec : runner.step(e)) {
      tally(m, nodes, rec);
      if (!rec.adversarial && rec.kind == TxKind::kReveal && !rec.outcome) {
        ++m.authorization_events;
      }
      m.txs.push_back(rec);
    }
    if (e.kind == EventKind::kAdvance) {
      nodes.blocks(e.blocks, cfg.sizes.header_bytes, m);
      m.blocks += e.blocks;
    }
  }
  m.attacks = runner.verdicts();
  m.final_balances = runner.balances();
  nodes.finish(m);
  return m;
}

/// Same script executed as conventionally signed transfers. A transfer
/// announced by `commit` is executed, as one signed transaction, at the
/// matching `reveal`. Attack events do not apply.
inline SimMetrics run_signed(const SimConfig& cfg) {
  SimMetrics m;
  NodeLedger nodes(cfg.nodes);
  std::map<std::string, std::uint64_t> balance(cfg.accounts.begin(),
                                               cfg.accounts.end());
  std::map<std::string, std::pair<std::string, std::uint64_t>> intent;
  const std::uint64_t size = signed_tx_bytes(cfg.sizes, cfg.scheme.auth_bytes);
  for (const Event& e : cfg.events) {
    switch (e.kind) {
      case EventKind::kCommit:
        intent[e.account] = {e.dest, e.amount};
        break;
      case EventKind::kReveal: {
        const auto it = intent.find(e.account);
        if (it == intent.end()) {
          throw ConfigError("line " + std::to_string(e.line) + ": '" +
                            e.account + "' has no announced transfer");
        }
        const auto [dest, amount] = it->second;
        TxRecord rec{TxKind::kReveal, e.account, size, false, std::nullopt};
        if (amount > balance[e.account]) {
          rec.outcome = Rejection{RejectReason::kInsufficientBalance, {}};
        } else {
          balance[e.account] -= amount;
          balance[dest] += amount;
          intent.erase(it);
          ++m.authorization_events;
        }
        tally(m, nodes, rec);
        m.txs.push_back(std::move(rec));
        break;
      }
      case EventKind::kAdvance:
        nodes.blocks(e.blocks, cfg.sizes.header_bytes, m);
        m.blocks += e.blocks;
        break;
      case EventKind::kAttack:
        break;
    }
  }
  m.final_balances = std::move(balance);
  nodes.finish(m);
  return m;
}

}  // namespace detail

/// Runs the script and accounts every accepted byte on every storing node.
/// Throws ConfigError for malformed scripts; no metrics are produced then.
inline SimMetrics run_simulation(const SimConfig& cfg) {
  SimMetrics m = cfg.scheme.is_cr() ? detail::run_cr(cfg) : detail::run_signed(cfg);
  if (m.authorization_events > 0) {
    m.footprint_per_auth_bytes = static_cast<double>(m.accepted_tx_bytes) /
                                 static_cast<double>(m.authorization_events);
  }
  m.rejected_attack_count = static_cast<std::uint64_t>(
      std::count_if(m.attacks.begin(), m.attacks.end(),
                    [](const AttackVerdict& v) { return v.rejected; }));
  return m;
}

// ---------------------------------------------------------------------------
// Footprint

struct FootprintReport {
  std::uint64_t envelope_bytes = 0;
  std::uint64_t baseline_auth_bytes = 0;
  CommitMode mode = CommitMode::kFull;
  double cr_bytes_per_auth = 0.0;
  double baseline_bytes_per_auth = 0.0;
  double ratio = 0.0;
};

/// CR bytes per authorization over modeled-ECDSA bytes per authorization,
/// both measured by running the same script.
inline FootprintReport footprint_per_auth(const SimConfig& cfg) {
  SimConfig cr = cfg;
  cr.scheme = AuthScheme::commit_reveal(cfg.scheme.is_cr() ? cfg.scheme.mode
                                                           : CommitMode::kFull);
  SimConfig base = cfg;
  base.scheme = AuthScheme::ecdsa();
  cr.nodes = base.nodes = NodeCounts{};

  const SimMetrics a = run_simulation(cr);
  const SimMetrics b = run_simulation(base);
  if (b.authorization_events == 0 || b.accepted_tx_bytes == 0) {
    throw DomainError("baseline script performs no authorizations");
  }
  if (a.authorization_events == 0) {
    throw DomainError("commit-reveal run performs no authorizations");
  }
  FootprintReport r;
  r.envelope_bytes = cfg.sizes.envelope_bytes;
  r.baseline_auth_bytes = base.scheme.auth_bytes;
  r.mode = cr.scheme.mode;
  r.cr_bytes_per_auth = a.footprint_per_auth_bytes;
  r.baseline_bytes_per_auth = b.footprint_per_auth_bytes;
  r.ratio = r.cr_bytes_per_auth / r.baseline_bytes_per_auth;
  return r;
}

/// footprint_per_auth over envelope sizes lo, lo+step, ..., <= hi. Runs are
/// independent and split across `jobs` threads.
inline std::vector<FootprintReport> footprint_sweep(const SimConfig& cfg,
                                                    std::uint64_t lo,
                                                    std::uint64_t hi,
                                                    std::uint64_t step,
                                                    unsigned jobs = 1) {
  if (step == 0 || lo > hi) throw DomainError("invalid sweep range");
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t e = lo; e <= hi; e += step) sizes.push_back(e);
  std::vector<FootprintReport> out(sizes.size());
  jobs = std::max(1u, jobs);
  std::vector<std::future<void>> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.push_back(std::async(std::launch::async, [&, j] {
      for (std::size_t i = j; i < sizes.size(); i += jobs) {
        SimConfig c = cfg;
        c.sizes.envelope_bytes = sizes[i];
        out[i] = footprint_per_auth(c);
      }
    }));
  }
  for (auto& w : workers) w.get();
  return out;
}

// ---------------------------------------------------------------------------
// Attack suite

struct AttackSuiteReport {
  std::vector<AttackVerdict> verdicts;
  std::size_t orderings = 0;
  std::size_t inapplicable = 0;  // insertion points where the attack has nothing to act on

  bool all_rejected() const {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const AttackVerdict& v) { return v.rejected; });
  }
};

/// Re-inserts every attack event of the script at every position of the
/// honest event sequence and runs each ordering under commit–reveal.
inline AttackSuiteReport run_attack_suite(const SimConfig& cfg) {
  std::vector<Event> honest;
  std::vector<Event> attacks;
  for (const Event& e : cfg.events) {
    (e.kind == EventKind::kAttack ? attacks : honest).push_back(e);
  }
  if (attacks.empty()) throw ConfigError("scenario contains no attack events");

  AttackSuiteReport report;
  for (const Event& a : attacks) {
    for (std::size_t pos = 0; pos <= honest.size(); ++pos) {
      SimConfig c = cfg;
      c.scheme = AuthScheme::commit_reveal(cfg.scheme.is_cr() ? cfg.scheme.mode
                                                              : CommitMode::kFull);
      c.nodes = NodeCounts{};
      c.events = honest;
      c.events.insert(c.events.begin() + static_cast<std::ptrdiff_t>(pos), a);
      try {
        const SimMetrics m = run_simulation(c);
        report.verdicts.push_back(m.attacks.at(0));
        ++report.orderings;
      } catch (const ConfigError&) {
        ++report.inapplicable;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::ordered_json to_json(const AttackVerdict& v) {
  nlohmann::ordered_json j;
  j["attack"] = std::string(to_string(v.kind));
  j["target"] = v.target;
  j["rejected"] = v.rejected;
  auto& reasons = j["reasons"] = nlohmann::ordered_json::array();
  for (const Outcome& o : v.outcomes) {
    reasons.push_back(o ? o->describe() : std::string("accepted"));
  }
  return j;
}

inline nlohmann::ordered_json metrics_json(const SimMetrics& m) {
  nlohmann::ordered_json j;
  j["total_bytes_stored"] = m.total_bytes_stored;
  j["total_header_bytes"] = m.total_header_bytes;
  j["total_bytes_transmitted"] = m.total_bytes_transmitted;
  j["accepted_txs"] = m.accepted_txs;
  j["rejected_txs"] = m.rejected_txs;
  j["accepted_tx_bytes"] = m.accepted_tx_bytes;
  j["authorization_events"] = m.authorization_events;
  j["footprint_per_auth_bytes"] = m.footprint_per_auth_bytes;
  j["blocks"] = m.blocks;
  j["rejected_attack_count"] = m.rejected_attack_count;
  auto& attacks = j["attacks"] = nlohmann::ordered_json::array();
  for (const auto& v : m.attacks) attacks.push_back(to_json(v));
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : m.nodes) {
    nodes.push_back({{"class", std::string(to_string(n.cls))},
                     {"tx_bytes", n.tx_bytes},
                     {"header_bytes", n.header_bytes},
                     {"state_snapshots", n.state_snapshots}});
  }
  nlohmann::ordered_json balances = nlohmann::ordered_json::object();
  for (const auto& [name, b] : m.final_balances) balances[name] = b;
  j["final_balances"] = std::move(balances);
  return j;
}

/// Summary as `metric,value` rows. Per-node detail is in nodes_csv().
inline std::string metrics_csv(const SimMetrics& m) {
  std::string out = "metric,value\n";
  auto row = [&](const char* k, const std::string& v) {
    out += std::string(k) + "," + v + "\n";
  };
  row("total_bytes_stored", std::to_string(m.total_bytes_stored));
  row("total_header_bytes", std::to_string(m.total_header_bytes));
  row("total_bytes_transmitted", std::to_string(m.total_bytes_transmitted));
  row("accepted_txs", std::to_string(m.accepted_txs));
  row("rejected_txs", std::to_string(m.rejected_txs));
  row("accepted_tx_bytes", std::to_string(m.accepted_tx_bytes));
  row("authorization_events", std::to_string(m.authorization_events));
  row("footprint_per_auth_bytes", nlohmann::json(m.footprint_per_auth_bytes).dump());
  row("blocks", std::to_string(m.blocks));
  row("rejected_attack_count", std::to_string(m.rejected_attack_count));
  return out;
}

inline std::string nodes_csv(const SimMetrics& m) {
  std::string out = "node,class,tx_bytes,header_bytes,state_snapshots\n";
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const auto& n = m.nodes[i];
    out += std::to_string(i) + "," + std::string(to_string(n.cls)) + "," +
           std::to_string(n.tx_bytes) + "," + std::to_string(n.header_bytes) +
           "," + std::to_string(n.state_snapshots) + "\n";
  }
  return out;
}

}  // namespace crsig
