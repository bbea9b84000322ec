#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crsig/errors.hpp"
#include "crsig/hashing.hpp"
#include "crsig/protocol.hpp"
#include "crsig/textconfig.hpp"

namespace crsig {

enum class NodeClass : std::uint8_t { kLight, kFull, kArchive };

inline std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::kLight:
      return "light";
    case NodeClass::kFull:
      return "full";
    case NodeClass::kArchive:
      return "archive";
  }
  return "?";
}

/// Light nodes keep headers only; full and archive nodes retain bodies.
inline constexpr bool stores_tx_bodies(NodeClass c) {
  return c != NodeClass::kLight;
}

struct NodeCounts {
  std::uint64_t light = 0;
  std::uint64_t full = 0;
  std::uint64_t archive = 0;

  std::uint64_t storing() const { return full + archive; }
  std::uint64_t total() const { return light + full + archive; }
  friend bool operator==(const NodeCounts&, const NodeCounts&) = default;
};

enum class AttackKind : std::uint8_t {
  kReplaySpent,
  kFrontRunAfterRevealObserved,
  kForgeWithoutPreimage,
};

inline std::string_view to_string(AttackKind a) {
  switch (a) {
    case AttackKind::kReplaySpent:
      return "ReplaySpent";
    case AttackKind::kFrontRunAfterRevealObserved:
      return "FrontRunAfterRevealObserved";
    case AttackKind::kForgeWithoutPreimage:
      return "ForgeWithoutPreimage";
  }
  return "?";
}

enum class EventKind : std::uint8_t { kCommit, kReveal, kAdvance, kAttack };

/// One scripted step. `account` names the acting (or attacked) wallet.
struct Event {
  EventKind kind = EventKind::kAdvance;
  std::string account;
  std::string dest;
  std::uint64_t amount = 0;
  std::uint64_t blocks = 0;
  AttackKind attack = AttackKind::kReplaySpent;
  std::size_t line = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Authorization mechanism under test. A modeled signature contributes
/// `auth_bytes` of signature + public key to every transfer; no real
/// cryptography is performed.
struct AuthScheme {
  enum class Kind : std::uint8_t { kCommitReveal, kModeledSignature };

  Kind kind = Kind::kCommitReveal;
  CommitMode mode = CommitMode::kFull;
  std::string signature_name;
  std::uint64_t auth_bytes = 0;

  static AuthScheme commit_reveal(CommitMode m = CommitMode::kFull) {
    return {Kind::kCommitReveal, m, {}, 0};
  }
  static AuthScheme signature(std::string name, std::uint64_t bytes) {
    return {Kind::kModeledSignature, CommitMode::kFull, std::move(name), bytes};
  }
  /// secp256k1 ECDSA: 65-byte signature plus 33-byte compressed key.
  static AuthScheme ecdsa() { return signature("ecdsa", 65 + 33); }

  bool is_cr() const { return kind == Kind::kCommitReveal; }
  friend bool operator==(const AuthScheme&, const AuthScheme&) = default;
};

/// Byte model shared by every scheme: a transaction costs the envelope plus
/// its authorization material.
struct SizeModel {
  std::uint64_t envelope_bytes = 128;  // 226 - 98 for a 1-in/2-out legacy tx
  std::uint64_t header_bytes = 80;

  friend bool operator==(const SizeModel&, const SizeModel&) = default;
};

struct SimConfig {
  NodeCounts nodes;
  std::uint64_t seed = 0;
  AuthScheme scheme;
  SizeModel sizes;
  HashAlg alg = HashAlg::kSha256;
  std::uint64_t confirmation_depth = 1;
  std::uint64_t commit_ttl = 100;
  std::vector<std::pair<std::string, std::uint64_t>> accounts;
  std::vector<Event> events;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Parses a scenario script. Directives and events, one per line:
///
///     nodes full 10            # also: light, archive
///     seed 42
///     scheme cr full           # or: scheme cr compact | scheme ecdsa
///                              #     scheme signature <name> <auth bytes>
///     envelope 128
///     header 80
///     hash sha256
///     depth 1
///     ttl 100
///     account alice 100        # genesis wallets precede all events
///     commit alice bob 30      # alice commits to paying bob 30
///     advance 1
///     reveal alice
///     attack replay alice      # also: frontrun, forge
inline SimConfig parse_scenario(std::string_view text) {
  SimConfig cfg;
  std::set<std::string, std::less<>> names;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError("scenario line " + std::to_string(line_no) + ": " + msg);
  };

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto w = split_words(line);
    if (w.empty()) continue;
    const std::string_view op = w[0];
    auto need = [&](std::size_t n) {
      if (w.size() != n) {
        throw fail("'" + std::string(op) + "' expects " + std::to_string(n - 1) +
                   " argument(s)");
      }
    };
    auto number = [&](std::size_t i, std::string_view what) {
      try {
        return parse_u64(w[i], what);
      } catch (const ConfigError& e) {
        throw fail(e.what());
      }
    };
    auto known = [&](std::string_view name) {
      if (!names.contains(name)) {
        throw fail("undeclared account '" + std::string(name) + "'");
      }
      return std::string(name);
    };

    if (op == "nodes") {
      need(3);
      const std::uint64_t n = number(2, "node count");
      if (w[1] == "light") cfg.nodes.light = n;
      else if (w[1] == "full") cfg.nodes.full = n;
      else if (w[1] == "archive") cfg.nodes.archive = n;
      else throw fail("unknown node class '" + std::string(w[1]) + "'");
    } else if (op == "seed") {
      need(2);
      cfg.seed = number(1, "seed");
    } else if (op == "scheme") {
      if (w.size() >= 2 && w[1] == "cr") {
        if (w.size() > 3) throw fail("'scheme cr' expects at most a mode");
        try {
          cfg.scheme = AuthScheme::commit_reveal(
              w.size() == 3 ? parse_commit_mode(w[2]) : CommitMode::kFull);
        } catch (const ConfigError& e) {
          throw fail(e.what());
        }
      } else if (w.size() == 2 && w[1] == "ecdsa") {
        cfg.scheme = AuthScheme::ecdsa();
      } else if (w.size() == 4 && w[1] == "signature") {
        cfg.scheme = AuthScheme::signature(std::string(w[2]),
                                           number(3, "auth bytes"));
      } else {
        throw fail("unknown scheme");
      }
    } else if (op == "envelope") {
      need(2);
      cfg.sizes.envelope_bytes = number(1, "envelope bytes");
    } else if (op == "header") {
      need(2);
      cfg.sizes.header_bytes = number(1, "header bytes");
    } else if (op == "hash") {
      need(2);
      try {
        cfg.alg = parse_hash_alg(w[1]);
      } catch (const ConfigError& e) {
        throw fail(e.what());
      }
    } else if (op == "depth") {
      need(2);
      cfg.confirmation_depth = number(1, "depth");
    } else if (op == "ttl") {
      need(2);
      cfg.commit_ttl = number(1, "ttl");
    } else if (op == "account") {
      need(3);
      if (!cfg.events.empty()) throw fail("accounts must precede all events");
      if (!names.emplace(w[1]).second) {
        throw fail("duplicate account '" + std::string(w[1]) + "'");
      }
      cfg.accounts.emplace_back(std::string(w[1]), number(2, "balance"));
    } else if (op == "commit") {
      need(4);
      Event e{EventKind::kCommit, known(w[1]), known(w[2]), number(3, "amount"),
              0, {}, line_no};
      if (e.amount == 0) throw fail("commit amount must be positive");
      cfg.events.push_back(std::move(e));
    } else if (op == "reveal") {
      need(2);
      cfg.events.push_back({EventKind::kReveal, known(w[1]), {}, 0, 0, {}, line_no});
    } else if (op == "advance") {
      need(2);
      const std::uint64_t n = number(1, "block count");
      if (n == 0) throw fail("advance requires at least one block");
      cfg.events.push_back({EventKind::kAdvance, {}, {}, 0, n, {}, line_no});
    } else if (op == "attack") {
      need(3);
      AttackKind kind;
      if (w[1] == "replay") kind = AttackKind::kReplaySpent;
      else if (w[1] == "frontrun") kind = AttackKind::kFrontRunAfterRevealObserved;
      else if (w[1] == "forge") kind = AttackKind::kForgeWithoutPreimage;
      else throw fail("unknown attack '" + std::string(w[1]) + "'");
      cfg.events.push_back({EventKind::kAttack, known(w[2]), {}, 0, 0, kind, line_no});
    } else {
      throw fail("unknown directive '" + std::string(op) + "'");
    }
  }
  if (cfg.commit_ttl <= cfg.confirmation_depth) {
    throw ConfigError("scenario: ttl must exceed depth");
  }
  return cfg;
}

inline std::string format_event(const Event& e) {
  switch (e.kind) {
    case EventKind::kCommit:
      return "commit " + e.account + " " + e.dest + " " + std::to_string(e.amount);
    case EventKind::kReveal:
      return "reveal " + e.account;
    case EventKind::kAdvance:
      return "advance " + std::to_string(e.blocks);
    case EventKind::kAttack: {
      std::string_view k = e.attack == AttackKind::kReplaySpent ? "replay"
                           : e.attack == AttackKind::kForgeWithoutPreimage
                               ? "forge"
                               : "frontrun";
      return "attack " + std::string(k) + " " + e.account;
    }
  }
  return {};
}

/// Inverse of parse_scenario, up to comments and whitespace.
inline std::string format_scenario(const SimConfig& cfg) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  line("nodes light " + std::to_string(cfg.nodes.light));
  line("nodes full " + std::to_string(cfg.nodes.full));
  line("nodes archive " + std::to_string(cfg.nodes.archive));
  line("seed " + std::to_string(cfg.seed));
  if (cfg.scheme.is_cr()) {
    line("scheme cr " + std::string(to_string(cfg.scheme.mode)));
  } else {
    line("scheme signature " + cfg.scheme.signature_name + " " +
         std::to_string(cfg.scheme.auth_bytes));
  }
  line("envelope " + std::to_string(cfg.sizes.envelope_bytes));
  line("header " + std::to_string(cfg.sizes.header_bytes));
  line("hash " + std::string(to_string(cfg.alg)));
  line("depth " + std::to_string(cfg.confirmation_depth));
  line("ttl " + std::to_string(cfg.commit_ttl));
  for (const auto& [name, balance] : cfg.accounts) {
    line("account " + name + " " + std::to_string(balance));
  }
  for (const Event& e : cfg.events) line(format_event(e));
  return out;
}

}  // namespace crsig
