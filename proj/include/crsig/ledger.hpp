#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsig/errors.hpp"
#include "crsig/hashing.hpp"
#include "crsig/protocol.hpp"
#include "crsig/textconfig.hpp"

namespace crsig {

struct LedgerConfig {
  HashAlg alg = HashAlg::kSha256;
  std::uint64_t confirmation_depth = 1;
  std::uint64_t commit_ttl = 100;
  std::vector<std::pair<AuthId, std::uint64_t>> allocations;

  friend bool operator==(const LedgerConfig&, const LedgerConfig&) = default;
};

enum class AccountStatus : std::uint8_t { kOpen, kLocked, kSpent };

inline std::string_view to_string(AccountStatus s) {
  switch (s) {
    case AccountStatus::kOpen:
      return "open";
    case AccountStatus::kLocked:
      return "locked";
    case AccountStatus::kSpent:
      return "spent";
  }
  return "?";
}

/// A commitment accepted on chain, awaiting its reveal.
struct CommitRef {
  Commitment commit;
  std::uint64_t height = 0;
  std::uint64_t expiry_height = 0;

  friend bool operator==(const CommitRef&, const CommitRef&) = default;
};

/// Locked accounts carry exactly one pending CommitRef; Spent accounts hold
/// a zero balance.
struct Account {
  AuthId auth;
  std::uint64_t balance = 0;
  AccountStatus status = AccountStatus::kOpen;
  std::optional<CommitRef> pending;

  friend bool operator==(const Account&, const Account&) = default;
};

struct LedgerState {
  std::map<AuthId, Account> accounts;
  std::set<Digest> spent_commitments;
  std::uint64_t height = 0;
  LedgerConfig config;

  const Account* find(const AuthId& id) const {
    const auto it = accounts.find(id);
    return it == accounts.end() ? nullptr : &it->second;
  }

  friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

inline void validate(const LedgerConfig& cfg) {
  if (cfg.commit_ttl <= cfg.confirmation_depth) {
    throw ConfigError("commit_ttl must exceed confirmation_depth");
  }
}

inline LedgerState genesis(LedgerConfig cfg) {
  validate(cfg);
  LedgerState s;
  std::uint64_t supply = 0;
  for (const auto& [id, amount] : cfg.allocations) {
    if (id.is_burn()) {
      throw ConfigError("genesis may not allocate to the burn sentinel");
    }
    if (!s.accounts.emplace(id, Account{id, amount, AccountStatus::kOpen, {}})
             .second) {
      throw ConfigError("duplicate genesis allocation for " + to_hex(id));
    }
    if (amount > UINT64_MAX - supply) {
      throw ConfigError("genesis supply overflows 64 bits");
    }
    supply += amount;
  }
  s.config = std::move(cfg);
  return s;
}

inline std::uint64_t total_supply(const LedgerState& s) {
  std::uint64_t sum = 0;
  for (const auto& [id, acct] : s.accounts) sum += acct.balance;
  return sum;
}

// ---------------------------------------------------------------------------
// Transactions

enum class TxKind : std::uint8_t { kCommit = 0x01, kReveal = 0x02 };

/// kind (1) || account (32) || payload length (4, big-endian) || payload.
struct TxEnvelope {
  TxKind kind = TxKind::kCommit;
  AuthId account;
  Bytes payload;
  std::uint64_t size_bytes = 0;

  friend bool operator==(const TxEnvelope&, const TxEnvelope&) = default;
};

inline constexpr std::size_t kEnvelopeHeaderSize = 1 + kDigestSize + 4;

inline TxEnvelope make_envelope(TxKind kind, const AuthId& account,
                                Bytes payload) {
  TxEnvelope env{kind, account, std::move(payload), 0};
  env.size_bytes = kEnvelopeHeaderSize + env.payload.size();
  return env;
}

inline TxEnvelope commit_tx(const Commitment& c) {
  return make_envelope(TxKind::kCommit, c.account(), serialize(c));
}

inline TxEnvelope reveal_tx(const AuthId& account, const Reveal& r) {
  return make_envelope(TxKind::kReveal, account, serialize(r));
}

inline Bytes serialize(const TxEnvelope& env) {
  Bytes out;
  out.reserve(kEnvelopeHeaderSize + env.payload.size());
  out.push_back(static_cast<std::uint8_t>(env.kind));
  detail::put_digest(out, env.account.value);
  const auto len = static_cast<std::uint32_t>(env.payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(len >> shift));
  }
  out.insert(out.end(), env.payload.begin(), env.payload.end());
  return out;
}

inline TxEnvelope parse_envelope(ByteView in) {
  if (in.size() < kEnvelopeHeaderSize) throw ValidationError("short envelope");
  if (in[0] != 0x01 && in[0] != 0x02) {
    throw ValidationError("unknown transaction kind");
  }
  std::uint32_t len = 0;
  for (std::size_t i = 0; i < 4; ++i) len = len << 8 | in[1 + kDigestSize + i];
  if (in.size() != kEnvelopeHeaderSize + len) {
    throw ValidationError("envelope length mismatch");
  }
  Bytes payload(in.begin() + kEnvelopeHeaderSize, in.end());
  return make_envelope(static_cast<TxKind>(in[0]),
                       AuthId{detail::get_digest(in.subspan(1))},
                       std::move(payload));
}

// ---------------------------------------------------------------------------
// Rejections

enum class RejectReason {
  kUnknownAccount,
  kAccountLocked,
  kAccountSpent,
  kAddrMismatch,
  kNoPendingCommit,
  kTooEarly,
  kCommitExpired,
  kVerifyFailed,
  kInsufficientBalance,
  kReplaySpentCommitment,
  kMalformedPayload,
  kInvalidNextAuth,
  kInvalidDestination,
};

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kUnknownAccount: return "UnknownAccount";
    case RejectReason::kAccountLocked: return "AccountLocked";
    case RejectReason::kAccountSpent: return "AccountSpent";
    case RejectReason::kAddrMismatch: return "AddrMismatch";
    case RejectReason::kNoPendingCommit: return "NoPendingCommit";
    case RejectReason::kTooEarly: return "TooEarly";
    case RejectReason::kCommitExpired: return "CommitExpired";
    case RejectReason::kVerifyFailed: return "VerifyFailed";
    case RejectReason::kInsufficientBalance: return "InsufficientBalance";
    case RejectReason::kReplaySpentCommitment: return "ReplaySpentCommitment";
    case RejectReason::kMalformedPayload: return "MalformedPayload";
    case RejectReason::kInvalidNextAuth: return "InvalidNextAuth";
    case RejectReason::kInvalidDestination: return "InvalidDestination";
  }
  return "?";
}

struct Rejection {
  RejectReason reason;
  std::optional<VerifyFailure> verify;  // set iff reason == kVerifyFailed

  std::string describe() const {
    std::string s(to_string(reason));
    if (verify) s += "(" + std::string(to_string(*verify)) + ")";
    return s;
  }
  friend bool operator==(const Rejection&, const Rejection&) = default;
};

/// Empty on success. Every apply_* validates fully before mutating, so a
/// rejected transaction leaves the state untouched.
using Outcome = std::optional<Rejection>;

namespace detail {

inline bool pending_live(const Account& a, std::uint64_t height) {
  return a.status == AccountStatus::kLocked && a.pending &&
         height < a.pending->expiry_height;
}

inline void credit(LedgerState& s, const AuthId& id, std::uint64_t amount) {
  auto [it, inserted] =
      s.accounts.try_emplace(id, Account{id, 0, AccountStatus::kOpen, {}});
  it->second.balance += amount;
}

}  // namespace detail

[[nodiscard]] inline Outcome apply_commit(LedgerState& s,
                                          const TxEnvelope& env) {
  if (env.kind != TxKind::kCommit) {
    throw DomainError("apply_commit requires a commit envelope");
  }
  if (s.spent_commitments.contains(env.account.value)) {
    return Rejection{RejectReason::kAccountSpent, {}};
  }
  const auto it = s.accounts.find(env.account);
  if (it == s.accounts.end()) return Rejection{RejectReason::kUnknownAccount, {}};
  Account& acct = it->second;
  if (acct.status == AccountStatus::kSpent) {
    return Rejection{RejectReason::kAccountSpent, {}};
  }

  Commitment c;
  try {
    c = parse_commitment(env.payload, env.account);
  } catch (const ValidationError&) {
    return Rejection{RejectReason::kMalformedPayload, {}};
  }
  if (c.addr_hash != env.account.value) {
    return Rejection{RejectReason::kAddrMismatch, {}};
  }
  if (detail::pending_live(acct, s.height)) {
    return Rejection{RejectReason::kAccountLocked, {}};
  }

  // An expired lock that advance_height has not swept yet is replaced.
  acct.status = AccountStatus::kLocked;
  acct.pending = CommitRef{std::move(c), s.height, s.height + s.config.commit_ttl};
  return std::nullopt;
}

[[nodiscard]] inline Outcome apply_reveal(LedgerState& s,
                                          const TxEnvelope& env) {
  if (env.kind != TxKind::kReveal) {
    throw DomainError("apply_reveal requires a reveal envelope");
  }
  if (s.spent_commitments.contains(env.account.value)) {
    return Rejection{RejectReason::kReplaySpentCommitment, {}};
  }
  const auto it = s.accounts.find(env.account);
  if (it == s.accounts.end() || it->second.status != AccountStatus::kLocked ||
      !it->second.pending) {
    return Rejection{RejectReason::kNoPendingCommit, {}};
  }
  Account& acct = it->second;
  const CommitRef& ref = *acct.pending;
  if (s.height >= ref.expiry_height) {
    return Rejection{RejectReason::kCommitExpired, {}};
  }
  if (s.height < ref.height + s.config.confirmation_depth) {
    return Rejection{RejectReason::kTooEarly, {}};
  }

  Reveal r;
  try {
    r = parse_reveal(env.payload);
  } catch (const ValidationError&) {
    return Rejection{RejectReason::kMalformedPayload, {}};
  }
  if (const Verdict v = verify_reveal(ref.commit, r, s.config.alg); !v) {
    return Rejection{RejectReason::kVerifyFailed, v.reason};
  }
  if (r.m.amount > acct.balance) {
    return Rejection{RejectReason::kInsufficientBalance, {}};
  }
  const std::uint64_t remainder = acct.balance - r.m.amount;
  if (r.next_auth == env.account ||
      s.spent_commitments.contains(r.next_auth.value) ||
      (r.next_auth.is_burn() && remainder > 0)) {
    return Rejection{RejectReason::kInvalidNextAuth, {}};
  }
  if (r.m.dest == env.account || s.spent_commitments.contains(r.m.dest.value)) {
    return Rejection{RejectReason::kInvalidDestination, {}};
  }

  acct.balance = 0;
  acct.status = AccountStatus::kSpent;
  acct.pending.reset();
  s.spent_commitments.insert(env.account.value);
  detail::credit(s, r.m.dest, r.m.amount);
  if (!r.next_auth.is_burn()) detail::credit(s, r.next_auth, remainder);
  return std::nullopt;
}

/// Dispatches on the envelope kind.
[[nodiscard]] inline Outcome apply(LedgerState& s, const TxEnvelope& env) {
  return env.kind == TxKind::kCommit ? apply_commit(s, env) : apply_reveal(s, env);
}

/// Produces n blocks; locks whose expiry height has been reached are dropped.
inline void advance_height(LedgerState& s, std::uint64_t n) {
  if (n == 0) throw DomainError("advance_height requires n >= 1");
  s.height += n;
  for (auto& [id, acct] : s.accounts) {
    if (acct.status == AccountStatus::kLocked && acct.pending &&
        acct.pending->expiry_height <= s.height) {
      acct.status = AccountStatus::kOpen;
      acct.pending.reset();
    }
  }
}

// ---------------------------------------------------------------------------
// Text formats

/// Genesis/config file:
///
///     hash_alg = sha256
///     confirmation_depth = 1
///     commit_ttl = 100
///     alloc = <64 hex digits> <amount>
inline LedgerConfig parse_ledger_config(std::string_view text) {
  LedgerConfig cfg;
  for (const KvEntry& e : parse_kv(text)) {
    const std::string where = "line " + std::to_string(e.line) + ": ";
    if (e.key == "hash_alg") {
      cfg.alg = parse_hash_alg(e.value);
    } else if (e.key == "confirmation_depth") {
      cfg.confirmation_depth = parse_u64(e.value, "confirmation_depth");
    } else if (e.key == "commit_ttl") {
      cfg.commit_ttl = parse_u64(e.value, "commit_ttl");
    } else if (e.key == "alloc") {
      const auto words = split_words(e.value);
      if (words.size() != 2) {
        throw ConfigError(where + "alloc expects '<auth hex> <amount>'");
      }
      try {
        cfg.allocations.emplace_back(auth_from_hex(words[0]),
                                     parse_u64(words[1], "amount"));
      } catch (const ValidationError& err) {
        throw ConfigError(where + err.what());
      }
    } else {
      throw ConfigError(where + "unknown key '" + e.key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

inline std::string format_ledger_config(const LedgerConfig& cfg) {
  std::string out;
  out += "hash_alg = " + std::string(to_string(cfg.alg)) + "\n";
  out += "confirmation_depth = " + std::to_string(cfg.confirmation_depth) + "\n";
  out += "commit_ttl = " + std::to_string(cfg.commit_ttl) + "\n";
  for (const auto& [id, amount] : cfg.allocations) {
    out += "alloc = " + to_hex(id) + " " + std::to_string(amount) + "\n";
  }
  return out;
}

/// Accounts (sorted by AuthId), spent set and height as JSON.
inline nlohmann::ordered_json export_state(const LedgerState& s) {
  nlohmann::ordered_json j;
  j["height"] = s.height;
  j["hash_alg"] = std::string(to_string(s.config.alg));
  j["total_supply"] = total_supply(s);
  auto& accounts = j["accounts"] = nlohmann::ordered_json::array();
  for (const auto& [id, acct] : s.accounts) {
    nlohmann::ordered_json a;
    a["auth"] = to_hex(id);
    a["balance"] = acct.balance;
    a["status"] = std::string(to_string(acct.status));
    if (acct.pending) {
      a["pending_height"] = acct.pending->height;
      a["expiry_height"] = acct.pending->expiry_height;
      a["mode"] = std::string(to_string(acct.pending->commit.mode));
    }
    accounts.push_back(std::move(a));
  }
  auto& spent = j["spent_commitments"] = nlohmann::ordered_json::array();
  for (const Digest& d : s.spent_commitments) spent.push_back(to_hex(d));
  return j;
}

}  // namespace crsig
