#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "crsig/errors.hpp"
#include "crsig/hashing.hpp"

namespace crsig {

using Seed = std::array<std::uint8_t, 32>;

/// The 32-byte secret x. Copyable because custody is the caller's problem,
/// but never printed implicitly.
struct Preimage {
  std::array<std::uint8_t, kDigestSize> bytes{};

  ByteView view() const { return {bytes.data(), bytes.size()}; }
  friend bool operator==(const Preimage&, const Preimage&) = default;
};

/// Public authorization identifier y = F(x); plays the role of an address.
struct AuthId {
  Digest value;

  static constexpr AuthId burn() { return AuthId{}; }
  constexpr bool is_burn() const { return value.is_zero(); }

  friend constexpr auto operator<=>(const AuthId&, const AuthId&) = default;
  friend constexpr bool operator==(const AuthId&, const AuthId&) = default;
};

inline std::string to_hex(const AuthId& id) { return to_hex(id.value); }
inline AuthId auth_from_hex(std::string_view hex) {
  return AuthId{digest_from_hex(hex)};
}

enum class ActionKind : std::uint8_t { kTransfer = 0x10 };

struct Action {
  ActionKind kind = ActionKind::kTransfer;
  AuthId dest;
  std::uint64_t amount = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

inline constexpr std::size_t kActionSize = 1 + kDigestSize + 8;

/// Structural validity. Zero amounts and transfers into the burn sentinel
/// are rejected; the latter would destroy supply.
inline bool is_well_formed(const Action& m) {
  return m.kind == ActionKind::kTransfer && m.amount > 0 && !m.dest.is_burn();
}

namespace detail {

inline void put_u64_be(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

inline std::uint64_t get_u64_be(ByteView in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = v << 8 | in[i];
  return v;
}

inline void put_digest(Bytes& out, const Digest& d) {
  out.insert(out.end(), d.bytes.begin(), d.bytes.end());
}

inline Digest get_digest(ByteView in) {
  Digest d;
  std::copy_n(in.begin(), kDigestSize, d.bytes.begin());
  return d;
}

}  // namespace detail

/// 0x10 || dest (32) || amount (8, big-endian).
inline Bytes canonical(const Action& m) {
  Bytes out;
  out.reserve(kActionSize);
  out.push_back(static_cast<std::uint8_t>(m.kind));
  detail::put_digest(out, m.dest.value);
  detail::put_u64_be(out, m.amount);
  return out;
}

inline Action parse_action(ByteView in) {
  if (in.size() != kActionSize) {
    throw ValidationError("action must be " + std::to_string(kActionSize) +
                          " bytes, got " + std::to_string(in.size()));
  }
  if (in[0] != static_cast<std::uint8_t>(ActionKind::kTransfer)) {
    throw ValidationError("unknown action kind tag");
  }
  Action m;
  m.dest = AuthId{detail::get_digest(in.subspan(1))};
  m.amount = detail::get_u64_be(in.subspan(1 + kDigestSize));
  return m;
}

// ---------------------------------------------------------------------------
// Keys

/// Expands caller entropy into a preimage. The expansion is a plain
/// SHA-256 under a fixed label, independent of the configured F.
inline Preimage derive_preimage(const Seed& seed) {
  const Digest d = derive_digest("crsig/preimage/v1", {ByteView(seed)});
  return Preimage{d.bytes};
}

inline AuthId auth_id(const Preimage& x, HashAlg alg = HashAlg::kSha256) {
  return AuthId{hash(alg, DomainTag::kAddress, x.view())};
}

inline std::pair<Preimage, AuthId> keygen(const Seed& seed,
                                          HashAlg alg = HashAlg::kSha256) {
  Preimage x = derive_preimage(seed);
  return {x, auth_id(x, alg)};
}

inline Digest binding_hash(const Preimage& x, const Action& m,
                           HashAlg alg = HashAlg::kSha256) {
  // x is fixed-width, so x || m needs no separator.
  return Hasher(alg, DomainTag::kBinding)
      .update(x.view())
      .update(canonical(m))
      .finish();
}

// ---------------------------------------------------------------------------
// Commitments

enum class CommitMode : std::uint8_t { kFull = 0x01, kCompact = 0x02 };

inline std::string_view to_string(CommitMode mode) {
  return mode == CommitMode::kFull ? "full" : "compact";
}

inline CommitMode parse_commit_mode(std::string_view s) {
  if (s == "full") return CommitMode::kFull;
  if (s == "compact") return CommitMode::kCompact;
  throw ConfigError("unknown commit mode '" + std::string(s) + "'");
}

/// C = (F(x), F(x || m)), or F(x) XOR F(x || m) in compact mode.
///
/// A compact commitment decoded from the wire knows only its account
/// reference and the combined digest, so bind_hash is empty there.
struct Commitment {
  CommitMode mode = CommitMode::kFull;
  Digest addr_hash;
  std::optional<Digest> bind_hash;
  std::optional<Digest> compact_hash;

  AuthId account() const { return AuthId{addr_hash}; }
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

inline Commitment make_commit(const Preimage& x, const Action& m,
                              CommitMode mode = CommitMode::kFull,
                              HashAlg alg = HashAlg::kSha256) {
  if (!is_well_formed(m)) throw ValidationError("malformed action");
  Commitment c;
  c.mode = mode;
  c.addr_hash = hash(alg, DomainTag::kAddress, x.view());
  c.bind_hash = binding_hash(x, m, alg);
  if (mode == CommitMode::kCompact) {
    c.compact_hash = xor_combine(c.addr_hash, *c.bind_hash);
  }
  return c;
}

/// Full: mode || addr_hash || bind_hash. Compact: mode || compact_hash; the
/// account reference travels in the transaction envelope.
inline Bytes serialize(const Commitment& c) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(c.mode));
  if (c.mode == CommitMode::kFull) {
    if (!c.bind_hash) throw ValidationError("full commitment lacks bind_hash");
    detail::put_digest(out, c.addr_hash);
    detail::put_digest(out, *c.bind_hash);
  } else {
    if (!c.compact_hash) {
      throw ValidationError("compact commitment lacks compact_hash");
    }
    detail::put_digest(out, *c.compact_hash);
  }
  return out;
}

inline Commitment parse_commitment(ByteView in, const AuthId& account_ref) {
  if (in.empty()) throw ValidationError("empty commitment");
  Commitment c;
  if (in[0] == static_cast<std::uint8_t>(CommitMode::kFull)) {
    if (in.size() != 1 + 2 * kDigestSize) {
      throw ValidationError("full commitment must be 65 bytes");
    }
    c.mode = CommitMode::kFull;
    c.addr_hash = detail::get_digest(in.subspan(1));
    c.bind_hash = detail::get_digest(in.subspan(1 + kDigestSize));
  } else if (in[0] == static_cast<std::uint8_t>(CommitMode::kCompact)) {
    if (in.size() != 1 + kDigestSize) {
      throw ValidationError("compact commitment must be 33 bytes");
    }
    c.mode = CommitMode::kCompact;
    c.addr_hash = account_ref.value;
    c.compact_hash = detail::get_digest(in.subspan(1));
  } else {
    throw ValidationError("unknown commitment mode byte");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reveals

struct Reveal {
  Preimage x;
  Action m;
  AuthId next_auth;

  friend bool operator==(const Reveal&, const Reveal&) = default;
};

inline constexpr std::size_t kRevealSize = kDigestSize + kActionSize + kDigestSize;

/// Builds the reveal for (x, m) together with the rotated key. The caller
/// keeps the returned preimage; remaining funds move to its AuthId.
inline std::pair<Reveal, Preimage> make_reveal(const Preimage& x,
                                               const Action& m,
                                               const Seed& next_seed,
                                               HashAlg alg = HashAlg::kSha256) {
  Preimage next = derive_preimage(next_seed);
  Reveal r{x, m, auth_id(next, alg)};
  if (r.next_auth == auth_id(x, alg)) {
    throw ValidationError("next key must differ from the revealed key");
  }
  return {r, next};
}

/// Reveal that empties the account: no successor key, remainder must be 0.
inline Reveal make_final_reveal(const Preimage& x, const Action& m) {
  return Reveal{x, m, AuthId::burn()};
}

/// x || canonical(m) || next_auth.
inline Bytes serialize(const Reveal& r) {
  Bytes out(r.x.bytes.begin(), r.x.bytes.end());
  const Bytes m = canonical(r.m);
  out.insert(out.end(), m.begin(), m.end());
  detail::put_digest(out, r.next_auth.value);
  return out;
}

inline Reveal parse_reveal(ByteView in) {
  if (in.size() != kRevealSize) {
    throw ValidationError("reveal must be " + std::to_string(kRevealSize) +
                          " bytes");
  }
  Reveal r;
  std::copy_n(in.begin(), kDigestSize, r.x.bytes.begin());
  r.m = parse_action(in.subspan(kDigestSize, kActionSize));
  r.next_auth = AuthId{detail::get_digest(in.subspan(kDigestSize + kActionSize))};
  return r;
}

// ---------------------------------------------------------------------------
// Verification

enum class VerifyFailure { kAddrMismatch, kBindMismatch, kMalformedAction };

inline std::string_view to_string(VerifyFailure f) {
  switch (f) {
    case VerifyFailure::kAddrMismatch:
      return "AddrMismatch";
    case VerifyFailure::kBindMismatch:
      return "BindMismatch";
    case VerifyFailure::kMalformedAction:
      return "MalformedAction";
  }
  return "?";
}

struct Verdict {
  bool ok = false;
  std::optional<VerifyFailure> reason;

  explicit operator bool() const { return ok; }
  static Verdict pass() { return {true, std::nullopt}; }
  static Verdict fail(VerifyFailure f) { return {false, f}; }
};

/// Checks the reveal against the commitment: address first, then binding,
/// then structural validity of the action.
inline Verdict verify_reveal(const Commitment& c, const Reveal& r,
                             HashAlg alg = HashAlg::kSha256) {
  const Digest addr = hash(alg, DomainTag::kAddress, r.x.view());
  if (addr != c.addr_hash) return Verdict::fail(VerifyFailure::kAddrMismatch);

  const Digest bind = binding_hash(r.x, r.m, alg);
  if (c.mode == CommitMode::kFull) {
    if (!c.bind_hash || bind != *c.bind_hash) {
      return Verdict::fail(VerifyFailure::kBindMismatch);
    }
  } else {
    if (!c.compact_hash || xor_combine(addr, bind) != *c.compact_hash) {
      return Verdict::fail(VerifyFailure::kBindMismatch);
    }
  }

  if (!is_well_formed(r.m)) return Verdict::fail(VerifyFailure::kMalformedAction);
  return Verdict::pass();
}

}  // namespace crsig
