#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crsig/errors.hpp"

namespace crsig {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kDigestSize = 32;

/// 256-bit output of the one-way function.
struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  static constexpr Digest zero() { return Digest{}; }

  constexpr bool is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(),
                       [](std::uint8_t b) { return b == 0; });
  }

  ByteView view() const { return {bytes.data(), bytes.size()}; }

  friend constexpr auto operator<=>(const Digest&, const Digest&) = default;
  friend constexpr bool operator==(const Digest&, const Digest&) = default;
};

enum class HashAlg : std::uint8_t {
  kSha256 = 0,
  kBlake2s256 = 1,  // BLAKE family
  kSha3_256 = 2,    // Keccak family
};

/// Role prefix prepended to every hashed input.
enum class DomainTag : std::uint8_t {
  kAddress = 0x01,  // F(x)
  kBinding = 0x02,  // F(x || m)
  kCompact = 0x03,
};

inline std::string_view to_string(HashAlg alg) {
  switch (alg) {
    case HashAlg::kSha256:
      return "sha256";
    case HashAlg::kBlake2s256:
      return "blake2s256";
    case HashAlg::kSha3_256:
      return "sha3-256";
  }
  throw ConfigError("unknown hash algorithm id " +
                    std::to_string(static_cast<int>(alg)));
}

/// Accepts the canonical names plus the family aliases "blake" and "keccak".
inline HashAlg parse_hash_alg(std::string_view name) {
  if (name == "sha256" || name == "sha-256") return HashAlg::kSha256;
  if (name == "blake2s256" || name == "blake") return HashAlg::kBlake2s256;
  if (name == "sha3-256" || name == "keccak") return HashAlg::kSha3_256;
  throw ConfigError("unknown hash algorithm '" + std::string(name) + "'");
}

namespace detail {

struct MdDeleter {
  void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

inline const char* openssl_name(HashAlg alg) {
  switch (alg) {
    case HashAlg::kSha256:
      return "SHA256";
    case HashAlg::kBlake2s256:
      return "BLAKE2S-256";
    case HashAlg::kSha3_256:
      return "SHA3-256";
  }
  throw ConfigError("unknown hash algorithm id " +
                    std::to_string(static_cast<int>(alg)));
}

// Fetched digest objects are immutable and may be shared across threads.
inline const EVP_MD* fetch_md(HashAlg alg) {
  static const auto table = [] {
    std::array<std::unique_ptr<EVP_MD, MdDeleter>, 3> t;
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i].reset(EVP_MD_fetch(nullptr, openssl_name(static_cast<HashAlg>(i)),
                              nullptr));
    }
    return t;
  }();
  const auto idx = static_cast<std::size_t>(alg);
  if (idx >= table.size()) {
    throw ConfigError("unknown hash algorithm id " + std::to_string(idx));
  }
  if (!table[idx]) {
    throw ConfigError(std::string("digest provider unavailable: ") +
                      openssl_name(alg));
  }
  return table[idx].get();
}

}  // namespace detail

/// Streaming form of hash(): the tag is absorbed first, then each part.
class Hasher {
 public:
  Hasher(HashAlg alg, DomainTag tag) : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), detail::fetch_md(alg),
                                   nullptr) != 1) {
      throw ConfigError("digest init failed");
    }
    const auto t = static_cast<std::uint8_t>(tag);
    EVP_DigestUpdate(ctx_.get(), &t, 1);
  }

  Hasher& update(ByteView data) {
    if (data.size() >= (std::uint64_t{1} << 32) - absorbed_) {
      throw DomainError("hash input must be shorter than 2^32 bytes");
    }
    absorbed_ += data.size();
    if (!data.empty()) EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
    return *this;
  }

  Digest finish() {
    Digest out;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.bytes.data(), &len);
    if (len != kDigestSize) throw ConfigError("digest is not 32 bytes");
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, detail::MdCtxDeleter> ctx_;
  std::uint64_t absorbed_ = 0;
};

inline Digest hash(HashAlg alg, DomainTag tag, ByteView data) {
  return Hasher(alg, tag).update(data).finish();
}

inline constexpr Digest xor_combine(const Digest& a, const Digest& b) {
  Digest out;
  for (std::size_t i = 0; i < kDigestSize; ++i) {
    out.bytes[i] = static_cast<std::uint8_t>(a.bytes[i] ^ b.bytes[i]);
  }
  return out;
}

/// Plain SHA-256 over label || parts. Used for deterministic key material
/// derivation, never as the authorization function F.
inline Digest derive_digest(std::string_view label,
                            std::initializer_list<ByteView> parts) {
  std::unique_ptr<EVP_MD_CTX, detail::MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Digest out;
  unsigned int len = 0;
  bool ok = ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx.get(), label.data(), label.size()) == 1;
  for (ByteView p : parts) {
    ok = ok && (p.empty() || EVP_DigestUpdate(ctx.get(), p.data(), p.size()) == 1);
  }
  ok = ok && EVP_DigestFinal_ex(ctx.get(), out.bytes.data(), &len) == 1;
  if (!ok || len != kDigestSize) throw ConfigError("sha256 derivation failed");
  return out;
}

// ---------------------------------------------------------------------------
// Hex helpers shared by every text format in the project.

inline std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

inline std::string to_hex(const Digest& d) { return to_hex(d.view()); }

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw ValidationError("invalid hex digit in '" + std::string(hex) + "'");
  };
  if (hex.size() % 2 != 0) throw ValidationError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 |
                                       nibble(hex[2 * i + 1]));
  }
  return out;
}

inline Digest digest_from_hex(std::string_view hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != kDigestSize) {
    throw ValidationError("expected 64 hex digits, got " +
                          std::to_string(hex.size()));
  }
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

}  // namespace crsig
