#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "crsig/protocol.hpp"

namespace crsig {
namespace {

// Oracle values from Python hashlib:
//   x0 = sha256("crsig/preimage/v1" || 0^32), y0 = H(0x01 || x0),
//   bind = H(0x02 || x0 || 0x10 || 0x11^32 || be64(30)).
constexpr const char* kX0 = "11cad6ba576a71111c8a84fdb58ddec3bd04f1d0983526051142bcccbe7e82ad";
constexpr const char* kY0Sha256 = "e9d79887aaa17f805577b5e1773bee70f0e6b15fa4fd778bd10be84a770aeb40";
constexpr const char* kY0Blake2s = "75b77cefc8826523d5f8417a02c80275e3550d7c88f77ed0dca9f1757069085f";
constexpr const char* kY0Sha3 = "ff935013e14f29ce3c905d6cc2e13efb9ae20fedc1eab36c682e5b31e8f31bea";
constexpr const char* kY1Sha256 = "94eceb30df31caae42ce19d3c43b3504954c70bd2f3a9b394ea28ca109350e08";
constexpr const char* kCanonical =
    "101111111111111111111111111111111111111111111111111111111111111111000000000000001e";

struct BindOracle {
  HashAlg alg;
  const char* bind;
  const char* compact;
};
constexpr BindOracle kBind[] = {
    {HashAlg::kSha256, "2f0cca9a3edd50716fa949246ef23f9e2e6a392a2da64531db0720b631f30e57",
     "c6db521d947c2ff13adefcc519c9d1eede8c8875895b32ba0a0cc8fc46f9e517"},
    {HashAlg::kBlake2s256, "079ee1487e61ead6e2548a6936bf0ca6182473e3db24b460fca82c3bdfc0dc55",
     "72299da7b6e38ff537accb1334770ed3fb717e9f53d3cab02001dd4eafa9d40a"},
    {HashAlg::kSha3_256, "1e9baf0848c86998f1aef80de2e435261a6611c8d620e32feda51c4817602e5b",
     "e108ff1ba9874056cd3ea56120050bdd80841e2517ca5043858b4779ff9335b1"},
};
constexpr const char* kBindAmount31 =
    "9bf0cd954ac19fd6cc2546775152cfc0dd291db218a9fea79b469be458d9469e";

Seed fill(std::uint8_t v) {
  Seed s;
  s.fill(v);
  return s;
}

Action fixed_action(std::uint64_t amount = 30) {
  AuthId dest;
  dest.value.bytes.fill(0x11);
  return Action{ActionKind::kTransfer, dest, amount};
}

Seed random_seed(std::mt19937_64& rng) {
  Seed s;
  for (auto& b : s) b = static_cast<std::uint8_t>(rng());
  return s;
}

Action random_action(std::mt19937_64& rng) {
  Action m;
  for (auto& b : m.dest.value.bytes) b = static_cast<std::uint8_t>(rng());
  m.amount = 1 + rng() % 1'000'000'000;
  return m;
}

bool contains_subsequence(const Bytes& hay, ByteView needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

TEST(Keygen, ZeroSeedMatchesOracle) {
  const auto [x, y] = keygen(fill(0));
  EXPECT_EQ(to_hex(x.view()), kX0);
  EXPECT_EQ(to_hex(y), kY0Sha256);
  EXPECT_EQ(to_hex(keygen(fill(0), HashAlg::kBlake2s256).second), kY0Blake2s);
  EXPECT_EQ(to_hex(keygen(fill(0), HashAlg::kSha3_256).second), kY0Sha3);
}

TEST(Keygen, DeterministicAndCollisionFree) {
  EXPECT_EQ(keygen(fill(3)).second, keygen(fill(3)).second);
  std::mt19937_64 rng(1);
  std::set<AuthId> seen;
  for (int i = 0; i < 1000; ++i) {
    const Seed a = random_seed(rng);
    const Seed b = random_seed(rng);
    ASSERT_NE(a, b);
    ASSERT_NE(keygen(a).second, keygen(b).second);
    seen.insert(keygen(a).second);
    seen.insert(keygen(b).second);
  }
  EXPECT_EQ(seen.size(), 2000u);
}

TEST(Action, CanonicalEncoding) {
  const Action m = fixed_action();
  EXPECT_EQ(to_hex(canonical(m)), kCanonical);
  EXPECT_EQ(parse_action(canonical(m)), m);
  Bytes bad = canonical(m);
  bad[0] = 0x11;
  EXPECT_THROW(parse_action(bad), ValidationError);
  EXPECT_THROW(parse_action(ByteView(bad).first(40)), ValidationError);
}

TEST(Action, WellFormedness) {
  EXPECT_TRUE(is_well_formed(fixed_action()));
  EXPECT_FALSE(is_well_formed(fixed_action(0)));
  EXPECT_FALSE(is_well_formed(Action{ActionKind::kTransfer, AuthId::burn(), 5}));
}

TEST(MakeCommit, MatchesOracleForEveryAlgorithm) {
  const auto [x, y] = keygen(fill(0));
  for (const auto& o : kBind) {
    const Commitment full = make_commit(x, fixed_action(), CommitMode::kFull, o.alg);
    EXPECT_EQ(full.addr_hash, keygen(fill(0), o.alg).second.value);
    EXPECT_EQ(to_hex(*full.bind_hash), o.bind);
    EXPECT_FALSE(full.compact_hash);
    const Commitment compact = make_commit(x, fixed_action(), CommitMode::kCompact, o.alg);
    EXPECT_EQ(to_hex(*compact.compact_hash), o.compact);
  }
}

TEST(MakeCommit, AddrIgnoresAction) {
  const auto [x, y] = keygen(fill(0));
  const Commitment a = make_commit(x, fixed_action(30));
  const Commitment b = make_commit(x, fixed_action(31));
  EXPECT_EQ(a.addr_hash, b.addr_hash);
  EXPECT_NE(a.bind_hash, b.bind_hash);
  EXPECT_EQ(to_hex(*b.bind_hash), kBindAmount31);
}

TEST(MakeCommit, CompactIsXorOfDigests) {
  const auto [x, y] = keygen(fill(5));
  const Commitment c = make_commit(x, fixed_action(), CommitMode::kCompact);
  EXPECT_EQ(*c.compact_hash, xor_combine(c.addr_hash, *c.bind_hash));
}

TEST(MakeCommit, RejectsMalformedAction) {
  const auto [x, y] = keygen(fill(0));
  EXPECT_THROW(make_commit(x, fixed_action(0)), ValidationError);
}

TEST(CommitSerialization, LayoutAndParse) {
  const auto [x, y] = keygen(fill(0));
  const Commitment full = make_commit(x, fixed_action());
  const Bytes fb = serialize(full);
  ASSERT_EQ(fb.size(), 65u);
  EXPECT_EQ(fb[0], 0x01);
  EXPECT_EQ(to_hex(ByteView(fb).subspan(1, 32)), kY0Sha256);
  EXPECT_EQ(to_hex(ByteView(fb).subspan(33)), kBind[0].bind);
  EXPECT_EQ(parse_commitment(fb, y), full);

  const Commitment compact = make_commit(x, fixed_action(), CommitMode::kCompact);
  const Bytes cb = serialize(compact);
  ASSERT_EQ(cb.size(), 33u);
  EXPECT_EQ(cb[0], 0x02);
  EXPECT_EQ(to_hex(ByteView(cb).subspan(1)), kBind[0].compact);
  const Commitment decoded = parse_commitment(cb, y);
  EXPECT_EQ(decoded.addr_hash, y.value);
  EXPECT_EQ(decoded.compact_hash, compact.compact_hash);
  EXPECT_FALSE(decoded.bind_hash);

  EXPECT_THROW(parse_commitment(Bytes{}, y), ValidationError);
  EXPECT_THROW(parse_commitment(Bytes{0x07}, y), ValidationError);
  EXPECT_THROW(parse_commitment(ByteView(fb).first(64), y), ValidationError);
}

TEST(MakeReveal, NextAuthMatchesOracle) {
  const auto [x, y] = keygen(fill(0));
  const auto [r, next] = make_reveal(x, fixed_action(), fill(1));
  EXPECT_EQ(to_hex(r.next_auth), kY1Sha256);
  EXPECT_EQ(auth_id(next), r.next_auth);
  EXPECT_EQ(r.x, x);
  EXPECT_EQ(r.m, fixed_action());
  EXPECT_EQ(make_reveal(x, fixed_action(), fill(1)).first, r);
}

TEST(MakeReveal, NextAuthDiffersFromCurrent) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Seed s = random_seed(rng);
    Seed s2 = random_seed(rng);
    const auto [x, y] = keygen(s);
    const auto [r, next] = make_reveal(x, random_action(rng), s2);
    ASSERT_NE(next, x);
    ASSERT_NE(r.next_auth, y);
  }
  const auto [x, y] = keygen(fill(9));
  EXPECT_THROW(make_reveal(x, fixed_action(), fill(9)), ValidationError);
}

TEST(RevealSerialization, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto [x, y] = keygen(random_seed(rng));
    const auto [r, next] = make_reveal(x, random_action(rng), random_seed(rng));
    const Bytes b = serialize(r);
    ASSERT_EQ(b.size(), kRevealSize);
    ASSERT_EQ(parse_reveal(b), r);
  }
  EXPECT_THROW(parse_reveal(Bytes(kRevealSize - 1)), ValidationError);
}

TEST(VerifyReveal, Examples) {
  const auto [x, y] = keygen(fill(0));
  const Commitment c = make_commit(x, fixed_action());
  const auto [r, next] = make_reveal(x, fixed_action(), fill(1));
  EXPECT_TRUE(verify_reveal(c, r).ok);

  Reveal wrong_key = r;
  wrong_key.x = keygen(fill(2)).first;
  const Verdict v1 = verify_reveal(c, wrong_key);
  EXPECT_FALSE(v1.ok);
  EXPECT_EQ(v1.reason, VerifyFailure::kAddrMismatch);

  // One byte of the amount flipped: 30 -> 31, whose binding differs per oracle.
  Reveal wrong_m = r;
  Bytes enc = canonical(r.m);
  enc.back() ^= 0x01;
  wrong_m.m = parse_action(enc);
  ASSERT_EQ(wrong_m.m.amount, 31u);
  ASSERT_NE(to_hex(*c.bind_hash), kBindAmount31);
  const Verdict v2 = verify_reveal(c, wrong_m);
  EXPECT_FALSE(v2.ok);
  EXPECT_EQ(v2.reason, VerifyFailure::kBindMismatch);
}

TEST(VerifyReveal, MalformedActionReported) {
  // A commitment bound to an amount of zero, built by hand.
  const auto [x, y] = keygen(fill(0));
  const Action zero = fixed_action(0);
  Commitment c{CommitMode::kFull, y.value, binding_hash(x, zero), std::nullopt};
  const Verdict v = verify_reveal(c, make_final_reveal(x, zero));
  EXPECT_EQ(v.reason, VerifyFailure::kMalformedAction);
}

TEST(VerifyReveal, AlgorithmMustMatch) {
  const auto [x, y] = keygen(fill(0));
  const Commitment c = make_commit(x, fixed_action(), CommitMode::kFull, HashAlg::kSha3_256);
  const auto [r, next] = make_reveal(x, fixed_action(), fill(1), HashAlg::kSha3_256);
  EXPECT_TRUE(verify_reveal(c, r, HashAlg::kSha3_256).ok);
  EXPECT_EQ(verify_reveal(c, r, HashAlg::kSha256).reason, VerifyFailure::kAddrMismatch);
}

// Randomized invariants, 1000 cases each.

TEST(ProtocolProperties, RoundTripSoundness) {
  std::mt19937_64 rng(100);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = keygen(random_seed(rng));
    const Action m = random_action(rng);
    const auto mode = (i % 2) ? CommitMode::kCompact : CommitMode::kFull;
    const Commitment c = make_commit(x, m, mode);
    const Commitment wire = parse_commitment(serialize(c), y);
    const auto [r, next] = make_reveal(x, m, random_seed(rng));
    ASSERT_TRUE(verify_reveal(c, r).ok);
    ASSERT_TRUE(verify_reveal(wire, parse_reveal(serialize(r))).ok);
  }
}

TEST(ProtocolProperties, BindingRejectsMutatedActions) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = keygen(random_seed(rng));
    const Action m = random_action(rng);
    Bytes enc = canonical(m);
    // Mutate one byte of dest or amount (never the kind tag).
    const std::size_t pos = 1 + rng() % (enc.size() - 1);
    enc[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    const Action mutated = parse_action(enc);
    ASSERT_NE(mutated, m);
    for (auto mode : {CommitMode::kFull, CommitMode::kCompact}) {
      const Commitment c = parse_commitment(serialize(make_commit(x, m, mode)), y);
      const Reveal r{x, mutated, keygen(random_seed(rng)).second};
      const Verdict v = verify_reveal(c, r);
      ASSERT_FALSE(v.ok);
      ASSERT_EQ(v.reason, VerifyFailure::kBindMismatch);
    }
  }
}

TEST(ProtocolProperties, CompactAndFullAgree) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = keygen(random_seed(rng));
    const Action m = random_action(rng);
    // Reveal candidates: honest, wrong key, wrong action.
    Reveal r{x, m, keygen(random_seed(rng)).second};
    switch (i % 3) {
      case 1: r.x = keygen(random_seed(rng)).first; break;
      case 2: r.m = random_action(rng); break;
      default: break;
    }
    const Commitment full = parse_commitment(serialize(make_commit(x, m, CommitMode::kFull)), y);
    const Commitment compact =
        parse_commitment(serialize(make_commit(x, m, CommitMode::kCompact)), y);
    const Verdict a = verify_reveal(full, r);
    const Verdict b = verify_reveal(compact, r);
    ASSERT_EQ(a.ok, b.ok);
    ASSERT_EQ(a.reason, b.reason);
    ASSERT_EQ(a.ok, i % 3 == 0);
  }
}

TEST(ProtocolProperties, CommitBytesNeverContainPreimage) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = keygen(random_seed(rng));
    const Action m = random_action(rng);
    for (auto mode : {CommitMode::kFull, CommitMode::kCompact}) {
      const Commitment c = make_commit(x, m, mode);
      const Bytes b = serialize(c);
      ASSERT_FALSE(contains_subsequence(b, x.view()));
      // Any 8-byte window of x would also be a leak.
      for (std::size_t off = 0; off + 8 <= x.bytes.size(); off += 8) {
        ASSERT_FALSE(contains_subsequence(b, x.view().subspan(off, 8)));
      }
      // Bytes are a pure function of the digests.
      Bytes expect{static_cast<std::uint8_t>(mode)};
      if (mode == CommitMode::kFull) {
        expect.insert(expect.end(), c.addr_hash.bytes.begin(), c.addr_hash.bytes.end());
        expect.insert(expect.end(), c.bind_hash->bytes.begin(), c.bind_hash->bytes.end());
      } else {
        expect.insert(expect.end(), c.compact_hash->bytes.begin(), c.compact_hash->bytes.end());
      }
      ASSERT_EQ(b, expect);
    }
  }
}

}  // namespace
}  // namespace crsig
