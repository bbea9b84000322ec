#include <gtest/gtest.h>

#include "support/ledger_oracle.hpp"

namespace crsig::oracle {
namespace {

void expect_clean(const Stats& st) {
  EXPECT_EQ(st.mismatches, 0u) << st.first_mismatch;
  EXPECT_EQ(st.conservation_failures, 0u);
  EXPECT_EQ(st.purity_failures, 0u);
}

TEST(LedgerEnumeration, FullModeWithExpiryGaps) {
  const Stats st = Enumerator(CommitMode::kFull, {0, 1, 100}, 4).run();
  expect_clean(st);
  // Every rejection path the alphabet can reach is actually exercised.
  for (const char* r : {"Accepted", "UnknownAccount", "AccountLocked", "AccountSpent",
                        "AddrMismatch", "NoPendingCommit", "TooEarly", "VerifyFailed",
                        "InsufficientBalance", "ReplaySpentCommitment", "InvalidNextAuth",
                        "InvalidDestination"}) {
    SCOPED_TRACE(r);
    EXPECT_GT(st.reasons.count(r) ? st.reasons.at(r) : 0u, 0u) << r;
  }
  EXPECT_GT(st.steps, 100000u);
}

TEST(LedgerEnumeration, CompactMode) {
  expect_clean(Enumerator(CommitMode::kCompact, {0, 1}, 4).run());
}

TEST(LedgerEnumeration, OtherHashFamilies) {
  expect_clean(Enumerator(CommitMode::kFull, {0, 1}, 3, HashAlg::kBlake2s256).run());
  expect_clean(Enumerator(CommitMode::kCompact, {0, 1}, 3, HashAlg::kSha3_256).run());
}

}  // namespace
}  // namespace crsig::oracle
