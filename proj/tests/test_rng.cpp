#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "l2b/rng.hpp"

using l2b::derive_seed;
using l2b::Rng;

TEST(Rng, DeriveSeedIsAFixedFunction) {
  EXPECT_EQ(derive_seed(42, "env", 3), derive_seed(42, "env", 3));
  EXPECT_NE(derive_seed(42, "env", 3), derive_seed(42, "env", 4));
  EXPECT_NE(derive_seed(42, "env", 3), derive_seed(43, "env", 3));
  EXPECT_NE(derive_seed(42, "env", 0), derive_seed(42, "init", 0));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(3);
  constexpr std::size_t kBins = 17;
  constexpr int kDraws = 170000;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const std::size_t k = rng.uniform_index(kBins);
    ASSERT_LT(k, kBins);
    ++counts[k];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(kDraws) / kBins;
  for (const int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 16 degrees of freedom, 99.9th percentile is about 39.3.
  EXPECT_LT(chi2, 39.3);
}

TEST(Rng, UniformIndexOfOneIsZero) {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rng.uniform_index(1), 0u);
}
