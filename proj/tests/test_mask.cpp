#include <gtest/gtest.h>

#include "srseq/mask.hpp"
#include "srseq/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_trees.hpp"
#include "support/replay_oracle.hpp"

using namespace srseq;

namespace {

std::size_t total_unmasked(const MaskPair& m) { return unmasked(m.stack).size() + unmasked(m.buffer).size(); }

}  // namespace

TEST(Mask, InitialAndShift) {
  MaskTracker tracker(9, parse_scheme("inorder+swap"));
  EXPECT_EQ(unmasked(tracker.masks().buffer).size(), 9u);
  EXPECT_TRUE(unmasked(tracker.masks().stack).empty());
  tracker.step(Transition::shift());
  EXPECT_EQ(unmasked(tracker.masks().stack), std::vector<int>{0});
  EXPECT_EQ(tracker.masks().buffer[0], kMasked);
  const MaskPair before = tracker.masks();
  tracker.step(Transition::nt("VP"));
  EXPECT_EQ(tracker.masks(), before);
}

TEST(Mask, GermanPrefixEndsWithPPRepresentative) {
  const auto s = parse_scheme("inorder+swap");
  auto tokens = encode(test_support::german_example(), s).tokens;
  tokens.erase(tokens.begin() + 13, tokens.end());
  const auto masks = trace(9, tokens, s);
  ASSERT_EQ(masks.size(), 14u);
  EXPECT_EQ(unmasked(masks[12].stack), (std::vector<int>{0, 2, 3, 4}));
  EXPECT_EQ(unmasked(masks[13].stack), (std::vector<int>{0, 2}));
  EXPECT_EQ(unmasked(masks[13].buffer), (std::vector<int>{1, 5, 6, 7, 8}));
}

TEST(Mask, ShiftKAndSwapK) {
  MaskTracker tracker(5, parse_scheme("inorder+shiftk"));
  tracker.step(Transition::shift_k(3));
  EXPECT_EQ(unmasked(tracker.masks().stack), std::vector<int>{3});
  EXPECT_EQ(unmasked(tracker.masks().buffer), (std::vector<int>{0, 1, 2, 4}));

  const auto s = parse_scheme("inorder+swapk");
  const auto masks = trace(5, parse_transitions("SHIFT SHIFT SHIFT SWAP#2"), s);
  EXPECT_EQ(unmasked(masks.back().stack), std::vector<int>{2});
  EXPECT_EQ(unmasked(masks.back().buffer), (std::vector<int>{0, 1, 3, 4}));
}

TEST(Mask, EmptyTraceAndErrors) {
  const auto s = parse_scheme("topdown");
  EXPECT_EQ(trace(3, {}, s).size(), 1u);
  try {
    trace(1, parse_transitions("SHIFT SHIFT"), s);
    FAIL();
  } catch (const MaskError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("step 1:", 0), 0u);
  }
  EXPECT_THROW(trace(2, parse_transitions("REDUCE"), s), MaskError);
  EXPECT_THROW(MaskTracker(0, s), std::invalid_argument);
}

TEST(MaskProperty, MatchesConfigurationReplay) {
  test_support::TreeGenerator gen(31);
  int sequences = 0;
  for (int i = 0; i < 250; ++i) {
    const auto tree = gen.any(12);
    const int n = static_cast<int>(tree.size());
    for (const auto& s : shipped_schemes()) {
      if (s.continuous_only() && !is_continuous(tree)) continue;
      const auto tokens = encode(tree, s).tokens;
      const auto fast = trace(n, tokens, s);
      const auto slow = test_support::replay_masks(n, tokens, s);
      ASSERT_EQ(fast.size(), slow.size());
      for (std::size_t t = 0; t < fast.size(); ++t) {
        ASSERT_EQ(unmasked(fast[t].stack), unmasked(slow[t].stack)) << s.name() << " step " << t;
        ASSERT_EQ(unmasked(fast[t].buffer), unmasked(slow[t].buffer)) << s.name() << " step " << t;
      }
      ++sequences;
    }
  }
  EXPECT_GE(sequences, 200);
}

TEST(MaskProperty, DisjointAndMonotoneTotals) {
  test_support::TreeGenerator gen(32);
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.discontinuous(gen.uniform(1, 12));
    const int n = static_cast<int>(tree.size());
    for (const char* name : {"inorder+swap", "inorder+swapk", "inorder+shiftk", "topdown+swap", "bottomup+swap"}) {
      const auto s = parse_scheme(name);
      const auto tokens = encode(tree, s).tokens;
      const auto masks = trace(n, tokens, s);
      Configuration c = initial(n);
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        for (int p = 0; p < n; ++p) EXPECT_FALSE(masks[t + 1].stack[p] == 0.0 && masks[t + 1].buffer[p] == 0.0);
        const auto next = apply(c, tokens[t], s);
        const auto before = total_unmasked(masks[t]);
        const auto after = total_unmasked(masks[t + 1]);
        if (tokens[t].is_reduce()) {
          // Items merged into one: every popped word or constituent except one disappears.
          const auto items = [](const Configuration& x) {
            return std::count_if(x.stack.begin(), x.stack.end(), [](const StackItem& it) { return !it.is_marker(); });
          };
          EXPECT_EQ(before - after, static_cast<std::size_t>(items(c) - items(next)));
        } else {
          EXPECT_EQ(after, before) << tokens[t].str();
        }
        c = next;
      }
    }
  }
}
