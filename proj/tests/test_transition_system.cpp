#include <gtest/gtest.h>

#include "srseq/oracle.hpp"
#include "srseq/transition_system.hpp"
#include "support/fixtures.hpp"
#include "support/random_trees.hpp"

using namespace srseq;

namespace {

const Scheme kInOrderSwap = Scheme::make(Strategy::InOrder, Reordering::Swap);
const Scheme kInOrderShiftK = Scheme::make(Strategy::InOrder, Reordering::ShiftK);
const Scheme kInOrderSwapK = Scheme::make(Strategy::InOrder, Reordering::SwapK);

Configuration replay(int n, const std::vector<Transition>& tokens, const Scheme& s, std::size_t steps) {
  Configuration c = initial(n);
  for (std::size_t i = 0; i < steps; ++i) c = apply(c, tokens[i], s);
  return c;
}

std::vector<int> stack_positions(const Configuration& c) {
  std::vector<int> out;
  for (const auto& item : c.stack) out.push_back(item.is_marker() ? -1 : item.position());
  return out;
}

}  // namespace

TEST(Tokens, TextRoundTrip) {
  const std::string line = "SHIFT SHIFT#3 SWAP SWAP#2 NT(VP) REDUCE REDUCE(NP) REDUCE#2(S) FINISH";
  EXPECT_EQ(format_transitions(parse_transitions(line)), line);
  EXPECT_THROW(parse_transition("SHIFT#"), TokenError);
  EXPECT_THROW(parse_transition("SWAP#0"), TokenError);
  EXPECT_THROW(parse_transition("NT()"), TokenError);
  EXPECT_THROW(parse_transition("REDUCE#2"), TokenError);
  EXPECT_THROW(parse_transition("JUMP"), TokenError);
  EXPECT_EQ(Transition::shift_k(0).normalized(), Transition::shift());
  EXPECT_EQ(Transition::swap_k(1).normalized(), Transition::swap());
}

TEST(Schemes, NamesRoundTripAndUnsupportedCombinationsFail) {
  for (const auto& s : shipped_schemes()) EXPECT_EQ(parse_scheme(s.name()), s);
  EXPECT_EQ(shipped_schemes().size(), 10u);
  EXPECT_THROW(parse_scheme("topdown+shiftk"), std::invalid_argument);
  EXPECT_THROW(parse_scheme("bottomup:enriched"), std::invalid_argument);
  EXPECT_THROW(parse_scheme("inorder+swap:enriched"), std::invalid_argument);
  EXPECT_THROW(parse_scheme("sideways"), std::invalid_argument);
}

TEST(Initial, BufferHoldsAllWords) {
  EXPECT_EQ(initial(9).buffer, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(initial(1).buffer, (std::vector<int>{0}));
  EXPECT_TRUE(initial(1).stack.empty());
  EXPECT_THROW(initial(0), std::invalid_argument);
}

TEST(Legal, SwapAfterShiftingPastWird) {
  const auto tokens = encode(test_support::german_example(), kInOrderSwap).tokens;
  const auto c = replay(9, tokens, kInOrderSwap, 4);
  EXPECT_EQ(stack_positions(c), (std::vector<int>{0, -1, 1, 2}));
  EXPECT_TRUE(legal(c, Transition::swap(), kInOrderSwap));
  // Swapping back would undo the reordering.
  const auto swapped = apply(apply(c, Transition::swap(), kInOrderSwap), Transition::shift(), kInOrderSwap);
  EXPECT_EQ(stack_positions(swapped), (std::vector<int>{0, -1, 2, 1}));
  EXPECT_FALSE(legal(swapped, Transition::swap(), kInOrderSwap));
}

TEST(Legal, ReduceNeedsMarkerAndShiftKNeedsIndex) {
  const auto s = Scheme::make(Strategy::TopDown);
  EXPECT_FALSE(legal(initial(3), Transition::reduce(), s));
  Configuration c = initial(4);
  c = apply(c, Transition::shift_k(0), kInOrderShiftK);
  c = apply(c, Transition::shift_k(0), kInOrderShiftK);
  ASSERT_EQ(c.buffer.size(), 2u);
  EXPECT_TRUE(legal(c, Transition::shift_k(1), kInOrderShiftK));
  EXPECT_FALSE(legal(c, Transition::shift_k(2), kInOrderShiftK));
}

TEST(Legal, InventoryAndGuards) {
  const auto td = Scheme::make(Strategy::TopDown);
  const auto io = Scheme::make(Strategy::InOrder);
  const auto bu = Scheme::make(Strategy::BottomUp);
  const auto c0 = initial(2);
  EXPECT_FALSE(legal(c0, Transition::finish(), td));
  EXPECT_FALSE(legal(c0, Transition::swap(), td));
  EXPECT_FALSE(legal(c0, Transition::nt("S"), bu));
  EXPECT_FALSE(legal(c0, Transition::reduce("S"), td));  // not enriched
  EXPECT_TRUE(legal(c0, Transition::nt("S"), td));
  EXPECT_FALSE(legal(c0, Transition::nt("S"), io));  // nothing on the stack yet
  // Top-down REDUCE right after NT would build an empty constituent.
  EXPECT_FALSE(legal(apply(c0, Transition::nt("S"), td), Transition::reduce(), td));
  // Bottom-up REDUCE#k arity.
  auto c = apply(c0, Transition::shift(), bu);
  EXPECT_TRUE(legal(c, Transition::reduce_k(1, "X"), bu));
  EXPECT_FALSE(legal(c, Transition::reduce_k(2, "X"), bu));
  // FINISH needs one constituent and an empty buffer.
  c = apply(c, Transition::shift(), bu);
  EXPECT_FALSE(legal(c, Transition::finish(), bu));
  c = apply(c, Transition::reduce_k(2, "S"), bu);
  EXPECT_TRUE(legal(c, Transition::finish(), bu));
  c = apply(c, Transition::finish(), bu);
  EXPECT_TRUE(c.finished);
  EXPECT_FALSE(legal(c, Transition::finish(), bu));
}

TEST(Apply, ReduceBuildsPPAsInWorkedExample) {
  const auto tokens = encode(test_support::german_example(), kInOrderSwap).tokens;
  const auto before = replay(9, tokens, kInOrderSwap, 12);
  EXPECT_EQ(stack_positions(before), (std::vector<int>{0, -1, 2, -1, 3, 4}));
  EXPECT_EQ(before.buffer, (std::vector<int>{1, 5, 6, 7, 8}));
  const auto after = apply(before, tokens[12], kInOrderSwap);
  ASSERT_EQ(after.stack.size(), 3u);
  const auto& pp = after.stack.back();
  ASSERT_TRUE(pp.is_built());
  EXPECT_EQ(pp.label(), "PP");
  EXPECT_EQ(pp.node().yield(), (Yield{2, 3, 4}));
  EXPECT_EQ(after.buffer, (std::vector<int>{1, 5, 6, 7, 8}));
}

TEST(Apply, ShiftKTakesFromInsideTheBuffer) {
  Configuration c = initial(9);
  c = apply(c, Transition::shift_k(0), kInOrderShiftK);
  c = apply(c, Transition::nt("VP"), kInOrderShiftK);
  c = apply(c, Transition::shift_k(1), kInOrderShiftK);
  EXPECT_EQ(c.stack.back().position(), 2);
  EXPECT_EQ(c.buffer.front(), 1);
}

TEST(Apply, SwapReturnsSecondItemToBufferFront) {
  const auto tokens = encode(test_support::german_example(), kInOrderSwap).tokens;
  const auto c = replay(9, tokens, kInOrderSwap, 5);
  EXPECT_EQ(c.buffer, (std::vector<int>{1, 3, 4, 5, 6, 7, 8}));
  EXPECT_THROW(apply(initial(2), Transition::swap(), kInOrderSwap), IllegalTransition);
}

TEST(Terminal, TopDownVersusFinishFlag) {
  const auto t = parse_bracketed("(S a b)");
  const auto td = Scheme::make(Strategy::TopDown);
  const auto io = Scheme::make(Strategy::InOrder);
  Configuration c = initial(2);
  EXPECT_FALSE(is_terminal(c, td));
  for (const auto& tok : encode(t, td).tokens) c = apply(c, tok, td);
  EXPECT_TRUE(is_terminal(c, td));
  EXPECT_EQ(result_tree(c, t.words()), t);
  // Same stack and buffer under in-order is not terminal until FINISH.
  Configuration d = c;
  EXPECT_FALSE(is_terminal(d, io));
  d = apply(d, Transition::finish(), io);
  EXPECT_TRUE(is_terminal(d, io));
}

TEST(TransitionProperty, WordConservationAndPurity) {
  test_support::TreeGenerator gen(21);
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.discontinuous(gen.uniform(1, 10));
    for (const auto& s : shipped_schemes()) {
      if (s.continuous_only()) continue;
      const auto tokens = encode(tree, s).tokens;
      Configuration c = initial(static_cast<int>(tree.size()));
      for (const auto& t : tokens) {
        const auto next = apply(c, t, s);
        EXPECT_EQ(apply(c, t, s), next);
        std::vector<int> words(next.buffer);
        for (const auto& item : next.stack) {
          if (item.is_word()) words.push_back(item.position());
          if (item.is_built()) words.insert(words.end(), item.node().yield().begin(), item.node().yield().end());
        }
        std::sort(words.begin(), words.end());
        std::vector<int> all(tree.size());
        std::iota(all.begin(), all.end(), 0);
        ASSERT_EQ(words, all);
        c = next;
      }
    }
  }
}

TEST(TransitionProperty, ShiftZeroAndSwapOneAreTheirBaseActions) {
  test_support::TreeGenerator gen(5);
  for (int i = 0; i < 200; ++i) {
    const auto tree = gen.discontinuous(gen.uniform(2, 10));
    const auto tokens = encode(tree, kInOrderSwapK).tokens;
    Configuration c = initial(static_cast<int>(tree.size()));
    for (const auto& t : tokens) {
      if (legal(c, Transition::shift(), kInOrderSwapK)) {
        EXPECT_EQ(apply(c, Transition::shift_k(0), kInOrderShiftK), apply(c, Transition::shift(), kInOrderShiftK));
      }
      if (legal(c, Transition::swap(), kInOrderSwapK)) {
        EXPECT_EQ(apply(c, Transition::swap_k(1), kInOrderSwapK), apply(c, Transition::swap(), kInOrderSwapK));
      }
      c = apply(c, t, kInOrderSwapK);
    }
  }
}
