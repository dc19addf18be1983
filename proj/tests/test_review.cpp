#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <set>
#include <vector>

#include "pitch/review.hpp"

using namespace pitch;
using namespace pitch::review;

namespace {

std::vector<EvaluatorVote> panel(int c0, int c1, int c2, int l0 = 5, int l1 = 5, int l2 = 5) {
  return {{"a", EvaluatorRole::NativeMonolingual, c0, l0},
          {"b", EvaluatorRole::NonNativeMultilingual, c1, l1},
          {"c", EvaluatorRole::TieBreaker, c2, l2}};
}

}  // namespace

TEST(Panel, MajorityCompliance) {
  EXPECT_EQ(majority_compliance(panel(1, 1, 0)), 1);
  EXPECT_EQ(majority_compliance(panel(0, 0, 1)), 0);
  EXPECT_EQ(majority_compliance(panel(1, 1, 1)), 1);
}

TEST(Panel, MajorityIsPermutationInvariant) {
  for (int bits = 0; bits < 8; ++bits) {
    auto votes = panel(bits & 1, (bits >> 1) & 1, (bits >> 2) & 1);
    const int expected = majority_compliance(votes);
    std::sort(votes.begin(), votes.end(), [](const auto& a, const auto& b) { return a.evaluator_id < b.evaluator_id; });
    do {
      EXPECT_EQ(majority_compliance(votes), expected);
    } while (std::next_permutation(votes.begin(), votes.end(),
                                   [](const auto& a, const auto& b) { return a.evaluator_id < b.evaluator_id; }));
  }
}

TEST(Panel, RealismMedian) {
  EXPECT_EQ(aggregate_realism(panel(1, 1, 1, 3, 4, 5)), 4);
  EXPECT_EQ(aggregate_realism(panel(1, 1, 1, 2, 2, 5)), 2);
  EXPECT_EQ(aggregate_realism(panel(1, 1, 1, 5, 5, 5)), 5);
  EXPECT_EQ(aggregate_realism(panel(1, 1, 1, 5, 1, 3)), 3);
}

TEST(Panel, MalformedPanelsRejected) {
  auto expect_invalid = [](const std::vector<EvaluatorVote>& votes) {
    try {
      majority_compliance(votes);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidPanel);
    }
    EXPECT_THROW(aggregate_realism(votes), Error);
  };
  auto two = panel(1, 1, 1);
  two.pop_back();
  expect_invalid(two);
  auto four = panel(1, 1, 1);
  four.push_back(four.front());
  expect_invalid(four);
  auto dup_role = panel(1, 1, 1);
  dup_role[2].role = EvaluatorRole::NativeMonolingual;
  expect_invalid(dup_role);
  expect_invalid(panel(1, 1, 1, 0, 3, 3));
  expect_invalid(panel(2, 1, 1));
}

TEST(Scenario, Examples) {
  const auto fake = Label::Fake;
  const auto real = Label::Real;
  EXPECT_EQ(classify_scenario(real, fake, fake, fake).name, Scenario::MachineCorrected);
  EXPECT_EQ(classify_scenario(fake, real, real, fake).name, Scenario::MachineMisled);
  EXPECT_EQ(classify_scenario(fake, fake, fake, fake).name, Scenario::CorrectAgreement);
}

TEST(Scenario, BijectionOverAllTriples) {
  std::set<Scenario> names;
  for (int bits = 0; bits < 8; ++bits) {
    const bool i = bits & 1, m = bits & 2, f = bits & 4;
    const Scenario s = scenario_for(i, m, f);
    names.insert(s);
    const auto t = triple_for(s);
    EXPECT_EQ(t.initial_correct, i);
    EXPECT_EQ(t.machine_correct, m);
    EXPECT_EQ(t.final_correct, f);
    EXPECT_EQ(t.name, s);
  }
  EXPECT_EQ(names.size(), 8u);
  for (auto s : kAllScenarios) {
    const auto t = triple_for(s);
    EXPECT_EQ(scenario_for(t.initial_correct, t.machine_correct, t.final_correct), s);
  }
}

TEST(Scenario, TableRowsMatchNames) {
  // (initial, machine, final) correctness per row.
  EXPECT_EQ(scenario_for(true, true, true), Scenario::CorrectAgreement);
  EXPECT_EQ(scenario_for(false, true, true), Scenario::MachineCorrected);
  EXPECT_EQ(scenario_for(false, false, true), Scenario::SelfCorrected);
  EXPECT_EQ(scenario_for(true, false, true), Scenario::NoChangeInitialCorrect);
  EXPECT_EQ(scenario_for(true, true, false), Scenario::SelfMisled);
  EXPECT_EQ(scenario_for(true, false, false), Scenario::MachineMisled);
  EXPECT_EQ(scenario_for(false, true, false), Scenario::NoChangeInitialWrong);
  EXPECT_EQ(scenario_for(false, false, false), Scenario::IncorrectAgreement);
}

TEST(Scenario, ClassifyAgreesWithTripleForEveryLabelCombination) {
  std::vector<DecisionScenario> all;
  for (int bits = 0; bits < 16; ++bits) {
    const Label i = bits & 1 ? Label::Fake : Label::Real;
    const Label m = bits & 2 ? Label::Fake : Label::Real;
    const Label f = bits & 4 ? Label::Fake : Label::Real;
    const Label t = bits & 8 ? Label::Fake : Label::Real;
    const auto s = classify_scenario(i, m, f, t);
    EXPECT_EQ(s.initial_correct, i == t);
    EXPECT_EQ(s.machine_correct, m == t);
    EXPECT_EQ(s.final_correct, f == t);
    EXPECT_EQ(s.name, scenario_for(s.initial_correct, s.machine_correct, s.final_correct));
    all.push_back(s);
  }
  const auto counts = count_scenarios(all);
  std::size_t total = 0;
  for (auto c : counts) {
    EXPECT_EQ(c, 2u);
    total += c;
  }
  EXPECT_EQ(total, all.size());
}

TEST(Rates, Examples) {
  ScenarioCounts counts{};
  counts[static_cast<std::size_t>(Scenario::MachineCorrected)] = 781;
  counts[static_cast<std::size_t>(Scenario::NoChangeInitialWrong)] = 939;
  counts[static_cast<std::size_t>(Scenario::MachineMisled)] = 216;
  counts[static_cast<std::size_t>(Scenario::NoChangeInitialCorrect)] = 510;
  const auto rates = interaction_rates(counts);
  ASSERT_TRUE(rates.machine_correction_rate && rates.machine_misled_rate);
  EXPECT_NEAR(*rates.machine_correction_rate, 0.4541, 5e-5);
  EXPECT_NEAR(*rates.machine_misled_rate, 0.2975, 5e-5);
}

TEST(Rates, UndefinedWhenDenominatorIsZero) {
  const auto rates = interaction_rates(ScenarioCounts{});
  EXPECT_FALSE(rates.machine_correction_rate.has_value());
  EXPECT_FALSE(rates.machine_misled_rate.has_value());
  EXPECT_THROW(interaction_rates(std::span<const DecisionScenario>{}), Error);
}

TEST(Rates, FromRecordsMatchesFromCounts) {
  std::vector<DecisionScenario> records;
  for (int k = 0; k < 3; ++k) records.push_back(triple_for(Scenario::MachineCorrected));
  records.push_back(triple_for(Scenario::NoChangeInitialWrong));
  records.push_back(triple_for(Scenario::CorrectAgreement));
  const auto rates = interaction_rates(records);
  EXPECT_DOUBLE_EQ(*rates.machine_correction_rate, 0.75);
  EXPECT_FALSE(rates.machine_misled_rate.has_value());
}
