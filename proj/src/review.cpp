#include "pitch/review.hpp"

#include <algorithm>

namespace pitch::review {

namespace {

void check_panel(std::span<const EvaluatorVote> votes) {
  if (votes.size() != 3) {
    throw Error(ErrorCode::InvalidPanel,
                "a review panel has exactly 3 votes, got " + std::to_string(votes.size()));
  }
  std::array<bool, 3> seen{};
  for (const auto& v : votes) {
    auto& slot = seen[static_cast<std::size_t>(v.role)];
    if (slot) throw Error(ErrorCode::InvalidPanel, "each panel role votes at most once");
    slot = true;
    if (v.compliant != 0 && v.compliant != 1) throw Error(ErrorCode::InvalidPanel, "compliant must be 0 or 1");
    if (v.realism_likert < 1 || v.realism_likert > 5) {
      throw Error(ErrorCode::InvalidPanel, "Likert rating must be 1..5");
    }
  }
}

// Table order: (initial, machine, final) correctness per scenario.
constexpr std::array<std::array<bool, 3>, 8> kTriples = {{
    {true, true, true},
    {false, true, true},
    {false, false, true},
    {true, false, true},
    {true, true, false},
    {true, false, false},
    {false, true, false},
    {false, false, false},
}};

}  // namespace

int majority_compliance(std::span<const EvaluatorVote> votes) {
  check_panel(votes);
  int yes = 0;
  for (const auto& v : votes) yes += v.compliant;
  return yes >= 2 ? 1 : 0;
}

int aggregate_realism(std::span<const EvaluatorVote> votes) {
  check_panel(votes);
  std::array<int, 3> ratings{votes[0].realism_likert, votes[1].realism_likert, votes[2].realism_likert};
  std::sort(ratings.begin(), ratings.end());
  return ratings[1];
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::CorrectAgreement: return "CorrectAgreement";
    case Scenario::MachineCorrected: return "MachineCorrected";
    case Scenario::SelfCorrected: return "SelfCorrected";
    case Scenario::NoChangeInitialCorrect: return "NoChangeInitialCorrect";
    case Scenario::SelfMisled: return "SelfMisled";
    case Scenario::MachineMisled: return "MachineMisled";
    case Scenario::NoChangeInitialWrong: return "NoChangeInitialWrong";
    case Scenario::IncorrectAgreement: return "IncorrectAgreement";
  }
  return "Unknown";
}

Scenario scenario_for(bool initial_correct, bool machine_correct, bool final_correct) {
  for (std::size_t i = 0; i < kTriples.size(); ++i) {
    const auto& t = kTriples[i];
    if (t[0] == initial_correct && t[1] == machine_correct && t[2] == final_correct) {
      return kAllScenarios[i];
    }
  }
  return Scenario::IncorrectAgreement;  // unreachable: all 8 triples are listed
}

DecisionScenario triple_for(Scenario scenario) {
  const auto& t = kTriples[static_cast<std::size_t>(scenario)];
  return {t[0], t[1], t[2], scenario};
}

DecisionScenario classify_scenario(Label initial, Label machine, Label final_decision, Label truth) {
  DecisionScenario s;
  s.initial_correct = initial == truth;
  s.machine_correct = machine == truth;
  s.final_correct = final_decision == truth;
  s.name = scenario_for(s.initial_correct, s.machine_correct, s.final_correct);
  return s;
}

ScenarioCounts count_scenarios(std::span<const DecisionScenario> records) {
  ScenarioCounts counts{};
  for (const auto& r : records) ++counts[static_cast<std::size_t>(r.name)];
  return counts;
}

InteractionRates interaction_rates(const ScenarioCounts& counts) {
  auto ratio = [](std::size_t num, std::size_t other) -> std::optional<double> {
    if (num + other == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(num + other);
  };
  auto at = [&](Scenario s) { return counts[static_cast<std::size_t>(s)]; };
  InteractionRates rates;
  rates.machine_correction_rate =
      ratio(at(Scenario::MachineCorrected), at(Scenario::NoChangeInitialWrong));
  rates.machine_misled_rate = ratio(at(Scenario::MachineMisled), at(Scenario::NoChangeInitialCorrect));
  return rates;
}

InteractionRates interaction_rates(std::span<const DecisionScenario> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no decision records");
  return interaction_rates(count_scenarios(records));
}

}  // namespace pitch::review
