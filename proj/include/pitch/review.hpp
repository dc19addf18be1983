#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pitch/common.hpp"

namespace pitch::review {

enum class EvaluatorRole { NativeMonolingual, NonNativeMultilingual, TieBreaker };

struct EvaluatorVote {
  std::string evaluator_id;
  EvaluatorRole role = EvaluatorRole::NativeMonolingual;
  int compliant = 1;
  int realism_likert = 5;
};

/// Majority of the three panel compliance bits. Throws InvalidPanel unless
/// there are exactly three votes with distinct roles.
int majority_compliance(std::span<const EvaluatorVote> votes);

/// Median of the three panel Likert ratings.
int aggregate_realism(std::span<const EvaluatorVote> votes);

enum class Scenario {
  CorrectAgreement,
  MachineCorrected,
  SelfCorrected,
  NoChangeInitialCorrect,
  SelfMisled,
  MachineMisled,
  NoChangeInitialWrong,
  IncorrectAgreement,
};

inline constexpr std::array<Scenario, 8> kAllScenarios = {
    Scenario::CorrectAgreement,      Scenario::MachineCorrected,     Scenario::SelfCorrected,
    Scenario::NoChangeInitialCorrect, Scenario::SelfMisled,           Scenario::MachineMisled,
    Scenario::NoChangeInitialWrong,  Scenario::IncorrectAgreement,
};

std::string_view to_string(Scenario scenario);

struct DecisionScenario {
  bool initial_correct = false;
  bool machine_correct = false;
  bool final_correct = false;
  Scenario name = Scenario::CorrectAgreement;
};

/// Scenario for a correctness triple (initial, machine, final).
Scenario scenario_for(bool initial_correct, bool machine_correct, bool final_correct);

/// Inverse of scenario_for.
DecisionScenario triple_for(Scenario scenario);

DecisionScenario classify_scenario(Label initial, Label machine, Label final_decision, Label truth);

using ScenarioCounts = std::array<std::size_t, 8>;

ScenarioCounts count_scenarios(std::span<const DecisionScenario> records);

struct InteractionRates {
  /// MachineCorrected / (MachineCorrected + NoChangeInitialWrong); empty when undefined.
  std::optional<double> machine_correction_rate;
  /// MachineMisled / (MachineMisled + NoChangeInitialCorrect); empty when undefined.
  std::optional<double> machine_misled_rate;
};

InteractionRates interaction_rates(const ScenarioCounts& counts);
InteractionRates interaction_rates(std::span<const DecisionScenario> records);

}  // namespace pitch::review
