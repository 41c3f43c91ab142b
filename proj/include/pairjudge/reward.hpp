#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "pairjudge/types.hpp"
#include "pairjudge/verdict.hpp"

namespace pairjudge {

/// Two reward conventions for the same comparison rule.
///
/// BinaryCode reproduces the released reward function exactly: 1 for a
/// correctly ordered strict score pair, 0 for everything else (wrong order,
/// tie, unparseable output). SignedUnit is the {+1, -1} formulation: +1 for
/// correct strict ordering, -1 otherwise, with parse failures also mapped to
/// -1 so malformed output is never rewarded. The two differ only in range;
/// see docs/scoring-modes.md for why both exist.
enum class RewardMode { SignedUnit, BinaryCode };

enum class RewardReason { CorrectOrder, WrongOrder, Tie, ParseFailure };

const char* to_string(RewardMode mode);
const char* to_string(RewardReason reason);
std::optional<RewardMode> reward_mode_from_string(std::string_view name);
std::optional<RewardReason> reward_reason_from_string(std::string_view name);

struct TrainingReward {
    double value = 0.0;
    RewardReason reason = RewardReason::ParseFailure;

    bool operator==(const TrainingReward&) const = default;
};

/// Reward for one judged preference pair given the parse result of the judge
/// output and the annotated label. All failure paths are rewards, never
/// errors: the reward signal is what penalizes format violations.
TrainingReward grm_training_reward(const ParseResult& parse_result, PreferredLabel label,
                                   RewardMode mode = RewardMode::BinaryCode);

/// Mean Bradley-Terry negative log-likelihood over score differences
/// d = s_preferred - s_dispreferred, computed in the overflow-safe
/// softplus form log(1 + exp(-d)).
double bt_nll(std::span<const double> score_diffs);

}  // namespace pairjudge
