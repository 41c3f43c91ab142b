#include "pairjudge/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace pairjudge {

const char* to_string(RewardMode mode) {
    return mode == RewardMode::SignedUnit ? "signed" : "binary";
}

const char* to_string(RewardReason reason) {
    switch (reason) {
        case RewardReason::CorrectOrder: return "correct_order";
        case RewardReason::WrongOrder: return "wrong_order";
        case RewardReason::Tie: return "tie";
        case RewardReason::ParseFailure: return "parse_failure";
    }
    return "unknown";
}

std::optional<RewardMode> reward_mode_from_string(std::string_view name) {
    if (name == "signed" || name == "signed_unit") return RewardMode::SignedUnit;
    if (name == "binary" || name == "binary_code") return RewardMode::BinaryCode;
    return std::nullopt;
}

std::optional<RewardReason> reward_reason_from_string(std::string_view name) {
    if (name == "correct_order") return RewardReason::CorrectOrder;
    if (name == "wrong_order") return RewardReason::WrongOrder;
    if (name == "tie") return RewardReason::Tie;
    if (name == "parse_failure") return RewardReason::ParseFailure;
    return std::nullopt;
}

TrainingReward grm_training_reward(const ParseResult& parse_result, PreferredLabel label,
                                   RewardMode mode) {
    const double miss = mode == RewardMode::SignedUnit ? -1.0 : 0.0;
    if (std::holds_alternative<ParseError>(parse_result)) {
        return {miss, RewardReason::ParseFailure};
    }
    const ScorePair& scores = std::get<ScorePair>(parse_result);
    const bool correct = (label == PreferredLabel::Second && scores.score_2 > scores.score_1) ||
                         (label == PreferredLabel::First && scores.score_1 > scores.score_2);
    if (correct) {
        return {1.0, RewardReason::CorrectOrder};
    }
    const RewardReason reason =
        scores.score_1 == scores.score_2 ? RewardReason::Tie : RewardReason::WrongOrder;
    return {miss, reason};
}

double bt_nll(std::span<const double> score_diffs) {
    if (score_diffs.empty()) {
        throw std::invalid_argument("bt_nll: empty input");
    }
    double total = 0.0;
    for (double d : score_diffs) {
        if (!std::isfinite(d)) {
            throw std::invalid_argument("bt_nll: non-finite score difference");
        }
        // softplus(-d), split by sign to avoid overflow
        total += d >= 0.0 ? std::log1p(std::exp(-d)) : -d + std::log1p(std::exp(d));
    }
    return total / static_cast<double>(score_diffs.size());
}

}  // namespace pairjudge
