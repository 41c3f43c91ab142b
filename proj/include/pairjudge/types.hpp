#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pairjudge {

/// How a candidate response's generation ended.
enum class FinishState { Stopped, Truncated, Unknown };

const char* to_string(FinishState state);
std::optional<FinishState> finish_state_from_string(std::string_view name);

/// Prompt plus any attached image references. Images are opaque strings
/// (URIs or content digests); the engine never decodes pixels, it only
/// needs stable identity for grouping and caching.
struct PromptContext {
    std::string prompt_text;
    std::vector<std::string> image_refs;
    std::map<std::string, std::string> metadata;
};

struct CandidateResponse {
    std::string response_id;
    std::string text;
    FinishState finish_state = FinishState::Unknown;
};

/// Which response the annotator preferred. Numeric values match the
/// dataset convention (1 = first response, 2 = second).
enum class PreferredLabel : int { First = 1, Second = 2 };

/// One annotated preference pair.
struct PreferenceRecord {
    std::string record_id;  // stable per source line, for joining outputs back
    PromptContext context;
    CandidateResponse response_a;
    CandidateResponse response_b;
    PreferredLabel preferred_label = PreferredLabel::First;
    std::optional<double> annotated_score_a;
    std::optional<double> annotated_score_b;
};

/// The two scalar scores a judge assigns to an ordered response pair,
/// in judge-scale units (nominally 1-10, not clamped here).
struct ScorePair {
    double score_1 = 0.0;
    double score_2 = 0.0;

    bool operator==(const ScorePair&) const = default;
};

/// Ordered (first_id, second_id) pair of response ids; slot order matters
/// because judges score the two slots separately.
using OrderedPair = std::pair<std::string, std::string>;

}  // namespace pairjudge
