#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pairjudge/types.hpp"

namespace pairjudge {

enum class ParseErrorKind { MissingBox, NotNumeric, WrongCount };

const char* to_string(ParseErrorKind kind);

struct ParseError {
    ParseErrorKind kind = ParseErrorKind::MissingBox;
    int found_count = 0;  // meaningful for WrongCount
    std::string detail;

    bool operator==(const ParseError& other) const {
        return kind == other.kind && found_count == other.found_count;
    }
};

/// Content of the last `\boxed{...}` span in `text`, scanned with balanced
/// braces. Absent when no `\boxed{` occurs, or when the last occurrence never
/// closes (even if an earlier span would have been well-formed — the released
/// extraction helper behaves the same way).
std::optional<std::string> extract_boxed(std::string_view text);

using ParseResult = std::variant<ScorePair, ParseError>;

/// Scores from the boxed span: comma-split, whitespace-trimmed, empty
/// segments skipped. Every remaining segment must parse as a finite real and
/// the final count must equal `expected_count`.
std::variant<std::vector<double>, ParseError> parse_score_list(std::string_view text,
                                                               int expected_count);

/// Two-score form of parse_score_list; the common case for pairwise judges.
ParseResult parse_scores(std::string_view text, int expected_count = 2);

/// Structured view of one judge output following the three-line format.
struct ParsedVerdict {
    std::string principles_text;  // content before "Analysis:"
    std::string analysis_text;    // between "Analysis:" and "Scores:"
    ScorePair scores;
};

/// Section split plus score parse. Score failures win: the result is a
/// ParseError even when the section markers are present.
std::variant<ParsedVerdict, ParseError> parse_verdict_text(std::string_view raw_text);

/// Collapses a structured verdict-parse outcome to its score outcome, for
/// callers that only need the pair (reward computation, aggregation).
inline ParseResult to_parse_result(const std::variant<ParsedVerdict, ParseError>& parsed) {
    if (const auto* verdict = std::get_if<ParsedVerdict>(&parsed)) {
        return verdict->scores;
    }
    return std::get<ParseError>(parsed);
}

/// Completeness classification for candidate responses. Truncated responses
/// are never complete; for Unknown finish states the heuristic accepts
/// non-empty text ending in sentence-terminating punctuation or a closing
/// bracket (the final UTF-8 code point is examined, so CJK stops count).
bool is_complete_response(const CandidateResponse& candidate);

/// Pluggable completeness check; defaults to is_complete_response everywhere.
using CompletenessPredicate = std::function<bool(const CandidateResponse&)>;

}  // namespace pairjudge
