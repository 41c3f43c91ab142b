#include "pairjudge/verdict.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pairjudge {

namespace {

constexpr std::string_view kBoxedOpen = "\\boxed{";

std::string_view trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

/// Strict finite-real parse of a whole segment. A single leading '+' is
/// accepted; trailing characters are not.
std::optional<double> parse_real(std::string_view segment) {
    if (!segment.empty() && segment.front() == '+') segment.remove_prefix(1);
    if (segment.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = segment.data();
    const char* end = begin + segment.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

/// Last UTF-8 code point of `text`, or 0 when empty/invalid.
std::uint32_t last_code_point(std::string_view text) {
    if (text.empty()) return 0;
    std::size_t i = text.size();
    int continuations = 0;
    while (i > 0) {
        unsigned char byte = static_cast<unsigned char>(text[--i]);
        if ((byte & 0xc0) != 0x80) {
            if (byte < 0x80) return byte;
            std::uint32_t cp = 0;
            int expect = 0;
            if ((byte & 0xe0) == 0xc0) { cp = byte & 0x1f; expect = 1; }
            else if ((byte & 0xf0) == 0xe0) { cp = byte & 0x0f; expect = 2; }
            else if ((byte & 0xf8) == 0xf0) { cp = byte & 0x07; expect = 3; }
            else return 0;
            if (expect != continuations) return 0;
            for (std::size_t j = i + 1; j < text.size(); ++j) {
                cp = (cp << 6) | (static_cast<unsigned char>(text[j]) & 0x3f);
            }
            return cp;
        }
        if (++continuations > 3) return 0;
    }
    return 0;
}

bool is_terminal_code_point(std::uint32_t cp) {
    switch (cp) {
        case '.': case '!': case '?':
        case ')': case ']': case '}':
        case '"': case '\'':
        case 0x3002:  // 。
        case 0xff01:  // ！
        case 0xff1f:  // ？
        case 0x2019:  // ’
        case 0x201d:  // ”
            return true;
        default:
            return false;
    }
}

}  // namespace

const char* to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::MissingBox: return "missing_box";
        case ParseErrorKind::NotNumeric: return "not_numeric";
        case ParseErrorKind::WrongCount: return "wrong_count";
    }
    return "unknown";
}

std::optional<std::string> extract_boxed(std::string_view text) {
    std::size_t start = text.rfind(kBoxedOpen);
    if (start == std::string_view::npos) return std::nullopt;
    std::string_view content = text.substr(start + kBoxedOpen.size());
    int depth = 0;
    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (depth == 0) return std::string(content.substr(0, i));
            --depth;
        }
    }
    return std::nullopt;  // last span never closes
}

std::variant<std::vector<double>, ParseError> parse_score_list(std::string_view text,
                                                               int expected_count) {
    auto boxed = extract_boxed(text);
    if (!boxed.has_value()) {
        return ParseError{ParseErrorKind::MissingBox, 0, "no \\boxed{...} span"};
    }
    std::vector<double> scores;
    std::string_view rest = *boxed;
    while (true) {
        std::size_t comma = rest.find(',');
        std::string_view segment = trim(rest.substr(0, comma));
        if (!segment.empty()) {
            auto value = parse_real(segment);
            if (!value.has_value()) {
                return ParseError{ParseErrorKind::NotNumeric, 0,
                                  "segment '" + std::string(segment) + "'"};
            }
            scores.push_back(*value);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (static_cast<int>(scores.size()) != expected_count) {
        return ParseError{ParseErrorKind::WrongCount, static_cast<int>(scores.size()),
                          "expected " + std::to_string(expected_count)};
    }
    return scores;
}

ParseResult parse_scores(std::string_view text, int expected_count) {
    if (expected_count != 2) {
        throw std::invalid_argument("parse_scores returns a pair; use parse_score_list for other counts");
    }
    auto listed = parse_score_list(text, expected_count);
    if (std::holds_alternative<ParseError>(listed)) {
        return std::get<ParseError>(listed);
    }
    const auto& values = std::get<std::vector<double>>(listed);
    return ScorePair{values[0], values[1]};
}

std::variant<ParsedVerdict, ParseError> parse_verdict_text(std::string_view raw_text) {
    ParseResult scores = parse_scores(raw_text, 2);
    if (std::holds_alternative<ParseError>(scores)) {
        return std::get<ParseError>(scores);
    }
    ParsedVerdict verdict;
    verdict.scores = std::get<ScorePair>(scores);
    constexpr std::string_view kAnalysis = "Analysis:";
    constexpr std::string_view kScores = "Scores:";
    std::size_t analysis_pos = raw_text.find(kAnalysis);
    if (analysis_pos == std::string_view::npos) {
        verdict.analysis_text.clear();
        verdict.principles_text = std::string(trim(raw_text.substr(0, raw_text.find(kScores))));
        return verdict;
    }
    verdict.principles_text = std::string(trim(raw_text.substr(0, analysis_pos)));
    std::string_view after = raw_text.substr(analysis_pos + kAnalysis.size());
    std::size_t scores_pos = after.find(kScores);
    verdict.analysis_text = std::string(trim(after.substr(0, scores_pos)));
    return verdict;
}

bool is_complete_response(const CandidateResponse& candidate) {
    switch (candidate.finish_state) {
        case FinishState::Stopped:
            return true;
        case FinishState::Truncated:
            return false;
        case FinishState::Unknown:
            break;
    }
    std::string_view text = trim(candidate.text);
    if (text.empty()) return false;
    return is_terminal_code_point(last_code_point(text));
}

}  // namespace pairjudge
