#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairjudge/dataset.hpp"
#include "pairjudge/judge.hpp"
#include "pairjudge/types.hpp"
#include "pairjudge/verdict.hpp"

namespace pairjudge {

/// BothOrders issues every ordered pair (i,j) and (j,i), averaging away
/// slot-position bias at the cost of twice the calls; SingleOrder issues each
/// unordered pair once, in index order.
enum class OrderingMode { BothOrders, SingleOrder };

const char* to_string(OrderingMode mode);
OrderingMode ordering_mode_from_string(std::string_view name);

/// Identity of a rollout group: responses compare against each other only
/// when they answer the same question about the same images.
struct GroupKey {
    std::string question_digest;
    std::string image_digest;

    auto operator<=>(const GroupKey&) const = default;
};

/// Canonical question text for grouping: outer whitespace trimmed, interior
/// bytes untouched (grouping must not paper over real prompt differences).
std::string normalize_question(std::string_view prompt_text);

GroupKey make_group_key(const PromptContext& context);

/// One group of responses to the same prompt.
struct GroupEntry {
    PromptContext context;
    std::vector<CandidateResponse> responses;
};

/// Groups rollouts by key. Groups appear in first-seen order; responses of
/// rollouts sharing a key are concatenated in input order under the
/// first-seen context.
std::vector<GroupEntry> form_groups(std::span<const Rollout> rollouts);

/// One pairwise judge call to make: slot indices into GroupEntry::responses.
struct ComparisonTask {
    std::size_t first_index;
    std::size_t second_index;
};

struct ComparisonPlan {
    OrderingMode mode = OrderingMode::BothOrders;
    std::vector<std::size_t> complete_indices;  // responses that passed the filter
    std::vector<ComparisonTask> tasks;
};

/// Plans the comparisons for one group. Incomplete responses never enter a
/// pair. SingleOrder yields each unordered pair once ((i,j) with i < j);
/// BothOrders yields both orders, adjacent in the task list. Response ids
/// must be unique among the complete responses (they key the results).
ComparisonPlan plan_comparisons(const GroupEntry& entry,
                                OrderingMode mode = OrderingMode::BothOrders,
                                const CompletenessPredicate& is_complete = is_complete_response);

/// Per-response outcome of grouped scoring. `comparisons_used` counts the
/// verdicts that actually reached this response's average.
struct GroupedScore {
    std::string response_id;
    double score = 0.0;
    int comparisons_used = 0;
    bool complete = false;
};

/// Averages each response's slot scores across the verdicts, in response
/// order. A task whose verdict is absent from `verdicts` or failed to parse
/// contributes to nobody — neither numerator nor denominator. Responses with
/// no usable comparison (incomplete, or every verdict lost) score 0.
std::vector<GroupedScore> aggregate_scores(const GroupEntry& entry, const ComparisonPlan& plan,
                                           const std::map<OrderedPair, JudgeVerdict>& verdicts);

class GroupTooSmallError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Group-relative advantages: (s - mean) / population standard deviation.
/// A constant group (zero deviation) maps to all zeros; fewer than two
/// scores cannot be normalized and raises GroupTooSmallError.
std::vector<double> normalize_advantages(std::span<const double> scores);

}  // namespace pairjudge
