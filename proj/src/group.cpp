#include "pairjudge/group.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include "pairjudge/digest.hpp"

namespace pairjudge {

const char* to_string(OrderingMode mode) {
    switch (mode) {
        case OrderingMode::BothOrders:
            return "both";
        case OrderingMode::SingleOrder:
            return "single";
    }
    return "both";
}

OrderingMode ordering_mode_from_string(std::string_view name) {
    if (name == "both") {
        return OrderingMode::BothOrders;
    }
    if (name == "single") {
        return OrderingMode::SingleOrder;
    }
    throw std::invalid_argument("unknown ordering mode '" + std::string(name) +
                                "' (expected 'both' or 'single')");
}

std::string normalize_question(std::string_view prompt_text) {
    constexpr std::string_view kSpace = " \t\r\n\f\v";
    const std::size_t begin = prompt_text.find_first_not_of(kSpace);
    if (begin == std::string_view::npos) {
        return {};
    }
    const std::size_t end = prompt_text.find_last_not_of(kSpace);
    return std::string(prompt_text.substr(begin, end - begin + 1));
}

GroupKey make_group_key(const PromptContext& context) {
    std::vector<std::string_view> refs(context.image_refs.begin(), context.image_refs.end());
    return {
        sha256_hex(normalize_question(context.prompt_text)),
        digest_fields(std::span<const std::string_view>(refs)),
    };
}

std::vector<GroupEntry> form_groups(std::span<const Rollout> rollouts) {
    std::vector<GroupEntry> groups;
    std::map<GroupKey, std::size_t> index_by_key;
    for (const Rollout& rollout : rollouts) {
        GroupKey key = make_group_key(rollout.context);
        auto [it, inserted] = index_by_key.emplace(std::move(key), groups.size());
        if (inserted) {
            groups.push_back({rollout.context, rollout.responses});
        } else {
            auto& responses = groups[it->second].responses;
            responses.insert(responses.end(), rollout.responses.begin(),
                             rollout.responses.end());
        }
    }
    return groups;
}

ComparisonPlan plan_comparisons(const GroupEntry& entry, OrderingMode mode,
                                const CompletenessPredicate& is_complete) {
    ComparisonPlan plan;
    plan.mode = mode;
    std::set<std::string_view> seen_ids;
    for (std::size_t i = 0; i < entry.responses.size(); ++i) {
        if (!is_complete(entry.responses[i])) {
            continue;
        }
        if (!seen_ids.insert(entry.responses[i].response_id).second) {
            throw std::invalid_argument("duplicate response id '" +
                                        entry.responses[i].response_id +
                                        "' among complete responses of one group");
        }
        plan.complete_indices.push_back(i);
    }
    const auto& idx = plan.complete_indices;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            plan.tasks.push_back({idx[a], idx[b]});
            if (mode == OrderingMode::BothOrders) {
                plan.tasks.push_back({idx[b], idx[a]});
            }
        }
    }
    return plan;
}

std::vector<GroupedScore> aggregate_scores(const GroupEntry& entry, const ComparisonPlan& plan,
                                           const std::map<OrderedPair, JudgeVerdict>& verdicts) {
    std::vector<double> sums(entry.responses.size(), 0.0);
    std::vector<int> counts(entry.responses.size(), 0);

    for (const ComparisonTask& task : plan.tasks) {
        const auto& first = entry.responses[task.first_index];
        const auto& second = entry.responses[task.second_index];
        auto it = verdicts.find({first.response_id, second.response_id});
        if (it == verdicts.end()) {
            continue;
        }
        auto scores = verdict_scores(it->second);
        if (!scores) {
            continue;
        }
        sums[task.first_index] += scores->score_1;
        counts[task.first_index] += 1;
        sums[task.second_index] += scores->score_2;
        counts[task.second_index] += 1;
    }

    std::set<std::size_t> complete(plan.complete_indices.begin(), plan.complete_indices.end());
    std::vector<GroupedScore> out;
    out.reserve(entry.responses.size());
    for (std::size_t i = 0; i < entry.responses.size(); ++i) {
        GroupedScore gs;
        gs.response_id = entry.responses[i].response_id;
        gs.complete = complete.contains(i);
        gs.comparisons_used = counts[i];
        gs.score = counts[i] > 0 ? sums[i] / counts[i] : 0.0;
        out.push_back(std::move(gs));
    }
    return out;
}

std::vector<double> normalize_advantages(std::span<const double> scores) {
    if (scores.size() < 2) {
        throw GroupTooSmallError("advantage normalization needs at least two scores, got " +
                                 std::to_string(scores.size()));
    }
    double mean = 0.0;
    for (double s : scores) {
        mean += s;
    }
    mean /= static_cast<double>(scores.size());

    double var = 0.0;
    for (double s : scores) {
        var += (s - mean) * (s - mean);
    }
    var /= static_cast<double>(scores.size());
    const double stddev = std::sqrt(var);

    std::vector<double> out(scores.size(), 0.0);
    if (stddev == 0.0) {
        return out;  // constant group: no preference signal
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = (scores[i] - mean) / stddev;
    }
    return out;
}

}  // namespace pairjudge
