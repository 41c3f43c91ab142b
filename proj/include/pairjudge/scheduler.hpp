#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pairjudge/group.hpp"
#include "pairjudge/judge.hpp"

namespace pairjudge {

/// MarkMissing drops a comparison that exhausts its attempts and carries on;
/// AbortRun stops the whole plan on the first such comparison.
enum class FailMode { MarkMissing, AbortRun };

const char* to_string(FailMode mode);
FailMode fail_mode_from_string(std::string_view name);

struct ExecutionPolicy {
    int max_in_flight = 4;
    int max_attempts = 3;
    int initial_backoff_ms = 10;
    double backoff_multiplier = 2.0;
    FailMode fail_mode = FailMode::MarkMissing;
    std::uint64_t retry_seed = 0;  // keys the per-comparison backoff jitter
};

struct ExecutionCounters {
    std::int64_t dispatched = 0;  // comparisons that got at least one attempt
    std::int64_t cache_hits = 0;
    std::int64_t retries = 0;  // attempts beyond the first, summed
    std::int64_t failures = 0;  // comparisons that exhausted every attempt
};

/// Result of one request in a batch. `verdict` is empty when the request
/// failed every attempt or was never started (after an abort).
struct RequestOutcome {
    std::optional<JudgeVerdict> verdict;
    int attempt_count = 0;
    std::string error;  // final failure message, empty on success
};

struct BatchResult {
    std::vector<RequestOutcome> outcomes;  // input order
    ExecutionCounters counters;
    bool aborted = false;
    std::string abort_detail;
};

/// Runs the requests against the backend with at most
/// policy.max_in_flight concurrent compare() calls. Each request retries
/// retryable failures (JudgeCallError) up to max_attempts with full-jitter
/// exponential backoff, deterministic per (retry_seed, request digest).
/// Non-retryable exceptions propagate after the pool drains. Outcome slots
/// follow input order, so results are independent of scheduling order.
BatchResult run_requests(std::span<const JudgeRequest> requests, JudgeBackend& backend,
                         const ExecutionPolicy& policy = {});

/// Everything one grouped-scoring pass produced. Verdicts are keyed by the
/// ordered (first id, second id) pair; `missing` lists planned comparisons
/// with no verdict.
struct ExecutionReport {
    std::map<OrderedPair, JudgeVerdict> verdicts;
    std::set<OrderedPair> missing;
    ExecutionCounters counters;
    bool aborted = false;
    std::string abort_detail;
};

class PlanAbortedError : public std::runtime_error {
public:
    PlanAbortedError(const std::string& what, ExecutionReport partial);
    const ExecutionReport& partial_report() const { return partial_; }

private:
    ExecutionReport partial_;
};

/// Executes one group's comparison plan. Under FailMode::AbortRun a
/// permanent failure raises PlanAbortedError carrying the partial report.
ExecutionReport execute_plan(const GroupEntry& entry, const ComparisonPlan& plan,
                             JudgeBackend& backend, const ExecutionPolicy& policy = {},
                             std::string_view judge_id = "local");

/// Executes many plans through one worker pool (entries and plans are
/// parallel arrays). Failures stay contained: under AbortRun only the
/// affected group's report is flagged aborted; the others complete normally.
std::vector<ExecutionReport> execute_many(std::span<const GroupEntry> entries,
                                          std::span<const ComparisonPlan> plans,
                                          JudgeBackend& backend,
                                          const ExecutionPolicy& policy = {},
                                          std::string_view judge_id = "local");

/// Deterministic serialization for report comparison and goldens. Covers the
/// decision-relevant content — pairs, raw text, parse outcome, attempt
/// counts, missing set, dispatch/retry/failure counters — and excludes
/// wall-clock latency and cache-hit bookkeeping, which may differ between
/// otherwise identical runs.
nlohmann::json canonical_json(const ExecutionReport& report);

}  // namespace pairjudge
