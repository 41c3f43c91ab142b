#include "pairjudge/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <utility>

#include "pairjudge/digest.hpp"
#include "pairjudge/rng.hpp"

namespace pairjudge {

namespace {

/// Full-jitter exponential backoff: uniform draw over [0, cap) where cap
/// doubles (by backoff_multiplier) per failed attempt. The draw is keyed by
/// (retry_seed, request digest, attempt), so a rerun sleeps the same spans.
std::chrono::duration<double, std::milli> backoff_delay(const ExecutionPolicy& policy,
                                                        const std::string& digest,
                                                        int failed_attempt) {
    const double cap = static_cast<double>(policy.initial_backoff_ms) *
                       std::pow(policy.backoff_multiplier, failed_attempt - 1);
    RandomStream stream = RandomStream::from_label(
        policy.retry_seed, digest + ":retry" + std::to_string(failed_attempt));
    return std::chrono::duration<double, std::milli>(cap * stream.next_unit());
}

void validate(const ExecutionPolicy& policy) {
    if (policy.max_in_flight < 1) {
        throw std::invalid_argument("max_in_flight must be at least 1");
    }
    if (policy.max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be at least 1");
    }
    if (policy.initial_backoff_ms < 0 || policy.backoff_multiplier < 1.0) {
        throw std::invalid_argument("backoff must be non-negative and non-shrinking");
    }
}

std::vector<JudgeRequest> build_requests(const GroupEntry& entry, const ComparisonPlan& plan,
                                         std::string_view judge_id) {
    std::vector<JudgeRequest> requests;
    requests.reserve(plan.tasks.size());
    for (const ComparisonTask& task : plan.tasks) {
        JudgeRequest request;
        request.context = entry.context;
        request.first = entry.responses[task.first_index];
        request.second = entry.responses[task.second_index];
        request.judge_id = std::string(judge_id);
        requests.push_back(std::move(request));
    }
    return requests;
}

/// Builds one group's report from its slice of batch outcomes. Counters are
/// recomputed from the outcomes so per-group reports stay consistent with
/// the pooled run that produced them.
ExecutionReport assemble_report(const GroupEntry& entry, const ComparisonPlan& plan,
                                std::span<const RequestOutcome> outcomes, FailMode fail_mode) {
    ExecutionReport report;
    for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
        const ComparisonTask& task = plan.tasks[i];
        OrderedPair pair{entry.responses[task.first_index].response_id,
                         entry.responses[task.second_index].response_id};
        const RequestOutcome& outcome = outcomes[i];
        if (outcome.attempt_count > 0) {
            report.counters.dispatched += 1;
            report.counters.retries += outcome.attempt_count - 1;
        }
        if (outcome.verdict) {
            if (outcome.verdict->cache_hit) {
                report.counters.cache_hits += 1;
            }
            report.verdicts.emplace(std::move(pair), *outcome.verdict);
            continue;
        }
        if (outcome.attempt_count > 0) {
            report.counters.failures += 1;
            if (fail_mode == FailMode::AbortRun && !report.aborted) {
                report.aborted = true;
                report.abort_detail = "comparison (" + pair.first + ", " + pair.second +
                                      ") failed after " + std::to_string(outcome.attempt_count) +
                                      " attempts: " + outcome.error;
            }
        }
        report.missing.insert(std::move(pair));
    }
    return report;
}

}  // namespace

const char* to_string(FailMode mode) {
    switch (mode) {
        case FailMode::MarkMissing:
            return "mark-missing";
        case FailMode::AbortRun:
            return "abort";
    }
    return "mark-missing";
}

FailMode fail_mode_from_string(std::string_view name) {
    if (name == "mark-missing") {
        return FailMode::MarkMissing;
    }
    if (name == "abort") {
        return FailMode::AbortRun;
    }
    throw std::invalid_argument("unknown fail mode '" + std::string(name) +
                                "' (expected 'mark-missing' or 'abort')");
}

BatchResult run_requests(std::span<const JudgeRequest> requests, JudgeBackend& backend,
                         const ExecutionPolicy& policy) {
    validate(policy);

    BatchResult result;
    result.outcomes.resize(requests.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex fail_mutex;
    std::exception_ptr fatal;

    auto worker = [&] {
        while (!stop.load(std::memory_order_acquire)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= requests.size()) {
                return;
            }
            const JudgeRequest& request = requests[i];
            RequestOutcome& slot = result.outcomes[i];
            std::string digest;  // jitter key; only needed on the retry path
            for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
                slot.attempt_count = attempt;
                try {
                    JudgeVerdict verdict = backend.compare(request);
                    verdict.attempt_count = attempt;
                    slot.verdict = std::move(verdict);
                    slot.error.clear();
                    break;
                } catch (const JudgeCallError& e) {
                    slot.error = e.what();
                    if (attempt < policy.max_attempts) {
                        if (digest.empty()) {
                            digest = request_digest(request);
                        }
                        std::this_thread::sleep_for(backoff_delay(policy, digest, attempt));
                        continue;
                    }
                    if (policy.fail_mode == FailMode::AbortRun) {
                        std::lock_guard lock(fail_mutex);
                        if (!result.aborted) {
                            result.aborted = true;
                            result.abort_detail = "comparison failed after " +
                                                  std::to_string(attempt) +
                                                  " attempts: " + slot.error;
                        }
                        stop.store(true, std::memory_order_release);
                    }
                } catch (...) {
                    // Non-retryable (logic errors and the like): drain the
                    // pool, then rethrow to the caller.
                    std::lock_guard lock(fail_mutex);
                    if (!fatal) {
                        fatal = std::current_exception();
                    }
                    stop.store(true, std::memory_order_release);
                    return;
                }
            }
        }
    };

    const std::size_t pool_size =
        std::min<std::size_t>(static_cast<std::size_t>(policy.max_in_flight), requests.size());
    if (pool_size <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(pool_size);
        for (std::size_t t = 0; t < pool_size; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    if (fatal) {
        std::rethrow_exception(fatal);
    }

    for (const RequestOutcome& outcome : result.outcomes) {
        if (outcome.attempt_count == 0) {
            continue;  // never started (pool stopped first)
        }
        result.counters.dispatched += 1;
        result.counters.retries += outcome.attempt_count - 1;
        if (outcome.verdict) {
            if (outcome.verdict->cache_hit) {
                result.counters.cache_hits += 1;
            }
        } else {
            result.counters.failures += 1;
        }
    }
    return result;
}

PlanAbortedError::PlanAbortedError(const std::string& what, ExecutionReport partial)
    : std::runtime_error(what), partial_(std::move(partial)) {}

ExecutionReport execute_plan(const GroupEntry& entry, const ComparisonPlan& plan,
                             JudgeBackend& backend, const ExecutionPolicy& policy,
                             std::string_view judge_id) {
    const std::vector<JudgeRequest> requests = build_requests(entry, plan, judge_id);
    BatchResult batch = run_requests(requests, backend, policy);
    // assemble_report re-derives the abort flag from the outcomes, picking
    // the first failed task in plan order (deterministic, unlike the racy
    // "which worker tripped first" detail inside batch).
    ExecutionReport report = assemble_report(entry, plan, batch.outcomes, policy.fail_mode);
    if (report.aborted) {
        std::string what = "plan aborted: " + report.abort_detail;
        throw PlanAbortedError(what, std::move(report));
    }
    return report;
}

std::vector<ExecutionReport> execute_many(std::span<const GroupEntry> entries,
                                          std::span<const ComparisonPlan> plans,
                                          JudgeBackend& backend, const ExecutionPolicy& policy,
                                          std::string_view judge_id) {
    if (entries.size() != plans.size()) {
        throw std::invalid_argument("execute_many needs one plan per group entry");
    }

    std::vector<JudgeRequest> requests;
    std::vector<std::size_t> offsets;  // start of each group's slice
    offsets.reserve(entries.size() + 1);
    for (std::size_t g = 0; g < entries.size(); ++g) {
        offsets.push_back(requests.size());
        std::vector<JudgeRequest> group_requests = build_requests(entries[g], plans[g], judge_id);
        std::move(group_requests.begin(), group_requests.end(), std::back_inserter(requests));
    }
    offsets.push_back(requests.size());

    // The pooled run always marks failures missing; abort semantics are
    // applied per group afterwards so one bad group cannot starve the rest.
    ExecutionPolicy pooled = policy;
    pooled.fail_mode = FailMode::MarkMissing;
    BatchResult batch = run_requests(requests, backend, pooled);

    std::vector<ExecutionReport> reports;
    reports.reserve(entries.size());
    for (std::size_t g = 0; g < entries.size(); ++g) {
        std::span<const RequestOutcome> slice(batch.outcomes.data() + offsets[g],
                                              offsets[g + 1] - offsets[g]);
        reports.push_back(assemble_report(entries[g], plans[g], slice, policy.fail_mode));
    }
    return reports;
}

nlohmann::json canonical_json(const ExecutionReport& report) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& [pair, verdict] : report.verdicts) {
        nlohmann::json item = {
            {"first", pair.first},
            {"second", pair.second},
            {"raw_text", verdict.raw_text},
            {"attempt_count", verdict.attempt_count},
        };
        if (const auto* parsed = std::get_if<ParsedVerdict>(&verdict.parsed)) {
            item["scores"] = {parsed->scores.score_1, parsed->scores.score_2};
        } else {
            const auto& error = std::get<ParseError>(verdict.parsed);
            item["parse_error"] = {{"kind", to_string(error.kind)},
                                   {"found_count", error.found_count}};
        }
        verdicts.push_back(std::move(item));
    }

    nlohmann::json missing = nlohmann::json::array();
    for (const OrderedPair& pair : report.missing) {
        missing.push_back({pair.first, pair.second});
    }

    return {
        {"verdicts", std::move(verdicts)},
        {"missing", std::move(missing)},
        {"counters",
         {{"dispatched", report.counters.dispatched},
          {"retries", report.counters.retries},
          {"failures", report.counters.failures}}},
        {"aborted", report.aborted},
        {"abort_detail", report.abort_detail},
    };
}

}  // namespace pairjudge
