#include "pairjudge/cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string_view>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairjudge/cache.hpp"
#include "pairjudge/dataset.hpp"
#include "pairjudge/group.hpp"
#include "pairjudge/http_judge.hpp"
#include "pairjudge/metrics.hpp"
#include "pairjudge/results_io.hpp"
#include "pairjudge/reward.hpp"
#include "pairjudge/scheduler.hpp"
#include "pairjudge/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pairjudge {

namespace {

constexpr const char* kVersion = "pairjudge 0.1.0";

struct CommonOptions {
    std::string out = "pairjudge-out";
    std::uint64_t seed = 1;
};

struct JudgeOptions {
    std::string backend = "scripted";
    std::string fixtures;
    std::string endpoint;
    std::string model;
    std::string auth_env;
    int timeout_ms = 30000;
    double temperature = 0.0;
    int max_tokens = 0;  // 0: let the endpoint decide
    std::string oracle_qualities;
    double oracle_sigma = 1.0;
    std::string cache_path;
    std::string judge_id = "local";
};

struct PolicyOptions {
    int max_in_flight = 4;
    int max_attempts = 3;
    int backoff_ms = 10;
    double backoff_mult = 2.0;
    std::string fail_mode = "mark-missing";
};

struct JudgePairsCmd {
    CommonOptions common;
    JudgeOptions judge;
    PolicyOptions policy;
    std::string dataset;
    std::string mode = "binary";
};

struct GroupScoreCmd {
    CommonOptions common;
    JudgeOptions judge;
    PolicyOptions policy;
    std::string rollouts;
    std::string ordering = "both";
};

struct EvaluateCmd {
    CommonOptions common;
    std::string scores;
    std::string annotations;
    bool rescale = false;
    double bin_width = 0.5;
    double range_lo = 1.0;
    double range_hi = 10.0;
};

struct SimulateCmd {
    CommonOptions common;
    std::vector<int> group_sizes{2, 3, 5, 8};
    int trials = 2000;
    double judge_noise = 1.0;
    double pointwise_noise = 1.0;
    std::string quality = "uniform:1:10";
    std::string ordering = "both";
    bool assert_trend = false;
};

struct CacheCmd {
    std::string cache_path;
};

struct CliState {
    JudgePairsCmd judge_pairs;
    GroupScoreCmd group_score;
    EvaluateCmd evaluate;
    SimulateCmd simulate;
    CacheCmd cache;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--out", opts.out, "Output directory (created if missing)")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Seed for every random draw in this run")
        ->capture_default_str();
    cmd->set_config("--config", "",
                    "Read options from an INI file; explicit flags override file values");
}

void add_judge_options(CLI::App* cmd, JudgeOptions& opts) {
    cmd->add_option("--backend", opts.backend, "Judge backend")
        ->check(CLI::IsMember({"scripted", "http", "oracle"}))
        ->capture_default_str();
    cmd->add_option("--fixtures", opts.fixtures,
                    "Scripted backend: JSONL file of canned replies keyed by response pair");
    cmd->add_option("--endpoint", opts.endpoint,
                    "HTTP backend: base URL of a chat-completions endpoint");
    cmd->add_option("--model", opts.model, "HTTP backend: model name sent in each request");
    cmd->add_option("--auth-env", opts.auth_env,
                    "HTTP backend: environment variable holding the bearer token");
    cmd->add_option("--timeout-ms", opts.timeout_ms, "HTTP backend: per-request timeout")
        ->capture_default_str();
    cmd->add_option("--temperature", opts.temperature, "HTTP backend: sampling temperature")
        ->capture_default_str();
    cmd->add_option("--max-tokens", opts.max_tokens,
                    "HTTP backend: completion token cap (0 leaves it to the endpoint)")
        ->capture_default_str();
    cmd->add_option("--oracle-qualities", opts.oracle_qualities,
                    "Oracle backend: JSON file mapping response id to latent quality");
    cmd->add_option("--oracle-sigma", opts.oracle_sigma, "Oracle backend: score noise level")
        ->capture_default_str();
    cmd->add_option("--cache", opts.cache_path,
                    "Verdict cache file (JSONL, append-only); hits skip the backend");
    cmd->add_option("--judge-id", opts.judge_id,
                    "Identity tag baked into request digests and cache keys")
        ->capture_default_str();
}

void add_policy_options(CLI::App* cmd, PolicyOptions& opts) {
    cmd->add_option("--max-in-flight", opts.max_in_flight,
                    "Upper bound on concurrent judge calls")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-attempts", opts.max_attempts,
                    "Attempts per comparison before it counts as failed")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--backoff-ms", opts.backoff_ms, "Base retry backoff in milliseconds")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--backoff-mult", opts.backoff_mult, "Backoff growth factor per attempt")
        ->capture_default_str();
    cmd->add_option("--fail-mode", opts.fail_mode,
                    "What a permanently failed comparison does to the run")
        ->check(CLI::IsMember({"mark-missing", "abort"}))
        ->capture_default_str();
}

std::unique_ptr<CLI::App> make_app(CliState& state) {
    auto app = std::make_unique<CLI::App>(
        "Pairwise-judge orchestration: preference-pair rewards, grouped response scoring, "
        "metric evaluation, and a scaling simulator");
    app->name("pairjudge");
    app->set_version_flag("--version", kVersion);
    app->require_subcommand(0, 1);

    CLI::App* jp = app->add_subcommand(
        "judge-pairs", "Score annotated preference pairs and emit training rewards");
    jp->add_option("--dataset", state.judge_pairs.dataset,
                   "Preference-pair JSONL file (one record per line)")
        ->required();
    jp->add_option("--mode", state.judge_pairs.mode,
                   "Reward convention: binary {1,0} or signed {+1,-1}")
        ->check(CLI::IsMember({"binary", "signed"}))
        ->capture_default_str();
    add_common_options(jp, state.judge_pairs.common);
    add_judge_options(jp, state.judge_pairs.judge);
    add_policy_options(jp, state.judge_pairs.policy);

    CLI::App* gs = app->add_subcommand(
        "group-score", "Run grouped pairwise comparisons and emit per-response scores");
    gs->add_option("--rollouts", state.group_score.rollouts,
                   "Rollout JSONL file (prompt plus candidate responses per line)")
        ->required();
    gs->add_option("--ordering", state.group_score.ordering,
                   "Pair ordering: both slot orders per pair, or a single canonical order")
        ->check(CLI::IsMember({"both", "single"}))
        ->capture_default_str();
    add_common_options(gs, state.group_score.common);
    add_judge_options(gs, state.group_score.judge);
    add_policy_options(gs, state.group_score.policy);

    CLI::App* ev = app->add_subcommand(
        "evaluate", "Correlate judge scores with annotations and histogram the scores");
    ev->add_option("--scores", state.evaluate.scores,
                   "JSONL file of {record_id, score} judge scores")
        ->required();
    ev->add_option("--annotations", state.evaluate.annotations,
                   "JSONL file of {record_id, score} reference annotations")
        ->required();
    ev->add_flag("--rescale", state.evaluate.rescale,
                 "Linearly map scores onto [range-lo, range-hi] before histogramming");
    ev->add_option("--bin-width", state.evaluate.bin_width, "Histogram bin width")
        ->capture_default_str();
    ev->add_option("--range-lo", state.evaluate.range_lo, "Histogram lower bound")
        ->capture_default_str();
    ev->add_option("--range-hi", state.evaluate.range_hi, "Histogram upper bound")
        ->capture_default_str();
    add_common_options(ev, state.evaluate.common);

    CLI::App* sim = app->add_subcommand(
        "simulate", "Synthetic scaling experiment comparing scoring strategies");
    sim->add_option("--group-sizes", state.simulate.group_sizes,
                    "Group sizes to sweep (responses per synthetic group)")
        ->capture_default_str();
    sim->add_option("--trials", state.simulate.trials, "Trials per group size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim->add_option("--judge-noise", state.simulate.judge_noise,
                    "Noise level of the pairwise judge")
        ->capture_default_str();
    sim->add_option("--pointwise-noise", state.simulate.pointwise_noise,
                    "Noise level of the pointwise baseline")
        ->capture_default_str();
    sim->add_option("--quality", state.simulate.quality,
                    "Latent quality distribution: uniform:<lo>:<hi> or gaussian:<mean>:<sd>")
        ->capture_default_str();
    sim->add_option("--ordering", state.simulate.ordering,
                    "Pair ordering for the grouped strategy")
        ->check(CLI::IsMember({"both", "single"}))
        ->capture_default_str();
    sim->add_flag("--assert-trend", state.simulate.assert_trend,
                  "Exit nonzero unless grouped agreement is non-decreasing in group size and "
                  "never below the pointwise baseline (3-standard-error tolerance)");
    add_common_options(sim, state.simulate.common);

    CLI::App* cache = app->add_subcommand("cache", "Inspect or reset a verdict cache file");
    cache->require_subcommand(1);
    CLI::App* cache_stats = cache->add_subcommand("stats", "Print entry count and health");
    cache_stats->add_option("--cache", state.cache.cache_path, "Cache file")->required();
    CLI::App* cache_clear = cache->add_subcommand("clear", "Drop all entries");
    cache_clear->add_option("--cache", state.cache.cache_path, "Cache file")->required();

    return app;
}

void collect_flags(const CLI::App* app, std::set<std::string>& flags) {
    for (const CLI::Option* option : app->get_options()) {
        for (const std::string& lname : option->get_lnames()) {
            flags.insert("--" + lname);
        }
    }
    for (const CLI::App* sub : app->get_subcommands(nullptr)) {
        collect_flags(sub, flags);
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("short write to '" + path.string() + "'");
    }
}

/// Resolved-config echo: rerunning the same subcommand with this file as
/// --config reproduces the run (flags absent, file supplies every value).
void echo_config(const CLI::App* subcommand, const fs::path& out_dir) {
    write_text_file(out_dir / "config_echo.ini",
                    subcommand->config_to_str(/*default_also=*/true, /*write_description=*/false));
}

struct BuiltBackend {
    std::shared_ptr<JudgeBackend> backend;  // cache-wrapped when a cache is set
    std::shared_ptr<VerdictCache> cache;    // null without --cache
};

std::unordered_map<std::string, double> load_quality_map(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open quality map '" + path.string() + "'");
    }
    json object = json::parse(in, nullptr, false);
    if (object.is_discarded() || !object.is_object()) {
        throw std::invalid_argument("quality map '" + path.string() +
                                    "' must be a JSON object of response id to number");
    }
    std::unordered_map<std::string, double> qualities;
    for (const auto& [key, value] : object.items()) {
        if (!value.is_number()) {
            throw std::invalid_argument("quality map entry '" + key + "' is not a number");
        }
        qualities.emplace(key, value.get<double>());
    }
    return qualities;
}

BuiltBackend build_backend(const JudgeOptions& opts, std::uint64_t seed) {
    std::shared_ptr<JudgeBackend> inner;
    if (opts.backend == "scripted") {
        if (opts.fixtures.empty()) {
            throw std::invalid_argument("--backend scripted requires --fixtures");
        }
        try {
            inner = ScriptedJudge::load(opts.fixtures);
        } catch (const std::exception& e) {
            throw std::invalid_argument(e.what());
        }
    } else if (opts.backend == "http") {
        if (opts.endpoint.empty()) {
            throw std::invalid_argument("--backend http requires --endpoint");
        }
        HttpJudgeConfig config;
        config.base_url = opts.endpoint;
        config.model = opts.model;
        config.auth_env = opts.auth_env;
        config.timeout_ms = opts.timeout_ms;
        config.temperature = opts.temperature;
        if (opts.max_tokens > 0) {
            config.max_tokens = opts.max_tokens;
        }
        config.judge_id = opts.judge_id;
        inner = std::make_shared<HttpChatJudge>(std::move(config));
    } else {
        if (opts.oracle_qualities.empty()) {
            throw std::invalid_argument("--backend oracle requires --oracle-qualities");
        }
        inner = std::make_shared<NoisyOracleJudge>(load_quality_map(opts.oracle_qualities),
                                                   opts.oracle_sigma, seed);
    }

    BuiltBackend built{inner, nullptr};
    if (!opts.cache_path.empty()) {
        built.cache = std::make_shared<VerdictCache>(opts.cache_path);
        built.backend = std::make_shared<CachedJudge>(std::move(inner), built.cache);
    }
    return built;
}

ExecutionPolicy build_policy(const PolicyOptions& opts, std::uint64_t seed) {
    ExecutionPolicy policy;
    policy.max_in_flight = opts.max_in_flight;
    policy.max_attempts = opts.max_attempts;
    policy.initial_backoff_ms = opts.backoff_ms;
    policy.backoff_multiplier = opts.backoff_mult;
    policy.fail_mode = fail_mode_from_string(opts.fail_mode);
    policy.retry_seed = seed;
    return policy;
}

void print_counters(const ExecutionCounters& counters) {
    std::cout << "comparisons: dispatched=" << counters.dispatched
              << " cache_hits=" << counters.cache_hits << " retries=" << counters.retries
              << " failures=" << counters.failures << "\n";
}

void print_cache_stats(const VerdictCache& cache) {
    const CacheStats stats = cache.stats();
    std::cout << "cache: entries=" << stats.entries << " hits=" << stats.hits
              << " misses=" << stats.misses << " io_failures=" << stats.io_failures << "\n";
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::invalid_argument("cannot create output directory '" + out +
                                    "': " + ec.message());
    }
    return dir;
}

int cmd_judge_pairs(const CLI::App* sub, const JudgePairsCmd& cmd) {
    const RewardMode mode = *reward_mode_from_string(cmd.mode);
    const std::vector<PreferenceRecord> records = load_preference_dataset(cmd.dataset);
    BuiltBackend built = build_backend(cmd.judge, cmd.common.seed);
    const ExecutionPolicy policy = build_policy(cmd.policy, cmd.common.seed);

    std::vector<JudgeRequest> requests;
    requests.reserve(records.size());
    for (const PreferenceRecord& record : records) {
        JudgeRequest request;
        request.context = record.context;
        request.first = record.response_a;
        request.second = record.response_b;
        request.judge_id = cmd.judge.judge_id;
        requests.push_back(std::move(request));
    }

    const BatchResult batch = run_requests(requests, *built.backend, policy);
    if (batch.aborted) {
        std::cerr << "error: " << batch.abort_detail << "\n";
        return kExitTransportError;
    }

    const fs::path out_dir = ensure_out_dir(cmd.common.out);
    std::ofstream rewards_out(out_dir / "rewards.jsonl", std::ios::binary | std::ios::trunc);
    if (!rewards_out) {
        throw IoError("cannot open '" + (out_dir / "rewards.jsonl").string() + "' for writing");
    }

    std::vector<TrainingReward> rewards;
    rewards.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const RequestOutcome& outcome = batch.outcomes[i];
        if (!outcome.verdict) {
            continue;  // permanently failed comparison: no reward line
        }
        const TrainingReward reward = grm_training_reward(
            to_parse_result(outcome.verdict->parsed), records[i].preferred_label, mode);
        rewards.push_back(reward);
        json line = {
            {"record_id", records[i].record_id},
            {"value", reward.value},
            {"reason", to_string(reward.reason)},
        };
        if (const auto scores = verdict_scores(*outcome.verdict)) {
            line["scores"] = {scores->score_1, scores->score_2};
        }
        rewards_out << line.dump() << "\n";
    }
    rewards_out.flush();
    if (!rewards_out) {
        throw IoError("short write to '" + (out_dir / "rewards.jsonl").string() + "'");
    }

    if (!rewards.empty()) {
        const AccuracyReport accuracy = pairwise_accuracy(rewards);
        json accuracy_json = {
            {"correct", accuracy.correct},
            {"total", accuracy.total},
            {"accuracy", accuracy.accuracy},
            {"breakdown", accuracy.breakdown},
        };
        write_text_file(out_dir / "accuracy.json", accuracy_json.dump(2) + "\n");
        std::cout << "accuracy: " << accuracy.correct << "/" << accuracy.total << " = "
                  << accuracy.accuracy << "\n";
        for (const auto& [reason, count] : accuracy.breakdown) {
            std::cout << "  " << reason << ": " << count << "\n";
        }
    } else {
        std::cout << "no verdicts obtained; rewards file is empty\n";
    }
    print_counters(batch.counters);
    if (built.cache) {
        print_cache_stats(*built.cache);
    }
    echo_config(sub, out_dir);
    return batch.counters.failures > 0 ? kExitPartialResults : kExitOk;
}

int cmd_group_score(const CLI::App* sub, const GroupScoreCmd& cmd) {
    const OrderingMode ordering = ordering_mode_from_string(cmd.ordering);
    const std::vector<Rollout> rollouts = load_rollouts(cmd.rollouts);
    if (rollouts.empty()) {
        throw std::invalid_argument("rollouts file '" + cmd.rollouts + "' has no records");
    }
    const std::vector<GroupEntry> groups = form_groups(rollouts);
    std::vector<ComparisonPlan> plans;
    plans.reserve(groups.size());
    for (const GroupEntry& group : groups) {
        plans.push_back(plan_comparisons(group, ordering));
    }

    BuiltBackend built = build_backend(cmd.judge, cmd.common.seed);
    const ExecutionPolicy policy = build_policy(cmd.policy, cmd.common.seed);
    const std::vector<ExecutionReport> reports =
        execute_many(groups, plans, *built.backend, policy, cmd.judge.judge_id);

    for (const ExecutionReport& report : reports) {
        if (report.aborted) {
            std::cerr << "error: " << report.abort_detail << "\n";
            return kExitTransportError;
        }
    }

    const fs::path out_dir = ensure_out_dir(cmd.common.out);
    const fs::path scores_path = out_dir / "grouped_scores.jsonl";
    std::ofstream scores_out(scores_path, std::ios::binary | std::ios::trunc);
    if (!scores_out) {
        throw IoError("cannot open '" + scores_path.string() + "' for writing");
    }

    ExecutionCounters total;
    std::int64_t planned = 0;
    std::int64_t missing = 0;
    std::int64_t responses = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::vector<GroupedScore> scores =
            aggregate_scores(groups[g], plans[g], reports[g].verdicts);
        std::vector<double> values;
        values.reserve(scores.size());
        for (const GroupedScore& score : scores) {
            values.push_back(score.score);
        }
        std::vector<double> advantages;
        if (values.size() >= 2) {
            advantages = normalize_advantages(values);
        }
        for (std::size_t i = 0; i < scores.size(); ++i) {
            json line = {
                {"group_index", g},
                {"response_id", scores[i].response_id},
                {"score", scores[i].score},
                {"comparisons_used", scores[i].comparisons_used},
                {"complete", scores[i].complete},
                {"advantage", advantages.empty() ? json(nullptr) : json(advantages[i])},
            };
            scores_out << line.dump() << "\n";
        }
        responses += static_cast<std::int64_t>(scores.size());
        planned += static_cast<std::int64_t>(plans[g].tasks.size());
        missing += static_cast<std::int64_t>(reports[g].missing.size());
        total.dispatched += reports[g].counters.dispatched;
        total.cache_hits += reports[g].counters.cache_hits;
        total.retries += reports[g].counters.retries;
        total.failures += reports[g].counters.failures;
    }
    scores_out.flush();
    if (!scores_out) {
        throw IoError("short write to '" + scores_path.string() + "'");
    }

    std::cout << "groups=" << groups.size() << " responses=" << responses
              << " planned=" << planned << " missing=" << missing << "\n";
    print_counters(total);
    if (built.cache) {
        print_cache_stats(*built.cache);
    }
    echo_config(sub, out_dir);
    return missing > 0 ? kExitPartialResults : kExitOk;
}

struct ScoreFile {
    std::vector<std::string> ids;
    std::vector<double> values;
};

ScoreFile read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open score file '" + path + "'");
    }
    ScoreFile parsed;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json object = json::parse(line, nullptr, false);
        const std::string where = path + " line " + std::to_string(line_no);
        if (object.is_discarded() || !object.is_object()) {
            throw std::invalid_argument(where + ": not a JSON object");
        }
        if (!object.contains("record_id") || !object["record_id"].is_string()) {
            throw std::invalid_argument(where + ": missing string field 'record_id'");
        }
        if (!object.contains("score") || !object["score"].is_number()) {
            throw std::invalid_argument(where + ": missing numeric field 'score'");
        }
        std::string id = object["record_id"].get<std::string>();
        if (!seen.insert(id).second) {
            throw std::invalid_argument(where + ": duplicate record_id '" + id + "'");
        }
        parsed.ids.push_back(std::move(id));
        parsed.values.push_back(object["score"].get<double>());
    }
    if (parsed.ids.empty()) {
        throw std::invalid_argument("score file '" + path + "' has no records");
    }
    return parsed;
}

int cmd_evaluate(const CLI::App* sub, const EvaluateCmd& cmd) {
    if (!(cmd.range_hi > cmd.range_lo)) {
        throw std::invalid_argument("--range-hi must exceed --range-lo");
    }
    const ScoreFile scores = read_score_file(cmd.scores);
    const ScoreFile annotations = read_score_file(cmd.annotations);

    std::map<std::string, double> annotation_by_id;
    for (std::size_t i = 0; i < annotations.ids.size(); ++i) {
        annotation_by_id.emplace(annotations.ids[i], annotations.values[i]);
    }
    if (scores.ids.size() != annotations.ids.size()) {
        throw std::invalid_argument(
            "score and annotation files disagree on record count (" +
            std::to_string(scores.ids.size()) + " vs " +
            std::to_string(annotations.ids.size()) + ")");
    }
    std::vector<double> aligned;
    aligned.reserve(scores.ids.size());
    for (const std::string& id : scores.ids) {
        auto it = annotation_by_id.find(id);
        if (it == annotation_by_id.end()) {
            throw std::invalid_argument("record '" + id + "' has a score but no annotation");
        }
        aligned.push_back(it->second);
    }

    std::vector<double> values = scores.values;
    double rescale_scale = 1.0;
    double rescale_offset = 0.0;
    if (cmd.rescale) {
        const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
        if (*lo_it == *hi_it) {
            throw std::invalid_argument("cannot rescale: scores are constant");
        }
        rescale_scale = (cmd.range_hi - cmd.range_lo) / (*hi_it - *lo_it);
        rescale_offset = cmd.range_lo - *lo_it * rescale_scale;
        for (double& v : values) {
            v = rescale_scale * v + rescale_offset;
        }
    }

    const CorrelationReport correlation = pearson(values, aligned);
    const Histogram histogram =
        score_histogram(values, cmd.range_lo, cmd.range_hi, cmd.bin_width);

    const fs::path out_dir = ensure_out_dir(cmd.common.out);
    json evaluation = {
        {"pearson_r", correlation.r},
        {"n", correlation.n},
        {"rescaled", cmd.rescale},
        {"histogram",
         {{"bin_edges", histogram.bin_edges},
          {"counts", histogram.counts},
          {"below_range", histogram.below_range},
          {"above_range", histogram.above_range}}},
    };
    if (cmd.rescale) {
        evaluation["rescale"] = {{"scale", rescale_scale}, {"offset", rescale_offset}};
    }
    write_text_file(out_dir / "evaluation.json", evaluation.dump(2) + "\n");

    std::string histogram_csv = "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
        char row[96];
        std::snprintf(row, sizeof(row), "%.9g,%.9g,%lld\n", histogram.bin_edges[b],
                      histogram.bin_edges[b + 1],
                      static_cast<long long>(histogram.counts[b]));
        histogram_csv += row;
    }
    write_text_file(out_dir / "histogram.csv", histogram_csv);

    std::cout << "pearson_r=" << correlation.r << " n=" << correlation.n << "\n";
    echo_config(sub, out_dir);
    return kExitOk;
}

QualityDistribution parse_quality_spec(const std::string& spec) {
    const auto fail = [&]() -> QualityDistribution {
        throw std::invalid_argument("--quality expects uniform:<lo>:<hi> or gaussian:<mean>:<sd>, got '" +
                                    spec + "'");
    };
    const std::size_t first = spec.find(':');
    const std::size_t second = first == std::string::npos ? first : spec.find(':', first + 1);
    if (second == std::string::npos) {
        return fail();
    }
    const std::string kind = spec.substr(0, first);
    const auto parse_number = [&](std::string_view text) {
        double value = 0.0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) {
            fail();
        }
        return value;
    };
    const double a = parse_number(std::string_view(spec).substr(first + 1, second - first - 1));
    const double b = parse_number(std::string_view(spec).substr(second + 1));
    if (kind == "uniform") {
        return uniform_quality(a, b);
    }
    if (kind == "gaussian") {
        return gaussian_quality(a, b);
    }
    return fail();
}

int cmd_simulate(const CLI::App* sub, const SimulateCmd& cmd) {
    SimConfig config;
    config.group_sizes = cmd.group_sizes;
    config.trials = cmd.trials;
    config.judge_noise_sigma = cmd.judge_noise;
    config.pointwise_noise_sigma = cmd.pointwise_noise;
    config.quality = parse_quality_spec(cmd.quality);
    config.ordering = ordering_mode_from_string(cmd.ordering);
    config.seed = cmd.common.seed;

    const ScalingReport report = run_scaling_experiment(config);

    const fs::path out_dir = ensure_out_dir(cmd.common.out);
    write_text_file(out_dir / "scaling.csv", scaling_csv(report));

    for (std::size_t i = 0; i < config.group_sizes.size(); ++i) {
        std::cout << "group_size=" << config.group_sizes[i];
        for (SimMethod method : kAllSimMethods) {
            const CellStats& cell = report.cell(method, i);
            std::cout << " " << to_string(method) << "=" << cell.mean_rank_agreement;
        }
        std::cout << "\n";
    }
    std::cout << "grouped_agreement_slope=" << report.grouped_agreement_slope << "\n";
    echo_config(sub, out_dir);

    if (cmd.assert_trend) {
        const auto& grouped =
            report.cells[static_cast<std::size_t>(SimMethod::GroupedPairwise)];
        const auto& pointwise = report.cells[static_cast<std::size_t>(SimMethod::Pointwise)];
        const auto tol = [](const CellStats& a, const CellStats& b) {
            return 3.0 * std::sqrt(a.stderr_rank_agreement * a.stderr_rank_agreement +
                                   b.stderr_rank_agreement * b.stderr_rank_agreement);
        };
        for (std::size_t i = 0; i + 1 < grouped.size(); ++i) {
            const double diff =
                grouped[i + 1].mean_rank_agreement - grouped[i].mean_rank_agreement;
            if (diff < -tol(grouped[i], grouped[i + 1])) {
                std::cerr << "trend assertion failed: grouped agreement drops between "
                          << "group sizes " << config.group_sizes[i] << " and "
                          << config.group_sizes[i + 1] << "\n";
                return kExitAssertionFailed;
            }
        }
        for (std::size_t i = 0; i < grouped.size(); ++i) {
            const double diff =
                grouped[i].mean_rank_agreement - pointwise[i].mean_rank_agreement;
            if (diff < -tol(grouped[i], pointwise[i])) {
                std::cerr << "trend assertion failed: grouped agreement below pointwise at "
                          << "group size " << config.group_sizes[i] << "\n";
                return kExitAssertionFailed;
            }
        }
        std::cout << "trend assertions passed\n";
    }
    return kExitOk;
}

int cmd_cache(const CacheCmd& cmd, bool clear) {
    VerdictCache cache{fs::path(cmd.cache_path)};
    if (clear) {
        cache.clear();
        std::cout << "cache cleared: " << cmd.cache_path << "\n";
    } else {
        const CacheStats stats = cache.stats();
        std::cout << "entries=" << stats.entries << " io_failures=" << stats.io_failures
                  << " path=" << cmd.cache_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CliState state;
    std::unique_ptr<CLI::App> app = make_app(state);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pairjudge");
    for (const std::string& arg : args) {
        argv.push_back(arg.c_str());
    }

    try {
        app->parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app->exit(e);  // prints help or the parse error
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (app->got_subcommand("judge-pairs")) {
            return cmd_judge_pairs(app->get_subcommand("judge-pairs"), state.judge_pairs);
        }
        if (app->got_subcommand("group-score")) {
            return cmd_group_score(app->get_subcommand("group-score"), state.group_score);
        }
        if (app->got_subcommand("evaluate")) {
            return cmd_evaluate(app->get_subcommand("evaluate"), state.evaluate);
        }
        if (app->got_subcommand("simulate")) {
            return cmd_simulate(app->get_subcommand("simulate"), state.simulate);
        }
        if (app->got_subcommand("cache")) {
            const CLI::App* cache = app->get_subcommand("cache");
            return cmd_cache(state.cache, cache->got_subcommand("clear"));
        }
        std::cout << app->help();
        return kExitConfigError;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const PlanAbortedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransportError;
    } catch (const JudgeCallError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransportError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
}

std::vector<std::string> cli_flag_registry() {
    CliState state;
    const std::unique_ptr<CLI::App> app = make_app(state);
    std::set<std::string> flags;
    collect_flags(app.get(), flags);
    return {flags.begin(), flags.end()};
}

}  // namespace pairjudge
