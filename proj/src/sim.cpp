#include "pairjudge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "pairjudge/metrics.hpp"
#include "pairjudge/rng.hpp"
#include "pairjudge/scheduler.hpp"

namespace pairjudge {

namespace {

constexpr std::string_view kSimJudgeId = "sim";

std::string trial_label(std::string_view purpose, int group_size, int trial_index) {
    return std::string(purpose) + ":n=" + std::to_string(group_size) +
           ":t=" + std::to_string(trial_index);
}

void validate(const SimConfig& config) {
    if (config.trials < 1) {
        throw std::invalid_argument("simulation needs at least one trial");
    }
    if (config.group_sizes.empty()) {
        throw std::invalid_argument("simulation needs at least one group size");
    }
    for (int n : config.group_sizes) {
        if (n < 2) {
            throw std::invalid_argument("group sizes below 2 have no pairs to compare");
        }
    }
    if (config.judge_noise_sigma < 0.0 || config.pointwise_noise_sigma < 0.0) {
        throw std::invalid_argument("noise levels must be non-negative");
    }
    if (config.quality.kind == QualityKind::Uniform && !(config.quality.a <= config.quality.b)) {
        throw std::invalid_argument("uniform quality range must satisfy lo <= hi");
    }
    if (config.quality.kind == QualityKind::Gaussian && config.quality.b < 0.0) {
        throw std::invalid_argument("gaussian quality stddev must be non-negative");
    }
}

std::vector<double> draw_qualities(const SimConfig& config, int group_size, int trial_index) {
    RandomStream stream =
        RandomStream::from_label(config.seed, trial_label("quality", group_size, trial_index));
    std::vector<double> qualities(static_cast<std::size_t>(group_size));
    for (double& q : qualities) {
        q = config.quality.kind == QualityKind::Uniform
                ? stream.next_in(config.quality.a, config.quality.b)
                : config.quality.a + config.quality.b * stream.next_gaussian();
    }
    return qualities;
}

/// Synthetic group whose prompt and response ids make every trial's judge
/// requests distinct, so the digest-keyed oracle noise is fresh per trial.
GroupEntry make_entry(int group_size, int trial_index) {
    GroupEntry entry;
    entry.context.prompt_text =
        "synthetic group, size " + std::to_string(group_size) + ", trial " +
        std::to_string(trial_index);
    entry.responses.reserve(static_cast<std::size_t>(group_size));
    for (int i = 0; i < group_size; ++i) {
        entry.responses.push_back(
            {"r" + std::to_string(i), "candidate " + std::to_string(i), FinishState::Stopped});
    }
    return entry;
}

NoisyOracleJudge make_judge(const SimConfig& config, const GroupEntry& entry,
                            const std::vector<double>& qualities) {
    std::unordered_map<std::string, double> quality_map;
    quality_map.reserve(qualities.size());
    for (std::size_t i = 0; i < qualities.size(); ++i) {
        quality_map.emplace(entry.responses[i].response_id, qualities[i]);
    }
    return {std::move(quality_map), config.judge_noise_sigma, config.seed};
}

std::vector<double> grouped_scores(const SimConfig& config, const GroupEntry& entry,
                                   NoisyOracleJudge& judge) {
    const ComparisonPlan plan = plan_comparisons(entry, config.ordering);
    ExecutionPolicy policy;
    policy.max_in_flight = 1;
    policy.max_attempts = 1;
    const ExecutionReport report = execute_plan(entry, plan, judge, policy, kSimJudgeId);
    const std::vector<GroupedScore> aggregated = aggregate_scores(entry, plan, report.verdicts);
    std::vector<double> scores;
    scores.reserve(aggregated.size());
    for (const GroupedScore& gs : aggregated) {
        scores.push_back(gs.score);
    }
    return scores;
}

std::vector<double> single_opponent_scores(const SimConfig& config, const GroupEntry& entry,
                                           NoisyOracleJudge& judge, int group_size,
                                           int trial_index) {
    const std::size_t n = entry.responses.size();
    std::vector<double> scores(n, 0.0);
    RandomStream opponents =
        RandomStream::from_label(config.seed, trial_label("opponent", group_size, trial_index));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = static_cast<std::size_t>(opponents.next_unit() *
                                                 static_cast<double>(n - 1));
        j = std::min(j, n - 2);
        if (j >= i) {
            ++j;  // uniform over the n-1 others
        }
        // Canonical slot order (lower index first): the request digest then
        // matches the grouped pipeline's call for the same pair, so both
        // methods see the same oracle draw — a shared-noise comparison.
        const std::size_t lo = std::min(i, j);
        const std::size_t hi = std::max(i, j);
        JudgeRequest request;
        request.context = entry.context;
        request.first = entry.responses[lo];
        request.second = entry.responses[hi];
        request.judge_id = std::string(kSimJudgeId);
        const JudgeVerdict verdict = judge.compare(request);
        const auto pair_scores = verdict_scores(verdict);
        if (!pair_scores) {
            throw std::logic_error("noisy oracle produced an unparseable verdict");
        }
        scores[i] = (i == lo) ? pair_scores->score_1 : pair_scores->score_2;
    }
    return scores;
}

std::vector<double> pointwise_scores(const SimConfig& config,
                                     const std::vector<double>& qualities, int group_size,
                                     int trial_index) {
    RandomStream stream =
        RandomStream::from_label(config.seed, trial_label("pointwise", group_size, trial_index));
    std::vector<double> scores;
    scores.reserve(qualities.size());
    for (double q : qualities) {
        scores.push_back(
            std::clamp(q + config.pointwise_noise_sigma * stream.next_gaussian(), 1.0, 10.0));
    }
    return scores;
}

/// Spearman with a defined value on degenerate trials: an all-tied side
/// carries no ranking information, which we count as zero agreement.
double rank_agreement(const std::vector<double>& scores, const std::vector<double>& qualities) {
    const auto degenerate = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (degenerate(scores) || degenerate(qualities)) {
        return 0.0;
    }
    return spearman(scores, qualities).r;
}

double top_quality(const std::vector<double>& scores, const std::vector<double>& qualities) {
    const std::size_t best =
        static_cast<std::size_t>(std::distance(scores.begin(),
                                               std::max_element(scores.begin(), scores.end())));
    return qualities[best];
}

struct RunningStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
    double mean() const { return sum / static_cast<double>(count); }
    double stderr_of_mean() const {
        if (count < 2) {
            return 0.0;
        }
        const double n = static_cast<double>(count);
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
        return std::sqrt(var / n);
    }
};

std::string format_cell_value(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

}  // namespace

QualityDistribution uniform_quality(double lo, double hi) {
    return {QualityKind::Uniform, lo, hi};
}

QualityDistribution gaussian_quality(double mean, double stddev) {
    return {QualityKind::Gaussian, mean, stddev};
}

const char* to_string(SimMethod method) {
    switch (method) {
        case SimMethod::Pointwise:
            return "pointwise";
        case SimMethod::SingleOpponent:
            return "single-opponent";
        case SimMethod::GroupedPairwise:
            return "grouped";
    }
    return "pointwise";
}

SimTrial simulate_trial(const SimConfig& config, int group_size, int trial_index) {
    validate(config);
    if (group_size < 2) {
        throw std::invalid_argument("group sizes below 2 have no pairs to compare");
    }

    SimTrial trial;
    trial.qualities = draw_qualities(config, group_size, trial_index);
    const GroupEntry entry = make_entry(group_size, trial_index);
    NoisyOracleJudge judge = make_judge(config, entry, trial.qualities);

    trial.scores[static_cast<std::size_t>(SimMethod::Pointwise)] =
        pointwise_scores(config, trial.qualities, group_size, trial_index);
    trial.scores[static_cast<std::size_t>(SimMethod::SingleOpponent)] =
        single_opponent_scores(config, entry, judge, group_size, trial_index);
    trial.scores[static_cast<std::size_t>(SimMethod::GroupedPairwise)] =
        grouped_scores(config, entry, judge);
    return trial;
}

ScalingReport run_scaling_experiment(const SimConfig& config) {
    validate(config);
    ScalingReport report;
    report.config = config;

    for (auto& method_cells : report.cells) {
        method_cells.resize(config.group_sizes.size());
    }

    for (std::size_t size_index = 0; size_index < config.group_sizes.size(); ++size_index) {
        const int n = config.group_sizes[size_index];
        std::array<RunningStats, 3> agreement;
        std::array<RunningStats, 3> quality;
        for (int t = 0; t < config.trials; ++t) {
            const SimTrial trial = simulate_trial(config, n, t);
            for (SimMethod method : kAllSimMethods) {
                const auto m = static_cast<std::size_t>(method);
                const std::vector<double>& scores = trial.scores[m];
                agreement[m].add(rank_agreement(scores, trial.qualities));
                quality[m].add(top_quality(scores, trial.qualities));
            }
        }
        for (SimMethod method : kAllSimMethods) {
            const auto m = static_cast<std::size_t>(method);
            CellStats& cell = report.cells[m][size_index];
            cell.mean_rank_agreement = agreement[m].mean();
            cell.stderr_rank_agreement = agreement[m].stderr_of_mean();
            cell.mean_top_quality = quality[m].mean();
            cell.stderr_top_quality = quality[m].stderr_of_mean();
        }
    }

    // Least-squares slope of grouped-method agreement against group size:
    // a one-number summary of how agreement scales with more comparisons.
    const auto& grouped = report.cells[static_cast<std::size_t>(SimMethod::GroupedPairwise)];
    const double k = static_cast<double>(config.group_sizes.size());
    if (config.group_sizes.size() >= 2) {
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = 0; i < grouped.size(); ++i) {
            mean_x += static_cast<double>(config.group_sizes[i]);
            mean_y += grouped[i].mean_rank_agreement;
        }
        mean_x /= k;
        mean_y /= k;
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < grouped.size(); ++i) {
            const double dx = static_cast<double>(config.group_sizes[i]) - mean_x;
            sxx += dx * dx;
            sxy += dx * (grouped[i].mean_rank_agreement - mean_y);
        }
        report.grouped_agreement_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return report;
}

std::string scaling_csv(const ScalingReport& report) {
    std::string csv =
        "group_size,method,mean_rank_agreement,stderr_rank_agreement,"
        "mean_top_quality,stderr_top_quality\n";
    for (std::size_t size_index = 0; size_index < report.config.group_sizes.size();
         ++size_index) {
        for (SimMethod method : kAllSimMethods) {
            const CellStats& cell = report.cell(method, size_index);
            csv += std::to_string(report.config.group_sizes[size_index]);
            csv += ',';
            csv += to_string(method);
            csv += ',';
            csv += format_cell_value(cell.mean_rank_agreement);
            csv += ',';
            csv += format_cell_value(cell.stderr_rank_agreement);
            csv += ',';
            csv += format_cell_value(cell.mean_top_quality);
            csv += ',';
            csv += format_cell_value(cell.stderr_top_quality);
            csv += '\n';
        }
    }
    return csv;
}

VarianceCheckResult variance_check(const SimConfig& config, int group_size) {
    validate(config);
    if (group_size < 2) {
        throw std::invalid_argument("group sizes below 2 have no pairs to compare");
    }

    // Pooled deviations of grouped scores from latent qualities. Each
    // response's deviation averages its own slots' noise draws and shares
    // none with other responses, so the samples are independent.
    RunningStats deviations;
    for (int t = 0; t < config.trials; ++t) {
        const std::vector<double> qualities = draw_qualities(config, group_size, t);
        const GroupEntry entry = make_entry(group_size, t);
        NoisyOracleJudge judge = make_judge(config, entry, qualities);
        const std::vector<double> scores = grouped_scores(config, entry, judge);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            deviations.add(scores[i] - qualities[i]);
        }
    }

    VarianceCheckResult result;
    result.samples = deviations.count;
    const double n = static_cast<double>(deviations.count);
    const double var =
        std::max(0.0, (deviations.sum_sq - deviations.sum * deviations.sum / n) / (n - 1.0));
    result.observed_variance = var;

    const double sigma2 = config.judge_noise_sigma * config.judge_noise_sigma;
    const double denom = config.ordering == OrderingMode::BothOrders
                             ? 2.0 * static_cast<double>(group_size - 1)
                             : static_cast<double>(group_size - 1);
    result.predicted_variance = sigma2 / denom;

    // The deviations are means of Gaussian draws (clamp inactive per the
    // contract), so the sample variance has Var(s^2) = 2 s^4 / (n - 1).
    if (deviations.count >= 2) {
        result.stderr_variance = var * std::sqrt(2.0 / (n - 1.0));
    }
    return result;
}

}  // namespace pairjudge
