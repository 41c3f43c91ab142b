#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pairjudge/group.hpp"

namespace pairjudge {

enum class QualityKind { Uniform, Gaussian };

/// Latent response-quality distribution for synthetic groups.
/// Uniform: a = lo, b = hi. Gaussian: a = mean, b = stddev.
struct QualityDistribution {
    QualityKind kind = QualityKind::Uniform;
    double a = 1.0;
    double b = 10.0;
};

QualityDistribution uniform_quality(double lo, double hi);
QualityDistribution gaussian_quality(double mean, double stddev);

/// Score-estimation strategies compared by the experiment:
///  - Pointwise: each response scored alone (latent quality plus noise).
///  - SingleOpponent: each response judged pairwise against one random
///    other response from its group, no averaging.
///  - GroupedPairwise: every pair in the group judged and slot scores
///    averaged per response — the engine's grouped-comparison pipeline.
enum class SimMethod { Pointwise, SingleOpponent, GroupedPairwise };

inline constexpr std::array<SimMethod, 3> kAllSimMethods = {
    SimMethod::Pointwise, SimMethod::SingleOpponent, SimMethod::GroupedPairwise};

const char* to_string(SimMethod method);

struct SimConfig {
    std::vector<int> group_sizes{2, 3, 5, 8};
    int trials = 2000;
    QualityDistribution quality{};  // uniform [1, 10]
    double judge_noise_sigma = 1.0;
    double pointwise_noise_sigma = 1.0;
    std::uint64_t seed = 1;
    OrderingMode ordering = OrderingMode::BothOrders;
};

/// One synthetic group: latent qualities plus each method's score estimate,
/// all indexed by response position. GroupedPairwise scores come from the
/// real planning/scheduling/aggregation pipeline over the noisy oracle
/// backend, not from a shortcut formula.
struct SimTrial {
    std::vector<double> qualities;
    std::array<std::vector<double>, 3> scores;  // indexed by SimMethod

    const std::vector<double>& scores_for(SimMethod method) const {
        return scores[static_cast<std::size_t>(method)];
    }
};

SimTrial simulate_trial(const SimConfig& config, int group_size, int trial_index);

/// Per-(group size, method) statistics across trials. rank_agreement is the
/// Spearman correlation between estimated scores and latent qualities
/// (0 when a trial's ranking is degenerate); top_quality is the latent
/// quality of the response each method ranked first.
struct CellStats {
    double mean_rank_agreement = 0.0;
    double stderr_rank_agreement = 0.0;
    double mean_top_quality = 0.0;
    double stderr_top_quality = 0.0;
};

struct ScalingReport {
    SimConfig config;
    std::array<std::vector<CellStats>, 3> cells;  // [method][group-size index]
    double grouped_agreement_slope = 0.0;  // least-squares vs group size

    const CellStats& cell(SimMethod method, std::size_t size_index) const {
        return cells[static_cast<std::size_t>(method)][size_index];
    }
};

/// Runs trials for every configured group size and method. Deterministic:
/// identical config gives an identical report (every random draw is keyed
/// by seed, group size, trial and purpose, never by execution order).
ScalingReport run_scaling_experiment(const SimConfig& config);

/// CSV rendering of a report: one row per (group size, method) with mean
/// and standard error per statistic. Suitable for plotting.
std::string scaling_csv(const ScalingReport& report);

struct VarianceCheckResult {
    double observed_variance = 0.0;   // of (score - latent quality), pooled
    double predicted_variance = 0.0;  // sigma^2 / (2(n-1)), or /(n-1) single-order
    double stderr_variance = 0.0;     // standard error of the observed value
    std::int64_t samples = 0;
};

/// Measures the per-response variance of grouped-pairwise scores around the
/// latent qualities and compares it to the closed form for averaged
/// independent noise. Meaningful only when config.quality keeps scores away
/// from the [1, 10] clamp (clamping shrinks the observed variance).
VarianceCheckResult variance_check(const SimConfig& config, int group_size);

}  // namespace pairjudge
