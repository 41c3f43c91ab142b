#include "pairjudge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pairjudge {

AccuracyReport pairwise_accuracy(std::span<const TrainingReward> rewards) {
    if (rewards.empty()) {
        throw std::invalid_argument("pairwise accuracy over zero rewards is undefined");
    }
    AccuracyReport report;
    report.total = static_cast<std::int64_t>(rewards.size());
    for (const TrainingReward& reward : rewards) {
        if (reward.reason == RewardReason::CorrectOrder) {
            ++report.correct;
        }
        ++report.breakdown[to_string(reward.reason)];
    }
    report.accuracy =
        static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

CorrelationReport pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("correlation inputs differ in length (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("correlation needs at least two points");
    }
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::invalid_argument("correlation is undefined for a zero-variance input");
    }
    return {sxy / std::sqrt(sxx * syy), x.size()};
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        // Positions i..j (0-based) share the mean of ranks i+1..j+1.
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = shared;
        }
        i = j + 1;
    }
    return ranks;
}

CorrelationReport spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("correlation inputs differ in length (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    }
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

Histogram score_histogram(std::span<const double> values, double lo, double hi,
                          double bin_width) {
    if (values.empty()) {
        throw std::invalid_argument("histogram over zero values is undefined");
    }
    if (!(hi > lo)) {
        throw std::invalid_argument("histogram range must satisfy lo < hi");
    }
    if (!(bin_width > 0.0)) {
        throw std::invalid_argument("histogram bin width must be positive");
    }

    const std::size_t bins =
        static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-12));
    Histogram hist;
    hist.bin_edges.reserve(bins + 1);
    for (std::size_t i = 0; i < bins; ++i) {
        hist.bin_edges.push_back(lo + static_cast<double>(i) * bin_width);
    }
    hist.bin_edges.push_back(hi);  // final bin may be narrower than bin_width
    hist.counts.assign(bins, 0);

    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("histogram input contains a non-finite value");
        }
        std::size_t bin;
        if (v < lo) {
            bin = 0;
            ++hist.below_range;
        } else if (v >= hi) {
            bin = bins - 1;
            if (v > hi) {
                ++hist.above_range;
            }
        } else {
            bin = static_cast<std::size_t>((v - lo) / bin_width);
            bin = std::min(bin, bins - 1);
        }
        ++hist.counts[bin];
    }
    return hist;
}

}  // namespace pairjudge
