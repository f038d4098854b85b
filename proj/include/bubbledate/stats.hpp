#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace bubbledate {

struct HistogramBin {
    double lo;
    double hi;
    std::size_t count;
    double density;
};

/// Equal-width bins on [lo, hi); values outside are dropped (density still
/// normalized by the full sample size).
[[nodiscard]] std::vector<HistogramBin> make_histogram(std::span<const double> draws, double lo, double hi,
                                                       std::size_t bins);

/// Total-variation distance between two histograms on identical bins.
[[nodiscard]] double total_variation(std::span<const HistogramBin> a, std::span<const HistogramBin> b);

/// Empirical quantile with linear interpolation (type 7).
[[nodiscard]] double quantile(std::vector<double> values, double p);

[[nodiscard]] double mean(std::span<const double> values);
/// Sample standard deviation (n − 1 denominator).
[[nodiscard]] double stddev(std::span<const double> values);

/// Two-sample Kolmogorov–Smirnov statistic sup|F_a − F_b|.
[[nodiscard]] double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Asymptotic critical value c(alpha)·sqrt((n + m)/(n·m)), c(alpha) = sqrt(−ln(alpha/2)/2).
[[nodiscard]] double ks_critical_value(double alpha, std::size_t n, std::size_t m);

/// CSV with columns bin_lo,bin_hi,count,density.
void write_histogram_csv(std::ostream& os, std::span<const HistogramBin> bins);

}  // namespace bubbledate
