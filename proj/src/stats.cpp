#include "bubbledate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace bubbledate {

std::vector<HistogramBin> make_histogram(std::span<const double> draws, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("make_histogram: need bins > 0 and hi > lo");
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i] = {lo + width * static_cast<double>(i), lo + width * static_cast<double>(i + 1), 0, 0.0};
    }
    for (double x : draws) {
        if (!(x >= lo && x < hi)) continue;
        auto i = static_cast<std::size_t>((x - lo) / width);
        out[std::min(i, bins - 1)].count++;
    }
    const double n = static_cast<double>(draws.size());
    for (auto& b : out) b.density = n > 0 ? static_cast<double>(b.count) / (n * width) : 0.0;
    return out;
}

double total_variation(std::span<const HistogramBin> a, std::span<const HistogramBin> b) {
    if (a.size() != b.size()) throw std::invalid_argument("total_variation: bin count mismatch");
    double na = 0, nb = 0;
    for (const auto& x : a) na += static_cast<double>(x.count);
    for (const auto& x : b) nb += static_cast<double>(x.count);
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        tv += std::abs(static_cast<double>(a[i].count) / na - static_cast<double>(b[i].count) / nb);
    }
    return 0.5 * tv;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= values.size()) return values.back();
    return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

void write_histogram_csv(std::ostream& os, std::span<const HistogramBin> bins) {
    os << "bin_lo,bin_hi,count,density\n" << std::setprecision(10);
    for (const auto& b : bins) os << b.lo << ',' << b.hi << ',' << b.count << ',' << b.density << '\n';
}

}  // namespace bubbledate
