#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bubbledate/core_types.hpp"
#include "bubbledate/parallel.hpp"

namespace bubbledate {

/// Thrown when a segment regression has a zero lag sum of squares.
class DegenerateSegment : public std::runtime_error {
public:
    DegenerateSegment(std::size_t from, std::size_t to);
    std::size_t from, to;
};

/// Thrown when a scan has no admissible, nondegenerate candidate.
class EmptyRange : public std::runtime_error {
public:
    EmptyRange(std::size_t lo, std::size_t hi);
    std::size_t lo, hi;
};

/**
 * @brief Cumulative sufficient statistics of the no-intercept AR(1) regression.
 *
 * For observation dates t = 1..T the increments are y_{t−1}·y_t, y_{t−1}² and
 * y_t². Dates without a lag (t = 1 when y_0 is unknown) contribute zero, so
 * every index keeps its calendar meaning.
 *
 * Both forward and backward cumulative sums are kept. A segment sum is taken
 * from whichever side subtracts the smaller totals, which keeps tail segments
 * accurate after an explosive episode has inflated the running sums.
 *
 * Sums are held in compensated long double for the common case. Quad
 * precision sums are built on first use, for segments whose SSR is a tiny
 * fraction of the totals involved.
 */
class PrefixMoments {
public:
    /// Quad precision: increments are exact products of doubles.
    using Wide = __float128;

    PrefixMoments() = default;

    /// Uses series.initial_value() as y_0 when present, else the regression
    /// sample starts at t = 2.
    static PrefixMoments build(const Series& series);
    /// Explicit y_0; the regression sample is t = 1..T.
    static PrefixMoments build(std::span<const double> values, double y0);
    /// No y_0; the regression sample is t = 2..T.
    static PrefixMoments build(std::span<const double> values);

    [[nodiscard]] std::size_t size() const noexcept { return T_; }
    /// First date carrying a regression observation (1 or 2).
    [[nodiscard]] std::size_t first_observation() const noexcept { return first_; }
    /// Regression observations in the full sample.
    [[nodiscard]] std::size_t observations() const noexcept { return T_ + 1 - first_; }

    /// Forward cumulative sums, k = 0..T; index 0 is the empty sum.
    [[nodiscard]] double s_cross(std::size_t k) const { return static_cast<double>(fwd_fast_[k][kCross]); }
    [[nodiscard]] double s_lag2(std::size_t k) const { return static_cast<double>(fwd_fast_[k][kLag2]); }
    [[nodiscard]] double s_sq(std::size_t k) const { return static_cast<double>(fwd_fast_[k][kSq]); }

    struct SegmentSums {
        Wide cross = 0, lag2 = 0, sq = 0;
    };
    /// Quad precision sums over dates from..to inclusive, 1 ≤ from ≤ to ≤ T.
    [[nodiscard]] SegmentSums segment(std::size_t from, std::size_t to) const;

    struct FastSums {
        long double cross = 0, lag2 = 0, sq = 0;
        /// Largest total subtracted; bounds the rounding error of the sums.
        long double scale = 0;
    };
    /// Long double sums over from..to.
    [[nodiscard]] FastSums segment_fast(std::size_t from, std::size_t to) const;

private:
    static constexpr std::size_t kCross = 0, kLag2 = 1, kSq = 2;
    using Row = std::array<Wide, 3>;
    using FastRow = std::array<long double, 3>;

    struct Exact {
        std::once_flag built;
        std::vector<Row> fwd;  // fwd[k] = sum over t ≤ k
        std::vector<Row> bwd;  // bwd[k] = sum over t ≥ k, size T+2
    };

    void accumulate(std::span<const double> values, std::optional<double> y0);
    const Exact& exact() const;

    std::size_t T_ = 0;
    std::size_t first_ = 1;
    std::vector<double> values_;
    std::optional<double> y0_;
    std::vector<FastRow> fwd_fast_;
    std::vector<FastRow> bwd_fast_;
    std::shared_ptr<Exact> exact_;
};

struct SegmentFit {
    double phi_hat = 0.0;
    double ssr = 0.0;
    std::size_t n = 0;
};

/// OLS without intercept of y_t on y_{t−1} over dates from..to. Throws
/// DegenerateSegment when the lag sum of squares is zero.
[[nodiscard]] SegmentFit fit_segment(const PrefixMoments& moments, std::size_t from, std::size_t to);
/// Non-throwing variant used inside scans.
[[nodiscard]] std::optional<SegmentFit> try_fit_segment(const PrefixMoments& moments, std::size_t from,
                                                        std::size_t to) noexcept;

/// Two-regime SSR of the full sample split after date k.
[[nodiscard]] double ssr_split(const PrefixMoments& moments, std::size_t k);

/// Dates first..last split after k into [first..k] and [k+1..last].
struct Window {
    std::size_t first;
    std::size_t last;
};

struct BreakScan {
    std::size_t k_hat;
    SsrCurve curve;
    /// Candidates skipped because one side was degenerate.
    std::vector<std::size_t> degenerate;
};

/// SSR values within this relative distance are treated as ties.
inline constexpr double kTieTolerance = 1e-9;

/**
 * @brief Minimizes the two-segment SSR over candidate dates in `range`.
 *
 * Ties (within kTieTolerance) go to the smallest date. The parallel path
 * evaluates candidates concurrently and reduces in date order, so it returns
 * exactly what the serial path returns. Throws EmptyRange when no candidate
 * is admissible.
 */
[[nodiscard]] BreakScan argmin_break(const PrefixMoments& moments, Window window, DateRange range,
                                     Execution exec = Execution::Serial);
/// Full-sample scan over [k_lo, k_hi].
[[nodiscard]] BreakScan argmin_break(const PrefixMoments& moments, std::size_t k_lo, std::size_t k_hi,
                                     Execution exec = Execution::Serial);

struct EstimateOptions {
    bool keep_curves = true;
    Execution exec = Execution::Serial;
};

/// Collapse date by a one-break scan, then emergence and recovery dates on the
/// subsamples before and after it.
[[nodiscard]] BreakEstimates estimate_dates(const Series& series, TrimmingPolicy trimming,
                                            EstimateOptions options = {});
[[nodiscard]] BreakEstimates estimate_dates(const PrefixMoments& moments, TrimmingPolicy trimming,
                                            EstimateOptions options = {});

enum class RegimeModel { TwoRegime = 0, ThreeRegime = 1, FourRegime = 2 };

[[nodiscard]] const char* to_string(RegimeModel model);

struct BicReport {
    double bic2 = 0.0, bic3 = 0.0, bic4 = 0.0;
    double ssr2 = 0.0, ssr3 = 0.0, ssr4 = 0.0;
    std::size_t observations = 0;
    RegimeModel chosen = RegimeModel::TwoRegime;
    /// Break dates behind each model, indexed by RegimeModel. Empty when unavailable.
    std::array<std::vector<std::size_t>, 3> dates_per_model;

    [[nodiscard]] double bic(RegimeModel m) const;
};

/// Number of estimated parameters (AR coefficients plus breaks) per model.
[[nodiscard]] int bic_penalty_count(RegimeModel model);

/// BIC = N·ln(SSR/N) + p·ln(N).
[[nodiscard]] double bic_value(double ssr, std::size_t observations, int parameters);

[[nodiscard]] BicReport bic_select(const Series& series, TrimmingPolicy trimming);
/// Uses already computed break dates (must come from estimate_dates on the same moments).
[[nodiscard]] BicReport bic_select(const PrefixMoments& moments, const BreakEstimates& estimates);

}  // namespace bubbledate
