#include "bubbledate/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace bubbledate {

DegenerateSegment::DegenerateSegment(std::size_t from_, std::size_t to_)
    : std::runtime_error("degenerate segment [" + std::to_string(from_) + ", " + std::to_string(to_) +
                         "]: zero lag sum of squares"),
      from(from_),
      to(to_) {}

EmptyRange::EmptyRange(std::size_t lo_, std::size_t hi_)
    : std::runtime_error("no admissible break date in [" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]"),
      lo(lo_),
      hi(hi_) {}

// ---------------------------------------------------------------------------
// PrefixMoments
// ---------------------------------------------------------------------------

namespace {

// Neumaier-compensated running sum.
struct Compensated {
    long double sum = 0, carry = 0;
    void add(long double x) {
        const long double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] long double value() const { return sum + carry; }
};

}  // namespace

void PrefixMoments::accumulate(std::span<const double> values, std::optional<double> y0) {
    T_ = values.size();
    first_ = y0 ? 1 : 2;
    values_.assign(values.begin(), values.end());
    y0_ = y0;
    exact_ = std::make_shared<Exact>();
    fwd_fast_.assign(T_ + 1, FastRow{});
    bwd_fast_.assign(T_ + 2, FastRow{});

    std::vector<FastRow> inc(T_ + 1, FastRow{});
    for (std::size_t t = first_; t <= T_; ++t) {
        const long double lag = (t == 1) ? *y0 : values[t - 2];
        const long double cur = values[t - 1];
        inc[t] = {lag * cur, lag * lag, cur * cur};
    }
    std::array<Compensated, 3> f{}, b{};
    for (std::size_t t = 1; t <= T_; ++t) {
        for (std::size_t j = 0; j < 3; ++j) {
            f[j].add(inc[t][j]);
            fwd_fast_[t][j] = f[j].value();
        }
    }
    for (std::size_t t = T_; t >= 1; --t) {
        for (std::size_t j = 0; j < 3; ++j) {
            b[j].add(inc[t][j]);
            bwd_fast_[t][j] = b[j].value();
        }
    }
}

const PrefixMoments::Exact& PrefixMoments::exact() const {
    std::call_once(exact_->built, [this] {
        auto& e = *exact_;
        e.fwd.assign(T_ + 1, Row{});
        e.bwd.assign(T_ + 2, Row{});
        std::vector<Row> inc(T_ + 1, Row{});
        for (std::size_t t = first_; t <= T_; ++t) {
            const Wide lag = (t == 1) ? *y0_ : values_[t - 2];
            const Wide cur = values_[t - 1];
            inc[t] = {lag * cur, lag * lag, cur * cur};
        }
        for (std::size_t t = 1; t <= T_; ++t) {
            for (std::size_t j = 0; j < 3; ++j) e.fwd[t][j] = e.fwd[t - 1][j] + inc[t][j];
        }
        for (std::size_t t = T_; t >= 1; --t) {
            for (std::size_t j = 0; j < 3; ++j) e.bwd[t][j] = e.bwd[t + 1][j] + inc[t][j];
        }
    });
    return *exact_;
}

PrefixMoments PrefixMoments::build(const Series& series) {
    PrefixMoments m;
    m.accumulate(series.values(), series.initial_value());
    return m;
}

PrefixMoments PrefixMoments::build(std::span<const double> values, double y0) {
    PrefixMoments m;
    m.accumulate(values, y0);
    return m;
}

PrefixMoments PrefixMoments::build(std::span<const double> values) {
    PrefixMoments m;
    m.accumulate(values, std::nullopt);
    return m;
}

namespace {

// Cancellation scale of each route is the larger total it subtracts from.
template <class Rows>
bool forward_route(const Rows& fwd, const Rows& bwd, std::size_t from, std::size_t to) {
    return fwd[to][2] + fwd[to][1] <= bwd[from][2] + bwd[from][1];
}

}  // namespace

PrefixMoments::SegmentSums PrefixMoments::segment(std::size_t from, std::size_t to) const {
    const auto& e = exact();
    if (forward_route(e.fwd, e.bwd, from, to)) {
        const Row& hi = e.fwd[to];
        const Row& lo = e.fwd[from - 1];
        return {hi[kCross] - lo[kCross], hi[kLag2] - lo[kLag2], hi[kSq] - lo[kSq]};
    }
    const Row& lo = e.bwd[from];
    const Row& hi = e.bwd[to + 1];
    return {lo[kCross] - hi[kCross], lo[kLag2] - hi[kLag2], lo[kSq] - hi[kSq]};
}

PrefixMoments::FastSums PrefixMoments::segment_fast(std::size_t from, std::size_t to) const {
    if (forward_route(fwd_fast_, bwd_fast_, from, to)) {
        const FastRow& hi = fwd_fast_[to];
        const FastRow& lo = fwd_fast_[from - 1];
        return {hi[kCross] - lo[kCross], hi[kLag2] - lo[kLag2], hi[kSq] - lo[kSq], hi[kSq] + hi[kLag2]};
    }
    const FastRow& lo = bwd_fast_[from];
    const FastRow& hi = bwd_fast_[to + 1];
    return {lo[kCross] - hi[kCross], lo[kLag2] - hi[kLag2], lo[kSq] - hi[kSq], lo[kSq] + lo[kLag2]};
}

// ---------------------------------------------------------------------------
// Segment regressions
// ---------------------------------------------------------------------------

namespace {

// Long double SSR is kept when it is at least this fraction of the summed
// magnitudes; below it the quad-precision sums are used.
constexpr long double kFastPathFloor = 1e-6L;

}  // namespace

std::optional<SegmentFit> try_fit_segment(const PrefixMoments& moments, std::size_t from, std::size_t to) noexcept {
    if (from < 1 || from > to || to > moments.size()) return std::nullopt;
    const std::size_t first_obs = std::max(from, moments.first_observation());
    const std::size_t n = to >= first_obs ? to - first_obs + 1 : 0;

    const auto fast = moments.segment_fast(from, to);
    if (fast.lag2 > 0) {
        const long double phi = fast.cross / fast.lag2;
        const long double ssr = fast.sq - phi * fast.cross;
        if (ssr >= kFastPathFloor * fast.scale) return SegmentFit{static_cast<double>(phi), static_cast<double>(ssr), n};
    }

    const auto sums = moments.segment(from, to);
    if (!(sums.lag2 > 0)) return std::nullopt;
    const PrefixMoments::Wide phi = sums.cross / sums.lag2;
    PrefixMoments::Wide ssr = sums.sq - phi * sums.cross;
    // Rounding can push an exact fit slightly below zero.
    if (ssr < 0) ssr = 0;
    return SegmentFit{static_cast<double>(phi), static_cast<double>(ssr), n};
}

SegmentFit fit_segment(const PrefixMoments& moments, std::size_t from, std::size_t to) {
    if (from < 1 || from > to || to > moments.size()) {
        throw std::out_of_range("fit_segment: need 1 <= from <= to <= T");
    }
    auto fit = try_fit_segment(moments, from, to);
    if (!fit) throw DegenerateSegment(from, to);
    return *fit;
}

namespace {

std::optional<double> split_ssr(const PrefixMoments& moments, Window w, std::size_t k) noexcept {
    if (k < w.first || k >= w.last) return std::nullopt;
    const auto left = try_fit_segment(moments, w.first, k);
    if (!left) return std::nullopt;
    const auto right = try_fit_segment(moments, k + 1, w.last);
    if (!right) return std::nullopt;
    return left->ssr + right->ssr;
}

}  // namespace

double ssr_split(const PrefixMoments& moments, std::size_t k) {
    if (k < 1 || k >= moments.size()) throw std::out_of_range("ssr_split: need 1 <= k < T");
    return fit_segment(moments, 1, k).ssr + fit_segment(moments, k + 1, moments.size()).ssr;
}

BreakScan argmin_break(const PrefixMoments& moments, Window window, DateRange range, Execution exec) {
    if (range.empty()) throw EmptyRange(range.lo, range.hi);
    const std::size_t n = range.hi - range.lo + 1;
    std::vector<double> values(n);
    constexpr double kSkipped = std::numeric_limits<double>::quiet_NaN();

    if (exec == Execution::Parallel) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            values[i] = split_ssr(moments, window, range.lo + i).value_or(kSkipped);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) values[i] = split_ssr(moments, window, range.lo + i).value_or(kSkipped);
    }

    // Date-ordered reduction; identical for both execution paths.
    BreakScan scan{0, {}, {}};
    scan.curve.reserve(n);
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = range.lo + i;
        if (std::isnan(values[i])) {
            scan.degenerate.push_back(k);
            continue;
        }
        scan.curve.push_back({k, values[i]});
        if (!found || values[i] < best - kTieTolerance * std::abs(best)) {
            best = values[i];
            scan.k_hat = k;
            found = true;
        }
    }
    if (!found) throw EmptyRange(range.lo, range.hi);
    return scan;
}

BreakScan argmin_break(const PrefixMoments& moments, std::size_t k_lo, std::size_t k_hi, Execution exec) {
    return argmin_break(moments, Window{1, moments.size()}, DateRange{k_lo, k_hi}, exec);
}

// ---------------------------------------------------------------------------
// Sample-splitting procedure
// ---------------------------------------------------------------------------

BreakEstimates estimate_dates(const PrefixMoments& moments, TrimmingPolicy trimming, EstimateOptions options) {
    const std::size_t T = moments.size();
    const std::size_t margin = trimming.margin(T);
    const std::size_t upper = trimming.upper(T);
    const Window full{1, T};

    BreakEstimates out;
    out.range_c = DateRange{margin, upper};
    auto collapse = argmin_break(moments, full, out.range_c, options.exec);
    out.k_c_hat = collapse.k_hat;
    if (options.keep_curves) out.ssr_curve_c = std::move(collapse.curve);

    const std::size_t kc = out.k_c_hat;

    // Emergence: split [1..k_c_hat].
    if (kc >= 2 * margin) {
        out.range_e = DateRange{margin, kc - margin};
        try {
            auto scan = argmin_break(moments, Window{1, kc}, *out.range_e, options.exec);
            out.k_e_hat = scan.k_hat;
            if (options.keep_curves) out.ssr_curve_e = std::move(scan.curve);
        } catch (const EmptyRange&) {
            out.unavailable_reason_e = UnavailableReason::AllCandidatesDegenerate;
        }
    } else {
        out.unavailable_reason_e = UnavailableReason::BoundaryViolation;
    }

    // Recovery: split [k_c_hat+1..T].
    if (kc + margin + 1 <= upper) {
        out.range_r = DateRange{kc + margin + 1, upper};
        try {
            auto scan = argmin_break(moments, Window{kc + 1, T}, *out.range_r, options.exec);
            out.k_r_hat = scan.k_hat;
            if (options.keep_curves) out.ssr_curve_r = std::move(scan.curve);
        } catch (const EmptyRange&) {
            out.unavailable_reason_r = UnavailableReason::AllCandidatesDegenerate;
        }
    } else {
        out.unavailable_reason_r = UnavailableReason::BoundaryViolation;
    }
    return out;
}

BreakEstimates estimate_dates(const Series& series, TrimmingPolicy trimming, EstimateOptions options) {
    if (series.size() < kMinSeriesLength) {
        throw SeriesValidationError({{SeriesIssue::Kind::TooShort, series.size()}});
    }
    return estimate_dates(PrefixMoments::build(series), trimming, options);
}

// ---------------------------------------------------------------------------
// BIC model selection
// ---------------------------------------------------------------------------

const char* to_string(RegimeModel model) {
    switch (model) {
        case RegimeModel::TwoRegime: return "TwoRegime";
        case RegimeModel::ThreeRegime: return "ThreeRegime";
        case RegimeModel::FourRegime: return "FourRegime";
    }
    return "Unknown";
}

int bic_penalty_count(RegimeModel model) {
    switch (model) {
        case RegimeModel::TwoRegime: return 3;
        case RegimeModel::ThreeRegime: return 5;
        case RegimeModel::FourRegime: return 7;
    }
    return 0;
}

double bic_value(double ssr, std::size_t observations, int parameters) {
    const double n = static_cast<double>(observations);
    return n * std::log(ssr / n) + parameters * std::log(n);
}

double BicReport::bic(RegimeModel m) const {
    switch (m) {
        case RegimeModel::TwoRegime: return bic2;
        case RegimeModel::ThreeRegime: return bic3;
        case RegimeModel::FourRegime: return bic4;
    }
    return std::numeric_limits<double>::infinity();
}

namespace {

/// Total SSR of consecutive regimes separated after each date in `breaks`.
std::optional<double> piecewise_ssr(const PrefixMoments& moments, const std::vector<std::size_t>& breaks) {
    double total = 0.0;
    std::size_t from = 1;
    for (std::size_t i = 0; i <= breaks.size(); ++i) {
        const std::size_t to = i < breaks.size() ? breaks[i] : moments.size();
        const auto fit = try_fit_segment(moments, from, to);
        if (!fit) return std::nullopt;
        total += fit->ssr;
        from = to + 1;
    }
    return total;
}

}  // namespace

BicReport bic_select(const PrefixMoments& moments, const BreakEstimates& est) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    BicReport r;
    r.observations = moments.observations();

    auto score = [&](RegimeModel m, std::vector<std::size_t> dates, double& ssr_out, double& bic_out) {
        ssr_out = inf;
        bic_out = inf;
        if (dates.empty()) return;
        const auto ssr = piecewise_ssr(moments, dates);
        if (!ssr) return;
        ssr_out = *ssr;
        bic_out = bic_value(*ssr, r.observations, bic_penalty_count(m));
        r.dates_per_model[static_cast<std::size_t>(m)] = std::move(dates);
    };

    score(RegimeModel::TwoRegime, {est.k_c_hat}, r.ssr2, r.bic2);
    score(RegimeModel::ThreeRegime, est.k_e_hat ? std::vector<std::size_t>{*est.k_e_hat, est.k_c_hat}
                                                : std::vector<std::size_t>{},
          r.ssr3, r.bic3);
    score(RegimeModel::FourRegime,
          (est.k_e_hat && est.k_r_hat) ? std::vector<std::size_t>{*est.k_e_hat, est.k_c_hat, *est.k_r_hat}
                                       : std::vector<std::size_t>{},
          r.ssr4, r.bic4);

    // Strict improvement required, so ties go to fewer regimes.
    r.chosen = RegimeModel::TwoRegime;
    if (r.bic3 < r.bic(r.chosen)) r.chosen = RegimeModel::ThreeRegime;
    if (r.bic4 < r.bic(r.chosen)) r.chosen = RegimeModel::FourRegime;
    return r;
}

BicReport bic_select(const Series& series, TrimmingPolicy trimming) {
    const auto moments = PrefixMoments::build(series);
    EstimateOptions opts;
    opts.keep_curves = false;
    // Each specification's breaks are searched by the same one-break scans: the
    // two-regime break is the first scan's argmin, the three-regime breaks are
    // (emergence, collapse), and the four-regime model adds recovery.
    const auto est = estimate_dates(moments, trimming, opts);
    return bic_select(moments, est);
}

}  // namespace bubbledate
