#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bubbledate {

/// Smallest sample size accepted by the estimation entry points.
inline constexpr std::size_t kMinSeriesLength = 40;

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

/// One violated invariant found by validate_series().
struct SeriesIssue {
    enum class Kind { NonFinite, TooShort, LabelCountMismatch };
    Kind kind;
    /// Zero-based offending index for NonFinite, length for the other kinds.
    std::size_t value;

    [[nodiscard]] std::string describe() const;
    friend bool operator==(const SeriesIssue&, const SeriesIssue&) = default;
};

class SeriesValidationError : public std::invalid_argument {
public:
    explicit SeriesValidationError(std::vector<SeriesIssue> issues);
    [[nodiscard]] const std::vector<SeriesIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<SeriesIssue> issues_;
};

/**
 * @brief Observed or simulated path y_1..y_T.
 *
 * `initial_value` carries y_0 when it is known (simulated data). When it is
 * absent the first observation serves as the first lag and the regression
 * sample is t = 2..T. Values are never rescaled or centered.
 */
class Series {
public:
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::optional<double> initial_value() const noexcept { return initial_value_; }

    /// Label of the 1-based date k, or an empty string when there are no labels.
    [[nodiscard]] std::string label_at(std::size_t k) const;

    [[nodiscard]] Series with_initial_value(double y0) const;
    [[nodiscard]] Series without_initial_value() const;

private:
    friend Series validate_series(std::vector<double> raw, std::optional<std::vector<std::string>> labels,
                                  std::size_t min_length);
    friend Series make_series_unchecked(std::vector<double> values, std::optional<double> y0);

    std::vector<double> values_;
    std::optional<std::vector<std::string>> labels_;
    std::optional<double> initial_value_;
};

/// Validates raw values into a Series; throws SeriesValidationError listing every issue.
[[nodiscard]] Series validate_series(std::vector<double> raw,
                                     std::optional<std::vector<std::string>> labels = std::nullopt,
                                     std::size_t min_length = kMinSeriesLength);

/// Builds a Series without the length check (values must still be finite).
/// Used by the simulator, whose paths may be shorter than an estimable sample.
[[nodiscard]] Series make_series_unchecked(std::vector<double> values, std::optional<double> y0 = std::nullopt);

// ---------------------------------------------------------------------------
// DGP configuration
// ---------------------------------------------------------------------------

/// Parameters of the four-regime bubble model: unit root with drift, mildly
/// explosive, mildly stationary collapse, unit root with drift.
struct DgpConfig {
    double tau_e = 0.4;
    double tau_c = 0.6;
    double tau_r = 0.7;
    double phi_a = 1.05;
    double phi_b = 0.96;
    double c0 = 0.0;
    double c1 = 0.0;
    double eta0 = 1.0;
    double eta1 = 1.0;
    double y0 = 0.0;
    std::size_t T = 800;
    /// Direct per-regime drift values; override c·T^(−η) when set.
    std::optional<double> drift0_override;
    std::optional<double> drift1_override;

    [[nodiscard]] double drift0() const;
    [[nodiscard]] double drift1() const;
    [[nodiscard]] std::size_t k_e() const;
    [[nodiscard]] std::size_t k_c() const;
    [[nodiscard]] std::size_t k_r() const;

    /// Every violated constraint, in human-readable form. Empty when valid.
    [[nodiscard]] std::vector<std::string> violations() const;
    /// Throws std::invalid_argument when violations() is nonempty.
    void validate() const;
};

/// Break index floor(tau·T) with a guard against representation error
/// (0.7·800 must be 560, not 559).
[[nodiscard]] std::size_t break_index(double tau, std::size_t T);

/// Exponents of the localizing forms phi_a = 1 + c_a/T^a and phi_b = 1 − c_b/T^b.
struct LocalizingExponents {
    double a;
    double b;
    double c_a;
    double c_b;
};

/// Exponent alpha solving 1 + c/T^alpha = phi (explosive side).
[[nodiscard]] double explosive_exponent(double phi_a, double c_a, std::size_t T);
/// Exponent beta solving 1 − c/T^beta = phi (stationary side).
[[nodiscard]] double stationary_exponent(double phi_b, double c_b, std::size_t T);

/// Exponents with c_a = c_b = 1. Throws std::domain_error when phi_a ≤ 1 or phi_b ≥ 1.
[[nodiscard]] LocalizingExponents derived_exponents(const DgpConfig& config);

// ---------------------------------------------------------------------------
// Volatility and linear-process coefficients
// ---------------------------------------------------------------------------

struct ConstantVolatility {
    double sigma = 1.0;
};

/// omega(s) = sigma0 + (sigma1 − sigma0)·1(s > tau_sigma)
struct SingleShiftVolatility {
    double sigma0 = 1.0;
    double sigma1 = 1.0;
    double tau_sigma = 0.5;
};

class VolatilityProfile {
public:
    using Kind = std::variant<ConstantVolatility, SingleShiftVolatility>;

    static VolatilityProfile constant(double sigma);
    static VolatilityProfile single_shift(double sigma0, double sigma1, double tau_sigma);

    /// omega(s) for s in [0, 1].
    [[nodiscard]] double omega(double s) const;
    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

private:
    explicit VolatilityProfile(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// Truncated MA coefficients psi_0..psi_L of a linear process.
class LinearProcessCoeffs {
public:
    explicit LinearProcessCoeffs(std::vector<double> psi);

    [[nodiscard]] std::span<const double> psi() const noexcept { return psi_; }
    /// Truncation index L (coefficients stored for j = 0..L).
    [[nodiscard]] std::size_t truncation() const noexcept { return psi_.size() - 1; }
    /// sum_j j^{3/2}|psi_j|
    [[nodiscard]] double summability() const;

private:
    std::vector<double> psi_;
};

struct TrimmingPolicy {
    double rho = 0.05;

    /// Throws std::invalid_argument unless 0 < rho ≤ 0.25.
    static TrimmingPolicy of(double rho);
    /// ceil(rho·T): smallest admissible break date and minimum regime length.
    [[nodiscard]] std::size_t margin(std::size_t T) const;
    /// floor((1 − rho)·T): largest admissible break date.
    [[nodiscard]] std::size_t upper(std::size_t T) const;
};

// ---------------------------------------------------------------------------
// Estimates
// ---------------------------------------------------------------------------

enum class UnavailableReason { BoundaryViolation, AllCandidatesDegenerate };

[[nodiscard]] const char* to_string(UnavailableReason reason);

struct SsrPoint {
    std::size_t k;
    double ssr;
    friend bool operator==(const SsrPoint&, const SsrPoint&) = default;
};

using SsrCurve = std::vector<SsrPoint>;

/// Inclusive range of admissible break dates.
struct DateRange {
    std::size_t lo;
    std::size_t hi;
    [[nodiscard]] bool contains(std::size_t k) const noexcept { return lo <= k && k <= hi; }
    [[nodiscard]] bool empty() const noexcept { return lo > hi; }
};

struct BreakEstimates {
    std::size_t k_c_hat = 0;
    std::optional<std::size_t> k_e_hat;
    std::optional<std::size_t> k_r_hat;
    DateRange range_c{};
    std::optional<DateRange> range_e;
    std::optional<DateRange> range_r;
    std::optional<SsrCurve> ssr_curve_c;
    std::optional<SsrCurve> ssr_curve_e;
    std::optional<SsrCurve> ssr_curve_r;
    std::optional<UnavailableReason> unavailable_reason_e;
    std::optional<UnavailableReason> unavailable_reason_r;
};

}  // namespace bubbledate
