#include "bubbledate/core_types.hpp"

#include <cmath>
#include <sstream>

namespace bubbledate {

namespace {
// Absorbs representation error in products like 0.7 * 800.
constexpr double kIndexSlack = 1e-9;
}  // namespace

std::string SeriesIssue::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::NonFinite: os << "NonFinite(" << value << ")"; break;
        case Kind::TooShort: os << "TooShort(" << value << ")"; break;
        case Kind::LabelCountMismatch: os << "LabelCountMismatch(" << value << ")"; break;
    }
    return os.str();
}

namespace {
std::string join_issues(const std::vector<SeriesIssue>& issues) {
    std::string out = "invalid series:";
    for (const auto& issue : issues) out += " " + issue.describe();
    return out;
}
}  // namespace

SeriesValidationError::SeriesValidationError(std::vector<SeriesIssue> issues)
    : std::invalid_argument(join_issues(issues)), issues_(std::move(issues)) {}

std::string Series::label_at(std::size_t k) const {
    if (!labels_ || k == 0 || k > labels_->size()) return {};
    return (*labels_)[k - 1];
}

Series Series::with_initial_value(double y0) const {
    Series copy = *this;
    copy.initial_value_ = y0;
    return copy;
}

Series Series::without_initial_value() const {
    Series copy = *this;
    copy.initial_value_.reset();
    return copy;
}

Series validate_series(std::vector<double> raw, std::optional<std::vector<std::string>> labels,
                       std::size_t min_length) {
    std::vector<SeriesIssue> issues;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i])) issues.push_back({SeriesIssue::Kind::NonFinite, i});
    }
    if (raw.size() < min_length) issues.push_back({SeriesIssue::Kind::TooShort, raw.size()});
    if (labels && labels->size() != raw.size()) {
        issues.push_back({SeriesIssue::Kind::LabelCountMismatch, labels->size()});
    }
    if (!issues.empty()) throw SeriesValidationError(std::move(issues));

    Series s;
    s.values_ = std::move(raw);
    s.labels_ = std::move(labels);
    return s;
}

Series make_series_unchecked(std::vector<double> values, std::optional<double> y0) {
    Series s = validate_series(std::move(values), std::nullopt, 0);
    s.initial_value_ = y0;
    return s;
}

// ---------------------------------------------------------------------------

std::size_t break_index(double tau, std::size_t T) {
    return static_cast<std::size_t>(std::floor(tau * static_cast<double>(T) + kIndexSlack));
}

double DgpConfig::drift0() const {
    if (drift0_override) return *drift0_override;
    return c0 * std::pow(static_cast<double>(T), -eta0);
}

double DgpConfig::drift1() const {
    if (drift1_override) return *drift1_override;
    return c1 * std::pow(static_cast<double>(T), -eta1);
}

std::size_t DgpConfig::k_e() const { return break_index(tau_e, T); }
std::size_t DgpConfig::k_c() const { return break_index(tau_c, T); }
std::size_t DgpConfig::k_r() const { return break_index(tau_r, T); }

std::vector<std::string> DgpConfig::violations() const {
    std::vector<std::string> out;
    if (T == 0) out.emplace_back("T must be positive");
    if (!(tau_e > 0.0 && tau_e < tau_c && tau_c < tau_r && tau_r <= 1.0)) {
        out.emplace_back("break fractions must satisfy 0 < tau_e < tau_c < tau_r <= 1");
    }
    if (!(phi_a > 1.0)) out.emplace_back("phi_a must exceed 1");
    if (!(phi_b > 0.0 && phi_b < 1.0)) out.emplace_back("phi_b must lie in (0, 1)");
    if (!(c0 >= 0.0)) out.emplace_back("c0 must be nonnegative");
    if (!(c1 >= 0.0)) out.emplace_back("c1 must be nonnegative");
    if (!(eta0 > 0.5)) out.emplace_back("eta0 must exceed 1/2");
    if (!(eta1 > 0.5)) out.emplace_back("eta1 must exceed 1/2");
    if (!std::isfinite(y0)) out.emplace_back("y0 must be finite");
    if (drift0_override && !std::isfinite(*drift0_override)) out.emplace_back("drift0 must be finite");
    if (drift1_override && !std::isfinite(*drift1_override)) out.emplace_back("drift1 must be finite");
    if (T > 0 && out.empty()) {
        const auto ke = k_e(), kc = k_c(), kr = k_r();
        if (ke < 1) out.emplace_back("floor(tau_e*T) must be at least 1");
        if (!(ke < kc && kc < kr)) out.emplace_back("break indices k_e < k_c < k_r must be strictly increasing");
    }
    return out;
}

void DgpConfig::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid DGP config:";
    for (const auto& s : v) msg += " " + s + ";";
    throw std::invalid_argument(msg);
}

double explosive_exponent(double phi_a, double c_a, std::size_t T) {
    if (!(phi_a > 1.0)) throw std::domain_error("explosive_exponent: phi_a must exceed 1");
    if (!(c_a > 0.0) || T < 2) throw std::domain_error("explosive_exponent: need c_a > 0 and T >= 2");
    return std::log(c_a / (phi_a - 1.0)) / std::log(static_cast<double>(T));
}

double stationary_exponent(double phi_b, double c_b, std::size_t T) {
    if (!(phi_b < 1.0)) throw std::domain_error("stationary_exponent: phi_b must be below 1");
    if (!(c_b > 0.0) || T < 2) throw std::domain_error("stationary_exponent: need c_b > 0 and T >= 2");
    return std::log(c_b / (1.0 - phi_b)) / std::log(static_cast<double>(T));
}

LocalizingExponents derived_exponents(const DgpConfig& config) {
    return {explosive_exponent(config.phi_a, 1.0, config.T), stationary_exponent(config.phi_b, 1.0, config.T), 1.0,
            1.0};
}

// ---------------------------------------------------------------------------

VolatilityProfile VolatilityProfile::constant(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("volatility must be positive");
    return VolatilityProfile(ConstantVolatility{sigma});
}

VolatilityProfile VolatilityProfile::single_shift(double sigma0, double sigma1, double tau_sigma) {
    if (!(sigma0 > 0.0) || !(sigma1 > 0.0) || !std::isfinite(sigma0) || !std::isfinite(sigma1)) {
        throw std::invalid_argument("volatility levels must be positive");
    }
    if (!(tau_sigma > 0.0 && tau_sigma < 1.0)) throw std::invalid_argument("tau_sigma must lie in (0, 1)");
    return VolatilityProfile(SingleShiftVolatility{sigma0, sigma1, tau_sigma});
}

double VolatilityProfile::omega(double s) const {
    if (const auto* c = std::get_if<ConstantVolatility>(&kind_)) return c->sigma;
    const auto& shift = std::get<SingleShiftVolatility>(kind_);
    return s > shift.tau_sigma ? shift.sigma1 : shift.sigma0;
}

LinearProcessCoeffs::LinearProcessCoeffs(std::vector<double> psi) : psi_(std::move(psi)) {
    if (psi_.empty()) throw std::invalid_argument("linear process needs at least psi_0");
    for (double v : psi_) {
        if (!std::isfinite(v)) throw std::invalid_argument("linear process coefficients must be finite");
    }
}

double LinearProcessCoeffs::summability() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < psi_.size(); ++j) acc += std::pow(static_cast<double>(j), 1.5) * std::abs(psi_[j]);
    return acc;
}

TrimmingPolicy TrimmingPolicy::of(double rho) {
    if (!(rho > 0.0 && rho <= 0.25)) throw std::invalid_argument("trimming fraction must lie in (0, 0.25]");
    return TrimmingPolicy{rho};
}

std::size_t TrimmingPolicy::margin(std::size_t T) const {
    return static_cast<std::size_t>(std::ceil(rho * static_cast<double>(T) - kIndexSlack));
}

std::size_t TrimmingPolicy::upper(std::size_t T) const {
    return static_cast<std::size_t>(std::floor((1.0 - rho) * static_cast<double>(T) + kIndexSlack));
}

const char* to_string(UnavailableReason reason) {
    switch (reason) {
        case UnavailableReason::BoundaryViolation: return "BoundaryViolation";
        case UnavailableReason::AllCandidatesDegenerate: return "AllCandidatesDegenerate";
    }
    return "Unknown";
}

}  // namespace bubbledate
