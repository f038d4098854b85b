#include "bubbledate/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "bubbledate/rng.hpp"

namespace bubbledate {

namespace {
constexpr std::size_t kMinBurnIn = 50;

std::size_t effective_burn_in(const LinearProcessErrors& lp) {
    return std::max({lp.burn_in, lp.coeffs.truncation(), kMinBurnIn});
}
}  // namespace

void ErrorSpec::validate() const {
    if (const auto* iid = std::get_if<IidGaussianErrors>(&kind)) {
        if (!(iid->sigma > 0.0) || !std::isfinite(iid->sigma)) throw std::invalid_argument("sigma must be positive");
    } else if (const auto* lp = std::get_if<LinearProcessErrors>(&kind)) {
        if (!(lp->innovation_sigma > 0.0) || !std::isfinite(lp->innovation_sigma)) {
            throw std::invalid_argument("innovation sigma must be positive");
        }
        if (lp->burn_in < lp->coeffs.truncation()) {
            throw std::invalid_argument("linear process burn-in must be at least the truncation length L");
        }
    }
}

std::vector<double> apply_linear_filter(const LinearProcessCoeffs& coeffs, std::span<const double> innovations,
                                        std::size_t T) {
    const auto psi = coeffs.psi();
    const std::size_t L = coeffs.truncation();
    if (innovations.size() < T + L) throw std::invalid_argument("apply_linear_filter: not enough innovations");
    const std::size_t offset = innovations.size() - T;
    std::vector<double> eps(T);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t pos = offset + t;
        double acc = 0.0;
        for (std::size_t j = 0; j <= L; ++j) acc += psi[j] * innovations[pos - j];
        eps[t] = acc;
    }
    return eps;
}

std::vector<double> generate_errors(const ErrorSpec& errors, std::size_t T, std::uint64_t seed) {
    errors.validate();
    GaussianStream draw(seed, {streams::kErrors});
    std::vector<double> eps(T);

    if (const auto* iid = std::get_if<IidGaussianErrors>(&errors.kind)) {
        for (auto& e : eps) e = iid->sigma * draw();
        return eps;
    }
    if (const auto* vol = std::get_if<VolatilityScaledErrors>(&errors.kind)) {
        for (std::size_t t = 1; t <= T; ++t) {
            const double sigma_t = vol->profile.omega(static_cast<double>(t) / static_cast<double>(T));
            eps[t - 1] = sigma_t * draw();
        }
        return eps;
    }
    const auto& lp = std::get<LinearProcessErrors>(errors.kind);
    std::vector<double> v(effective_burn_in(lp) + T);
    for (auto& x : v) x = lp.innovation_sigma * draw();
    return apply_linear_filter(lp.coeffs, v, T);
}

std::vector<double> simulate_path(const DgpConfig& config, std::span<const double> errors) {
    config.validate();
    const std::size_t T = config.T;
    if (errors.size() != T) throw std::invalid_argument("simulate_path: need exactly T errors");
    const std::size_t ke = config.k_e(), kc = config.k_c(), kr = config.k_r();
    const double d0 = config.drift0(), d1 = config.drift1();

    std::vector<double> y(T);
    double prev = config.y0;
    for (std::size_t t = 1; t <= T; ++t) {
        const double e = errors[t - 1];
        double cur;
        if (t <= ke) {
            cur = prev + d0 + e;
        } else if (t <= kc) {
            cur = config.phi_a * prev + e;
        } else if (t <= kr) {
            cur = config.phi_b * prev + e;
        } else {
            cur = prev + d1 + e;
        }
        y[t - 1] = cur;
        prev = cur;
    }
    return y;
}

Series simulate(const DgpConfig& config, const ErrorSpec& errors, std::uint64_t seed) {
    const auto eps = generate_errors(errors, config.T, seed);
    return make_series_unchecked(simulate_path(config, eps), config.y0);
}

double variance_profile(const VolatilityProfile& profile, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("variance_profile: tau must lie in [0, 1]");
    if (std::holds_alternative<ConstantVolatility>(profile.kind())) return tau;
    const auto& s = std::get<SingleShiftVolatility>(profile.kind());
    const double v0 = s.sigma0 * s.sigma0, v1 = s.sigma1 * s.sigma1;
    auto integral = [&](double x) { return v0 * std::min(x, s.tau_sigma) + v1 * std::max(0.0, x - s.tau_sigma); };
    return integral(tau) / integral(1.0);
}

void write_series_csv(std::ostream& os, const Series& series, const std::string& metadata_json) {
    if (!metadata_json.empty()) os << "# dgp: " << metadata_json << '\n';
    const bool dated = series.labels().has_value();
    os << (dated ? "date,value\n" : "value\n");
    os << std::setprecision(17);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (dated) os << (*series.labels())[i] << ',';
        os << series[i] << '\n';
    }
}

}  // namespace bubbledate
