#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bubbledate/core_types.hpp"

namespace bubbledate {

struct IidGaussianErrors {
    double sigma = 1.0;
};

/// epsilon_t = omega(t/T)·e_t
struct VolatilityScaledErrors {
    VolatilityProfile profile = VolatilityProfile::constant(1.0);
};

/// epsilon_t = sum_{j=0}^{L} psi_j v_{t−j}, v_t ~ N(0, innovation_sigma²).
struct LinearProcessErrors {
    LinearProcessCoeffs coeffs{std::vector<double>{1.0}};
    double innovation_sigma = 1.0;
    /// Innovations drawn before t = 1; the simulator uses max(burn_in, L, 50).
    std::size_t burn_in = 50;
};

/// Error-term specification; exactly one of the three kinds.
struct ErrorSpec {
    std::variant<IidGaussianErrors, VolatilityScaledErrors, LinearProcessErrors> kind = IidGaussianErrors{};

    /// Throws std::invalid_argument on a nonpositive sigma or a burn-in shorter than L.
    void validate() const;
};

/// Draws epsilon_1..epsilon_T. Deterministic in (spec, T, seed).
[[nodiscard]] std::vector<double> generate_errors(const ErrorSpec& errors, std::size_t T, std::uint64_t seed);

/// Filters innovations v (burn-in prefix first) into epsilon_t for the last
/// `T` positions: epsilon = sum_j psi_j v_{t−j}.
[[nodiscard]] std::vector<double> apply_linear_filter(const LinearProcessCoeffs& coeffs,
                                                      std::span<const double> innovations, std::size_t T);

/// Applies the four-regime recursion to given errors (length T). y0 and drifts
/// come from the config.
[[nodiscard]] std::vector<double> simulate_path(const DgpConfig& config, std::span<const double> errors);

/// Simulated series carrying y0 as its initial value.
[[nodiscard]] Series simulate(const DgpConfig& config, const ErrorSpec& errors, std::uint64_t seed);

/// int_0^tau omega² / int_0^1 omega², closed form.
[[nodiscard]] double variance_profile(const VolatilityProfile& profile, double tau);

/// Writes the CSV consumed by `bubbledate estimate`: an optional `# dgp: {...}`
/// metadata line, a `value` header and one row per observation.
void write_series_csv(std::ostream& os, const Series& series, const std::string& metadata_json = {});

}  // namespace bubbledate
