#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bubbledate/core_types.hpp"
#include "bubbledate/parallel.hpp"

namespace bubbledate {

/**
 * @brief Grid used to discretize the limit functionals.
 *
 * The argmax is searched on [−v_max, v_max] with spacing `step / 2^refine`.
 * `refine` splits every base increment by Brownian-bridge interpolation, so a
 * draw at refine = 1 lives on the same Brownian path as the draw at refine = 0
 * with the same seed. `ou_horizon` truncates the improper integral defining
 * B̃; zero selects max(10/c_b, 10).
 */
struct Discretization {
    double step = 0.01;
    double v_max = 50.0;
    double ou_horizon = 0.0;
    std::size_t paths = 10000;
    int refine = 0;

    [[nodiscard]] double fine_step() const;
    [[nodiscard]] double horizon_for(double c_b) const;
    /// Throws std::invalid_argument unless step ≤ 0.01·v_max and the horizon is ≥ 10/c_b.
    void validate(std::optional<double> c_b = std::nullopt) const;
};

class ZeroLongRunCoefficient : public std::domain_error {
public:
    ZeroLongRunCoefficient() : std::domain_error("long-run coefficient sum(psi_j) is zero") {}
};

/// Beveridge–Nelson quantities of a truncated linear process.
struct BnDecomposition {
    double psi_sum = 0.0;
    /// psi_tilde[l] = sum_{k > l} psi_k, l = 0..L.
    std::vector<double> psi_tilde;
    double psi_check = 0.0;
    double psi_sq_sum = 0.0;

    /// Penalty scale for v < 0: 1 − psi_check.
    [[nodiscard]] double penalty_negative() const noexcept { return 1.0 - psi_check; }
    /// Penalty scale for v ≥ 0: 1 + (1 − sum psi_j²/psi²)/(c_b·B̃(0)²).
    [[nodiscard]] double penalty_positive(double c_b, double btilde0) const noexcept;
};

[[nodiscard]] BnDecomposition bn_decompose(const LinearProcessCoeffs& coeffs);

/// Brownian increments over `cells` intervals of width `step`, refined `refine`
/// times by bridge splitting. Keyed by a stream key from rng.hpp.
[[nodiscard]] std::vector<double> brownian_increments(std::uint64_t key, std::size_t cells, double step, int refine);

/// Reversed-time OU functional B̃_{c_b}(s) = int_s^inf exp(−c_b(t−s)) dB_1(t) on the grid.
struct OuPath {
    double dt = 0.0;
    /// btilde[j] = B̃(j·dt), j = 0..M with M·dt ≥ v_max.
    std::vector<double> btilde;
    /// dB_1 over [j·dt, (j+1)·dt), j = 0..M−1.
    std::vector<double> dB1;
};

/**
 * Simulates B̃ by the backward recursion B̃_j = ρ·B̃_{j+1} + a·dB_j with
 * ρ = exp(−c_b·dt) and a = sqrt((1 − ρ²)/(2·c_b·dt)), started from zero at
 * v_max + H. At grid points this is the exact stationary AR(1) skeleton of the
 * OU process (variance 1/(2c_b), autocovariance exp(−c_b·s)/(2c_b)).
 */
[[nodiscard]] OuPath sample_ou_path(double c_b, const Discretization& disc, std::uint64_t seed);
/// Same, for draw `index` / rejection attempt `attempt` of a batch.
[[nodiscard]] OuPath sample_ou_path(double c_b, const Discretization& disc, std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t attempt);

struct LimitDraw {
    double argmax = 0.0;
    std::size_t rejections = 0;
};

struct LimitSample {
    std::vector<double> draws;
    std::size_t rejections = 0;
};

/// |denominator| below this on a draw rejects and redraws it.
inline constexpr double kRejectionThreshold = 1e-8;

/**
 * @brief One draw of argmax_v {C*_{c_b}(v) − |v|/2·psi*} for the recovery date.
 *
 * Stochastic integrals against dB_1 evaluate B̃ at the right grid point of
 * each increment: B̃ is adapted to the reversed filtration, so this is the
 * non-anticipating choice. Integrals against dB_2 and ds use the left point.
 * Without a correction psi* = 1 on both sides.
 */
[[nodiscard]] LimitDraw sample_recovery_limit(double c_b, const std::optional<BnDecomposition>& correction,
                                              const Discretization& disc, std::uint64_t seed, std::uint64_t index = 0);

/// Objective values on the grid v_j = j·dt, j = −M..M, for a given draw (testing aid).
struct RecoveryObjective {
    double dt = 0.0;
    std::vector<double> values;  // index j + M
    double btilde0 = 0.0;
};
[[nodiscard]] std::optional<RecoveryObjective> recovery_objective(double c_b,
                                                                  const std::optional<BnDecomposition>& correction,
                                                                  const Discretization& disc, std::uint64_t seed,
                                                                  std::uint64_t index, std::uint64_t attempt);

/**
 * @brief One draw of argmax_v {W*(v)/W_1(tau_e) − |v|/2} for the emergence date.
 *
 * W*(v) = W_1(−v) for v ≤ 0 and W_2(v) for v > 0, built from the errors in a
 * shrinking window around the emergence date. The normalizer W_1(tau_e) is the
 * level of the partial-sum process at tau_e, which is asymptotically
 * independent of that window, so it is drawn as an independent N(0, tau_e).
 */
[[nodiscard]] LimitDraw sample_emergence_limit(double tau_e, const Discretization& disc, std::uint64_t seed,
                                               std::uint64_t index = 0);

/// Optional scale applied to both Brownian paths (scale-invariance check).
[[nodiscard]] LimitDraw sample_emergence_limit_scaled(double tau_e, const Discretization& disc, std::uint64_t seed,
                                                      std::uint64_t index, double scale);

/// disc.paths draws keyed by (seed, draw index); identical for both execution paths.
[[nodiscard]] LimitSample sample_recovery_limits(double c_b, const std::optional<BnDecomposition>& correction,
                                                 const Discretization& disc, std::uint64_t seed,
                                                 Execution exec = Execution::Parallel);
[[nodiscard]] LimitSample sample_emergence_limits(double tau_e, const Discretization& disc, std::uint64_t seed,
                                                  Execution exec = Execution::Parallel);

}  // namespace bubbledate
