#include "bubbledate/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bubbledate/rng.hpp"

namespace bubbledate {

namespace {

constexpr std::size_t kMaxAttempts = 10000;

std::size_t cells_for(double length, double step) {
    return static_cast<std::size_t>(std::ceil(length / step - 1e-9));
}

std::uint64_t draw_key(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
    return stream_key(seed, {index, attempt});
}

}  // namespace

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

double Discretization::fine_step() const { return std::ldexp(step, -refine); }

double Discretization::horizon_for(double c_b) const {
    if (ou_horizon > 0.0) return ou_horizon;
    return std::max(10.0 / c_b, 10.0);
}

void Discretization::validate(std::optional<double> c_b) const {
    if (!(step > 0.0) || !(v_max > 0.0)) throw std::invalid_argument("discretization step and v_max must be positive");
    if (step > 0.01 * v_max * (1.0 + 1e-12)) throw std::invalid_argument("discretization step must be <= 0.01*v_max");
    if (paths == 0) throw std::invalid_argument("discretization needs at least one path");
    if (refine < 0 || refine > 8) throw std::invalid_argument("refine must lie in [0, 8]");
    if (c_b) {
        if (!(*c_b > 0.0)) throw std::invalid_argument("c_b must be positive");
        if (horizon_for(*c_b) < 10.0 / *c_b * (1.0 - 1e-12)) {
            throw std::invalid_argument("ou_horizon must be at least 10/c_b");
        }
    }
}

// ---------------------------------------------------------------------------
// Beveridge–Nelson arithmetic
// ---------------------------------------------------------------------------

double BnDecomposition::penalty_positive(double c_b, double btilde0) const noexcept {
    return 1.0 + (1.0 - psi_sq_sum / (psi_sum * psi_sum)) / (c_b * btilde0 * btilde0);
}

BnDecomposition bn_decompose(const LinearProcessCoeffs& coeffs) {
    const auto psi = coeffs.psi();
    const std::size_t L = coeffs.truncation();
    BnDecomposition bn;
    bn.psi_tilde.assign(L + 1, 0.0);
    // psi_tilde[L] = 0 under truncation; accumulate from the tail.
    for (std::size_t l = L; l-- > 0;) bn.psi_tilde[l] = bn.psi_tilde[l + 1] + psi[l + 1];
    bn.psi_sum = psi[0] + (L > 0 ? bn.psi_tilde[0] : 0.0);
    for (double p : psi) bn.psi_sq_sum += p * p;
    if (bn.psi_sum == 0.0) throw ZeroLongRunCoefficient();

    double sq = 0.0, lagged = 0.0;
    for (std::size_t j = 0; j <= L; ++j) {
        sq += bn.psi_tilde[j] * bn.psi_tilde[j];
        if (j < L) lagged += bn.psi_tilde[j] * bn.psi_tilde[j + 1];
    }
    bn.psi_check = 4.0 / (bn.psi_sum * bn.psi_sum) * (bn.psi_sum * bn.psi_tilde[0] - sq + lagged);
    return bn;
}

// ---------------------------------------------------------------------------
// Brownian paths
// ---------------------------------------------------------------------------

std::vector<double> brownian_increments(std::uint64_t key, std::size_t cells, double step, int refine) {
    std::vector<double> inc(cells);
    GaussianStream base(stream_key(key, {0}));
    const double sd = std::sqrt(step);
    for (auto& x : inc) x = base(sd);

    double width = step;
    for (int level = 1; level <= refine; ++level) {
        GaussianStream bridge(stream_key(key, {static_cast<std::uint64_t>(level)}));
        // Left half of an increment X over width h is N(X/2, h/4).
        const double half_sd = 0.5 * std::sqrt(width);
        std::vector<double> next(inc.size() * 2);
        for (std::size_t i = 0; i < inc.size(); ++i) {
            const double left = 0.5 * inc[i] + bridge(half_sd);
            next[2 * i] = left;
            next[2 * i + 1] = inc[i] - left;
        }
        inc = std::move(next);
        width *= 0.5;
    }
    return inc;
}

namespace {

OuPath ou_path_from_key(double c_b, const Discretization& disc, std::uint64_t key) {
    const double h = disc.horizon_for(c_b);
    const std::size_t coarse_total = cells_for(disc.v_max + h, disc.step);
    const std::size_t coarse_view = cells_for(disc.v_max, disc.step);
    const std::size_t scale = std::size_t{1} << disc.refine;

    auto dB = brownian_increments(stream_key(key, {streams::kBrownian1}), coarse_total, disc.step, disc.refine);
    const double dt = disc.fine_step();
    const double rho = std::exp(-c_b * dt);
    const double a = std::sqrt(-std::expm1(-2.0 * c_b * dt) / (2.0 * c_b * dt));

    const std::size_t n = dB.size();
    const std::size_t m = coarse_view * scale;
    OuPath path;
    path.dt = dt;
    path.btilde.resize(m + 1);
    double acc = 0.0;  // B̃ at v_max + H
    for (std::size_t j = n; j-- > 0;) {
        acc = rho * acc + a * dB[j];
        if (j <= m) path.btilde[j] = acc;
    }
    dB.resize(m);
    path.dB1 = std::move(dB);
    return path;
}

}  // namespace

OuPath sample_ou_path(double c_b, const Discretization& disc, std::uint64_t seed, std::uint64_t index,
                      std::uint64_t attempt) {
    disc.validate(c_b);
    return ou_path_from_key(c_b, disc, draw_key(seed, index, attempt));
}

OuPath sample_ou_path(double c_b, const Discretization& disc, std::uint64_t seed) {
    return sample_ou_path(c_b, disc, seed, 0, 0);
}

// ---------------------------------------------------------------------------
// Recovery-date limit
// ---------------------------------------------------------------------------

std::optional<RecoveryObjective> recovery_objective(double c_b, const std::optional<BnDecomposition>& correction,
                                                    const Discretization& disc, std::uint64_t seed,
                                                    std::uint64_t index, std::uint64_t attempt) {
    disc.validate(c_b);
    const std::uint64_t key = draw_key(seed, index, attempt);
    const OuPath ou = ou_path_from_key(c_b, disc, key);
    const double bt0 = ou.btilde[0];
    if (std::abs(bt0) < kRejectionThreshold) return std::nullopt;

    const double dt = ou.dt;
    const std::size_t m = ou.dB1.size();
    const auto dB2 = brownian_increments(stream_key(key, {streams::kBrownian2}), cells_for(disc.v_max, disc.step),
                                         disc.step, disc.refine);

    const double pen_neg = correction ? correction->penalty_negative() : 1.0;
    const double pen_pos = correction ? correction->penalty_positive(c_b, bt0) : 1.0;

    RecoveryObjective obj;
    obj.dt = dt;
    obj.btilde0 = bt0;
    obj.values.assign(2 * m + 1, 0.0);

    // v < 0: |v| = j·dt.
    double ito = 0.0, drift = 0.0;
    const double centre = 1.0 / (2.0 * c_b);
    for (std::size_t i = 0; i < m; ++i) {
        ito += ou.btilde[i + 1] * ou.dB1[i];
        drift += (ou.btilde[i] * ou.btilde[i] - centre) * dt;
        const double absv = static_cast<double>(i + 1) * dt;
        obj.values[m - (i + 1)] = 2.0 * ito - c_b * drift - 0.5 * absv * pen_neg;
    }

    // v ≥ 0.
    double b2 = 0.0, ito2 = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        ito2 += b2 * dB2[i];
        quad += (b2 / (2.0 * bt0) + 1.0) * b2 * dt;
        b2 += dB2[i];
        const double v = static_cast<double>(i + 1) * dt;
        const double inner = b2 + ito2 / bt0 + c_b * quad;
        obj.values[m + i + 1] = -inner / (c_b * bt0) - 0.5 * v * pen_pos;
    }
    return obj;
}

namespace {

double grid_argmax(const std::vector<double>& values, double dt) {
    const std::size_t m = (values.size() - 1) / 2;
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] > values[best]) best = j;
    }
    return (static_cast<double>(best) - static_cast<double>(m)) * dt;
}

}  // namespace

LimitDraw sample_recovery_limit(double c_b, const std::optional<BnDecomposition>& correction,
                                const Discretization& disc, std::uint64_t seed, std::uint64_t index) {
    disc.validate(c_b);
    LimitDraw out;
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto obj = recovery_objective(c_b, correction, disc, seed, index, attempt);
        if (!obj) {
            ++out.rejections;
            continue;
        }
        out.argmax = grid_argmax(obj->values, obj->dt);
        return out;
    }
    throw std::runtime_error("sample_recovery_limit: too many rejected draws");
}

// ---------------------------------------------------------------------------
// Emergence-date limit
// ---------------------------------------------------------------------------

LimitDraw sample_emergence_limit_scaled(double tau_e, const Discretization& disc, std::uint64_t seed,
                                        std::uint64_t index, double scale) {
    if (!(tau_e > 0.0 && tau_e < 1.0)) throw std::invalid_argument("tau_e must lie in (0, 1)");
    disc.validate();
    const double dt = disc.fine_step();
    const std::size_t m = cells_for(disc.v_max, disc.step) << disc.refine;

    LimitDraw out;
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t key = draw_key(seed, index, attempt);
        const auto dW1 = brownian_increments(stream_key(key, {streams::kBrownian1}), m >> disc.refine, disc.step,
                                             disc.refine);
        const auto dW2 = brownian_increments(stream_key(key, {streams::kBrownian2}), m >> disc.refine, disc.step,
                                             disc.refine);
        std::vector<double> w1(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) w1[i + 1] = w1[i] + scale * dW1[i];

        // Level of W_1 at tau_e, independent of the local increments.
        GaussianStream level(stream_key(key, {streams::kLevel}));
        const double w_tau = level(scale * std::sqrt(tau_e));
        if (std::abs(w_tau) < kRejectionThreshold * std::abs(scale)) {
            ++out.rejections;
            continue;
        }

        // Scan v from −m·dt upward; strict improvement keeps the first maximum.
        double best_val = 0.0;
        std::ptrdiff_t best_j = 0;
        bool have = false;
        for (std::size_t i = m; i >= 1; --i) {
            const double val = w1[i] / w_tau - 0.5 * static_cast<double>(i) * dt;
            if (!have || val > best_val) {
                best_val = val;
                best_j = -static_cast<std::ptrdiff_t>(i);
                have = true;
            }
        }
        if (0.0 > best_val) {
            best_val = 0.0;
            best_j = 0;
        }
        double w2 = 0.0;
        for (std::size_t i = 1; i <= m; ++i) {
            w2 += scale * dW2[i - 1];
            const double val = w2 / w_tau - 0.5 * static_cast<double>(i) * dt;
            if (val > best_val) {
                best_val = val;
                best_j = static_cast<std::ptrdiff_t>(i);
            }
        }
        out.argmax = static_cast<double>(best_j) * dt;
        return out;
    }
    throw std::runtime_error("sample_emergence_limit: too many rejected draws");
}

LimitDraw sample_emergence_limit(double tau_e, const Discretization& disc, std::uint64_t seed, std::uint64_t index) {
    return sample_emergence_limit_scaled(tau_e, disc, seed, index, 1.0);
}

// ---------------------------------------------------------------------------
// Batches
// ---------------------------------------------------------------------------

namespace {

template <class DrawFn>
LimitSample run_batch(std::size_t count, Execution exec, DrawFn draw) {
    std::vector<LimitDraw> raw(count);
    if (exec == Execution::Parallel) {
        const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) raw[i] = draw(static_cast<std::uint64_t>(i));
    } else {
        for (std::size_t i = 0; i < count; ++i) raw[i] = draw(i);
    }
    LimitSample out;
    out.draws.reserve(count);
    for (const auto& d : raw) {
        out.draws.push_back(d.argmax);
        out.rejections += d.rejections;
    }
    return out;
}

}  // namespace

LimitSample sample_recovery_limits(double c_b, const std::optional<BnDecomposition>& correction,
                                   const Discretization& disc, std::uint64_t seed, Execution exec) {
    disc.validate(c_b);
    return run_batch(disc.paths, exec,
                     [&](std::uint64_t i) { return sample_recovery_limit(c_b, correction, disc, seed, i); });
}

LimitSample sample_emergence_limits(double tau_e, const Discretization& disc, std::uint64_t seed, Execution exec) {
    disc.validate();
    return run_batch(disc.paths, exec, [&](std::uint64_t i) { return sample_emergence_limit(tau_e, disc, seed, i); });
}

}  // namespace bubbledate
