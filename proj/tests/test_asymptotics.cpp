#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bubbledate/asymptotics.hpp"
#include "bubbledate/stats.hpp"

using namespace bubbledate;

namespace {

Discretization small_disc(double v_max, std::size_t paths) {
    Discretization d;
    d.v_max = v_max;
    d.paths = paths;
    return d;
}

// Residual max_t |eps_t − (psi·v_t + vt_{t−1} − vt_t)| with vt_t = sum_l psi_tilde_l v_{t−l}.
double bn_residual(const std::vector<double>& psi, const BnDecomposition& bn, const std::vector<double>& v) {
    const std::size_t L = psi.size() - 1;
    auto vt = [&](std::size_t t) {
        double s = 0.0;
        for (std::size_t l = 0; l <= L; ++l) s += bn.psi_tilde[l] * v[t - l];
        return s;
    };
    double worst = 0.0;
    for (std::size_t t = 2 * L + 1; t < v.size(); ++t) {
        double eps = 0.0;
        for (std::size_t j = 0; j <= L; ++j) eps += psi[j] * v[t - j];
        const double rebuilt = bn.psi_sum * v[t] + vt(t - 1) - vt(t);
        worst = std::max(worst, std::abs(eps - rebuilt) / (1.0 + std::abs(eps)));
    }
    return worst;
}

}  // namespace

TEST_CASE("BN decomposition examples") {
    const auto wn = bn_decompose(LinearProcessCoeffs({1.0}));
    CHECK(wn.psi_sum == 1.0);
    CHECK(wn.psi_check == 0.0);
    CHECK(wn.psi_tilde == std::vector<double>{0.0});
    CHECK(wn.penalty_negative() == 1.0);
    CHECK(wn.penalty_positive(1.0, 0.3) == 1.0);

    const auto ma = bn_decompose(LinearProcessCoeffs({1.0, 0.5}));
    CHECK(ma.psi_sum == 1.5);
    CHECK(ma.psi_tilde[0] == 0.5);
    CHECK(ma.psi_tilde[1] == 0.0);
    CHECK(ma.psi_check == doctest::Approx(8.0 / 9.0).epsilon(1e-14));

    std::vector<double> geo(51);
    for (std::size_t j = 0; j <= 50; ++j) geo[j] = std::pow(0.5, static_cast<double>(j));
    const auto g = bn_decompose(LinearProcessCoeffs(geo));
    CHECK(g.psi_sum == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t l = 0; l < 20; ++l) {
        const double closed = std::pow(0.5, static_cast<double>(l + 1)) / 0.5;
        CHECK(std::abs(g.psi_tilde[l] - closed) <= 1e-12);
    }
    CHECK_THROWS_AS((void)bn_decompose(LinearProcessCoeffs({1.0, -1.0})), ZeroLongRunCoefficient);
}

TEST_CASE("BN reconstruction identity") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t L : {0u, 1u, 5u, 37u, 199u}) {
        std::vector<double> psi(L + 1);
        for (auto& p : psi) p = n(rng) / (1.0 + 0.1 * static_cast<double>(&p - psi.data()));
        psi[0] = 1.0;
        const auto bn = bn_decompose(LinearProcessCoeffs(psi));
        std::vector<double> v(2 * L + 200);
        for (auto& x : v) x = n(rng);
        CHECK(bn_residual(psi, bn, v) <= 1e-12);
    }
}

TEST_CASE("brownian refinement preserves coarse increments") {
    const auto coarse = brownian_increments(42, 100, 0.01, 0);
    const auto fine = brownian_increments(42, 100, 0.01, 2);
    REQUIRE(fine.size() == 400);
    for (std::size_t i = 0; i < 100; ++i) {
        const double sum = fine[4 * i] + fine[4 * i + 1] + fine[4 * i + 2] + fine[4 * i + 3];
        CHECK(sum == doctest::Approx(coarse[i]).epsilon(1e-12));
    }
    const auto many = brownian_increments(7, 200000, 0.01, 1);
    CHECK(stddev(many) == doctest::Approx(std::sqrt(0.005)).epsilon(0.01));
}

TEST_CASE("OU second moments") {
    for (double cb : {0.5, 1.0, 2.0}) {
        const auto d = small_disc(3.0, 10000);
        std::array<double, 3> m2{};
        for (std::uint64_t i = 0; i < d.paths; ++i) {
            const auto p = sample_ou_path(cb, d, 5, i, 0);
            for (int s = 0; s < 3; ++s) {
                const double b = p.btilde[static_cast<std::size_t>(s * 100)];
                m2[s] += b * b;
            }
        }
        for (int s = 0; s < 3; ++s) {
            CHECK(m2[s] / static_cast<double>(d.paths) == doctest::Approx(1.0 / (2.0 * cb)).epsilon(0.05));
        }
    }
}

TEST_CASE("OU autocovariance and large c_b") {
    const auto d = small_disc(2.0, 10000);
    double cov = 0.0;
    for (std::uint64_t i = 0; i < d.paths; ++i) {
        const auto p = sample_ou_path(1.0, d, 6, i, 0);
        cov += p.btilde[0] * p.btilde[100];
    }
    cov /= static_cast<double>(d.paths);
    CHECK(cov == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(0.10));

    std::vector<double> b0;
    for (std::uint64_t i = 0; i < 10000; ++i) b0.push_back(sample_ou_path(100.0, d, 7, i, 0).btilde[0]);
    CHECK(stddev(b0) * stddev(b0) == doctest::Approx(0.005).epsilon(0.05));
}

TEST_CASE("OU path layout") {
    const auto d = small_disc(4.0, 1);
    const auto p = sample_ou_path(1.0, d, 1);
    CHECK(p.btilde.size() == 401);
    CHECK(p.dB1.size() == 400);
    CHECK(p.dt == doctest::Approx(0.01));
    // Backward recursion links consecutive points through the shared increment.
    const double rho = std::exp(-0.01), a = std::sqrt((1 - rho * rho) / 0.02);
    for (std::size_t j = 0; j < 400; j += 50) CHECK(p.btilde[j] == doctest::Approx(rho * p.btilde[j + 1] + a * p.dB1[j]));
}

TEST_CASE("recovery objective vanishes at zero") {
    const auto d = small_disc(5.0, 1);
    const auto bn = bn_decompose(LinearProcessCoeffs({1.0, 0.4, -0.2}));
    for (std::uint64_t i = 0; i < 50; ++i) {
        for (const auto& corr : {std::optional<BnDecomposition>{}, std::optional<BnDecomposition>{bn}}) {
            const auto obj = recovery_objective(1.0, corr, d, 3, i, 0);
            REQUIRE(obj);
            const std::size_t m = (obj->values.size() - 1) / 2;
            CHECK(obj->values[m] == 0.0);
        }
    }
}

TEST_CASE("recovery objective has no drift away from the penalty") {
    // Without the penalty the v < 0 branch is a martingale minus a centred term, so its mean stays near 0.
    const auto d = small_disc(2.0, 1);
    const std::size_t probe = 100;  // |v| = 1
    std::vector<double> vals;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        const auto obj = recovery_objective(1.0, std::nullopt, d, 12, i, 0);
        const std::size_t m = (obj->values.size() - 1) / 2;
        vals.push_back(obj->values[m - probe] + 0.5 * 1.0);
    }
    const double se = stddev(vals) / std::sqrt(static_cast<double>(vals.size()));
    CHECK(std::abs(mean(vals)) <= 3.0 * se + 0.02);
}

TEST_CASE("white-noise correction reproduces the uncorrected sampler") {
    auto d = small_disc(20.0, 2000);
    const auto bn = bn_decompose(LinearProcessCoeffs({1.0}));
    const auto a = sample_recovery_limits(1.0, std::nullopt, d, 99);
    const auto b = sample_recovery_limits(1.0, bn, d, 99);
    CHECK(a.draws == b.draws);
    CHECK(ks_statistic(a.draws, b.draws) < ks_critical_value(0.01, a.draws.size(), b.draws.size()));
}

TEST_CASE("recovery draws are concentrated near zero") {
    auto d = small_disc(20.0, 2000);
    const auto s = sample_recovery_limits(1.0, std::nullopt, d, 4);
    const double q10 = quantile(s.draws, 0.1), q50 = quantile(s.draws, 0.5), q90 = quantile(s.draws, 0.9);
    CHECK(q10 < 0.0);
    CHECK(q90 > 0.0);
    CHECK(std::abs(q50) < 0.5 * (q90 - q10));
    CHECK(q90 - q10 < 20.0);
}

TEST_CASE("emergence draws: zero objective, symmetry and scale invariance") {
    auto d = small_disc(20.0, 10000);
    const auto s = sample_emergence_limits(0.4, d, 21);
    const double se = stddev(s.draws) / std::sqrt(static_cast<double>(s.draws.size()));
    CHECK(std::abs(mean(s.draws)) <= 2.0 * se);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const double base = sample_emergence_limit(0.4, d, 21, i).argmax;
        CHECK(base == s.draws[i]);
        CHECK(sample_emergence_limit_scaled(0.4, d, 21, i, 3.7).argmax == base);
        CHECK(sample_emergence_limit_scaled(0.4, d, 21, i, -0.25).argmax == base);
    }
}

TEST_CASE("samplers are deterministic across execution paths") {
    auto d = small_disc(10.0, 300);
    const auto a = sample_recovery_limits(2.0, std::nullopt, d, 5, Execution::Serial);
    const auto b = sample_recovery_limits(2.0, std::nullopt, d, 5, Execution::Parallel);
    CHECK(a.draws == b.draws);
    CHECK(a.rejections == b.rejections);
    const auto c = sample_emergence_limits(0.3, d, 5, Execution::Serial);
    const auto e = sample_emergence_limits(0.3, d, 5, Execution::Parallel);
    CHECK(c.draws == e.draws);
}

TEST_CASE("grid refinement stability") {
    // Default grid and horizon; halving the step must leave the law essentially unchanged.
    Discretization coarse;
    coarse.paths = 10000;
    Discretization fine = coarse;
    fine.refine = 1;
    const auto rc = sample_recovery_limits(1.0, std::nullopt, coarse, 8);
    const auto rf = sample_recovery_limits(1.0, std::nullopt, fine, 8);
    const auto ec = sample_emergence_limits(0.4, coarse, 8);
    const auto ef = sample_emergence_limits(0.4, fine, 8);
    for (const auto& [a, b] : {std::pair{&rc.draws, &rf.draws}, std::pair{&ec.draws, &ef.draws}}) {
        const double lo = quantile(*a, 0.005), hi = quantile(*a, 0.995);
        const auto ha = make_histogram(*a, lo, hi, 40);
        const auto hb = make_histogram(*b, lo, hi, 40);
        CHECK(total_variation(ha, hb) <= 0.05);
        const double spread = quantile(*a, 0.9) - quantile(*a, 0.1);
        for (double p : {0.1, 0.5, 0.9}) {
            const double qa = quantile(*a, p), qb = quantile(*b, p);
            CHECK(std::abs(qa - qb) <= 0.05 * std::max(std::abs(qa), spread));
        }
    }
}

TEST_CASE("discretization validation") {
    Discretization d;
    CHECK_NOTHROW(d.validate(1.0));
    d.step = 1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = Discretization{};
    d.ou_horizon = 1.0;
    CHECK_THROWS_AS(d.validate(1.0), std::invalid_argument);
    CHECK_NOTHROW(d.validate(20.0));
    CHECK(Discretization{}.horizon_for(0.5) == 20.0);
    CHECK(Discretization{}.horizon_for(4.0) == 10.0);
}
