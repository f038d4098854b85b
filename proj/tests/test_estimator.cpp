#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bubbledate/dgp.hpp"
#include "bubbledate/estimator.hpp"
#include "oracles.hpp"

using namespace bubbledate;

namespace {

std::vector<double> tent20() {
    std::vector<double> y(20);
    for (std::size_t t = 1; t <= 10; ++t) y[t - 1] = std::pow(2.0, static_cast<double>(t));
    for (std::size_t t = 11; t <= 20; ++t) y[t - 1] = y[9] * std::pow(0.5, static_cast<double>(t - 10));
    return y;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("prefix moments on a doubling series") {
    const std::vector<double> y{1, 2, 4, 8};
    const auto m = PrefixMoments::build(y);
    CHECK(m.first_observation() == 2);
    CHECK(m.observations() == 3);
    CHECK(m.s_cross(1) == 0.0);
    CHECK(m.s_cross(2) == 2.0);
    CHECK(m.s_cross(3) == 10.0);
    CHECK(m.s_cross(4) == 42.0);
    CHECK(m.s_lag2(2) == 1.0);
    CHECK(m.s_lag2(3) == 5.0);
    CHECK(m.s_lag2(4) == 21.0);
}

TEST_CASE("prefix moments of constant and zero series") {
    const double c = 3.5;
    const auto m = PrefixMoments::build(std::vector<double>(6, c), c);
    for (std::size_t k = 0; k <= 6; ++k) {
        CHECK(m.s_cross(k) == doctest::Approx(k * c * c));
        CHECK(m.s_lag2(k) == doctest::Approx(k * c * c));
    }
    const auto z = PrefixMoments::build(std::vector<double>(5, 0.0), 0.0);
    for (std::size_t k = 0; k <= 5; ++k) {
        CHECK(z.s_cross(k) == 0.0);
        CHECK(z.s_lag2(k) == 0.0);
        CHECK(z.s_sq(k) == 0.0);
    }
}

TEST_CASE("fit_segment examples") {
    {
        const auto m = PrefixMoments::build(std::vector<double>{1, 2, 4, 8, 16});
        const auto f = fit_segment(m, 2, 5);
        CHECK(f.phi_hat == 2.0);
        CHECK(f.ssr == 0.0);
        CHECK(f.n == 4);
    }
    {
        const auto m = PrefixMoments::build(std::vector<double>{1, 1, 1, 1});
        const auto f = fit_segment(m, 2, 4);
        CHECK(f.phi_hat == 1.0);
        CHECK(f.ssr == 0.0);
    }
    {
        const auto m = PrefixMoments::build(std::vector<double>{1, 2, 1, 2});
        const auto f = fit_segment(m, 2, 4);
        CHECK(f.phi_hat == doctest::Approx(1.0));
        CHECK(f.ssr == doctest::Approx(3.0));
        CHECK(*oracle::segment_ssr({1, 2, 1, 2}, std::nullopt, 2, 4) == doctest::Approx(3.0));
    }
}

TEST_CASE("fit_segment rejects all-zero lags") {
    const auto m = PrefixMoments::build(std::vector<double>{0, 0, 0, 1, 2}, 0.0);
    CHECK_THROWS_AS((void)fit_segment(m, 1, 3), DegenerateSegment);
    CHECK_FALSE(try_fit_segment(m, 1, 3).has_value());
    CHECK(try_fit_segment(m, 1, 5).has_value());
}

TEST_CASE("ssr_split on the tent series") {
    const auto y = tent20();
    const auto m = PrefixMoments::build(y);
    CHECK(ssr_split(m, 10) == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t k = 2; k <= 18; ++k) {
        if (k == 10) continue;
        CHECK(ssr_split(m, k) > 0.0);
        CHECK(*oracle::split_ssr(y, std::nullopt, 1, 20, k) > 0.0);
    }
    const auto scan = argmin_break(m, 2, 18);
    CHECK(scan.k_hat == 10);
    CHECK(scan.curve.size() == 17);
    CHECK(oracle::scan(y, std::nullopt, 1, 20, 2, 18) == 10);
}

TEST_CASE("constant series ties resolve to the smallest date") {
    const auto m = PrefixMoments::build(std::vector<double>(20, 2.5));
    for (std::size_t k = 2; k <= 18; ++k) CHECK(ssr_split(m, k) == doctest::Approx(0.0));
    CHECK(argmin_break(m, 2, 18).k_hat == 2);
}

TEST_CASE("argmin_break skips degenerate candidates and reports empty scans") {
    std::vector<double> y(20, 0.0);
    for (std::size_t t = 11; t <= 20; ++t) y[t - 1] = static_cast<double>(t);
    const auto m = PrefixMoments::build(y, 0.0);
    const auto scan = argmin_break(m, 2, 18);
    CHECK_FALSE(scan.degenerate.empty());
    for (auto k : scan.degenerate) CHECK(k <= 11);
    const auto zero = PrefixMoments::build(std::vector<double>(20, 0.0), 0.0);
    CHECK_THROWS_AS((void)argmin_break(zero, 2, 18), EmptyRange);
}

TEST_CASE("three-phase series dated exactly") {
    const auto y = oracle::tent(40, 16, 24, 32, 1.2, 0.8);
    const auto series = validate_series(y);
    const auto est = estimate_dates(series, TrimmingPolicy::of(0.05));
    CHECK(est.k_c_hat == 24);
    REQUIRE(est.k_e_hat);
    REQUIRE(est.k_r_hat);
    CHECK(*est.k_e_hat == 16);
    CHECK(*est.k_r_hat == 32);

    // Independent three-scan oracle on the same series.
    const std::size_t kc = oracle::scan(y, std::nullopt, 1, 40, 2, 38);
    CHECK(kc == 24);
    CHECK(oracle::scan(y, std::nullopt, 1, kc, 2, kc - 2) == 16);
    CHECK(oracle::scan(y, std::nullopt, kc + 1, 40, kc + 3, 38) == 32);
}

TEST_CASE("prefix SSR matches the naive recomputation") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(40, 200);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t T = len(rng);
        const double phi = 0.8 + 0.3 * unif(rng);
        const auto y = oracle::ar1(T, phi, 1.0, rng, 0.5);
        const bool known = trial % 2 == 0;
        const auto m = known ? PrefixMoments::build(y, 0.5) : PrefixMoments::build(y);
        const std::optional<double> y0 = known ? std::optional<double>(0.5) : std::nullopt;
        for (std::size_t k = 2; k <= T - 2; ++k) {
            const auto naive = oracle::split_ssr(y, y0, 1, T, k);
            REQUIRE(naive);
            CHECK(rel_err(ssr_split(m, k), *naive) <= 1e-8);
        }
    }
}

TEST_CASE("scale and sign invariance of the dates") {
    DgpConfig cfg;
    cfg.T = 400;
    cfg.drift0_override = cfg.drift1_override = 1.0 / 800;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto s = simulate(cfg, ErrorSpec{}, seed);
        const auto base = estimate_dates(s, TrimmingPolicy{});
        for (double c : {-1.0, 3.0, 0.01, -250.0}) {
            std::vector<double> v(s.values().begin(), s.values().end());
            for (auto& x : v) x *= c;
            const auto scaled = validate_series(v).with_initial_value(*s.initial_value() * c);
            const auto est = estimate_dates(scaled, TrimmingPolicy{});
            CHECK(est.k_c_hat == base.k_c_hat);
            CHECK(est.k_e_hat == base.k_e_hat);
            CHECK(est.k_r_hat == base.k_r_hat);
            const auto& ca = *base.ssr_curve_c;
            const auto& cb = *est.ssr_curve_c;
            REQUIRE(ca.size() == cb.size());
            for (std::size_t i = 0; i < ca.size(); i += 37) CHECK(rel_err(cb[i].ssr, c * c * ca[i].ssr) <= 1e-9);
        }
    }
}

TEST_CASE("estimates respect ranges and ordering") {
    DgpConfig cfg;
    cfg.T = 400;
    cfg.drift0_override = cfg.drift1_override = 1.0 / 800;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        cfg.phi_a = seed % 3 == 0 ? 1.01 : 1.05;
        const auto s = simulate(cfg, ErrorSpec{}, seed);
        for (double rho : {0.01, 0.05, 0.2}) {
            const auto trim = TrimmingPolicy::of(rho);
            const auto est = estimate_dates(s, trim);
            CHECK(est.range_c.contains(est.k_c_hat));
            CHECK(est.range_c.lo == trim.margin(400));
            CHECK(est.range_c.hi == trim.upper(400));
            if (est.k_e_hat) CHECK(est.range_e->contains(*est.k_e_hat));
            if (est.k_r_hat) CHECK(est.range_r->contains(*est.k_r_hat));
            if (est.k_e_hat && est.k_r_hat) {
                CHECK(*est.k_e_hat < est.k_c_hat);
                CHECK(est.k_c_hat < *est.k_r_hat);
            }
            CHECK(est.k_e_hat.has_value() != est.unavailable_reason_e.has_value());
            CHECK(est.k_r_hat.has_value() != est.unavailable_reason_r.has_value());
        }
    }
}

TEST_CASE("boundary violation when the collapse date sits at the edge") {
    // Decay from the start puts the break near the left edge, leaving no room for emergence.
    std::vector<double> y(60);
    double v = 100.0;
    for (std::size_t t = 1; t <= 60; ++t) {
        v = t <= 3 ? v * 1.5 : (t <= 56 ? v * 0.9 : v);
        y[t - 1] = v;
    }
    const auto est = estimate_dates(validate_series(y), TrimmingPolicy::of(0.05));
    CHECK(est.k_c_hat == 3);
    CHECK_FALSE(est.k_e_hat);
    REQUIRE(est.unavailable_reason_e);
    CHECK(*est.unavailable_reason_e == UnavailableReason::BoundaryViolation);
}

TEST_CASE("serial and parallel scans agree exactly") {
    DgpConfig cfg;
    cfg.T = 800;
    cfg.drift0_override = cfg.drift1_override = 1.0 / 800;
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
        const auto s = simulate(cfg, ErrorSpec{}, seed);
        const auto a = estimate_dates(s, TrimmingPolicy{}, {true, Execution::Serial});
        const auto b = estimate_dates(s, TrimmingPolicy{}, {true, Execution::Parallel});
        CHECK(a.k_c_hat == b.k_c_hat);
        CHECK(a.k_e_hat == b.k_e_hat);
        CHECK(a.k_r_hat == b.k_r_hat);
        CHECK(*a.ssr_curve_c == *b.ssr_curve_c);
        CHECK(*a.ssr_curve_e == *b.ssr_curve_e);
        CHECK(*a.ssr_curve_r == *b.ssr_curve_r);
    }
}

TEST_CASE("estimate_dates rejects short series") {
    const auto s = make_series_unchecked(std::vector<double>(20, 1.0));
    CHECK_THROWS_AS((void)estimate_dates(s, TrimmingPolicy{}), SeriesValidationError);
}

TEST_CASE("BIC arithmetic") {
    CHECK(bic_penalty_count(RegimeModel::TwoRegime) == 3);
    CHECK(bic_penalty_count(RegimeModel::ThreeRegime) == 5);
    CHECK(bic_penalty_count(RegimeModel::FourRegime) == 7);
    CHECK(bic_value(100.0, 100, 3) == doctest::Approx(3 * std::log(100.0)));
    CHECK(bic_value(200.0, 100, 0) == doctest::Approx(100 * std::log(2.0)));
}

TEST_CASE("BIC report is internally consistent") {
    DgpConfig cfg;
    cfg.T = 800;
    cfg.phi_a = 1.09;
    cfg.drift0_override = cfg.drift1_override = 1.0 / 800;
    const auto s = simulate(cfg, ErrorSpec{}, 99);
    const auto rep = bic_select(s, TrimmingPolicy{});
    CHECK(rep.observations == 800);
    CHECK(rep.ssr4 <= rep.ssr3 + 1e-9 * rep.ssr3);
    const double best = std::min({rep.bic2, rep.bic3, rep.bic4});
    CHECK(rep.bic(rep.chosen) == best);
    CHECK(rep.chosen == RegimeModel::FourRegime);
    CHECK(rep.dates_per_model[2].size() == 3);
    CHECK(rep.dates_per_model[1].size() == 2);
    CHECK(rep.dates_per_model[0].size() == 1);
    CHECK(rep.bic4 == doctest::Approx(bic_value(rep.ssr4, rep.observations, 7)));
}
