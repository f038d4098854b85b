#include <doctest.h>

#include <sstream>

#include "bubbledate/config_io.hpp"
#include "bubbledate/dgp.hpp"
#include "bubbledate/ingest.hpp"
#include "bubbledate/report.hpp"
#include "bubbledate/stats.hpp"
#include "oracles.hpp"

using namespace bubbledate;
using nlohmann::json;

namespace {

IngestedSeries ingest(const std::string& text, IngestSpec spec = {}) {
    std::istringstream in(text);
    return read_series_csv(in, spec);
}

std::string value_csv(const std::vector<double>& v, bool with_dates = false) {
    std::ostringstream os;
    os << (with_dates ? "date,value\n" : "value\n");
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (with_dates) os << "m" << i + 1 << ',';
        os << v[i] << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("DGP and error specs round-trip through JSON") {
    DgpConfig d;
    d.T = 321;
    d.phi_a = 1.07;
    d.drift0_override = 0.25;
    const auto back = dgp_from_json(to_json(d));
    CHECK(back.T == 321);
    CHECK(back.phi_a == 1.07);
    CHECK(back.drift0_override == 0.25);
    CHECK_FALSE(back.drift1_override);

    for (const ErrorSpec& e :
         {ErrorSpec{IidGaussianErrors{2.5}}, ErrorSpec{VolatilityScaledErrors{VolatilityProfile::single_shift(1, 3, 0.4)}},
          ErrorSpec{LinearProcessErrors{LinearProcessCoeffs({1.0, 0.3, 0.1}), 0.7, 60}}}) {
        CHECK(to_json(errors_from_json(to_json(e))) == to_json(e));
    }
}

TEST_CASE("experiment config round-trip and grid forms") {
    auto c = preset(Preset::VolShiftUp);
    c.reps = 17;
    c.bic = true;
    c.targets = {Target::RecoveryDate};
    const auto j = to_json(c);
    CHECK(j["schema_version"] == kSchemaVersion);
    const auto back = experiment_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.phi_pairs.size() == 6);

    const json grid = {{"schema_version", 1},
                       {"preset", "baseline"},
                       {"phi_a_grid", {1.02, 1.04}},
                       {"phi_b_grid", {0.95, 0.97, 0.99}},
                       {"reps", 3}};
    const auto g = experiment_from_json(grid);
    CHECK(g.phi_pairs.size() == 6);
    CHECK(g.reps == 3);
    CHECK(g.trimming.rho == 0.05);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS((void)experiment_from_json(json{{"preset", "baseline"}}), ConfigError);
    CHECK_THROWS_AS((void)experiment_from_json(json{{"schema_version", 2}}), ConfigError);
    CHECK_THROWS_AS((void)experiment_from_json(json{{"schema_version", 1}, {"preset", "baseline"}, {"trimming", 0.5}}),
                    ConfigError);
    CHECK_THROWS_AS((void)errors_from_json(json{{"kind", "cauchy"}}), ConfigError);
    CHECK_THROWS_AS((void)simulation_from_json(json{{"schema_version", 1}}), ConfigError);
}

TEST_CASE("simulation config without errors is noiseless") {
    SimulationConfig s;
    s.dgp.T = 40;
    const auto j = to_json(s);
    CHECK(j["errors"]["kind"] == "none");
    CHECK_FALSE(simulation_from_json(j).errors);
}

TEST_CASE("ingest values, labels and metadata") {
    const auto y = oracle::tent(40, 16, 24, 32, 1.2, 0.8);
    const auto plain = ingest(value_csv(y));
    CHECK(plain.series.size() == 40);
    CHECK_FALSE(plain.series.labels());
    CHECK_FALSE(plain.series.initial_value());
    CHECK(std::equal(y.begin(), y.end(), plain.series.values().begin()));

    const auto dated = ingest(value_csv(y, true));
    REQUIRE(dated.series.labels());
    CHECK(dated.series.label_at(24) == "m24");

    const auto meta = ingest("# dgp: {\"dgp\":{\"y0\":1.0}}\n# other comment\n" + value_csv(y));
    REQUIRE(meta.dgp_metadata);
    CHECK(meta.series.initial_value() == 1.0);

    IngestSpec logged;
    logged.log_transform = true;
    const auto lg = ingest(value_csv(y), logged);
    CHECK(lg.series[30] == doctest::Approx(std::log(y[30])));
}

TEST_CASE("ingest column selection and delimiters") {
    std::string text = "a;b;price\n";
    for (int i = 1; i <= 40; ++i) text += "x;" + std::to_string(i) + ";" + std::to_string(i * 2) + "\n";
    IngestSpec spec;
    spec.delimiter = ';';
    spec.value_column = std::string("price");
    CHECK(ingest(text, spec).series[39] == 80.0);
    spec.value_column = std::size_t{1};
    spec.date_column = ColumnRef{std::size_t{0}};
    const auto s = ingest(text, spec).series;
    CHECK(s[0] == 1.0);
    CHECK(s.label_at(1) == "x");
}

TEST_CASE("ingest errors carry positions") {
    std::string text = "value\n";
    for (int i = 0; i < 45; ++i) text += (i == 9 ? "1,5" : std::to_string(i)) + "\n";
    try {
        (void)ingest(text);
        FAIL("expected failure");
    } catch (const IngestError& e) {
        CHECK(e.line == 11);
    }
    try {
        (void)ingest("value\n1\nabc\n");
        FAIL("expected failure");
    } catch (const IngestError& e) {
        CHECK(e.line == 3);
        CHECK(e.column == "value");
    }
    CHECK_THROWS_AS((void)ingest("price\n1\n"), IngestError);
    CHECK_THROWS_AS((void)ingest(""), IngestError);
    IngestSpec logged;
    logged.log_transform = true;
    CHECK_THROWS_AS((void)ingest("value\n1\n-2\n", logged), IngestError);
    CHECK_THROWS_AS((void)ingest("value\n1\n2\n"), SeriesValidationError);
    CHECK_THROWS_AS((void)read_series_csv(IngestSpec{"/nonexistent/file.csv"}), IngestError);
}

TEST_CASE("simulated CSV round-trips through ingestion") {
    DgpConfig c;
    c.T = 80;
    c.y0 = 0.75;
    const auto s = simulate(c, ErrorSpec{}, 3);
    std::ostringstream os;
    write_series_csv(os, s, json{{"dgp", to_json(c)}}.dump());
    const auto back = ingest(os.str());
    CHECK(std::equal(s.values().begin(), s.values().end(), back.series.values().begin()));
    CHECK(back.series.initial_value() == 0.75);
}

TEST_CASE("estimate report") {
    const auto y = oracle::tent(40, 16, 24, 32, 1.2, 0.8);
    const auto s = ingest(value_csv(y, true)).series;
    const auto est = estimate_dates(s, TrimmingPolicy{});
    const auto rep = estimate_report(s, est, bic_select(s, TrimmingPolicy{}));
    CHECK(rep["collapse"]["index"] == 24);
    CHECK(rep["collapse"]["label"] == "m24");
    CHECK(rep["emergence"]["label"] == "m16");
    CHECK(rep["recovery"]["label"] == "m32");
    CHECK(rep["bic"].contains("chosen"));
    CHECK(rep["unavailable"].empty());

    std::ostringstream curve;
    write_ssr_curve_csv(curve, *est.ssr_curve_c);
    CHECK(curve.str().rfind("k,ssr\n2,", 0) == 0);
}

TEST_CASE("Monte Carlo emitters") {
    auto c = preset(Preset::Baseline);
    c.reps = 5;
    c.T_grid = {400};
    c.phi_pairs = {{1.05, 0.96}};
    c.targets = {Target::CollapseDate};
    const auto r = run_experiment(c);
    std::ostringstream sum, hist, svg;
    write_mc_summary_csv(sum, r);
    write_mc_histogram_csv(hist, r.histograms[0]);
    write_histogram_svg(svg, r.histograms[0]);
    CHECK(sum.str().rfind("T,phi_a,phi_b,target,true_date,hit_frequency,binned,unavailable,reps\n", 0) == 0);
    CHECK(hist.str().find("unavailable,0") != std::string::npos);
    CHECK(svg.str().rfind("<svg", 0) == 0);
    CHECK(cell_stem(r.histograms[0], 0) == "c00_T400_a1.05_b0.96_collapse");
}

TEST_CASE("histogram and distribution helpers") {
    const std::vector<double> d{0.1, 0.2, 0.2, 0.9, 1.5, -3.0};
    const auto h = make_histogram(d, 0.0, 1.0, 2);
    REQUIRE(h.size() == 2);
    CHECK(h[0].count == 3);
    CHECK(h[1].count == 1);
    CHECK(h[0].density == doctest::Approx(3.0 / 6.0 / 0.5));
    CHECK(total_variation(h, h) == 0.0);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
    CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_statistic({1, 2, 3}, {4, 5, 6}) == 1.0);
    CHECK(ks_critical_value(0.01, 10000, 10000) == doctest::Approx(1.62762 * std::sqrt(2.0 / 10000)).epsilon(1e-4));
    std::ostringstream os;
    write_histogram_csv(os, h);
    CHECK(os.str().rfind("bin_lo,bin_hi,count,density\n", 0) == 0);
}
