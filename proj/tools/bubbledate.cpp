// bubbledate: bubble emergence/collapse/recovery dating, simulation, Monte
// Carlo experiments and limit-law sampling.
//
// Exit codes: 0 success, 2 validation error, 3 estimation unavailable
// (partial results are still written).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bubbledate/asymptotics.hpp"
#include "bubbledate/config_io.hpp"
#include "bubbledate/dgp.hpp"
#include "bubbledate/estimator.hpp"
#include "bubbledate/ingest.hpp"
#include "bubbledate/montecarlo.hpp"
#include "bubbledate/report.hpp"
#include "bubbledate/stats.hpp"

namespace fs = std::filesystem;
using namespace bubbledate;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnavailable = 3;

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

/// Writes to `path`, or stdout when path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    auto out = open_out(path);
    fn(out);
}

ColumnRef column_ref(const std::string& text) {
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
        return static_cast<std::size_t>(std::stoull(text));
    }
    return text;
}

std::vector<double> parse_psi(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t\n\r");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t\n\r");
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data() + b, item.data() + e + 1, v);
        if (ec != std::errc() || ptr != item.data() + e + 1) {
            throw std::invalid_argument("bad psi coefficient '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty psi coefficient list");
    return out;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string input;
    std::string value_column = "value";
    std::string date_column;
    std::string delimiter = ",";
    bool log = false;
    bool bic = false;
    double trim = 0.05;
    std::string out;
    std::string curves_dir;
};

int run_estimate(const EstimateArgs& a) {
    IngestSpec spec;
    spec.path = a.input;
    spec.value_column = column_ref(a.value_column);
    if (!a.date_column.empty()) spec.date_column = column_ref(a.date_column);
    spec.log_transform = a.log;
    if (a.delimiter.size() != 1) throw std::invalid_argument("delimiter must be a single character");
    spec.delimiter = a.delimiter[0];

    const auto ingested = read_series_csv(spec);
    const auto trimming = TrimmingPolicy::of(a.trim);
    const auto moments = PrefixMoments::build(ingested.series);

    BreakEstimates est;
    try {
        est = estimate_dates(moments, trimming);
    } catch (const std::runtime_error& e) {
        std::cerr << "estimation unavailable: " << e.what() << '\n';
        emit(a.out, [&](std::ostream& os) {
            os << json{{"error", e.what()}, {"T", ingested.series.size()}}.dump(2) << '\n';
        });
        return kExitUnavailable;
    }
    std::optional<BicReport> bic;
    if (a.bic) bic = bic_select(moments, est);

    emit(a.out, [&](std::ostream& os) { os << estimate_report(ingested.series, est, bic).dump(2) << '\n'; });

    if (!a.curves_dir.empty()) {
        const fs::path dir(a.curves_dir);
        auto dump = [&](const std::optional<SsrCurve>& curve, const char* name) {
            if (!curve) return;
            auto out = open_out(dir / (std::string("ssr_") + name + ".csv"));
            write_ssr_curve_csv(out, *curve);
        };
        dump(est.ssr_curve_c, "collapse");
        dump(est.ssr_curve_e, "emergence");
        dump(est.ssr_curve_r, "recovery");
    }
    for (const auto& [name, reason] : {std::pair{"emergence", est.unavailable_reason_e},
                                       std::pair{"recovery", est.unavailable_reason_r}}) {
        if (reason) std::cerr << name << " date unavailable: " << to_string(*reason) << '\n';
    }
    return (est.k_e_hat && est.k_r_hat) ? kExitOk : kExitUnavailable;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string preset;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    SimulationConfig sim;
    if (!a.config.empty()) {
        sim = simulation_from_json(read_json_file(a.config));
    } else {
        const auto exp = preset(preset_from_string(a.preset.empty() ? "baseline" : a.preset));
        sim.dgp = exp.cell_config(exp.T_grid.back(), PhiPair{1.05, 0.96});
        sim.errors = exp.errors;
    }
    Series series = sim.errors ? simulate(sim.dgp, *sim.errors, a.seed)
                               : make_series_unchecked(
                                     simulate_path(sim.dgp, std::vector<double>(sim.dgp.T, 0.0)), sim.dgp.y0);
    json meta = to_json(sim);
    meta["seed"] = a.seed;
    emit(a.out, [&](std::ostream& os) { write_series_csv(os, series, meta.dump()); });
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct McArgs {
    std::string preset;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<double> trim;
    std::string out = "mc_out";
    bool svg = false;
    bool bic = false;
    bool serial = false;
};

int run_mc(const McArgs& a) {
    ExperimentConfig cfg;
    json raw;
    if (!a.config.empty()) {
        raw = read_json_file(a.config);
        cfg = experiment_from_json(raw);
    } else {
        cfg = preset(preset_from_string(a.preset.empty() ? "baseline" : a.preset));
    }
    if (a.seed) {
        cfg.base_seed = *a.seed;
    } else if (a.config.empty() || !raw.contains("base_seed")) {
        throw std::invalid_argument("--seed is required unless the config file sets base_seed");
    }
    if (a.reps) cfg.reps = *a.reps;
    if (a.trim) cfg.trimming = TrimmingPolicy::of(*a.trim);
    if (a.bic) cfg.bic = true;

    const auto result = run_experiment(cfg, a.serial ? Execution::Serial : Execution::Parallel);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "config.json");
        out << to_json(cfg).dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "summary.csv");
        write_mc_summary_csv(out, result);
    }
    if (cfg.bic) {
        auto out = open_out(dir / "bic.csv");
        write_bic_summary_csv(out, result);
    }
    const std::size_t per_cell = cfg.targets.size();
    for (std::size_t i = 0; i < result.histograms.size(); ++i) {
        const auto& h = result.histograms[i];
        const auto stem = cell_stem(h, i / per_cell);
        auto csv = open_out(dir / (stem + ".csv"));
        write_mc_histogram_csv(csv, h);
        if (a.svg) {
            auto svg = open_out(dir / (stem + ".svg"));
            write_histogram_svg(svg, h);
        }
    }
    write_mc_summary_csv(std::cout, result);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct LimitArgs {
    std::string law;
    double cb = 1.0;
    double tau_e = 0.4;
    std::string psi;
    std::string psi_file;
    std::size_t draws = 10000;
    double step = 0.01;
    double v_max = 50.0;
    double horizon = 0.0;
    int refine = 0;
    std::uint64_t seed = 0;
    std::string out = "draws.csv";
    std::string hist;
    std::size_t bins = 100;
    double hist_range = 0.0;
    bool serial = false;
};

int run_limitdist(const LimitArgs& a) {
    Discretization disc;
    disc.step = a.step;
    disc.v_max = a.v_max;
    disc.ou_horizon = a.horizon;
    disc.paths = a.draws;
    disc.refine = a.refine;
    const auto exec = a.serial ? Execution::Serial : Execution::Parallel;

    LimitSample sample;
    json echo = {{"law", a.law},
                 {"draws", a.draws},
                 {"seed", a.seed},
                 {"discretization", {{"step", disc.fine_step()}, {"v_max", disc.v_max}, {"refine", disc.refine}}}};
    if (a.law == "recovery") {
        std::optional<BnDecomposition> correction;
        std::string psi_text = a.psi;
        if (!a.psi_file.empty()) {
            std::ifstream in(a.psi_file);
            if (!in) throw std::invalid_argument("cannot open psi file '" + a.psi_file + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            psi_text = buf.str();
            for (auto& ch : psi_text) {
                if (ch == '\n' || ch == ' ' || ch == '\t') ch = ',';
            }
        }
        if (!psi_text.empty()) {
            correction = bn_decompose(LinearProcessCoeffs(parse_psi(psi_text)));
            echo["psi_check"] = correction->psi_check;
            echo["psi_sum"] = correction->psi_sum;
        }
        disc.validate(a.cb);
        echo["c_b"] = a.cb;
        echo["discretization"]["ou_horizon"] = disc.horizon_for(a.cb);
        sample = sample_recovery_limits(a.cb, correction, disc, a.seed, exec);
    } else if (a.law == "emergence") {
        echo["tau_e"] = a.tau_e;
        sample = sample_emergence_limits(a.tau_e, disc, a.seed, exec);
    } else {
        throw std::invalid_argument("law must be 'recovery' or 'emergence'");
    }
    echo["rejections"] = sample.rejections;
    echo["mean"] = mean(sample.draws);
    echo["sd"] = stddev(sample.draws);
    echo["quantiles"] = {{"q10", quantile(sample.draws, 0.1)},
                         {"q50", quantile(sample.draws, 0.5)},
                         {"q90", quantile(sample.draws, 0.9)}};

    emit(a.out, [&](std::ostream& os) { write_draws_csv(os, sample.draws); });

    std::string hist_path = a.hist;
    if (hist_path.empty() && !a.out.empty() && a.out != "-") {
        fs::path p(a.out);
        hist_path = (p.parent_path() / (p.stem().string() + "_hist.csv")).string();
    }
    if (!hist_path.empty()) {
        const double range = a.hist_range > 0 ? a.hist_range : disc.v_max;
        const auto bins = make_histogram(sample.draws, -range, range + 1e-12, a.bins);
        emit(hist_path, [&](std::ostream& os) { write_histogram_csv(os, bins); });
        echo["histogram"] = hist_path;
    }
    std::cout << echo.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Least-squares dating of bubble emergence, collapse and recovery"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate break dates of a CSV series");
    c_est->add_option("input,--input", est.input, "CSV file with a header row")->required();
    c_est->add_option("--value-column", est.value_column, "Value column name or zero-based index");
    c_est->add_option("--date-column", est.date_column, "Calendar label column (default: 'date' if present)");
    c_est->add_option("--delimiter", est.delimiter, "Field delimiter");
    c_est->add_flag("--log", est.log, "Take logarithms of the values");
    c_est->add_flag("--bic", est.bic, "Select 2/3/4-regime model by BIC");
    c_est->add_option("--trim", est.trim, "Trimming fraction in (0, 0.25]");
    c_est->add_option("--out", est.out, "Report path (default stdout)");
    c_est->add_option("--curves", est.curves_dir, "Directory for per-step SSR curve CSVs");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate one series from the four-regime model");
    c_sim->add_option("--config", sim.config, "Simulation JSON config");
    c_sim->add_option("--preset", sim.preset, "Preset DGP (T=800, phi=(1.05, 0.96))");
    c_sim->add_option("--seed", sim.seed, "Random seed")->required();
    c_sim->add_option("--out", sim.out, "Output CSV (default stdout)");

    McArgs mc;
    auto* c_mc = app.add_subcommand("mc", "Run a Monte Carlo experiment");
    c_mc->add_option("--preset", mc.preset,
                     "baseline | short-bubble | trim1pct | volshift-down | volshift-up | no-fourth-regime");
    c_mc->add_option("--config", mc.config, "Experiment JSON config");
    c_mc->add_option("--seed", mc.seed, "Base seed");
    c_mc->add_option("--reps", mc.reps, "Replications per cell");
    c_mc->add_option("--trim", mc.trim, "Override trimming fraction");
    c_mc->add_option("--out", mc.out, "Output directory");
    c_mc->add_flag("--svg", mc.svg, "Also write SVG histograms");
    c_mc->add_flag("--bic", mc.bic, "Tally BIC model choices");
    c_mc->add_flag("--serial", mc.serial, "Use the serial reference path");

    LimitArgs lim;
    auto* c_lim = app.add_subcommand("limitdist", "Sample a limiting argmax distribution");
    c_lim->add_option("law", lim.law, "recovery | emergence")->required();
    c_lim->add_option("--cb", lim.cb, "c_b for the recovery law");
    c_lim->add_option("--tau-e", lim.tau_e, "tau_e for the emergence law");
    c_lim->add_option("--psi", lim.psi, "Comma-separated MA coefficients psi_0,psi_1,...");
    c_lim->add_option("--psi-file", lim.psi_file, "File with MA coefficients");
    c_lim->add_option("--draws", lim.draws, "Number of draws");
    c_lim->add_option("--step", lim.step, "Grid step");
    c_lim->add_option("--vmax", lim.v_max, "Argmax search half-width");
    c_lim->add_option("--horizon", lim.horizon, "OU truncation horizon (default max(10/c_b, 10))");
    c_lim->add_option("--refine", lim.refine, "Bridge refinement levels");
    c_lim->add_option("--seed", lim.seed, "Random seed")->required();
    c_lim->add_option("--out", lim.out, "Draws CSV");
    c_lim->add_option("--hist", lim.hist, "Histogram CSV (default <out>_hist.csv)");
    c_lim->add_option("--bins", lim.bins, "Histogram bins");
    c_lim->add_option("--hist-range", lim.hist_range, "Histogram half-width (default vmax)");
    c_lim->add_flag("--serial", lim.serial, "Use the serial reference path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*c_est) return run_estimate(est);
        if (*c_sim) return run_simulate(sim);
        if (*c_mc) return run_mc(mc);
        if (*c_lim) return run_limitdist(lim);
    } catch (const IngestError& e) {
        std::cerr << "ingest error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SeriesValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
