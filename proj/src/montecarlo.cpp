#include "bubbledate/montecarlo.hpp"

#include <stdexcept>
#include <string>

#include "bubbledate/rng.hpp"

namespace bubbledate {

const char* to_string(Target target) {
    switch (target) {
        case Target::CollapseDate: return "collapse";
        case Target::EmergenceDate: return "emergence";
        case Target::RecoveryDate: return "recovery";
    }
    return "unknown";
}

Target target_from_string(std::string_view name) {
    if (name == "collapse") return Target::CollapseDate;
    if (name == "emergence") return Target::EmergenceDate;
    if (name == "recovery") return Target::RecoveryDate;
    throw std::invalid_argument("unknown target: " + std::string(name));
}

std::vector<PhiPair> cross_design(const std::vector<double>& explosive, double phi_b_fixed, double phi_a_fixed,
                                  const std::vector<double>& collapsing) {
    std::vector<PhiPair> out;
    for (double a : explosive) out.push_back({a, phi_b_fixed});
    for (double b : collapsing) out.push_back({phi_a_fixed, b});
    return out;
}

DgpConfig ExperimentConfig::cell_config(std::size_t T, PhiPair phi) const {
    DgpConfig c = dgp;
    c.T = T;
    c.phi_a = phi.phi_a;
    c.phi_b = phi.phi_b;
    return c;
}

void ExperimentConfig::validate() const {
    if (T_grid.empty() || phi_pairs.empty()) throw std::invalid_argument("experiment grids must be nonempty");
    if (reps == 0) throw std::invalid_argument("experiment needs at least one replication");
    if (targets.empty()) throw std::invalid_argument("experiment needs at least one target");
    TrimmingPolicy::of(trimming.rho);
    errors.validate();
    for (auto T : T_grid) {
        if (T < kMinSeriesLength) throw std::invalid_argument("experiment sample sizes must be at least 40");
        for (const auto& phi : phi_pairs) cell_config(T, phi).validate();
    }
}

std::size_t HistogramResult::binned() const {
    std::size_t n = 0;
    for (const auto& [date, count] : bins) n += count;
    return n;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t T, std::size_t rep) {
    return stream_key(base_seed, {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(rep)});
}

namespace {

/// Per-replication outcome; 0 encodes "not estimable".
struct RepOutcome {
    std::size_t k_c = 0, k_e = 0, k_r = 0;
    int bic_choice = -1;
};

RepOutcome run_replication(const ExperimentConfig& config, const DgpConfig& cell, std::uint64_t seed) {
    RepOutcome out;
    const auto series = simulate(cell, config.errors, seed);
    try {
        const auto moments = PrefixMoments::build(series);
        EstimateOptions opts;
        opts.keep_curves = false;
        const auto est = estimate_dates(moments, config.trimming, opts);
        out.k_c = est.k_c_hat;
        out.k_e = est.k_e_hat.value_or(0);
        out.k_r = est.k_r_hat.value_or(0);
        if (config.bic) out.bic_choice = static_cast<int>(bic_select(moments, est).chosen);
    } catch (const std::exception&) {
        // Counted as unavailable for every target.
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, Execution exec) {
    config.validate();

    struct Cell {
        std::size_t T;
        PhiPair phi;
        DgpConfig dgp;
    };
    std::vector<Cell> cells;
    for (auto T : config.T_grid) {
        for (const auto& phi : config.phi_pairs) cells.push_back({T, phi, config.cell_config(T, phi)});
    }

    const std::size_t reps = config.reps;
    const std::size_t total = cells.size() * reps;
    std::vector<RepOutcome> outcomes(total);

    auto work = [&](std::size_t i) {
        const auto& cell = cells[i / reps];
        outcomes[i] = run_replication(config, cell.dgp, replication_seed(config.base_seed, cell.T, i % reps));
    };
    if (exec == Execution::Parallel) {
        const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 32)
        for (std::ptrdiff_t i = 0; i < n; ++i) work(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < total; ++i) work(i);
    }

    ExperimentResult result;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        for (Target target : config.targets) {
            HistogramResult h;
            h.cell = {cell.T, cell.phi.phi_a, cell.phi.phi_b, target};
            h.reps = reps;
            switch (target) {
                case Target::CollapseDate: h.true_date = cell.dgp.k_c(); break;
                case Target::EmergenceDate: h.true_date = cell.dgp.k_e(); break;
                case Target::RecoveryDate: h.true_date = cell.dgp.k_r(); break;
            }
            std::size_t hits = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& o = outcomes[c * reps + r];
                const std::size_t k = target == Target::CollapseDate   ? o.k_c
                                      : target == Target::EmergenceDate ? o.k_e
                                                                        : o.k_r;
                if (k == 0) {
                    ++h.unavailable;
                    continue;
                }
                ++h.bins[k];
                if (k == h.true_date) ++hits;
            }
            h.hit_frequency = static_cast<double>(hits) / static_cast<double>(reps);
            result.histograms.push_back(std::move(h));
        }
        if (config.bic) {
            BicTally tally{cell.T, cell.phi, {}, 0};
            for (std::size_t r = 0; r < reps; ++r) {
                const int choice = outcomes[c * reps + r].bic_choice;
                if (choice < 0) {
                    ++tally.failed;
                } else {
                    ++tally.chosen[static_cast<std::size_t>(choice)];
                }
            }
            result.bic.push_back(tally);
        }
    }
    return result;
}

const HistogramResult& find_histogram(const ExperimentResult& result, std::size_t T, PhiPair phi, Target target) {
    for (const auto& h : result.histograms) {
        if (h.cell.T == T && h.cell.phi_a == phi.phi_a && h.cell.phi_b == phi.phi_b && h.cell.target == target) {
            return h;
        }
    }
    throw std::out_of_range("no histogram for the requested cell");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

UnknownPreset::UnknownPreset(std::string_view name) : std::invalid_argument("unknown preset: " + std::string(name)) {}

Preset preset_from_string(std::string_view name) {
    if (name == "baseline") return Preset::Baseline;
    if (name == "short-bubble") return Preset::ShortBubble;
    if (name == "trim1pct") return Preset::Trim1pct;
    if (name == "volshift-down") return Preset::VolShiftDown;
    if (name == "volshift-up") return Preset::VolShiftUp;
    if (name == "no-fourth-regime") return Preset::NoFourthRegime;
    throw UnknownPreset(name);
}

const char* to_string(Preset preset) {
    switch (preset) {
        case Preset::Baseline: return "baseline";
        case Preset::ShortBubble: return "short-bubble";
        case Preset::Trim1pct: return "trim1pct";
        case Preset::VolShiftDown: return "volshift-down";
        case Preset::VolShiftUp: return "volshift-up";
        case Preset::NoFourthRegime: return "no-fourth-regime";
    }
    return "unknown";
}

ExperimentConfig preset(Preset name) {
    ExperimentConfig c;
    c.name = to_string(name);
    c.dgp.tau_e = 0.4;
    c.dgp.tau_c = 0.6;
    c.dgp.tau_r = 0.7;
    c.dgp.y0 = 0.0;
    c.dgp.drift0_override = 1.0 / 800.0;
    c.dgp.drift1_override = 1.0 / 800.0;
    c.errors = ErrorSpec{IidGaussianErrors{1.0}};
    c.T_grid = {400, 800};
    c.phi_pairs = cross_design({1.01, 1.05, 1.09}, 0.96, 1.05, {0.98, 0.96, 0.94});
    c.trimming = TrimmingPolicy::of(0.05);
    c.reps = 2000;

    switch (name) {
        case Preset::Baseline: break;
        case Preset::ShortBubble:
            c.dgp.tau_e = 0.5;
            c.dgp.tau_c = 0.55;
            c.dgp.tau_r = 0.6;
            break;
        case Preset::Trim1pct: c.trimming = TrimmingPolicy::of(0.01); break;
        case Preset::VolShiftDown:
            c.errors = ErrorSpec{VolatilityScaledErrors{VolatilityProfile::single_shift(1.0, 1.0 / 3.0, 0.5)}};
            break;
        case Preset::VolShiftUp:
            c.errors = ErrorSpec{VolatilityScaledErrors{VolatilityProfile::single_shift(1.0, 3.0, 0.5)}};
            break;
        case Preset::NoFourthRegime:
            c.dgp.tau_r = 1.0;
            c.targets = {Target::CollapseDate, Target::EmergenceDate};
            break;
    }
    return c;
}

}  // namespace bubbledate
