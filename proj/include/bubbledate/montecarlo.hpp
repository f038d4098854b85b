#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bubbledate/core_types.hpp"
#include "bubbledate/dgp.hpp"
#include "bubbledate/estimator.hpp"
#include "bubbledate/parallel.hpp"

namespace bubbledate {

enum class Target { CollapseDate, EmergenceDate, RecoveryDate };

[[nodiscard]] const char* to_string(Target target);
[[nodiscard]] Target target_from_string(std::string_view name);

struct PhiPair {
    double phi_a;
    double phi_b;
    friend bool operator==(const PhiPair&, const PhiPair&) = default;
};

struct ExperimentConfig {
    std::string name = "custom";
    /// tau_*, drifts, eta/c and y0; phi_a, phi_b and T are set per cell.
    DgpConfig dgp;
    ErrorSpec errors;
    std::vector<std::size_t> T_grid;
    /// Design points; duplicates are kept as separate cells.
    std::vector<PhiPair> phi_pairs;
    TrimmingPolicy trimming;
    std::size_t reps = 2000;
    std::uint64_t base_seed = 20240101;
    std::vector<Target> targets{Target::CollapseDate, Target::EmergenceDate, Target::RecoveryDate};
    bool bic = false;

    /// Throws std::invalid_argument on empty grids, zero reps or an invalid cell.
    void validate() const;
    /// DGP for one design cell.
    [[nodiscard]] DgpConfig cell_config(std::size_t T, PhiPair phi) const;
};

/// Cross design: every phi_a in `explosive` with `phi_b_fixed`, then `phi_a_fixed` with every phi_b.
[[nodiscard]] std::vector<PhiPair> cross_design(const std::vector<double>& explosive, double phi_b_fixed,
                                                double phi_a_fixed, const std::vector<double>& collapsing);

struct CellKey {
    std::size_t T;
    double phi_a;
    double phi_b;
    Target target;
};

struct HistogramResult {
    CellKey cell;
    std::size_t true_date;
    /// Estimated date -> count; exact integer dates.
    std::map<std::size_t, std::size_t> bins;
    double hit_frequency = 0.0;
    std::size_t unavailable = 0;
    std::size_t reps = 0;

    [[nodiscard]] std::size_t binned() const;
};

struct BicTally {
    std::size_t T;
    PhiPair phi;
    /// Counts indexed by RegimeModel; failed estimations are counted in `failed`.
    std::array<std::size_t, 3> chosen{};
    std::size_t failed = 0;
};

struct ExperimentResult {
    std::vector<HistogramResult> histograms;
    std::vector<BicTally> bic;
};

/**
 * @brief Replicates DGP -> estimation for every (T, phi pair) cell.
 *
 * Replication r at sample size T draws its errors from stream
 * (base_seed, T, r), so every phi cell at the same T sees the same shocks
 * (common random numbers), and so does any other experiment that shares the
 * base seed. Counts are merged in replication order; serial and parallel runs
 * are identical.
 */
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config, Execution exec = Execution::Parallel);

/// Seed handed to generate_errors() for replication r at sample size T.
[[nodiscard]] std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t T, std::size_t rep);

enum class Preset { Baseline, ShortBubble, Trim1pct, VolShiftDown, VolShiftUp, NoFourthRegime };

class UnknownPreset : public std::invalid_argument {
public:
    explicit UnknownPreset(std::string_view name);
};

[[nodiscard]] Preset preset_from_string(std::string_view name);
[[nodiscard]] const char* to_string(Preset preset);
[[nodiscard]] ExperimentConfig preset(Preset name);

/// Looks up one histogram; throws std::out_of_range if absent.
[[nodiscard]] const HistogramResult& find_histogram(const ExperimentResult& result, std::size_t T, PhiPair phi,
                                                    Target target);

}  // namespace bubbledate
