#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "bubbledate/core_types.hpp"
#include "bubbledate/estimator.hpp"
#include "bubbledate/montecarlo.hpp"

namespace bubbledate {

/// JSON report of an estimation run; dates are 1-based indices plus labels when present.
[[nodiscard]] nlohmann::json estimate_report(const Series& series, const BreakEstimates& est,
                                             const std::optional<BicReport>& bic);

/// Columns k,ssr.
void write_ssr_curve_csv(std::ostream& os, const SsrCurve& curve);

/// One row per histogram: T,phi_a,phi_b,target,true_date,hit_frequency,binned,unavailable,reps.
void write_mc_summary_csv(std::ostream& os, const ExperimentResult& result);

/// BIC tallies: T,phi_a,phi_b,two,three,four,failed.
void write_bic_summary_csv(std::ostream& os, const ExperimentResult& result);

/// Cell columns followed by one row per estimated date: T,phi_a,phi_b,target,date,count.
/// A final row with date "unavailable" carries the unbinned count.
void write_mc_histogram_csv(std::ostream& os, const HistogramResult& h);

/// Static bar chart of a histogram; the true date is marked.
void write_histogram_svg(std::ostream& os, const HistogramResult& h);

/// File stem for a cell, e.g. "T800_a1.05_b0.96_collapse".
[[nodiscard]] std::string cell_stem(const HistogramResult& h, std::size_t cell_index);

/// Single column `draw`.
void write_draws_csv(std::ostream& os, std::span<const double> draws);

}  // namespace bubbledate
