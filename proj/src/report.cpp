#include "bubbledate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>

namespace bubbledate {

using nlohmann::json;

namespace {

json date_json(const Series& series, std::optional<std::size_t> k) {
    if (!k) return nullptr;
    json j = {{"index", *k}};
    if (series.labels()) j["label"] = series.label_at(*k);
    return j;
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

json estimate_report(const Series& series, const BreakEstimates& est, const std::optional<BicReport>& bic) {
    json j;
    j["T"] = series.size();
    j["y0_known"] = series.initial_value().has_value();
    j["collapse"] = date_json(series, est.k_c_hat);
    j["emergence"] = date_json(series, est.k_e_hat);
    j["recovery"] = date_json(series, est.k_r_hat);
    j["ranges"]["collapse"] = {est.range_c.lo, est.range_c.hi};
    if (est.range_e) j["ranges"]["emergence"] = {est.range_e->lo, est.range_e->hi};
    if (est.range_r) j["ranges"]["recovery"] = {est.range_r->lo, est.range_r->hi};
    json unavailable = json::object();
    if (est.unavailable_reason_e) unavailable["emergence"] = to_string(*est.unavailable_reason_e);
    if (est.unavailable_reason_r) unavailable["recovery"] = to_string(*est.unavailable_reason_r);
    j["unavailable"] = unavailable;
    if (bic) {
        j["bic"] = {{"chosen", to_string(bic->chosen)},
                    {"observations", bic->observations},
                    {"bic2", finite_or_null(bic->bic2)},
                    {"bic3", finite_or_null(bic->bic3)},
                    {"bic4", finite_or_null(bic->bic4)},
                    {"ssr2", finite_or_null(bic->ssr2)},
                    {"ssr3", finite_or_null(bic->ssr3)},
                    {"ssr4", finite_or_null(bic->ssr4)}};
    }
    return j;
}

void write_ssr_curve_csv(std::ostream& os, const SsrCurve& curve) {
    os << "k,ssr\n" << std::setprecision(17);
    for (const auto& p : curve) os << p.k << ',' << p.ssr << '\n';
}

void write_mc_summary_csv(std::ostream& os, const ExperimentResult& result) {
    os << "T,phi_a,phi_b,target,true_date,hit_frequency,binned,unavailable,reps\n";
    for (const auto& h : result.histograms) {
        os << h.cell.T << ',' << h.cell.phi_a << ',' << h.cell.phi_b << ',' << to_string(h.cell.target) << ','
           << h.true_date << ',' << h.hit_frequency << ',' << h.binned() << ',' << h.unavailable << ',' << h.reps
           << '\n';
    }
}

void write_bic_summary_csv(std::ostream& os, const ExperimentResult& result) {
    os << "T,phi_a,phi_b,two,three,four,failed\n";
    for (const auto& b : result.bic) {
        os << b.T << ',' << b.phi.phi_a << ',' << b.phi.phi_b << ',' << b.chosen[0] << ',' << b.chosen[1] << ','
           << b.chosen[2] << ',' << b.failed << '\n';
    }
}

void write_mc_histogram_csv(std::ostream& os, const HistogramResult& h) {
    os << "T,phi_a,phi_b,target,date,count\n";
    auto prefix = [&] {
        os << h.cell.T << ',' << h.cell.phi_a << ',' << h.cell.phi_b << ',' << to_string(h.cell.target) << ',';
    };
    for (const auto& [date, count] : h.bins) {
        prefix();
        os << date << ',' << count << '\n';
    }
    prefix();
    os << "unavailable," << h.unavailable << '\n';
}

void write_histogram_svg(std::ostream& os, const HistogramResult& h) {
    constexpr double width = 640, height = 360, pad = 40;
    const std::size_t lo = h.bins.empty() ? h.true_date : std::min(h.bins.begin()->first, h.true_date);
    const std::size_t hi = h.bins.empty() ? h.true_date : std::max(h.bins.rbegin()->first, h.true_date);
    std::size_t peak = 1;
    for (const auto& [date, count] : h.bins) peak = std::max(peak, count);
    const double span = static_cast<double>(hi - lo + 1);
    const double bar = (width - 2 * pad) / span;
    auto x_of = [&](std::size_t k) { return pad + bar * static_cast<double>(k - lo); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">T=" << h.cell.T
       << " phi_a=" << h.cell.phi_a << " phi_b=" << h.cell.phi_b << " " << to_string(h.cell.target)
       << " hit=" << h.hit_frequency << "</text>\n";
    for (const auto& [date, count] : h.bins) {
        const double frac = static_cast<double>(count) / static_cast<double>(h.reps);
        const double bh = (height - 2 * pad) * static_cast<double>(count) / static_cast<double>(peak);
        os << "<rect x=\"" << x_of(date) << "\" y=\"" << height - pad - bh << "\" width=\"" << std::max(bar, 1.0)
           << "\" height=\"" << bh << "\" fill=\"steelblue\"><title>" << date << ": " << frac
           << "</title></rect>\n";
    }
    const double tx = x_of(h.true_date) + bar / 2;
    os << "<line x1=\"" << tx << "\" y1=\"" << pad << "\" x2=\"" << tx << "\" y2=\"" << height - pad
       << "\" stroke=\"crimson\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"" << height - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">" << lo
       << "</text>\n";
    os << "<text x=\"" << width - pad << "\" y=\"" << height - 12
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << hi << "</text>\n";
    os << "</svg>\n";
}

std::string cell_stem(const HistogramResult& h, std::size_t cell_index) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "c%02zu_T%zu_a%.2f_b%.2f_%s", cell_index, h.cell.T, h.cell.phi_a, h.cell.phi_b,
                  to_string(h.cell.target));
    return buf;
}

void write_draws_csv(std::ostream& os, std::span<const double> draws) {
    os << "draw\n" << std::setprecision(17);
    for (double d : draws) os << d << '\n';
}

}  // namespace bubbledate
