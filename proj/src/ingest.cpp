#include "bubbledate/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

namespace bubbledate {

IngestError::IngestError(const std::string& what, std::size_t line_, std::string column_)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + (column_.empty() ? "" : ", column '" + column_ + "'") +
                                         ": " + what
                                   : what),
      line(line_),
      column(std::move(column_)) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header, std::size_t line) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (*idx >= header.size()) {
            throw IngestError("column index " + std::to_string(*idx) + " out of range", line, "");
        }
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IngestError("column not found in header", line, name);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

IngestedSeries read_series_csv(std::istream& in, const IngestSpec& spec) {
    IngestedSeries result{Series{}, std::nullopt};
    std::vector<std::string> header;
    std::size_t value_idx = 0;
    std::optional<std::size_t> date_idx;
    std::vector<double> values;
    std::vector<std::string> labels;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view tag = "# dgp:";
            if (line.rfind(tag, 0) == 0) {
                try {
                    result.dgp_metadata = nlohmann::json::parse(line.substr(tag.size()));
                } catch (const nlohmann::json::exception&) {
                    throw IngestError("malformed '# dgp:' metadata", line_no, "");
                }
            }
            continue;
        }
        auto fields = split(line, spec.delimiter);
        if (header.empty()) {
            header = std::move(fields);
            value_idx = resolve(spec.value_column, header, line_no);
            if (spec.date_column) {
                date_idx = resolve(*spec.date_column, header, line_no);
            } else {
                for (std::size_t i = 0; i < header.size(); ++i) {
                    if (header[i] == "date") date_idx = i;
                }
            }
            continue;
        }
        if (fields.size() != header.size()) {
            throw IngestError("expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()),
                              line_no, "");
        }
        double v = 0.0;
        if (!parse_double(fields[value_idx], v) || !std::isfinite(v)) {
            throw IngestError("not a finite number: '" + fields[value_idx] + "'", line_no, header[value_idx]);
        }
        if (spec.log_transform) {
            if (!(v > 0.0)) throw IngestError("log transform needs positive values", line_no, header[value_idx]);
            v = std::log(v);
        }
        values.push_back(v);
        if (date_idx) labels.push_back(fields[*date_idx]);
    }
    if (header.empty()) throw IngestError("file has no header row", 0, "");

    std::optional<std::vector<std::string>> label_opt;
    if (date_idx) label_opt = std::move(labels);
    result.series = validate_series(std::move(values), std::move(label_opt));

    if (result.dgp_metadata && !spec.log_transform) {
        const auto& meta = *result.dgp_metadata;
        if (meta.contains("dgp") && meta["dgp"].contains("y0") && meta["dgp"]["y0"].is_number()) {
            result.series = result.series.with_initial_value(meta["dgp"]["y0"].get<double>());
        }
    }
    return result;
}

IngestedSeries read_series_csv(const IngestSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw IngestError("cannot open '" + spec.path + "'", 0, "");
    return read_series_csv(in, spec);
}

}  // namespace bubbledate
