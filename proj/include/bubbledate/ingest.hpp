#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "bubbledate/core_types.hpp"

namespace bubbledate {

/// Column selector: header name or zero-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct IngestSpec {
    std::string path;
    ColumnRef value_column = std::string("value");
    /// When unset, a column named `date` is used if present.
    std::optional<ColumnRef> date_column;
    bool log_transform = false;
    char delimiter = ',';
};

/// Parse failure with file position. line is 1-based; 0 when not line-specific.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line, std::string column);
    std::size_t line;
    std::string column;
};

struct IngestedSeries {
    Series series;
    /// Parsed `# dgp: {...}` metadata line, if the file carries one.
    std::optional<nlohmann::json> dgp_metadata;
};

/**
 * Reads a delimited file with a required header row. Lines starting with `#`
 * are comments. Values use a decimal point regardless of locale. A
 * `# dgp: {json}` comment written by the simulator supplies y_0, which is
 * attached as the series' initial value unless the data are log-transformed.
 */
[[nodiscard]] IngestedSeries read_series_csv(std::istream& in, const IngestSpec& spec);
[[nodiscard]] IngestedSeries read_series_csv(const IngestSpec& spec);

}  // namespace bubbledate
