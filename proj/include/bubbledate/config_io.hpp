#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bubbledate/core_types.hpp"
#include "bubbledate/dgp.hpp"
#include "bubbledate/montecarlo.hpp"

namespace bubbledate {

/// Version written to and required from every JSON config.
inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input of `bubbledate simulate`. Without errors the path is noiseless.
struct SimulationConfig {
    DgpConfig dgp;
    std::optional<ErrorSpec> errors;
};

// JSON encoders. Decoders throw ConfigError with the offending key.
[[nodiscard]] nlohmann::json to_json(const DgpConfig& c);
[[nodiscard]] nlohmann::json to_json(const ErrorSpec& e);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& c);
[[nodiscard]] nlohmann::json to_json(const SimulationConfig& c);

[[nodiscard]] DgpConfig dgp_from_json(const nlohmann::json& j, const DgpConfig& defaults = {});
[[nodiscard]] ErrorSpec errors_from_json(const nlohmann::json& j);
[[nodiscard]] ExperimentConfig experiment_from_json(const nlohmann::json& j);
[[nodiscard]] SimulationConfig simulation_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);

}  // namespace bubbledate
