#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlsad/detector.hpp"
#include "rlsad/telemetry_io.hpp"

namespace rlsad {

struct RunConfig {
	std::vector<ChannelConfig> channels;
	double nominal_rate_hz{25.0};
	double jitter_tolerance{0.2}; ///< fraction of the nominal period
	std::string time_column{"t"};

	void validate() const;
};

/// Four command/response channels matching the columns the simulator writes.
RunConfig default_run_config();

/**
 * Parses an INI-style run configuration:
 *
 *   [run]
 *   nominal_rate_hz = 25
 *   jitter_tolerance = 0.2
 *   time_column = t
 *
 *   [channel.roll_error]
 *   input = roll_cmd
 *   output = roll
 *   derived_output = true
 *   na = 25
 *   nb = 25
 *   ...
 *
 * Keys left out of a channel section take the ChannelConfig defaults (after
 * any environment overrides in `defaults`). Unknown keys are rejected.
 */
RunConfig parse_run_config(std::string_view text, const ChannelConfig &defaults = {});
RunConfig load_run_config(const std::filesystem::path &path, const ChannelConfig &defaults = {});
std::string render_run_config(const RunConfig &config);

struct ChannelRun {
	std::string name;
	std::vector<TraceRow> trace;
	std::vector<DetectionEvent> events;
	std::vector<DataQualityEvent> quality;
	Phase final_phase{Phase::Warmup};
	std::optional<double> armed_at; ///< time the channel first reached Armed
};

struct DetectionRun {
	std::vector<ChannelRun> channels;
	std::vector<DetectionEvent> events; ///< all channels, ordered by (t, channel)
	std::optional<SystemAnomaly> system_anomaly;
	std::optional<RateReport> rate;
	std::size_t samples{0};
};

/// Runs every configured channel over the telemetry.
DetectionRun run_detection(const Telemetry &telemetry, const RunConfig &config);

} // namespace rlsad
