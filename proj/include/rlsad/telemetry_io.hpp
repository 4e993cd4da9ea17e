#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlsad/detector.hpp"

namespace rlsad {

/// One row of a telemetry file. values[i] belongs to Telemetry::columns[i].
struct TelemetryFrame {
	double t{0.0};
	std::vector<double> values;
};

struct Telemetry {
	std::string time_column{"t"};
	std::vector<std::string> columns; ///< data columns, time column excluded
	std::vector<TelemetryFrame> frames;

	std::optional<std::size_t> column_index(std::string_view name) const;
	/// Throws SchemaError when the column does not exist.
	std::size_t require_column(std::string_view name) const;
};

struct TelemetrySchema {
	std::string time_column{"t"};
	std::vector<std::string> required_columns;
};

enum class Delimiter : char {
	Comma = ',',
	Tab = '\t',
};

/**
 * Reads delimited text with a header row. The delimiter is taken from the
 * header: tab if it contains one, comma otherwise. Blank lines are ignored.
 *
 * Throws SchemaError for a missing column, RowError for a malformed row and
 * StreamError when time does not strictly increase. Error messages carry
 * the path and 1-based line number.
 */
Telemetry load_telemetry(const std::filesystem::path &path, const TelemetrySchema &schema = {});
Telemetry parse_telemetry(std::string_view text, const TelemetrySchema &schema = {},
			  std::string_view source = "<memory>");

struct RateReport {
	double nominal_rate_hz{0.0};
	double tolerance{0.0}; ///< fraction of the nominal period
	std::size_t periods{0};
	std::size_t violations{0};
	std::vector<std::size_t> violating_frames; ///< index of the later frame of each bad period
	double min_period_s{0.0};
	double max_period_s{0.0};

	double violation_fraction() const;
	bool ok() const { return violations == 0; }
};

/// Flags every inter-sample period outside (1 +- tolerance) / nominal_rate_hz.
RateReport check_rate(const Telemetry &telemetry, double nominal_rate_hz, double tolerance);

struct ChannelSample {
	double u{0.0};
	double y{0.0};
};

/// Resolved column positions for one channel.
struct ChannelColumns {
	std::size_t input{0};
	std::size_t output{0};
	bool derived_output{false};
};

ChannelColumns resolve_channel(const Telemetry &telemetry, const ChannelConfig &config);
ChannelSample derive_channel(const TelemetryFrame &frame, const ChannelColumns &columns);
/// Looks the columns up by name; throws SchemaError naming the channel and column.
ChannelSample derive_channel(const Telemetry &telemetry, const TelemetryFrame &frame, const ChannelConfig &config);

/// Text-output options shared by every writer.
struct OutputFormat {
	Delimiter delimiter{Delimiter::Comma};
};

std::string format_number(double value);

std::string render_telemetry(const Telemetry &telemetry, const OutputFormat &format = {});
std::string render_trace(std::span<const TraceRow> rows, const OutputFormat &format = {});
std::string render_events(std::span<const DetectionEvent> events, const OutputFormat &format = {});

/// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

void write_telemetry(const Telemetry &telemetry, const std::filesystem::path &path, const OutputFormat &format = {});
void write_trace(std::span<const TraceRow> rows, const std::filesystem::path &path, const OutputFormat &format = {});
void write_events(std::span<const DetectionEvent> events, const std::filesystem::path &path,
		  const OutputFormat &format = {});

/// Reads an events file (t, channel, z, err). Events come back in file order.
std::vector<DetectionEvent> load_events(const std::filesystem::path &path);

/// Splits one delimited line. Cells are not trimmed.
std::vector<std::string_view> split_line(std::string_view line, char delimiter);

/// Parses a decimal real (also "nan", "inf"); empty when the cell is not a number.
std::optional<double> parse_real(std::string_view cell);

} // namespace rlsad
