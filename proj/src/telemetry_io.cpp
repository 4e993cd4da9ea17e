#include "rlsad/telemetry_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "rlsad/errors.hpp"

namespace rlsad {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s)
{
	constexpr std::string_view ws = " \t\r\n";
	const auto begin = s.find_first_not_of(ws);

	if (begin == std::string_view::npos) {
		return {};
	}

	const auto end = s.find_last_not_of(ws);
	return s.substr(begin, end - begin + 1);
}

std::string where(std::string_view source, std::size_t line)
{
	return fmt::format("{}:{}", source, line);
}

std::string read_file(const fs::path &path)
{
	std::ifstream in(path, std::ios::binary);

	if (!in) {
		throw IoError("cannot open " + path.string());
	}

	std::ostringstream buffer;
	buffer << in.rdbuf();

	if (in.bad()) {
		throw IoError("read failed for " + path.string());
	}

	return buffer.str();
}

char detect_delimiter(std::string_view header)
{
	return header.find('\t') != std::string_view::npos ? '\t' : ',';
}

// Iterates lines with their 1-based numbers, skipping blank ones.
template <typename Fn>
void for_each_line(std::string_view text, Fn &&fn)
{
	std::size_t line_no = 0;
	std::size_t pos = 0;

	while (pos < text.size()) {
		auto end = text.find('\n', pos);

		if (end == std::string_view::npos) {
			end = text.size();
		}

		++line_no;
		const std::string_view line = text.substr(pos, end - pos);
		pos = end + 1;

		if (trim(line).empty()) {
			continue;
		}

		if (!fn(line_no, line)) {
			return;
		}
	}
}

} // namespace

std::optional<std::size_t> Telemetry::column_index(std::string_view name) const
{
	const auto it = std::find(columns.begin(), columns.end(), name);

	if (it == columns.end()) {
		return std::nullopt;
	}

	return static_cast<std::size_t>(it - columns.begin());
}

std::size_t Telemetry::require_column(std::string_view name) const
{
	if (auto index = column_index(name)) {
		return *index;
	}

	throw SchemaError(fmt::format("missing column '{}'", name));
}

std::vector<std::string_view> split_line(std::string_view line, char delimiter)
{
	std::vector<std::string_view> cells;
	std::size_t pos = 0;

	while (true) {
		const auto end = line.find(delimiter, pos);

		if (end == std::string_view::npos) {
			cells.push_back(line.substr(pos));
			break;
		}

		cells.push_back(line.substr(pos, end - pos));
		pos = end + 1;
	}

	return cells;
}

std::optional<double> parse_real(std::string_view cell)
{
	cell = trim(cell);

	if (cell.empty()) {
		return std::nullopt;
	}

	if (cell.front() == '+') {
		cell.remove_prefix(1);
	}

	double value = 0.0;
	const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);

	if (ec != std::errc() || ptr != cell.data() + cell.size()) {
		return std::nullopt;
	}

	return value;
}

Telemetry parse_telemetry(std::string_view text, const TelemetrySchema &schema, std::string_view source)
{
	Telemetry telemetry;
	telemetry.time_column = schema.time_column;

	char delimiter = ',';
	std::size_t time_index = 0;
	std::size_t width = 0;
	bool have_header = false;
	std::optional<double> last_t;

	for_each_line(text, [&](std::size_t line_no, std::string_view line) {
		if (!have_header) {
			delimiter = detect_delimiter(line);
			std::vector<std::string> names;

			for (std::string_view cell : split_line(line, delimiter)) {
				names.emplace_back(trim(cell));
			}

			const auto time_it = std::find(names.begin(), names.end(), schema.time_column);

			if (time_it == names.end()) {
				throw SchemaError(fmt::format("{}: missing time column '{}'", where(source, line_no),
							      schema.time_column));
			}

			time_index = static_cast<std::size_t>(time_it - names.begin());
			width = names.size();

			for (std::size_t i = 0; i < names.size(); ++i) {
				if (i != time_index) {
					telemetry.columns.push_back(names[i]);
				}
			}

			for (const std::string &required : schema.required_columns) {
				if (!telemetry.column_index(required)) {
					throw SchemaError(fmt::format("{}: missing column '{}'", where(source, line_no), required));
				}
			}

			have_header = true;
			return true;
		}

		const auto cells = split_line(line, delimiter);

		if (cells.size() != width) {
			throw RowError(fmt::format("{}: expected {} cells, found {}", where(source, line_no), width,
						   cells.size()));
		}

		TelemetryFrame frame;
		frame.values.reserve(width - 1);

		for (std::size_t i = 0; i < cells.size(); ++i) {
			const auto value = parse_real(cells[i]);

			if (!value) {
				throw RowError(fmt::format("{}: non-numeric cell '{}' in column {}", where(source, line_no),
							   trim(cells[i]), i + 1));
			}

			if (i == time_index) {
				frame.t = *value;

			} else {
				frame.values.push_back(*value);
			}
		}

		if (!std::isfinite(frame.t)) {
			throw RowError(fmt::format("{}: non-finite time", where(source, line_no)));
		}

		if (last_t && !(frame.t > *last_t)) {
			throw StreamError(fmt::format("{}: time {} does not increase (previous {})", where(source, line_no),
						      frame.t, *last_t));
		}

		last_t = frame.t;
		telemetry.frames.push_back(std::move(frame));
		return true;
	});

	if (!have_header) {
		throw SchemaError(fmt::format("{}: empty file, no header row", source));
	}

	return telemetry;
}

Telemetry load_telemetry(const fs::path &path, const TelemetrySchema &schema)
{
	return parse_telemetry(read_file(path), schema, path.string());
}

double RateReport::violation_fraction() const
{
	return periods == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(periods);
}

RateReport check_rate(const Telemetry &telemetry, double nominal_rate_hz, double tolerance)
{
	if (!(nominal_rate_hz > 0.0)) {
		throw ConfigError("nominal rate must be positive");
	}

	if (!(tolerance >= 0.0)) {
		throw ConfigError("rate tolerance must be non-negative");
	}

	if (telemetry.frames.size() < 2) {
		throw ContractViolation("rate check needs at least two frames");
	}

	RateReport report;
	report.nominal_rate_hz = nominal_rate_hz;
	report.tolerance = tolerance;

	const double nominal = 1.0 / nominal_rate_hz;
	const double lo = nominal * (1.0 - tolerance);
	const double hi = nominal * (1.0 + tolerance);

	report.min_period_s = std::numeric_limits<double>::infinity();
	report.max_period_s = 0.0;

	for (std::size_t i = 1; i < telemetry.frames.size(); ++i) {
		const double period = telemetry.frames[i].t - telemetry.frames[i - 1].t;
		++report.periods;
		report.min_period_s = std::min(report.min_period_s, period);
		report.max_period_s = std::max(report.max_period_s, period);

		if (period < lo || period > hi) {
			++report.violations;
			report.violating_frames.push_back(i);
		}
	}

	return report;
}

ChannelColumns resolve_channel(const Telemetry &telemetry, const ChannelConfig &config)
{
	const auto lookup = [&](const std::string &column) {
		if (auto index = telemetry.column_index(column)) {
			return *index;
		}

		throw SchemaError(fmt::format("channel '{}': missing column '{}'", config.name, column));
	};

	return ChannelColumns{lookup(config.input_field), lookup(config.output_field), config.derived_output};
}

ChannelSample derive_channel(const TelemetryFrame &frame, const ChannelColumns &columns)
{
	const double u = frame.values.at(columns.input);
	const double measured = frame.values.at(columns.output);
	return ChannelSample{u, columns.derived_output ? measured - u : measured};
}

ChannelSample derive_channel(const Telemetry &telemetry, const TelemetryFrame &frame, const ChannelConfig &config)
{
	return derive_channel(frame, resolve_channel(telemetry, config));
}

std::string format_number(double value)
{
	if (std::isnan(value)) {
		return "nan";
	}

	return fmt::format("{}", value);
}

namespace {

template <typename Row>
void append_row(std::string &out, char delimiter, const Row &cells)
{
	bool first = true;

	for (const auto &cell : cells) {
		if (!first) {
			out.push_back(delimiter);
		}

		out += cell;
		first = false;
	}

	out.push_back('\n');
}

} // namespace

std::string render_telemetry(const Telemetry &telemetry, const OutputFormat &format)
{
	const char d = static_cast<char>(format.delimiter);
	std::string out;

	std::vector<std::string> header{telemetry.time_column};
	header.insert(header.end(), telemetry.columns.begin(), telemetry.columns.end());
	append_row(out, d, header);

	std::vector<std::string> cells;

	for (const TelemetryFrame &frame : telemetry.frames) {
		cells.clear();
		cells.push_back(format_number(frame.t));

		for (double v : frame.values) {
			cells.push_back(format_number(v));
		}

		append_row(out, d, cells);
	}

	return out;
}

std::string render_trace(std::span<const TraceRow> rows, const OutputFormat &format)
{
	const char d = static_cast<char>(format.delimiter);
	std::string out;
	append_row(out, d, std::vector<std::string>{"t", "u", "y", "y_hat", "err", "sigma", "z", "phase"});

	for (const TraceRow &r : rows) {
		append_row(out, d,
			   std::vector<std::string>{format_number(r.t), format_number(r.u), format_number(r.y),
						    format_number(r.y_hat), format_number(r.err), format_number(r.sigma),
						    format_number(r.z),
						    std::to_string(static_cast<int>(r.phase))});
	}

	return out;
}

std::string render_events(std::span<const DetectionEvent> events, const OutputFormat &format)
{
	const char d = static_cast<char>(format.delimiter);
	std::string out;
	append_row(out, d, std::vector<std::string>{"t", "channel", "z", "err"});

	for (const DetectionEvent &e : events) {
		append_row(out, d,
			   std::vector<std::string>{format_number(e.t), e.channel, format_number(e.z), format_number(e.error)});
	}

	return out;
}

void write_file_atomic(const fs::path &path, std::string_view contents)
{
	fs::path tmp = path;
	tmp += ".tmp";

	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);

		if (!out) {
			throw IoError("cannot write " + tmp.string());
		}

		out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
		out.flush();

		if (!out) {
			throw IoError("write failed for " + tmp.string());
		}
	}

	std::error_code ec;
	fs::rename(tmp, path, ec);

	if (ec) {
		fs::remove(tmp, ec);
		throw IoError("cannot move output into place at " + path.string());
	}
}

void write_telemetry(const Telemetry &telemetry, const fs::path &path, const OutputFormat &format)
{
	write_file_atomic(path, render_telemetry(telemetry, format));
}

void write_trace(std::span<const TraceRow> rows, const fs::path &path, const OutputFormat &format)
{
	write_file_atomic(path, render_trace(rows, format));
}

void write_events(std::span<const DetectionEvent> events, const fs::path &path, const OutputFormat &format)
{
	write_file_atomic(path, render_events(events, format));
}

std::vector<DetectionEvent> load_events(const fs::path &path)
{
	const std::string text = read_file(path);
	const std::string source = path.string();

	std::vector<DetectionEvent> events;
	char delimiter = ',';
	bool have_header = false;
	std::size_t col_t = 0, col_channel = 0, col_z = 0, col_err = 0;

	for_each_line(text, [&](std::size_t line_no, std::string_view line) {
		if (!have_header) {
			delimiter = detect_delimiter(line);
			std::vector<std::string> names;

			for (std::string_view cell : split_line(line, delimiter)) {
				names.emplace_back(trim(cell));
			}

			const auto find = [&](std::string_view name) {
				const auto it = std::find(names.begin(), names.end(), name);

				if (it == names.end()) {
					throw SchemaError(fmt::format("{}: missing column '{}'", where(source, line_no), name));
				}

				return static_cast<std::size_t>(it - names.begin());
			};

			col_t = find("t");
			col_channel = find("channel");
			col_z = find("z");
			col_err = find("err");
			have_header = true;
			return true;
		}

		const auto cells = split_line(line, delimiter);
		const std::size_t need = std::max({col_t, col_channel, col_z, col_err}) + 1;

		if (cells.size() < need) {
			throw RowError(fmt::format("{}: expected {} cells, found {}", where(source, line_no), need, cells.size()));
		}

		const auto number = [&](std::size_t col) {
			if (auto v = parse_real(cells[col])) {
				return *v;
			}

			throw RowError(fmt::format("{}: non-numeric cell '{}'", where(source, line_no), trim(cells[col])));
		};

		DetectionEvent event;
		event.t = number(col_t);
		event.channel = std::string(trim(cells[col_channel]));
		event.z = number(col_z);
		event.error = number(col_err);
		events.push_back(std::move(event));
		return true;
	});

	if (!have_header) {
		throw SchemaError(source + ": empty file, no header row");
	}

	return events;
}

} // namespace rlsad
