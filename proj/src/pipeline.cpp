#include "rlsad/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "rlsad/errors.hpp"

namespace rlsad {

namespace pt = boost::property_tree;

void RunConfig::validate() const
{
	if (!(nominal_rate_hz > 0.0)) {
		throw ConfigError("nominal_rate_hz must be positive");
	}

	if (!(jitter_tolerance >= 0.0)) {
		throw ConfigError("jitter_tolerance must be non-negative");
	}

	if (channels.empty()) {
		throw ConfigError("no channels configured");
	}

	std::set<std::string> names;

	for (const ChannelConfig &channel : channels) {
		channel.validate();

		if (!names.insert(channel.name).second) {
			throw ConfigError("duplicate channel '" + channel.name + "'");
		}
	}
}

RunConfig default_run_config()
{
	const auto channel = [](std::string name, std::string input, std::string output, bool derived) {
		ChannelConfig c;
		c.name = std::move(name);
		c.input_field = std::move(input);
		c.output_field = std::move(output);
		c.derived_output = derived;
		return c;
	};

	RunConfig config;
	config.channels.push_back(channel("roll_error", "roll_cmd", "roll", true));
	config.channels.push_back(channel("pitch_error", "pitch_cmd", "pitch", true));
	config.channels.push_back(channel("rudder", "rudder_cmd", "rudder", false));
	config.channels.push_back(channel("airspeed", "throttle", "airspeed", false));
	return config;
}

namespace {

constexpr std::string_view kChannelPrefix = "channel.";

template <typename T>
T read_value(const pt::ptree &node, const std::string &section, const std::string &key)
{
	try {
		return node.get_value<T>();

	} catch (const pt::ptree_bad_data &) {
		throw ConfigError(fmt::format("[{}] {}: cannot parse '{}'", section, key, node.data()));
	}
}

bool read_bool(const pt::ptree &node, const std::string &section, const std::string &key)
{
	const std::string v = node.data();

	if (v == "true" || v == "1" || v == "yes" || v == "on") {
		return true;
	}

	if (v == "false" || v == "0" || v == "no" || v == "off") {
		return false;
	}

	throw ConfigError(fmt::format("[{}] {}: expected a boolean, got '{}'", section, key, v));
}

std::size_t read_count(const pt::ptree &node, const std::string &section, const std::string &key)
{
	const auto value = read_value<long long>(node, section, key);

	if (value < 0) {
		throw ConfigError(fmt::format("[{}] {}: must not be negative", section, key));
	}

	return static_cast<std::size_t>(value);
}

ChannelConfig parse_channel(const std::string &section, const pt::ptree &tree, const ChannelConfig &defaults)
{
	ChannelConfig c = defaults;
	c.name = section.substr(kChannelPrefix.size());

	for (const auto &[key, node] : tree) {
		if (key == "input") {
			c.input_field = node.data();
		} else if (key == "output") {
			c.output_field = node.data();
		} else if (key == "derived_output") {
			c.derived_output = read_bool(node, section, key);
		} else if (key == "na") {
			c.order.na = read_count(node, section, key);
		} else if (key == "nb") {
			c.order.nb = read_count(node, section, key);
		} else if (key == "cov_scale") {
			c.cov_scale = read_value<double>(node, section, key);
		} else if (key == "forgetting") {
			c.forgetting = read_value<double>(node, section, key);
		} else if (key == "epsilon") {
			c.epsilon = read_value<double>(node, section, key);
		} else if (key == "stability_hold") {
			c.stability_hold = read_count(node, section, key);
		} else if (key == "warmup_min_samples") {
			c.warmup_min_samples = read_count(node, section, key);
		} else if (key == "z_threshold") {
			c.z_threshold = read_value<double>(node, section, key);
		} else if (key == "variance_window") {
			c.variance_window = read_count(node, section, key);
		} else if (key == "variance_rel_tol") {
			c.variance_rel_tol = read_value<double>(node, section, key);
		} else if (key == "stats_start") {
			if (node.data() == "model_stable") {
				c.stats_start = StatsStart::ModelStable;
			} else if (node.data() == "start") {
				c.stats_start = StatsStart::FromStart;
			} else {
				throw ConfigError(fmt::format("[{}] stats_start: expected model_stable or start", section));
			}
		} else {
			throw ConfigError(fmt::format("[{}] unknown key '{}'", section, key));
		}
	}

	return c;
}

} // namespace

RunConfig parse_run_config(std::string_view text, const ChannelConfig &defaults)
{
	pt::ptree tree;
	std::istringstream in{std::string(text)};

	try {
		pt::ini_parser::read_ini(in, tree);

	} catch (const pt::ini_parser_error &e) {
		throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
	}

	RunConfig config;

	for (const auto &[section, node] : tree) {
		if (section == "run") {
			for (const auto &[key, value] : node) {
				if (key == "nominal_rate_hz") {
					config.nominal_rate_hz = read_value<double>(value, section, key);
				} else if (key == "jitter_tolerance") {
					config.jitter_tolerance = read_value<double>(value, section, key);
				} else if (key == "time_column") {
					config.time_column = value.data();
				} else {
					throw ConfigError(fmt::format("[run] unknown key '{}'", key));
				}
			}

		} else if (section.starts_with(kChannelPrefix) && section.size() > kChannelPrefix.size()) {
			config.channels.push_back(parse_channel(section, node, defaults));

		} else {
			throw ConfigError(fmt::format("unknown section or top-level key '{}'", section));
		}
	}

	config.validate();
	return config;
}

RunConfig load_run_config(const std::filesystem::path &path, const ChannelConfig &defaults)
{
	std::ifstream in(path);

	if (!in) {
		throw IoError("cannot open config " + path.string());
	}

	std::ostringstream buffer;
	buffer << in.rdbuf();
	return parse_run_config(buffer.str(), defaults);
}

std::string render_run_config(const RunConfig &config)
{
	std::string out = "[run]\n";
	out += fmt::format("nominal_rate_hz = {}\n", config.nominal_rate_hz);
	out += fmt::format("jitter_tolerance = {}\n", config.jitter_tolerance);
	out += fmt::format("time_column = {}\n", config.time_column);

	for (const ChannelConfig &c : config.channels) {
		out += fmt::format("\n[channel.{}]\n", c.name);
		out += fmt::format("input = {}\n", c.input_field);
		out += fmt::format("output = {}\n", c.output_field);
		out += fmt::format("derived_output = {}\n", c.derived_output ? "true" : "false");
		out += fmt::format("na = {}\nnb = {}\n", c.order.na, c.order.nb);
		out += fmt::format("cov_scale = {}\n", c.cov_scale);
		out += fmt::format("forgetting = {}\n", c.forgetting);
		out += fmt::format("epsilon = {}\n", c.epsilon);
		out += fmt::format("stability_hold = {}\n", c.stability_hold);
		out += fmt::format("warmup_min_samples = {}\n", c.warmup_min_samples);
		out += fmt::format("z_threshold = {}\n", c.z_threshold);
		out += fmt::format("variance_window = {}\n", c.variance_window);
		out += fmt::format("variance_rel_tol = {}\n", c.variance_rel_tol);
		out += fmt::format("stats_start = {}\n", c.stats_start == StatsStart::FromStart ? "start" : "model_stable");
	}

	return out;
}

DetectionRun run_detection(const Telemetry &telemetry, const RunConfig &config)
{
	config.validate();

	DetectionRun run;
	run.samples = telemetry.frames.size();

	if (telemetry.frames.size() >= 2) {
		run.rate = check_rate(telemetry, config.nominal_rate_hz, config.jitter_tolerance);
	}

	for (const ChannelConfig &channel_config : config.channels) {
		const ChannelColumns columns = resolve_channel(telemetry, channel_config);
		ChannelDetector detector(channel_config);

		ChannelRun channel;
		channel.name = channel_config.name;
		channel.trace.reserve(telemetry.frames.size());

		for (const TelemetryFrame &frame : telemetry.frames) {
			const ChannelSample sample = derive_channel(frame, columns);
			StepOutcome outcome = detector.step(frame.t, sample.u, sample.y);

			if (outcome.trace) {
				if (!channel.armed_at && detector.phase() >= Phase::Armed) {
					channel.armed_at = frame.t;
				}

				channel.trace.push_back(*outcome.trace);
			}

			if (outcome.detection) {
				channel.events.push_back(*outcome.detection);
			}

			if (outcome.quality) {
				channel.quality.push_back(std::move(*outcome.quality));
			}
		}

		channel.final_phase = detector.phase();
		run.events.insert(run.events.end(), channel.events.begin(), channel.events.end());
		run.channels.push_back(std::move(channel));
	}

	std::sort(run.events.begin(), run.events.end(), [](const DetectionEvent &a, const DetectionEvent &b) {
		return a.t != b.t ? a.t < b.t : a.channel < b.channel;
	});

	run.system_anomaly = aggregate(run.events);
	return run;
}

} // namespace rlsad
