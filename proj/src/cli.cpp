#include "rlsad/cli.hpp"

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rlsad/errors.hpp"

namespace rlsad::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTruthSuffix = ".truth";
constexpr std::string_view kEventsSuffix = ".events";
constexpr std::string_view kTraceSuffix = ".trace";

std::string extension(const OutputFormat &format)
{
	return format.delimiter == Delimiter::Tab ? ".tsv" : ".csv";
}

bool ends_with(std::string_view s, std::string_view suffix)
{
	return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "name.events.csv" -> "name.events"
std::string without_extension(const fs::path &path)
{
	return path.stem().string();
}

bool is_delimited_text(const fs::path &path)
{
	const std::string ext = path.extension().string();
	return ext == ".csv" || ext == ".tsv";
}

bool is_artifact(const fs::path &path)
{
	const std::string stem = without_extension(path);
	return ends_with(stem, kTruthSuffix) || ends_with(stem, kEventsSuffix) || ends_with(stem, kTraceSuffix);
}

void require_exists(const fs::path &path, std::string_view what)
{
	if (!fs::exists(path)) {
		throw IoError(fmt::format("{} not found: {}", what, path.string()));
	}
}

void prepare_out_dir(const fs::path &dir)
{
	std::error_code ec;
	fs::create_directories(dir, ec);

	if (ec || !fs::is_directory(dir)) {
		throw IoError("cannot create output directory " + dir.string());
	}
}

RunConfig resolve_config(const std::optional<fs::path> &path, std::optional<double> threshold)
{
	ChannelConfig defaults;

	if (threshold) {
		defaults.z_threshold = *threshold;
	}

	RunConfig config = path ? load_run_config(*path, defaults) : default_run_config();

	if (threshold) {
		for (ChannelConfig &channel : config.channels) {
			channel.z_threshold = *threshold;
		}
	}

	config.validate();
	return config;
}

std::optional<fs::path> find_sidecar(const fs::path &dir, const std::string &scenario, std::string_view suffix)
{
	for (const char *ext : {".csv", ".tsv"}) {
		const fs::path candidate = dir / (scenario + std::string(suffix) + ext);

		if (fs::exists(candidate)) {
			return candidate;
		}
	}

	return std::nullopt;
}

std::vector<double> event_times(std::span<const DetectionEvent> events)
{
	std::vector<double> times;

	for (const DetectionEvent &e : events) {
		times.push_back(e.t);
	}

	std::sort(times.begin(), times.end());
	return times;
}

std::vector<fs::path> truth_files(const fs::path &dir)
{
	std::vector<fs::path> files;

	for (const auto &entry : fs::directory_iterator(dir)) {
		if (entry.is_regular_file() && is_delimited_text(entry.path())
		    && ends_with(without_extension(entry.path()), kTruthSuffix)) {
			files.push_back(entry.path());
		}
	}

	std::sort(files.begin(), files.end());
	return files;
}

SequenceTruth to_sequence_truth(const GroundTruth &truth)
{
	return SequenceTruth{truth.scenario, truth.category, truth.duration_s, truth.onset_s};
}

} // namespace

std::vector<fs::path> telemetry_inputs(const fs::path &input)
{
	require_exists(input, "input");

	if (!fs::is_directory(input)) {
		return {input};
	}

	std::vector<fs::path> files;

	for (const auto &entry : fs::directory_iterator(input)) {
		if (entry.is_regular_file() && is_delimited_text(entry.path()) && !is_artifact(entry.path())) {
			files.push_back(entry.path());
		}
	}

	std::sort(files.begin(), files.end());

	if (files.empty()) {
		throw IoError("no telemetry files in " + input.string());
	}

	return files;
}

int detect(const DetectOptions &options, std::ostream &out)
{
	const std::vector<fs::path> inputs = telemetry_inputs(options.input);

	if (options.config) {
		require_exists(*options.config, "config");
	}

	const RunConfig config = resolve_config(options.config, options.threshold);
	prepare_out_dir(options.out);

	const std::string ext = extension(options.format);
	const TelemetrySchema schema{config.time_column, {}};

	for (const fs::path &input : inputs) {
		const Telemetry telemetry = load_telemetry(input, schema);
		const DetectionRun run = run_detection(telemetry, config);
		const std::string stem = input.stem().string();

		for (const ChannelRun &channel : run.channels) {
			write_trace(channel.trace, options.out / (stem + "." + channel.name + std::string(kTraceSuffix) + ext),
				    options.format);
		}

		write_events(run.events, options.out / (stem + std::string(kEventsSuffix) + ext), options.format);

		const auto armed = std::count_if(run.channels.begin(), run.channels.end(),
						 [](const ChannelRun &c) { return c.armed_at.has_value(); });

		fmt::print(out, "{}: samples={} channels_armed={}/{} events={} first_detection={}", stem, run.samples, armed,
			   run.channels.size(), run.events.size(),
			   run.system_anomaly ? fmt::format("{}@{}", run.system_anomaly->channel, format_number(run.system_anomaly->t))
			   : std::string("none"));

		if (run.rate && !run.rate->ok()) {
			fmt::print(out, " rate_warning={}/{}", run.rate->violations, run.rate->periods);
		}

		std::size_t quality = 0;

		for (const ChannelRun &c : run.channels) {
			quality += c.quality.size();
		}

		if (quality > 0) {
			fmt::print(out, " skipped_samples={}", quality);
		}

		fmt::print(out, "\n");
	}

	return 0;
}

int simulate(const SimulateOptions &options, std::ostream &out)
{
	std::vector<Scenario> scenarios;

	if (options.suite) {
		scenarios = scenario_suite(options.seed);

	} else {
		Scenario s;
		s.name = options.name;
		s.category = "Custom";
		s.duration_s = options.duration_s;
		s.channels = default_airframe_channels();
		s.seed = options.seed;

		if (options.fault != "none") {
			const auto kind = parse_fault_kind(options.fault);

			if (!kind) {
				throw ValidationError("unknown fault kind '" + options.fault + "'");
			}

			FaultSpec fault;
			fault.kind = *kind;
			fault.onset_s = options.onset_s;
			fault.value = options.value;
			fault.time_constant_s = options.time_constant_s;
			fault.targets = options.targets;

			if (fault.targets.empty()) {
				fault.targets = {*kind == FaultKind::PowerCut ? "airspeed" : "roll"};
			}

			s.fault = fault;

		} else {
			s.category = "No Failure";
		}

		scenarios.push_back(std::move(s));
	}

	for (const Scenario &s : scenarios) {
		s.validate();
	}

	prepare_out_dir(options.out);
	const std::string ext = extension(options.format);

	for (const Scenario &s : scenarios) {
		const SimulationResult result = rlsad::simulate(s);
		write_telemetry(result.telemetry, options.out / (s.name + ext), options.format);
		write_ground_truth(result.truth, options.out / (s.name + std::string(kTruthSuffix) + ".csv"));

		fmt::print(out, "{}: category={} samples={} fault={}\n", s.name, s.category, result.telemetry.frames.size(),
			   result.truth.kind ? fmt::format("{}@{}", to_string(*result.truth.kind), format_number(*result.truth.onset_s))
			   : std::string("none"));
	}

	return 0;
}

std::vector<SequenceVerdict> score_directory(const fs::path &events_dir, const fs::path &truth_dir, double deadline_s)
{
	std::vector<SequenceVerdict> verdicts;

	for (const fs::path &truth_path : truth_files(truth_dir)) {
		const GroundTruth truth = load_ground_truth(truth_path);
		std::vector<double> detections;

		if (auto events_path = find_sidecar(events_dir, truth.scenario, kEventsSuffix)) {
			detections = event_times(load_events(*events_path));
		}

		verdicts.push_back(classify_sequence(to_sequence_truth(truth), detections, deadline_s));
	}

	return verdicts;
}

int evaluate(const EvaluateOptions &options, std::ostream &out)
{
	require_exists(options.events, "events directory");
	require_exists(options.truth, "truth directory");

	const std::vector<SequenceVerdict> verdicts = score_directory(options.events, options.truth, options.deadline_s);

	if (verdicts.empty()) {
		throw ValidationError("no ground-truth files in " + options.truth.string());
	}

	const MetricsSummary summary = summarize(verdicts, failure_categories());

	if (options.report.has_parent_path()) {
		prepare_out_dir(options.report.parent_path());
	}

	write_file_atomic(options.report, render_report(summary));

	if (options.verdicts) {
		write_file_atomic(*options.verdicts, render_verdicts(verdicts));
	}

	fmt::print(out, "sequences={} tp={} fp={} fn={} tn={} precision={} recall={} accuracy={}\n", summary.sequences,
		   summary.tp, summary.fp, summary.fn, summary.tn, format_percent(summary.precision),
		   format_percent(summary.recall), format_percent(summary.accuracy));
	return 0;
}

int sweep(const SweepOptions &options, std::ostream &out)
{
	if (options.thresholds.empty()) {
		throw ValidationError("sweep needs at least one threshold");
	}

	const std::vector<fs::path> inputs = telemetry_inputs(options.input);
	const fs::path truth_dir = options.truth.value_or(fs::is_directory(options.input) ? options.input
							   : options.input.parent_path());
	require_exists(truth_dir, "truth directory");

	if (options.config) {
		require_exists(*options.config, "config");
	}

	// load everything once; each threshold reruns detection in memory
	const RunConfig base = resolve_config(options.config, std::nullopt);
	std::vector<std::pair<Telemetry, GroundTruth>> sequences;

	for (const fs::path &input : inputs) {
		const std::string stem = input.stem().string();
		const auto truth_path = find_sidecar(truth_dir, stem, kTruthSuffix);

		if (!truth_path) {
			throw IoError(fmt::format("no ground truth for '{}' in {}", stem, truth_dir.string()));
		}

		sequences.emplace_back(load_telemetry(input, TelemetrySchema{base.time_column, {}}), load_ground_truth(*truth_path));
	}

	std::string report = "threshold,sequences,events,tp,fp,fn,tn,precision_pct,recall_pct,accuracy_pct\n";

	for (double threshold : options.thresholds) {
		const RunConfig config = resolve_config(options.config, threshold);
		std::vector<SequenceVerdict> verdicts;
		std::size_t events = 0;

		for (const auto &[telemetry, truth] : sequences) {
			const DetectionRun run = run_detection(telemetry, config);
			events += run.events.size();
			verdicts.push_back(classify_sequence(to_sequence_truth(truth), event_times(run.events), options.deadline_s));
		}

		const MetricsSummary s = summarize(verdicts, failure_categories());
		report += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", format_number(threshold), s.sequences, events, s.tp, s.fp,
				      s.fn, s.tn, format_percent(s.precision), format_percent(s.recall),
				      format_percent(s.accuracy));
	}

	if (options.report) {
		if (options.report->has_parent_path()) {
			prepare_out_dir(options.report->parent_path());
		}

		write_file_atomic(*options.report, report);
	}

	out << report;
	return 0;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Online RLS/ARX anomaly detection for input-output signal pairs"};
	app.require_subcommand(1);

	std::string format_name = "csv";
	const auto add_format = [&format_name](CLI::App *cmd) {
		cmd->add_option("--format", format_name, "Delimiter for written tables")
		->check(CLI::IsMember({"csv", "tsv"}))
		->envname("RLSAD_FORMAT");
	};

	DetectOptions detect_opts;
	std::string detect_config;
	double detect_threshold = 0.0;
	CLI::App *detect_cmd = app.add_subcommand("detect", "Run detection over telemetry");
	detect_cmd->add_option("--config", detect_config, "Run configuration (INI); built-in defaults if omitted")
	->envname("RLSAD_CONFIG");
	detect_cmd->add_option("--input", detect_opts.input, "Telemetry file or directory")->required();
	detect_cmd->add_option("--out", detect_opts.out, "Output directory")->required();
	auto *detect_threshold_opt = detect_cmd->add_option("--threshold", detect_threshold, "Override z threshold")
				     ->envname("RLSAD_Z_THRESHOLD");
	add_format(detect_cmd);

	SimulateOptions sim_opts;
	CLI::App *sim_cmd = app.add_subcommand("simulate", "Generate synthetic telemetry with ground truth");
	sim_cmd->add_flag("--suite", sim_opts.suite, "Generate the built-in scenario suite");
	sim_cmd->add_option("--seed", sim_opts.seed, "Random seed")->envname("RLSAD_SEED");
	sim_cmd->add_option("--out", sim_opts.out, "Output directory")->required();
	sim_cmd->add_option("--name", sim_opts.name, "Scenario name");
	sim_cmd->add_option("--fault", sim_opts.fault, "none, stuck, gain, drift or power_cut")
	->check(CLI::IsMember({"none", "stuck", "gain", "drift", "power_cut"}));
	sim_cmd->add_option("--target", sim_opts.targets, "Faulted output column (repeatable)");
	sim_cmd->add_option("--onset", sim_opts.onset_s, "Fault onset [s]");
	sim_cmd->add_option("--duration", sim_opts.duration_s, "Scenario length [s]");
	sim_cmd->add_option("--value", sim_opts.value, "Stuck value, gain factor, drift slope or cut floor");
	sim_cmd->add_option("--time-constant", sim_opts.time_constant_s, "Power-cut decay time constant [s]");
	add_format(sim_cmd);

	EvaluateOptions eval_opts;
	std::string eval_verdicts;
	CLI::App *eval_cmd = app.add_subcommand("evaluate", "Score events against ground truth");
	eval_cmd->add_option("--events", eval_opts.events, "Directory with *.events files")->required();
	eval_cmd->add_option("--truth", eval_opts.truth, "Directory with *.truth files")->required();
	eval_cmd->add_option("--report", eval_opts.report, "Metrics report path")->required();
	eval_cmd->add_option("--verdicts", eval_verdicts, "Optional per-sequence verdict table");
	eval_cmd->add_option("--deadline", eval_opts.deadline_s, "Latest accepted detection after onset [s]");

	SweepOptions sweep_opts;
	std::string sweep_config, sweep_truth, sweep_report;
	CLI::App *sweep_cmd = app.add_subcommand("sweep", "Detection metrics for a list of z thresholds");
	sweep_cmd->add_option("--config", sweep_config, "Run configuration (INI)")->envname("RLSAD_CONFIG");
	sweep_cmd->add_option("--input", sweep_opts.input, "Telemetry file or directory")->required();
	sweep_cmd->add_option("--truth", sweep_truth, "Ground-truth directory (defaults to the input directory)");
	sweep_cmd->add_option("--thresholds", sweep_opts.thresholds, "z thresholds")->required()->delimiter(',');
	sweep_cmd->add_option("--report", sweep_report, "Write the table here as well");
	sweep_cmd->add_option("--deadline", sweep_opts.deadline_s, "Latest accepted detection after onset [s]");

	try {
		app.parse(argc, argv);

	} catch (const CLI::ParseError &e) {
		return app.exit(e, out, err);
	}

	const OutputFormat format{format_name == "tsv" ? Delimiter::Tab : Delimiter::Comma};

	try {
		if (detect_cmd->parsed()) {
			if (!detect_config.empty()) {
				detect_opts.config = detect_config;
			}

			if (detect_threshold_opt->count() > 0) {
				detect_opts.threshold = detect_threshold;
			}

			detect_opts.format = format;
			return detect(detect_opts, out);
		}

		if (sim_cmd->parsed()) {
			sim_opts.format = format;
			return simulate(sim_opts, out);
		}

		if (eval_cmd->parsed()) {
			if (!eval_verdicts.empty()) {
				eval_opts.verdicts = eval_verdicts;
			}

			return evaluate(eval_opts, out);
		}

		if (sweep_cmd->parsed()) {
			if (!sweep_config.empty()) {
				sweep_opts.config = sweep_config;
			}

			if (!sweep_truth.empty()) {
				sweep_opts.truth = sweep_truth;
			}

			if (!sweep_report.empty()) {
				sweep_opts.report = sweep_report;
			}

			return sweep(sweep_opts, out);
		}

	} catch (const Error &e) {
		fmt::print(err, "error [{}]: {}\n", to_string(e.category()), e.what());
		return static_cast<int>(e.category());

	} catch (const std::exception &e) {
		fmt::print(err, "error: {}\n", e.what());
		return 1;
	}

	return 1;
}

} // namespace rlsad::cli
