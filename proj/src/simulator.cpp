#include "rlsad/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "rlsad/errors.hpp"

namespace rlsad {

namespace {

constexpr double kMaxPoleMagnitude = 0.95;
constexpr double kMinPostFaultSeconds = 10.0;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose)
{
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
			  static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(purpose)};
	return std::mt19937_64(seq);
}

// Generates the command signal of one channel, sample by sample.
class ExcitationSource
{
public:
	ExcitationSource(const Excitation &spec, double rate_hz, std::mt19937_64 engine)
		: _spec(spec), _dt(1.0 / rate_hz), _engine(std::move(engine))
	{
		if (_spec.kind == ExcitationKind::SumOfSines) {
			std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

			for (std::size_t i = 0; i < _spec.sine_hz.size(); ++i) {
				_phases.push_back(phase(_engine));
			}
		}
	}

	double next(std::size_t k)
	{
		switch (_spec.kind) {
		case ExcitationKind::WhiteNoise: {
				std::normal_distribution<double> normal(0.0, _spec.amplitude);
				return _spec.offset + normal(_engine);
			}

		case ExcitationKind::SumOfSines: {
				const double t = static_cast<double>(k) * _dt;
				double u = _spec.offset;
				const double scale = _spec.sine_hz.empty() ? 0.0 : _spec.amplitude / static_cast<double>(_spec.sine_hz.size());

				for (std::size_t i = 0; i < _spec.sine_hz.size(); ++i) {
					u += scale * std::sin(2.0 * std::numbers::pi * _spec.sine_hz[i] * t + _phases[i]);
				}

				return u;
			}

		case ExcitationKind::StepRich: {
				if (_hold_left == 0) {
					std::uniform_real_distribution<double> level(-_spec.amplitude, _spec.amplitude);
					std::uniform_real_distribution<double> hold(_spec.hold_min_s, _spec.hold_max_s);
					_level = level(_engine);
					_hold_left = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hold(_engine) / _dt)));
				}

				--_hold_left;
				std::normal_distribution<double> normal(0.0, _spec.jitter_sigma);
				_jitter = _spec.jitter_pole * _jitter + normal(_engine);
				return _spec.offset + _level + _jitter;
			}
		}

		return _spec.offset;
	}

private:
	Excitation _spec;
	double _dt;
	std::mt19937_64 _engine;
	std::vector<double> _phases;
	std::size_t _hold_left{0};
	double _level{0.0};
	double _jitter{0.0};
};

bool targets_column(const std::optional<FaultSpec> &fault, const std::string &column)
{
	return fault && std::find(fault->targets.begin(), fault->targets.end(), column) != fault->targets.end();
}

} // namespace

ArxOrder ChannelDynamics::order() const
{
	return ArxOrder{a.size(), b.empty() ? 0 : b.size() - 1};
}

Eigen::VectorXd ChannelDynamics::true_theta() const
{
	Eigen::VectorXd theta(static_cast<Eigen::Index>(a.size() + b.size()));
	Eigen::Index i = 0;

	for (double ai : a) {
		theta(i++) = -ai;
	}

	for (double bj : b) {
		theta(i++) = bj;
	}

	return theta;
}

double ChannelDynamics::spectral_radius() const
{
	if (a.empty()) {
		return 0.0;
	}

	// companion matrix of z^n + a1 z^(n-1) + ... + a_n
	const auto n = static_cast<Eigen::Index>(a.size());
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);

	for (Eigen::Index j = 0; j < n; ++j) {
		companion(0, j) = -a[static_cast<std::size_t>(j)];
	}

	for (Eigen::Index i = 1; i < n; ++i) {
		companion(i, i - 1) = 1.0;
	}

	const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void ChannelDynamics::validate() const
{
	if (b.empty()) {
		throw ConfigError(fmt::format("channel '{}': at least one input coefficient is required", output_column));
	}

	if (input_column.empty() || output_column.empty()) {
		throw ConfigError("channel dynamics need input and output column names");
	}

	const auto finite = [](double v) { return std::isfinite(v); };

	if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite)) {
		throw ConfigError(fmt::format("channel '{}': non-finite coefficient", output_column));
	}

	if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
		throw ConfigError(fmt::format("channel '{}': noise_sigma must be non-negative", output_column));
	}

	const double radius = spectral_radius();

	if (!(radius < kMaxPoleMagnitude)) {
		throw ConfigError(fmt::format("channel '{}': unstable dynamics, pole magnitude {} >= {}", output_column,
					      radius, kMaxPoleMagnitude));
	}
}

std::string_view to_string(FaultKind kind)
{
	switch (kind) {
	case FaultKind::StuckAtConstant: return "stuck";
	case FaultKind::GainChange: return "gain";
	case FaultKind::OutputDrift: return "drift";
	case FaultKind::PowerCut: return "power_cut";
	}

	return "unknown";
}

std::optional<FaultKind> parse_fault_kind(std::string_view text)
{
	for (FaultKind kind : {FaultKind::StuckAtConstant, FaultKind::GainChange, FaultKind::OutputDrift, FaultKind::PowerCut}) {
		if (text == to_string(kind)) {
			return kind;
		}
	}

	return std::nullopt;
}

void Scenario::validate() const
{
	if (name.empty()) {
		throw ValidationError("scenario name must not be empty");
	}

	if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
		throw ValidationError(fmt::format("scenario '{}': rate must be positive", name));
	}

	if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
		throw ValidationError(fmt::format("scenario '{}': duration must be positive", name));
	}

	if (channels.empty()) {
		throw ValidationError(fmt::format("scenario '{}': no channels", name));
	}

	for (const ChannelDynamics &channel : channels) {
		channel.validate();
	}

	if (!fault) {
		return;
	}

	if (!(fault->onset_s > 0.0)) {
		throw ValidationError(fmt::format("scenario '{}': fault onset must be positive", name));
	}

	if (duration_s < fault->onset_s + kMinPostFaultSeconds) {
		throw ValidationError(fmt::format("scenario '{}': duration {} s must cover onset {} s plus {} s", name,
						  duration_s, fault->onset_s, kMinPostFaultSeconds));
	}

	if (fault->targets.empty()) {
		throw ValidationError(fmt::format("scenario '{}': fault has no target", name));
	}

	for (const std::string &target : fault->targets) {
		const bool known = std::any_of(channels.begin(), channels.end(),
					       [&](const ChannelDynamics &c) { return c.output_column == target; });

		if (!known) {
			throw ValidationError(fmt::format("scenario '{}': fault target '{}' is not a simulated output", name,
							  target));
		}
	}

	if (!std::isfinite(fault->value)) {
		throw ValidationError(fmt::format("scenario '{}': fault parameter must be finite", name));
	}

	if (fault->kind == FaultKind::PowerCut && !(fault->time_constant_s > 0.0)) {
		throw ValidationError(fmt::format("scenario '{}': power-cut time constant must be positive", name));
	}
}

SimulationResult simulate(const Scenario &scenario)
{
	scenario.validate();

	const double dt = 1.0 / scenario.rate_hz;
	const auto samples = static_cast<std::size_t>(std::llround(scenario.duration_s * scenario.rate_hz));

	std::optional<std::size_t> onset_sample;

	if (scenario.fault) {
		onset_sample = static_cast<std::size_t>(std::ceil(scenario.fault->onset_s * scenario.rate_hz - 1e-9));
	}

	SimulationResult result;
	Telemetry &telemetry = result.telemetry;
	telemetry.time_column = "t";

	for (const ChannelDynamics &channel : scenario.channels) {
		telemetry.columns.push_back(channel.input_column);
		telemetry.columns.push_back(channel.output_column);
	}

	telemetry.frames.resize(samples);

	for (std::size_t k = 0; k < samples; ++k) {
		telemetry.frames[k].t = static_cast<double>(k) * dt;
		telemetry.frames[k].values.resize(telemetry.columns.size());
	}

	for (std::size_t c = 0; c < scenario.channels.size(); ++c) {
		const ChannelDynamics &dyn = scenario.channels[c];
		const bool faulty = targets_column(scenario.fault, dyn.output_column);

		ExcitationSource command(dyn.excitation, scenario.rate_hz, make_engine(scenario.seed, c, 1));
		std::mt19937_64 noise_engine = make_engine(scenario.seed, c, 2);
		std::normal_distribution<double> noise(0.0, 1.0);

		std::vector<double> u(samples, 0.0);
		std::vector<double> plant(samples, 0.0);  // nominal-law state, feeds the recursion
		std::vector<double> out(samples, 0.0);    // what the sensor reports

		for (std::size_t k = 0; k < samples; ++k) {
			u[k] = command.next(k);
			const double n = dyn.noise_sigma > 0.0 ? dyn.noise_sigma * noise(noise_engine) : 0.0;
			const bool after_onset = faulty && k >= *onset_sample;
			const double b_scale = after_onset && scenario.fault->kind == FaultKind::GainChange ? scenario.fault->value : 1.0;

			double y = n;

			for (std::size_t i = 0; i < dyn.a.size() && i < k; ++i) {
				y -= dyn.a[i] * plant[k - 1 - i];
			}

			for (std::size_t j = 0; j < dyn.b.size() && j <= k; ++j) {
				y += b_scale * dyn.b[j] * u[k - j];
			}

			plant[k] = y;
			out[k] = y;

			if (after_onset) {
				const FaultSpec &fault = *scenario.fault;
				const double since = static_cast<double>(k - *onset_sample) * dt;

				switch (fault.kind) {
				case FaultKind::StuckAtConstant:
					out[k] = plant[k] = fault.value;
					break;

				case FaultKind::GainChange:
					break;

				case FaultKind::OutputDrift:
					out[k] = plant[k] + fault.value * (since + dt);
					break;

				case FaultKind::PowerCut: {
						const double decay = std::exp(-dt / fault.time_constant_s);
						const double previous = k > 0 ? out[k - 1] : 0.0;
						out[k] = plant[k] = fault.value + (previous - fault.value) * decay + n;
						break;
					}
				}
			}
		}

		for (std::size_t k = 0; k < samples; ++k) {
			telemetry.frames[k].values[2 * c] = u[k];
			telemetry.frames[k].values[2 * c + 1] = out[k];
		}
	}

	GroundTruth &truth = result.truth;
	truth.scenario = scenario.name;
	truth.category = scenario.category;
	truth.duration_s = static_cast<double>(samples) * dt;
	truth.rate_hz = scenario.rate_hz;

	if (scenario.fault) {
		truth.kind = scenario.fault->kind;
		truth.onset_sample = onset_sample;
		truth.onset_s = static_cast<double>(*onset_sample) * dt;
		truth.targets = scenario.fault->targets;
	}

	return result;
}

std::vector<ChannelDynamics> default_airframe_channels()
{
	std::vector<ChannelDynamics> channels;

	// roll: lightly damped second order, unit DC gain
	ChannelDynamics roll;
	roll.input_column = "roll_cmd";
	roll.output_column = "roll";
	roll.a = {-1.2, 0.4};
	roll.b = {0.1, 0.1};
	roll.noise_sigma = 0.003;
	roll.excitation.amplitude = 0.5;
	channels.push_back(roll);

	ChannelDynamics pitch;
	pitch.input_column = "pitch_cmd";
	pitch.output_column = "pitch";
	pitch.a = {-0.7};
	pitch.b = {0.3};
	pitch.noise_sigma = 0.003;
	pitch.excitation.amplitude = 0.2;
	pitch.excitation.offset = 0.05;
	channels.push_back(pitch);

	ChannelDynamics yaw;
	yaw.input_column = "rudder_cmd";
	yaw.output_column = "rudder";
	yaw.a = {-0.8};
	yaw.b = {0.2};
	yaw.noise_sigma = 0.003;
	yaw.excitation.amplitude = 0.3;
	channels.push_back(yaw);

	ChannelDynamics speed;
	speed.input_column = "throttle";
	speed.output_column = "airspeed";
	speed.a = {-0.9};
	speed.b = {0.1};
	speed.noise_sigma = 0.003;
	speed.excitation.offset = 1.0;
	speed.excitation.amplitude = 0.2;
	channels.push_back(speed);

	return channels;
}

const std::vector<std::string> &failure_categories()
{
	static const std::vector<std::string> categories{"Engine", "Rudder", "Elevator", "Aileron", "Rudder/Aileron",
							 "No Failure"};
	return categories;
}

std::vector<Scenario> scenario_suite(std::uint64_t seed)
{
	std::mt19937_64 engine = make_engine(seed, 0xffff, 0);
	std::uniform_real_distribution<double> onset_draw(40.0, 60.0);
	std::uniform_real_distribution<double> tail_draw(20.0, 30.0);
	std::uniform_real_distribution<double> clean_duration(50.0, 65.0);

	std::vector<Scenario> suite;
	std::uint64_t index = 0;

	const auto add = [&](std::string name, std::string category, std::optional<FaultSpec> fault) {
		Scenario s;
		s.name = std::move(name);
		s.category = std::move(category);
		s.channels = default_airframe_channels();
		s.seed = seed * 1000003ULL + ++index;

		if (fault) {
			fault->onset_s = std::round(onset_draw(engine) * 100.0) / 100.0;
			s.duration_s = std::round(fault->onset_s + tail_draw(engine));
			s.fault = std::move(fault);

		} else {
			s.duration_s = std::round(clean_duration(engine));
		}

		suite.push_back(std::move(s));
	};

	const auto fault = [](FaultKind kind, std::vector<std::string> targets, double value) {
		FaultSpec f;
		f.kind = kind;
		f.targets = std::move(targets);
		f.value = value;
		return std::optional<FaultSpec>(f);
	};

	add("engine_power_cut_1", "Engine", fault(FaultKind::PowerCut, {"airspeed"}, 0.0));
	add("engine_power_cut_2", "Engine", fault(FaultKind::PowerCut, {"airspeed"}, 0.3));
	add("engine_power_cut_3", "Engine", fault(FaultKind::PowerCut, {"airspeed"}, 0.5));
	add("rudder_stuck_left", "Rudder", fault(FaultKind::StuckAtConstant, {"rudder"}, 0.3));
	add("rudder_stuck_right", "Rudder", fault(FaultKind::StuckAtConstant, {"rudder"}, -0.3));
	add("elevator_stuck_zero", "Elevator", fault(FaultKind::StuckAtConstant, {"pitch"}, 0.0));
	add("aileron_left_stuck", "Aileron", fault(FaultKind::GainChange, {"roll"}, 0.5));
	add("aileron_right_stuck", "Aileron", fault(FaultKind::GainChange, {"roll"}, 0.5));
	add("aileron_both_stuck", "Aileron", fault(FaultKind::StuckAtConstant, {"roll"}, 0.0));
	add("rudder_aileron_stuck", "Rudder/Aileron", fault(FaultKind::StuckAtConstant, {"rudder", "roll"}, 0.0));

	for (int i = 1; i <= 5; ++i) {
		add(fmt::format("no_failure_{}", i), "No Failure", std::nullopt);
	}

	return suite;
}

std::string render_ground_truth(const GroundTruth &truth)
{
	std::string targets;

	for (std::size_t i = 0; i < truth.targets.size(); ++i) {
		targets += (i ? ";" : "") + truth.targets[i];
	}

	std::string out = "scenario,category,kind,onset_s,onset_sample,targets,duration_s,rate_hz\n";
	out += fmt::format("{},{},{},{},{},{},{},{}\n", truth.scenario, truth.category,
			   truth.kind ? to_string(*truth.kind) : "none",
			   truth.onset_s ? format_number(*truth.onset_s) : "",
			   truth.onset_sample ? std::to_string(*truth.onset_sample) : "", targets,
			   format_number(truth.duration_s), format_number(truth.rate_hz));
	return out;
}

GroundTruth parse_ground_truth(std::string_view text, std::string_view source)
{
	std::vector<std::string_view> lines;
	std::size_t pos = 0;

	while (pos < text.size()) {
		auto end = text.find('\n', pos);

		if (end == std::string_view::npos) {
			end = text.size();
		}

		std::string_view line = text.substr(pos, end - pos);

		if (!line.empty() && line.back() == '\r') {
			line.remove_suffix(1);
		}

		if (!line.empty()) {
			lines.push_back(line);
		}

		pos = end + 1;
	}

	if (lines.size() != 2) {
		throw SchemaError(fmt::format("{}: ground truth needs a header and exactly one row", source));
	}

	const auto header = split_line(lines[0], ',');
	const auto row = split_line(lines[1], ',');

	if (header.size() != row.size()) {
		throw RowError(fmt::format("{}:2: expected {} cells, found {}", source, header.size(), row.size()));
	}

	const auto cell = [&](std::string_view name) -> std::string_view {
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (header[i] == name) {
				return row[i];
			}
		}

		throw SchemaError(fmt::format("{}: missing column '{}'", source, name));
	};

	const auto number = [&](std::string_view name) {
		if (auto v = parse_real(cell(name))) {
			return *v;
		}

		throw RowError(fmt::format("{}:2: column '{}' is not a number", source, name));
	};

	GroundTruth truth;
	truth.scenario = std::string(cell("scenario"));
	truth.category = std::string(cell("category"));
	truth.duration_s = number("duration_s");
	truth.rate_hz = number("rate_hz");

	const std::string_view kind = cell("kind");

	if (kind != "none") {
		truth.kind = parse_fault_kind(kind);

		if (!truth.kind) {
			throw RowError(fmt::format("{}:2: unknown fault kind '{}'", source, kind));
		}

		truth.onset_s = number("onset_s");
		truth.onset_sample = static_cast<std::size_t>(number("onset_sample"));

		for (std::string_view target : split_line(cell("targets"), ';')) {
			if (!target.empty()) {
				truth.targets.emplace_back(target);
			}
		}
	}

	return truth;
}

void write_ground_truth(const GroundTruth &truth, const std::filesystem::path &path)
{
	write_file_atomic(path, render_ground_truth(truth));
}

GroundTruth load_ground_truth(const std::filesystem::path &path)
{
	std::ifstream in(path, std::ios::binary);

	if (!in) {
		throw IoError("cannot open " + path.string());
	}

	std::ostringstream buffer;
	buffer << in.rdbuf();
	return parse_ground_truth(buffer.str(), path.string());
}

} // namespace rlsad
