#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rlsad/arx.hpp"
#include "rlsad/telemetry_io.hpp"

namespace rlsad {

enum class ExcitationKind {
	WhiteNoise,
	SumOfSines,
	StepRich, ///< random piecewise-constant command plus band-limited noise
};

struct Excitation {
	ExcitationKind kind{ExcitationKind::StepRich};
	double offset{0.0};
	double amplitude{0.3};        ///< white-noise sigma, sine amplitude, or half-range of step levels
	double hold_min_s{0.5};       ///< StepRich: shortest hold between steps
	double hold_max_s{2.0};       ///< StepRich: longest hold between steps
	double jitter_sigma{0.1};    ///< StepRich: sigma of the band-limited component
	double jitter_pole{0.3};      ///< StepRich: pole of the first-order noise shaping filter
	std::vector<double> sine_hz{0.13, 0.37, 0.91, 2.3};
};

/**
 * Ground-truth plant for one command/response pair:
 *
 *   y(k) + a1 y(k-1) + ... + a_na y(k-na) = b0 u(k) + ... + b_nb u(k-nb) + n(k)
 */
struct ChannelDynamics {
	std::string input_column;
	std::string output_column;
	std::vector<double> a; ///< a1 ... a_na
	std::vector<double> b; ///< b0 ... b_nb, at least one entry
	double noise_sigma{0.0};
	Excitation excitation;

	ArxOrder order() const;
	/// Parameter vector in estimator layout: [-a1 ... -a_na, b0 ... b_nb].
	Eigen::VectorXd true_theta() const;
	/// Largest root magnitude of z^na + a1 z^(na-1) + ... + a_na (0 when na = 0).
	double spectral_radius() const;
	/// Throws ConfigError for unstable dynamics (any root magnitude >= 0.95) or bad noise.
	void validate() const;
};

enum class FaultKind {
	StuckAtConstant, ///< output frozen at `value`
	GainChange,      ///< b coefficients scaled by `value`
	OutputDrift,     ///< additive ramp of `value` units per second on the output
	PowerCut,        ///< output decays exponentially toward `value` with `time_constant_s`
};

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view text);

/// A single (possibly multi-surface) fault with an abrupt onset.
struct FaultSpec {
	FaultKind kind{FaultKind::StuckAtConstant};
	double onset_s{0.0};
	std::vector<std::string> targets; ///< output columns affected
	double value{0.0};
	double time_constant_s{2.0};
};

struct Scenario {
	std::string name;
	std::string category; ///< failure-type row the scenario reports under
	double rate_hz{25.0};
	double duration_s{60.0};
	std::vector<ChannelDynamics> channels;
	std::optional<FaultSpec> fault;
	std::uint64_t seed{0};

	/// Throws ValidationError/ConfigError when the scenario cannot be simulated.
	void validate() const;
};

struct GroundTruth {
	std::string scenario;
	std::string category;
	std::optional<FaultKind> kind;
	std::optional<double> onset_s;           ///< time of the first faulty sample
	std::optional<std::size_t> onset_sample; ///< index of the first faulty sample
	std::vector<std::string> targets;
	double duration_s{0.0};
	double rate_hz{0.0};

	bool has_fault() const { return onset_s.has_value(); }
};

struct SimulationResult {
	Telemetry telemetry;
	GroundTruth truth;
};

/// Deterministic in (scenario, scenario.seed).
SimulationResult simulate(const Scenario &scenario);

/// Command/response channels used by the built-in scenarios.
std::vector<ChannelDynamics> default_airframe_channels();

/**
 * Seeded suite of synthetic flights, one or more per failure category:
 * Engine, Rudder, Elevator, Aileron, Rudder/Aileron and No Failure.
 */
std::vector<Scenario> scenario_suite(std::uint64_t seed);

/// Category names in report order.
const std::vector<std::string> &failure_categories();

std::string render_ground_truth(const GroundTruth &truth);
GroundTruth parse_ground_truth(std::string_view text, std::string_view source = "<memory>");
void write_ground_truth(const GroundTruth &truth, const std::filesystem::path &path);
GroundTruth load_ground_truth(const std::filesystem::path &path);

} // namespace rlsad
