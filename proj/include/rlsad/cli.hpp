#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rlsad/evaluation.hpp"
#include "rlsad/pipeline.hpp"
#include "rlsad/simulator.hpp"

namespace rlsad::cli {

struct DetectOptions {
	std::optional<std::filesystem::path> config;
	std::filesystem::path input; ///< telemetry file or directory of telemetry files
	std::filesystem::path out;
	std::optional<double> threshold; ///< overrides every channel's z threshold
	OutputFormat format;
};

struct SimulateOptions {
	bool suite{false};
	std::uint64_t seed{7};
	std::filesystem::path out;
	// single-scenario flags
	std::string name{"scenario"};
	std::string fault{"none"};
	std::vector<std::string> targets;
	double onset_s{40.0};
	double duration_s{60.0};
	double value{0.0};
	double time_constant_s{2.0};
	OutputFormat format;
};

struct EvaluateOptions {
	std::filesystem::path events;
	std::filesystem::path truth;
	std::filesystem::path report;
	std::optional<std::filesystem::path> verdicts;
	double deadline_s{std::numeric_limits<double>::infinity()};
};

struct SweepOptions {
	std::optional<std::filesystem::path> config;
	std::filesystem::path input;
	std::optional<std::filesystem::path> truth; ///< defaults to the input directory
	std::vector<double> thresholds;
	std::optional<std::filesystem::path> report;
	double deadline_s{std::numeric_limits<double>::infinity()};
};

int detect(const DetectOptions &options, std::ostream &out);
int simulate(const SimulateOptions &options, std::ostream &out);
int evaluate(const EvaluateOptions &options, std::ostream &out);
int sweep(const SweepOptions &options, std::ostream &out);

/// Telemetry files in a directory (sorted), or the file itself.
std::vector<std::filesystem::path> telemetry_inputs(const std::filesystem::path &input);

/// Verdicts for every ground-truth sidecar in truth_dir against the events found in events_dir.
std::vector<SequenceVerdict> score_directory(const std::filesystem::path &events_dir,
					     const std::filesystem::path &truth_dir, double deadline_s);

/// Parses arguments and dispatches; returns the process exit status.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace rlsad::cli
