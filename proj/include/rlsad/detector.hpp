#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rlsad/arx.hpp"
#include "rlsad/online_stats.hpp"
#include "rlsad/rls.hpp"

namespace rlsad {

/// When the error statistics start accumulating.
enum class StatsStart {
	ModelStable, ///< once the RLS model passes the stability test
	FromStart,   ///< from the first RLS update
};

struct ChannelConfig {
	std::string name;
	std::string input_field;
	std::string output_field;
	/// Use (output - input) as the channel output, e.g. roll error = roll - roll_cmd.
	bool derived_output{false};

	ArxOrder order{25, 25};
	double cov_scale{1e6};
	double forgetting{1.0};
	double epsilon{2e-2};
	std::size_t stability_hold{50};
	std::size_t warmup_min_samples{200};
	double z_threshold{4.5};
	std::size_t variance_window{50};
	double variance_rel_tol{0.05};
	StatsStart stats_start{StatsStart::ModelStable};

	/// Throws ConfigError naming the offending field.
	void validate() const;
};

enum class Phase : std::uint8_t {
	Warmup = 0,
	ModelStable = 1,
	Armed = 2,
	Anomaly = 3,
};

std::string_view to_string(Phase phase);

struct DetectionEvent {
	std::string channel;
	double t{0.0};
	double z{0.0};
	double error{0.0};
	Phase phase{Phase::Armed}; ///< phase in which the event was raised
};

struct DataQualityEvent {
	std::string channel;
	double t{0.0};
	std::string reason;
};

/// One processed sample, in the shape written to trace files.
struct TraceRow {
	double t{0.0};
	double u{0.0};
	double y{0.0};
	double y_hat{0.0};
	double err{0.0};
	double sigma{0.0}; ///< NaN while the error variance is undefined
	double z{0.0};     ///< NaN while the error variance is undefined
	Phase phase{Phase::Warmup};
};

struct StepOutcome {
	std::optional<TraceRow> trace; ///< empty while the lag buffers are priming or the sample was skipped
	std::optional<DetectionEvent> detection;
	std::optional<DataQualityEvent> quality;
};

/**
 * Per-channel detection state machine.
 *
 * Warmup: the RLS model is updated; once it is stable and has seen at least
 * warmup_min_samples updates the channel moves to ModelStable.
 * ModelStable: prediction errors feed the running statistics until their
 * variance settles, then Armed.
 * Armed: the z-score of each new error is checked against the threshold
 * before the sample is absorbed; a hit latches Anomaly.
 * Anomaly: latched, nothing is updated until reset().
 */
class ChannelDetector
{
public:
	explicit ChannelDetector(ChannelConfig config);

	const ChannelConfig &config() const { return _config; }
	Phase phase() const { return _phase; }
	const RlsState &rls() const { return _rls; }
	const RunningStats &stats() const { return _stats; }
	std::uint64_t samples_seen() const { return _samples_seen; }

	/// Throws StreamError if t goes backwards.
	StepOutcome step(double t, double u, double y);

	void reset();

private:
	ChannelConfig _config;
	RlsState _rls;
	RunningStats _stats;
	ArxHistory _history;
	Phase _phase{Phase::Warmup};
	std::optional<double> _last_t;
	std::uint64_t _samples_seen{0};
};

struct SystemAnomaly {
	double t{0.0};
	std::string channel;
	double z{0.0};
};

/**
 * Any-channel fusion: the earliest event raises the system anomaly. Events
 * sharing the earliest timestamp are attributed to the lexicographically
 * smallest channel name.
 */
std::optional<SystemAnomaly> aggregate(std::span<const DetectionEvent> events);

} // namespace rlsad
