#include "rlsad/detector.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rlsad/errors.hpp"

namespace rlsad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RlsOptions rls_options(const ChannelConfig &config)
{
	RlsOptions options;
	options.cov_scale = config.cov_scale;
	options.forgetting = config.forgetting;
	options.norm_history = std::max<std::size_t>(config.stability_hold, 1);
	return options;
}

} // namespace

void ChannelConfig::validate() const
{
	const auto fail = [this](const std::string &what) {
		throw ConfigError("channel '" + name + "': " + what);
	};

	if (name.empty()) {
		throw ConfigError("channel name must not be empty");
	}

	if (input_field.empty() || output_field.empty()) {
		fail("input and output fields must be set");
	}

	if (!(z_threshold > 0.0) || !std::isfinite(z_threshold)) {
		fail("z_threshold must be positive");
	}

	if (warmup_min_samples < order.dim()) {
		fail("warmup_min_samples must be at least the model dimension " + std::to_string(order.dim()));
	}

	if (!(cov_scale > 0.0) || !std::isfinite(cov_scale)) {
		fail("cov_scale must be positive");
	}

	if (!(forgetting > 0.0) || forgetting > 1.0) {
		fail("forgetting must lie in (0, 1]");
	}

	if (!(epsilon > 0.0)) {
		fail("epsilon must be positive");
	}

	if (stability_hold < 1) {
		fail("stability_hold must be at least 1");
	}

	if (variance_window < 2) {
		fail("variance_window must be at least 2");
	}

	if (!(variance_rel_tol > 0.0)) {
		fail("variance_rel_tol must be positive");
	}
}

std::string_view to_string(Phase phase)
{
	switch (phase) {
	case Phase::Warmup: return "warmup";
	case Phase::ModelStable: return "model_stable";
	case Phase::Armed: return "armed";
	case Phase::Anomaly: return "anomaly";
	}

	return "unknown";
}

ChannelDetector::ChannelDetector(ChannelConfig config)
	: _config((config.validate(), std::move(config))),
	  _rls(_config.order, rls_options(_config)),
	  _stats(std::max<std::size_t>(_config.variance_window, 2)),
	  _history(_config.order)
{
}

void ChannelDetector::reset()
{
	_rls.reset();
	_stats.reset();
	_history.clear();
	_phase = Phase::Warmup;
	_last_t.reset();
	_samples_seen = 0;
}

StepOutcome ChannelDetector::step(double t, double u, double y)
{
	if (!std::isfinite(t)) {
		throw StreamError("channel '" + _config.name + "': non-finite timestamp");
	}

	if (_last_t && t < *_last_t) {
		std::ostringstream msg;
		msg.precision(17);
		msg << "channel '" << _config.name << "': timestamp " << t << " precedes " << *_last_t;
		throw StreamError(msg.str());
	}

	_last_t = t;

	StepOutcome outcome;

	if (!std::isfinite(u) || !std::isfinite(y)) {
		outcome.quality = DataQualityEvent{_config.name, t, "non-finite sample skipped"};
		return outcome;
	}

	++_samples_seen;

	if (!_history.ready()) {
		_history.push(u, y);
		return outcome;
	}

	const Regressor phi = _history.regressor(u);
	const double y_hat = _rls.predict(phi);
	const double err = y - y_hat;

	TraceRow row{t, u, y, y_hat, err, kNaN, kNaN, _phase};

	const auto fill_stats = [&row, this](double error) {
		if (auto sigma = _stats.sample_stddev()) {
			row.sigma = *sigma;
		}

		if (auto z = _stats.try_z_score(error)) {
			row.z = *z;
		}
	};

	if (_phase == Phase::Anomaly) {
		fill_stats(err);
		_history.push(u, y);
		outcome.trace = row;
		return outcome;
	}

	if (_phase == Phase::Armed) {
		// score against the statistics accumulated before this sample
		const double z = _stats.z_score(err);

		if (z >= _config.z_threshold) {
			fill_stats(err);
			row.phase = _phase = Phase::Anomaly;
			outcome.detection = DetectionEvent{_config.name, t, z, err, Phase::Armed};
			_history.push(u, y);
			outcome.trace = row;
			return outcome;
		}
	}

	_rls.update(phi, y);

	const bool collect_stats = _phase != Phase::Warmup || _config.stats_start == StatsStart::FromStart;

	// z in the trace is taken before the error is absorbed, matching what the
	// armed check sees
	fill_stats(err);

	if (collect_stats) {
		_stats.update(err);
	}

	switch (_phase) {
	case Phase::Warmup:
		if (_rls.step() >= _config.warmup_min_samples
		    && _rls.is_model_stable(_config.epsilon, _config.stability_hold)) {
			_phase = Phase::ModelStable;
		}

		break;

	case Phase::ModelStable:
		if (_stats.is_variance_stable(_config.variance_window, _config.variance_rel_tol)) {
			_phase = Phase::Armed;
		}

		break;

	case Phase::Armed:
	case Phase::Anomaly:
		break;
	}

	_history.push(u, y);
	outcome.trace = row;
	return outcome;
}

std::optional<SystemAnomaly> aggregate(std::span<const DetectionEvent> events)
{
	const DetectionEvent *first = nullptr;

	for (const DetectionEvent &event : events) {
		if (first == nullptr || event.t < first->t || (event.t == first->t && event.channel < first->channel)) {
			first = &event;
		}
	}

	if (first == nullptr) {
		return std::nullopt;
	}

	return SystemAnomaly{first->t, first->channel, first->z};
}

} // namespace rlsad
