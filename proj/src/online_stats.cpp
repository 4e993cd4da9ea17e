#include "rlsad/online_stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rlsad/errors.hpp"

namespace rlsad {

RunningStats::RunningStats(std::size_t change_history) : _rel_changes(change_history)
{
	if (change_history < 1) {
		throw ConfigError("variance change history must be at least 1");
	}
}

std::optional<double> RunningStats::sample_variance() const
{
	if (_n < 2) {
		return std::nullopt;
	}

	return _m2 / static_cast<double>(_n - 1);
}

std::optional<double> RunningStats::population_variance() const
{
	if (_n < 1) {
		return std::nullopt;
	}

	return _m2 / static_cast<double>(_n);
}

std::optional<double> RunningStats::sample_stddev() const
{
	if (auto var = sample_variance()) {
		return std::sqrt(*var);
	}

	return std::nullopt;
}

bool RunningStats::update(double x)
{
	if (!std::isfinite(x)) {
		return false;
	}

	const std::optional<double> before = sample_variance();

	++_n;
	const double delta = x - _mean;
	_mean += delta / static_cast<double>(_n);
	_m2 += delta * (x - _mean);

	const std::optional<double> after = sample_variance();

	if (before && after && *before > 0.0) {
		_rel_changes.push_back(std::abs(*after - *before) / *before);

	} else {
		_rel_changes.push_back(std::numeric_limits<double>::infinity());
	}

	return true;
}

std::optional<double> RunningStats::try_z_score(double x) const
{
	const std::optional<double> var = sample_variance();

	if (!var || *var <= 0.0) {
		return std::nullopt;
	}

	return std::abs(x - _mean) / std::sqrt(*var);
}

double RunningStats::z_score(double x) const
{
	if (auto z = try_z_score(x)) {
		return *z;
	}

	throw ContractViolation("z-score undefined: n = " + std::to_string(_n) + ", variance not positive");
}

bool RunningStats::is_variance_stable(std::size_t window, double rel_tol) const
{
	if (window > _rel_changes.capacity()) {
		throw ContractViolation("variance window " + std::to_string(window) + " exceeds kept history "
					+ std::to_string(_rel_changes.capacity()));
	}

	if (window == 0 || _rel_changes.size() < window) {
		return false;
	}

	auto it = _rel_changes.rbegin();

	for (std::size_t i = 0; i < window; ++i, ++it) {
		if (!(*it < rel_tol)) {
			return false;
		}
	}

	return true;
}

void RunningStats::reset()
{
	_n = 0;
	_mean = 0.0;
	_m2 = 0.0;
	_rel_changes.clear();
}

} // namespace rlsad
