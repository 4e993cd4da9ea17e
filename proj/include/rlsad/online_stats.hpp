#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <boost/circular_buffer.hpp>

namespace rlsad {

/**
 * Welford running mean and variance.
 *
 *   mean_n = mean_{n-1} + (x_n - mean_{n-1}) / n
 *   M2_n   = M2_{n-1} + (x_n - mean_{n-1}) (x_n - mean_n)
 *   s^2    = M2 / (n - 1),   sigma^2 = M2 / n
 *
 * Besides the moments it keeps the relative change of s^2 caused by each of
 * the most recent updates, which is what the variance stability query looks at.
 */
class RunningStats
{
public:
	explicit RunningStats(std::size_t change_history = 512);

	std::uint64_t count() const { return _n; }
	double mean() const { return _mean; }
	double m2() const { return _m2; }

	/// Sample variance M2/(n-1); empty for n < 2.
	std::optional<double> sample_variance() const;
	/// Population variance M2/n; empty for n < 1.
	std::optional<double> population_variance() const;
	std::optional<double> sample_stddev() const;

	/// Returns false (state unchanged) for non-finite x.
	bool update(double x);

	/// |x - mean| / s. Throws ContractViolation when n < 2 or s^2 == 0.
	double z_score(double x) const;
	/// Same as z_score() but empty instead of throwing.
	std::optional<double> try_z_score(double x) const;

	/**
	 * True iff each of the last `window` updates changed s^2 by less than
	 * rel_tol relative to its previous value. Updates made while s^2 was
	 * still undefined or zero count as unstable.
	 */
	bool is_variance_stable(std::size_t window, double rel_tol) const;

	void reset();

private:
	std::uint64_t _n{0};
	double _mean{0.0};
	double _m2{0.0};
	boost::circular_buffer<double> _rel_changes;
};

} // namespace rlsad
