#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>
#include <boost/circular_buffer.hpp>

namespace rlsad {

/**
 * Lag structure of a single-input single-output ARX model
 *
 *   y(k) = -a1 y(k-1) - ... - a_na y(k-na) + b0 u(k) + b1 u(k-1) + ... + b_nb u(k-nb) + n(k)
 *
 * The leading output coefficient is fixed to one (monic A polynomial), so
 * the parameter vector is theta = [-a1 ... -a_na, b0 ... b_nb].
 */
struct ArxOrder {
	std::size_t na{0}; ///< past-output lags
	std::size_t nb{0}; ///< past-input lags (current input is always included)

	constexpr std::size_t dim() const { return na + nb + 1; }
	constexpr bool operator==(const ArxOrder &) const = default;
};

/// phi(k) = [y(k-1) ... y(k-na), u(k), u(k-1) ... u(k-nb)]
using Regressor = Eigen::VectorXd;

/**
 * Sliding window of past inputs and outputs from which regressors are
 * assembled. Newest sample sits at the back of each buffer.
 */
class ArxHistory
{
public:
	explicit ArxHistory(ArxOrder order);

	ArxOrder order() const { return _order; }

	/// True once na past outputs and nb past inputs have been observed.
	bool ready() const;

	/// Number of samples that must be pushed before ready() turns true.
	std::size_t priming_samples() const;

	Regressor regressor(double u_now) const;

	void push(double u, double y);
	void clear();

private:
	ArxOrder _order;
	boost::circular_buffer<double> _past_y;
	boost::circular_buffer<double> _past_u;
};

/// Builds phi from explicit lag lists, newest first.
Regressor make_regressor(std::span<const double> past_y_newest_first, double u_now,
			 std::span<const double> past_u_newest_first);

} // namespace rlsad
