#include "rlsad/arx.hpp"

#include <algorithm>

namespace rlsad {

ArxHistory::ArxHistory(ArxOrder order)
	: _order(order), _past_y(order.na), _past_u(order.nb)
{
}

bool ArxHistory::ready() const
{
	return _past_y.full() && _past_u.full();
}

std::size_t ArxHistory::priming_samples() const
{
	return std::max(_order.na, _order.nb);
}

Regressor ArxHistory::regressor(double u_now) const
{
	Regressor phi(_order.dim());
	Eigen::Index i = 0;

	for (auto it = _past_y.rbegin(); it != _past_y.rend(); ++it) {
		phi(i++) = *it;
	}

	// zero-fill any lag not yet observed
	for (std::size_t missing = _past_y.size(); missing < _order.na; ++missing) {
		phi(i++) = 0.0;
	}

	phi(i++) = u_now;

	for (auto it = _past_u.rbegin(); it != _past_u.rend(); ++it) {
		phi(i++) = *it;
	}

	for (std::size_t missing = _past_u.size(); missing < _order.nb; ++missing) {
		phi(i++) = 0.0;
	}

	return phi;
}

void ArxHistory::push(double u, double y)
{
	if (_order.na > 0) {
		_past_y.push_back(y);
	}

	if (_order.nb > 0) {
		_past_u.push_back(u);
	}
}

void ArxHistory::clear()
{
	_past_y.clear();
	_past_u.clear();
}

Regressor make_regressor(std::span<const double> past_y_newest_first, double u_now,
			 std::span<const double> past_u_newest_first)
{
	Regressor phi(static_cast<Eigen::Index>(past_y_newest_first.size() + past_u_newest_first.size() + 1));
	Eigen::Index i = 0;

	for (double y : past_y_newest_first) {
		phi(i++) = y;
	}

	phi(i++) = u_now;

	for (double u : past_u_newest_first) {
		phi(i++) = u;
	}

	return phi;
}

} // namespace rlsad
