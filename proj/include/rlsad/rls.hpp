#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>
#include <boost/circular_buffer.hpp>

#include "rlsad/arx.hpp"

namespace rlsad {

struct RlsOptions {
	double cov_scale{1e6};       ///< initial covariance is cov_scale * I
	double forgetting{1.0};      ///< lambda in (0, 1]; 1 gives plain least squares
	std::size_t norm_history{512}; ///< how many update norms are kept for stability queries
};

struct RlsUpdate {
	bool accepted{false}; ///< false when the sample carried a non-finite value
	double error{0.0};    ///< a-priori prediction error y - phi' theta(k-1)
	double update_norm{0.0}; ///< max |L(k) e(k)|
};

/**
 * Recursive least squares estimator for an ARX parameter vector.
 *
 *   e(k)     = y(k) - phi(k)' theta(k-1)
 *   L(k)     = C(k-1) phi(k) / (lambda + phi(k)' C(k-1) phi(k))
 *   theta(k) = theta(k-1) + L(k) e(k)
 *   C(k)     = (C(k-1) - L(k) phi(k)' C(k-1)) / lambda
 *
 * C is re-symmetrized after every update. A copy is a full snapshot of the
 * estimator state.
 */
class RlsState
{
public:
	RlsState(ArxOrder order, const RlsOptions &options = {});

	ArxOrder order() const { return _order; }
	std::size_t dim() const { return _order.dim(); }
	const RlsOptions &options() const { return _options; }

	const Eigen::VectorXd &theta() const { return _theta; }
	const Eigen::MatrixXd &cov() const { return _cov; }
	std::uint64_t step() const { return _step; }
	double last_update_norm() const { return _last_update_norm; }

	/// phi' theta; throws ContractViolation on dimension mismatch.
	double predict(const Regressor &phi) const;

	/// Applies one recursion step. Non-finite input leaves the state untouched.
	RlsUpdate update(const Regressor &phi, double y);

	/// True iff the last `hold` update norms were all below `epsilon`.
	bool is_model_stable(double epsilon, std::size_t hold) const;

	/// Length of the current run of consecutive updates with norm below epsilon.
	std::size_t stable_run(double epsilon) const;

	void reset();

private:
	ArxOrder _order;
	RlsOptions _options;
	Eigen::VectorXd _theta;
	Eigen::MatrixXd _cov;
	std::uint64_t _step{0};
	double _last_update_norm{0.0};
	boost::circular_buffer<double> _norms;
};

inline RlsState init_rls(ArxOrder order, double cov_scale)
{
	return RlsState(order, RlsOptions{.cov_scale = cov_scale});
}

} // namespace rlsad
