#include "rlsad/rls.hpp"

#include <cmath>
#include <string>

#include "rlsad/errors.hpp"

namespace rlsad {

namespace {

bool all_finite(const Eigen::VectorXd &v)
{
	return v.allFinite();
}

} // namespace

RlsState::RlsState(ArxOrder order, const RlsOptions &options)
	: _order(order), _options(options), _norms(options.norm_history)
{
	if (!std::isfinite(options.cov_scale) || options.cov_scale <= 0.0) {
		throw ConfigError("cov_scale must be positive and finite, got " + std::to_string(options.cov_scale));
	}

	if (!std::isfinite(options.forgetting) || options.forgetting <= 0.0 || options.forgetting > 1.0) {
		throw ConfigError("forgetting factor must lie in (0, 1], got " + std::to_string(options.forgetting));
	}

	if (options.norm_history < 1) {
		throw ConfigError("norm_history must be at least 1");
	}

	reset();
}

void RlsState::reset()
{
	const auto n = static_cast<Eigen::Index>(dim());
	_theta = Eigen::VectorXd::Zero(n);
	_cov = Eigen::MatrixXd::Identity(n, n) * _options.cov_scale;
	_step = 0;
	_last_update_norm = 0.0;
	_norms.clear();
}

double RlsState::predict(const Regressor &phi) const
{
	if (phi.size() != _theta.size()) {
		throw ContractViolation("regressor has length " + std::to_string(phi.size()) + ", model expects "
					+ std::to_string(_theta.size()));
	}

	return phi.dot(_theta);
}

RlsUpdate RlsState::update(const Regressor &phi, double y)
{
	const double prediction = predict(phi);

	if (!std::isfinite(y) || !all_finite(phi)) {
		return RlsUpdate{.accepted = false, .error = y - prediction, .update_norm = 0.0};
	}

	const double error = y - prediction;
	const double lambda = _options.forgetting;

	const Eigen::VectorXd c_phi = _cov * phi;
	const double denom = lambda + phi.dot(c_phi);
	const Eigen::VectorXd gain = c_phi / denom;
	const Eigen::VectorXd correction = gain * error;

	_theta += correction;

	// C phi is the transpose of phi' C because C is symmetric
	_cov.noalias() -= gain * c_phi.transpose();

	if (lambda != 1.0) {
		_cov /= lambda;
	}

	_cov = (0.5 * (_cov + _cov.transpose())).eval();

	_last_update_norm = correction.size() > 0 ? correction.cwiseAbs().maxCoeff() : 0.0;
	_norms.push_back(_last_update_norm);
	++_step;

	return RlsUpdate{.accepted = true, .error = error, .update_norm = _last_update_norm};
}

bool RlsState::is_model_stable(double epsilon, std::size_t hold) const
{
	if (hold > _norms.capacity()) {
		throw ContractViolation("stability hold " + std::to_string(hold) + " exceeds kept history "
					+ std::to_string(_norms.capacity()));
	}

	if (hold == 0 || _norms.size() < hold) {
		return false;
	}

	return stable_run(epsilon) >= hold;
}

std::size_t RlsState::stable_run(double epsilon) const
{
	std::size_t run = 0;

	for (auto it = _norms.rbegin(); it != _norms.rend() && *it < epsilon; ++it) {
		++run;
	}

	return run;
}

} // namespace rlsad
