#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "arx_data.hpp"
#include "rlsad/errors.hpp"
#include "rlsad/rls.hpp"

using namespace rlsad;

namespace {

RlsState fit(const testdata::ArxData &d, ArxOrder order, double cov_scale = 1e6)
{
	RlsState rls(order, RlsOptions{.cov_scale = cov_scale});
	ArxHistory history(order);

	for (std::size_t k = 0; k < d.u.size(); ++k) {
		if (history.ready()) {
			rls.update(history.regressor(d.u[k]), d.y[k]);
		}

		history.push(d.u[k], d.y[k]);
	}

	return rls;
}

bool bit_equal(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
	return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

} // namespace

TEST(ArxHistory, RegressorLayoutNewestFirst)
{
	ArxHistory h(ArxOrder{2, 1});
	EXPECT_EQ(h.priming_samples(), 2u);
	EXPECT_FALSE(h.ready());

	h.push(10.0, 1.0);
	h.push(20.0, 2.0);
	ASSERT_TRUE(h.ready());

	const Regressor phi = h.regressor(30.0);
	ASSERT_EQ(phi.size(), 4);
	EXPECT_EQ(phi(0), 2.0);
	EXPECT_EQ(phi(1), 1.0);
	EXPECT_EQ(phi(2), 30.0);
	EXPECT_EQ(phi(3), 20.0);
}

TEST(ArxHistory, MakeRegressorMatchesHistory)
{
	const double ys[] = {2.0, 1.0};
	const double us[] = {20.0};
	const Regressor phi = make_regressor(ys, 30.0, us);

	ArxHistory h(ArxOrder{2, 1});
	h.push(10.0, 1.0);
	h.push(20.0, 2.0);
	EXPECT_TRUE(bit_equal(phi, h.regressor(30.0)));
}

TEST(Rls, ScalarFirstUpdate)
{
	RlsState rls(ArxOrder{0, 0}, RlsOptions{.cov_scale = 1.0});
	Regressor phi(1);
	phi << 1.0;

	const RlsUpdate up = rls.update(phi, 1.0);
	EXPECT_TRUE(up.accepted);
	EXPECT_DOUBLE_EQ(up.error, 1.0);
	EXPECT_DOUBLE_EQ(up.update_norm, 0.5);
	EXPECT_DOUBLE_EQ(rls.theta()(0), 0.5);
	EXPECT_DOUBLE_EQ(rls.cov()(0, 0), 0.5);
	EXPECT_EQ(rls.step(), 1u);
}

TEST(Rls, ZeroRegressorLeavesStateUntouched)
{
	RlsState rls(ArxOrder{2, 2});
	const Eigen::MatrixXd cov = rls.cov();
	const Eigen::VectorXd theta = rls.theta();

	rls.update(Regressor::Zero(5), 3.0);
	EXPECT_TRUE(bit_equal(cov, rls.cov()));
	EXPECT_TRUE(bit_equal(theta, rls.theta()));
}

TEST(Rls, NonFiniteSampleRejected)
{
	RlsState rls(ArxOrder{1, 0});
	Regressor phi(2);
	phi << 1.0, 2.0;

	EXPECT_FALSE(rls.update(phi, std::numeric_limits<double>::quiet_NaN()).accepted);
	phi(0) = std::numeric_limits<double>::infinity();
	EXPECT_FALSE(rls.update(phi, 1.0).accepted);
	EXPECT_EQ(rls.step(), 0u);
	EXPECT_TRUE(rls.theta().isZero());
}

TEST(Rls, DimensionMismatchThrows)
{
	RlsState rls(ArxOrder{1, 1});
	EXPECT_THROW(rls.predict(Regressor::Zero(2)), ContractViolation);
	EXPECT_THROW(rls.update(Regressor::Zero(4), 0.0), ContractViolation);
}

TEST(Rls, BadOptionsThrow)
{
	EXPECT_THROW(RlsState(ArxOrder{1, 1}, RlsOptions{.cov_scale = 0.0}), ConfigError);
	EXPECT_THROW(RlsState(ArxOrder{1, 1}, RlsOptions{.forgetting = 1.5}), ConfigError);
	EXPECT_THROW(RlsState(ArxOrder{1, 1}, RlsOptions{.forgetting = 0.0}), ConfigError);
}

TEST(Rls, ConvergesOnFirstOrderSystem)
{
	// y(k) = 0.8 y(k-1) + 0.4 u(k)
	const auto d = testdata::generate_arx({-0.8}, {0.4}, 2000, 0.01, 42);
	const RlsState rls = fit(d, ArxOrder{1, 0});

	EXPECT_NEAR(rls.theta()(0), 0.8, 0.01);
	EXPECT_NEAR(rls.theta()(1), 0.4, 0.01);
}

TEST(Rls, NoiselessRecoveryIsExact)
{
	const auto d = testdata::generate_arx({-1.2, 0.4}, {0.1, 0.1}, 400, 0.0, 3);
	const RlsState rls = fit(d, ArxOrder{2, 1}, 1e8);

	Eigen::VectorXd truth(4);
	truth << 1.2, -0.4, 0.1, 0.1;
	EXPECT_LT((rls.theta() - truth).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Rls, CovarianceStaysSymmetricAndContracts)
{
	const ArxOrder order{3, 3};
	const auto d = testdata::generate_arx({-0.5, 0.1, 0.02}, {0.3, 0.2, 0.1, 0.05}, 3000, 0.05, 11);
	RlsState rls(order);
	ArxHistory history(order);

	for (std::size_t k = 0; k < d.u.size(); ++k) {
		if (history.ready()) {
			const Regressor phi = history.regressor(d.u[k]);
			const double before = phi.dot(rls.cov() * phi);
			rls.update(phi, d.y[k]);
			const double after = phi.dot(rls.cov() * phi);

			ASSERT_LE(after, before * (1.0 + 1e-12)) << "k=" << k;
			ASSERT_EQ((rls.cov() - rls.cov().transpose()).lpNorm<Eigen::Infinity>(), 0.0);
		}

		history.push(d.u[k], d.y[k]);
	}
}

TEST(Rls, IdenticalInputsGiveIdenticalState)
{
	const auto d = testdata::generate_arx({-0.7}, {0.3, 0.1}, 800, 0.02, 5);
	const RlsState a = fit(d, ArxOrder{2, 2});
	const RlsState b = fit(d, ArxOrder{2, 2});

	EXPECT_TRUE(bit_equal(a.theta(), b.theta()));
	EXPECT_TRUE(bit_equal(a.cov(), b.cov()));
}

TEST(Rls, ResetRestoresInitialState)
{
	const auto d = testdata::generate_arx({-0.7}, {0.3}, 300, 0.02, 6);
	RlsState rls = fit(d, ArxOrder{1, 0});
	rls.reset();

	const RlsState fresh(ArxOrder{1, 0});
	EXPECT_EQ(rls.step(), 0u);
	EXPECT_TRUE(bit_equal(rls.theta(), fresh.theta()));
	EXPECT_TRUE(bit_equal(rls.cov(), fresh.cov()));
}

TEST(Rls, ModelStabilityNeedsHoldConsecutiveSmallUpdates)
{
	RlsState rls(ArxOrder{0, 0}, RlsOptions{.cov_scale = 1.0, .norm_history = 16});
	Regressor phi(1);
	phi << 1.0;

	EXPECT_FALSE(rls.is_model_stable(1e-3, 1)); // no updates yet

	// constant target: the k-th update moves theta by 1/(k(k+1)), shrinking monotonically
	std::size_t first_small = 0;

	for (std::size_t k = 1; k <= 16; ++k) {
		const RlsUpdate up = rls.update(phi, 1.0);

		if (first_small == 0 && up.update_norm < 0.01) {
			first_small = k;
		}
	}

	ASSERT_GT(first_small, 0u);
	const std::size_t run = 16 - first_small + 1;
	EXPECT_EQ(rls.stable_run(0.01), run);
	EXPECT_TRUE(rls.is_model_stable(0.01, run));
	EXPECT_FALSE(rls.is_model_stable(0.01, run + 1));
	EXPECT_THROW(rls.is_model_stable(0.01, 17), ContractViolation);

	// one large step breaks the run
	rls.update(phi, 100.0);
	EXPECT_FALSE(rls.is_model_stable(0.01, 1));
}
