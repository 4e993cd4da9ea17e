#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rlsad/evaluation.hpp"

using namespace rlsad;

namespace {

SequenceVerdict verdict(const std::string &name, const std::string &category, std::optional<double> onset,
			std::vector<double> detections, double duration = 60.0)
{
	return classify_sequence(SequenceTruth{name, category, duration, onset}, detections);
}

// 22 flights: 15 detected faults, 4 quiet clean flights, one clean flight with
// a false alarm, one missed fault and one fault flagged before its onset
std::vector<SequenceVerdict> twenty_two_flights()
{
	std::vector<SequenceVerdict> v;

	for (int i = 0; i < 15; ++i) {
		v.push_back(verdict("fault_" + std::to_string(i), "Engine", 30.0, {30.0 + 0.1 * i}));
	}

	for (int i = 0; i < 4; ++i) {
		v.push_back(verdict("clean_" + std::to_string(i), "No Failure", std::nullopt, {}));
	}

	v.push_back(verdict("clean_fp", "No Failure", std::nullopt, {12.0}));
	v.push_back(verdict("fault_missed", "Rudder", 30.0, {}));
	v.push_back(verdict("fault_early", "Aileron", 30.0, {20.0}));
	return v;
}

} // namespace

TEST(Classify, Cases)
{
	const SequenceVerdict tp = verdict("a", "Engine", 30.0, {35.0, 32.28});
	EXPECT_EQ(tp.classification, Classification::TruePositive);
	EXPECT_NEAR(*tp.detection_time_s, 2.28, 1e-12);
	EXPECT_EQ(*tp.first_detection_s, 32.28);

	EXPECT_EQ(verdict("b", "Engine", 30.0, {}).classification, Classification::FalseNegative);
	EXPECT_EQ(verdict("c", "No Failure", std::nullopt, {}).classification, Classification::TrueNegative);
	EXPECT_EQ(verdict("d", "No Failure", std::nullopt, {3.0}).classification, Classification::FalsePositive);

	const SequenceVerdict early = verdict("e", "Engine", 30.0, {29.0, 31.0});
	EXPECT_EQ(early.classification, Classification::FalsePositiveAndNegative);
	EXPECT_EQ(early.fp(), 1u);
	EXPECT_EQ(early.fn(), 1u);
	EXPECT_FALSE(early.correct());
	EXPECT_FALSE(early.detection_time_s);

	// detection exactly at onset counts
	EXPECT_EQ(verdict("f", "Engine", 30.0, {30.0}).classification, Classification::TruePositive);
}

TEST(Classify, Deadline)
{
	const double det[] = {40.0};
	EXPECT_EQ(classify_sequence({"a", "Engine", 60.0, 30.0}, det, 5.0).classification, Classification::FalseNegative);
	EXPECT_EQ(classify_sequence({"a", "Engine", 60.0, 30.0}, det, 10.0).classification, Classification::TruePositive);
}

TEST(Summary, TwentyTwoFlightCounts)
{
	const auto v = twenty_two_flights();
	const MetricsSummary s = summarize(v);

	EXPECT_EQ(s.sequences, 22u);
	EXPECT_EQ(s.tp, 15u);
	EXPECT_EQ(s.fp, 2u);
	EXPECT_EQ(s.fn, 2u);
	EXPECT_EQ(s.tn, 4u);
	EXPECT_EQ(s.correct, 19u);
	EXPECT_EQ(format_percent(s.precision), "88.23");
	EXPECT_EQ(format_percent(s.recall), "88.23");
	EXPECT_EQ(format_percent(s.accuracy), "86.36");
}

TEST(Summary, AllQuiet)
{
	std::vector<SequenceVerdict> v;

	for (int i = 0; i < 3; ++i) {
		v.push_back(verdict("clean_" + std::to_string(i), "No Failure", std::nullopt, {}));
	}

	const MetricsSummary s = summarize(v);
	EXPECT_EQ(s.tn, 3u);
	EXPECT_FALSE(s.precision);
	EXPECT_FALSE(s.recall);
	EXPECT_EQ(format_percent(s.accuracy), "100.00");
	EXPECT_EQ(format_percent(std::nullopt), "-");
}

TEST(Summary, CategoryRows)
{
	std::vector<SequenceVerdict> v{
		verdict("e1", "Engine", 30.0, {32.0}, 50.0),
		verdict("e2", "Engine", 30.0, {34.0}, 70.0),
		verdict("n1", "No Failure", std::nullopt, {}, 40.0),
	};
	const std::vector<std::string> order{"Engine", "Rudder", "No Failure"};
	const MetricsSummary s = summarize(v, order);

	ASSERT_EQ(s.categories.size(), 3u); // empty categories are left out, Total appended
	EXPECT_EQ(s.categories[0].category, "Engine");
	EXPECT_EQ(s.categories[0].tests, 2u);
	EXPECT_EQ(s.categories[0].flight_time_s, 120.0);
	EXPECT_DOUBLE_EQ(*s.categories[0].avg_detection_s, 3.0);
	EXPECT_DOUBLE_EQ(*s.categories[0].max_detection_s, 4.0);
	EXPECT_EQ(s.categories[1].category, "No Failure");
	EXPECT_FALSE(s.categories[1].avg_detection_s);
	EXPECT_EQ(s.categories[2].category, "Total");
	EXPECT_EQ(s.categories[2].tests, 3u);
	EXPECT_EQ(s.categories[2].flight_time_s, 160.0);
}

TEST(Summary, IndependentOfInputOrder)
{
	auto v = twenty_two_flights();
	const std::string reference = render_report(summarize(v));
	std::mt19937_64 rng(12);

	for (int i = 0; i < 10; ++i) {
		std::shuffle(v.begin(), v.end(), rng);
		EXPECT_EQ(render_report(summarize(v)), reference);
	}
}

TEST(Summary, ReportLayout)
{
	const std::string report = render_report(summarize(twenty_two_flights()));
	EXPECT_EQ(report.rfind("failure_type,tests,flight_time_s,avg_detection_s,max_detection_s,accuracy_pct\n", 0), 0u);
	EXPECT_NE(report.find("\nprecision_pct,88.23\n"), std::string::npos);
	EXPECT_NE(report.find("\naccuracy_pct,86.36\n"), std::string::npos);
}

TEST(Percent, Truncates)
{
	EXPECT_EQ(format_percent(15.0 / 17.0), "88.23");
	EXPECT_EQ(format_percent(19.0 / 22.0), "86.36");
	EXPECT_EQ(format_percent(0.29), "29.00");
	EXPECT_EQ(format_percent(2.0 / 3.0), "66.66");
	EXPECT_EQ(format_percent(1.0), "100.00");
	EXPECT_EQ(format_percent(0.0), "0.00");
}
