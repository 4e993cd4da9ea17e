#include "rlsad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "rlsad/telemetry_io.hpp"

namespace rlsad {

std::string_view to_string(Classification c)
{
	switch (c) {
	case Classification::TruePositive: return "TP";
	case Classification::TrueNegative: return "TN";
	case Classification::FalsePositive: return "FP";
	case Classification::FalseNegative: return "FN";
	case Classification::FalsePositiveAndNegative: return "FP+FN";
	}

	return "?";
}

std::size_t SequenceVerdict::fp() const
{
	return classification == Classification::FalsePositive
	       || classification == Classification::FalsePositiveAndNegative;
}

std::size_t SequenceVerdict::fn() const
{
	return classification == Classification::FalseNegative
	       || classification == Classification::FalsePositiveAndNegative;
}

SequenceVerdict classify_sequence(const SequenceTruth &truth, std::span<const double> detections, double deadline_s)
{
	SequenceVerdict verdict;
	verdict.scenario = truth.scenario;
	verdict.category = truth.category;
	verdict.duration_s = truth.duration_s;
	verdict.fault_onset_s = truth.fault_onset_s;

	if (!detections.empty()) {
		verdict.first_detection_s = *std::min_element(detections.begin(), detections.end());
	}

	const auto &first = verdict.first_detection_s;

	if (!truth.fault_onset_s) {
		verdict.classification = first ? Classification::FalsePositive : Classification::TrueNegative;
		return verdict;
	}

	const double onset = *truth.fault_onset_s;

	if (!first) {
		verdict.classification = Classification::FalseNegative;

	} else if (*first < onset) {
		verdict.classification = Classification::FalsePositiveAndNegative;

	} else if (*first - onset > deadline_s) {
		verdict.classification = Classification::FalseNegative;

	} else {
		verdict.classification = Classification::TruePositive;
		verdict.detection_time_s = *first - onset;
	}

	return verdict;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den)
{
	if (den == 0) {
		return std::nullopt;
	}

	return static_cast<double>(num) / static_cast<double>(den);
}

struct Accumulator {
	std::size_t tests{0};
	std::size_t correct{0};
	double flight_time{0.0};
	double detection_sum{0.0};
	std::size_t detections{0};
	std::optional<double> detection_max;

	void add(const SequenceVerdict &v)
	{
		++tests;
		correct += v.correct();
		flight_time += v.duration_s;

		if (v.detection_time_s) {
			detection_sum += *v.detection_time_s;
			++detections;
			detection_max = std::max(detection_max.value_or(*v.detection_time_s), *v.detection_time_s);
		}
	}

	CategoryRow row(std::string name) const
	{
		CategoryRow r;
		r.category = std::move(name);
		r.tests = tests;
		r.flight_time_s = flight_time;

		if (detections > 0) {
			r.avg_detection_s = detection_sum / static_cast<double>(detections);
		}

		r.max_detection_s = detection_max;
		r.accuracy = ratio(correct, tests);
		return r;
	}
};

} // namespace

MetricsSummary summarize(std::span<const SequenceVerdict> verdicts, std::span<const std::string> category_order)
{
	MetricsSummary summary;

	// sorting by scenario name makes the floating-point sums independent of
	// the order verdicts arrive in
	std::vector<const SequenceVerdict *> ordered;

	for (const SequenceVerdict &v : verdicts) {
		ordered.push_back(&v);
	}

	std::sort(ordered.begin(), ordered.end(), [](const SequenceVerdict *a, const SequenceVerdict *b) {
		return a->scenario < b->scenario;
	});

	std::map<std::string, Accumulator> per_category;
	Accumulator total;

	for (const SequenceVerdict *v : ordered) {
		++summary.sequences;
		summary.tp += v->tp();
		summary.fp += v->fp();
		summary.fn += v->fn();
		summary.tn += v->tn();
		summary.correct += v->correct();
		per_category[v->category].add(*v);
		total.add(*v);
	}

	summary.precision = ratio(summary.tp, summary.tp + summary.fp);
	summary.recall = ratio(summary.tp, summary.tp + summary.fn);
	summary.accuracy = ratio(summary.correct, summary.sequences);

	for (const std::string &category : category_order) {
		if (auto it = per_category.find(category); it != per_category.end()) {
			summary.categories.push_back(it->second.row(category));
			per_category.erase(it);
		}
	}

	for (const auto &[category, acc] : per_category) {
		summary.categories.push_back(acc.row(category));
	}

	summary.categories.push_back(total.row("Total"));
	return summary;
}

std::string format_percent(const std::optional<double> &r)
{
	if (!r) {
		return "-";
	}

	// truncated, not rounded: 15/17 reads 88.23; the nudge absorbs binary
	// representation error such as 0.29 * 10000 = 2899.9999...
	const double hundredths = std::floor(*r * 10000.0 + 1e-7);
	return fmt::format("{:.2f}", hundredths / 100.0);
}

namespace {

std::string seconds(const std::optional<double> &s)
{
	return s ? fmt::format("{:.2f}", *s) : "-";
}

} // namespace

std::string render_report(const MetricsSummary &summary, char d)
{
	std::string out = fmt::format("failure_type{0}tests{0}flight_time_s{0}avg_detection_s{0}max_detection_s{0}accuracy_pct\n", d);

	for (const CategoryRow &row : summary.categories) {
		out += fmt::format("{1}{0}{2}{0}{3:.2f}{0}{4}{0}{5}{0}{6}\n", d, row.category, row.tests, row.flight_time_s,
				   seconds(row.avg_detection_s), seconds(row.max_detection_s), format_percent(row.accuracy));
	}

	out += "\n";
	out += fmt::format("metric{0}value\n", d);
	out += fmt::format("sequences{}{}\n", d, summary.sequences);
	out += fmt::format("tp{}{}\n", d, summary.tp);
	out += fmt::format("fp{}{}\n", d, summary.fp);
	out += fmt::format("fn{}{}\n", d, summary.fn);
	out += fmt::format("tn{}{}\n", d, summary.tn);
	out += fmt::format("precision_pct{}{}\n", d, format_percent(summary.precision));
	out += fmt::format("recall_pct{}{}\n", d, format_percent(summary.recall));
	out += fmt::format("accuracy_pct{}{}\n", d, format_percent(summary.accuracy));
	return out;
}

std::string render_verdicts(std::span<const SequenceVerdict> verdicts, char d)
{
	std::string out = fmt::format("scenario{0}category{0}onset_s{0}first_detection_s{0}classification{0}detection_time_s\n", d);

	for (const SequenceVerdict &v : verdicts) {
		out += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}\n", d, v.scenario, v.category,
				   v.fault_onset_s ? format_number(*v.fault_onset_s) : "-",
				   v.first_detection_s ? format_number(*v.first_detection_s) : "-", to_string(v.classification),
				   v.detection_time_s ? format_number(*v.detection_time_s) : "-");
	}

	return out;
}

} // namespace rlsad
