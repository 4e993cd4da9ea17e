#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlsad {

enum class Classification {
	TruePositive,
	TrueNegative,
	FalsePositive,
	FalseNegative,
	/// Alarm raised before the fault onset: counts once as FP and once as FN.
	FalsePositiveAndNegative,
};

std::string_view to_string(Classification c);

struct SequenceVerdict {
	std::string scenario;
	std::string category;
	double duration_s{0.0};
	std::optional<double> fault_onset_s;
	std::optional<double> first_detection_s;
	Classification classification{Classification::TrueNegative};
	std::optional<double> detection_time_s; ///< first detection minus onset, TP only

	std::size_t tp() const { return classification == Classification::TruePositive; }
	std::size_t tn() const { return classification == Classification::TrueNegative; }
	std::size_t fp() const;
	std::size_t fn() const;
	bool correct() const { return tp() + tn() == 1; }
};

struct SequenceTruth {
	std::string scenario;
	std::string category;
	double duration_s{0.0};
	std::optional<double> fault_onset_s;
};

/**
 * Classifies one sequence from its (time-ordered) detections. Only the first
 * detection matters: the system alarm latches. With a deadline, a detection
 * later than onset + deadline does not count as a hit.
 */
SequenceVerdict classify_sequence(const SequenceTruth &truth, std::span<const double> detections,
				  double deadline_s = std::numeric_limits<double>::infinity());

struct CategoryRow {
	std::string category;
	std::size_t tests{0};
	double flight_time_s{0.0};
	std::optional<double> avg_detection_s;
	std::optional<double> max_detection_s;
	std::optional<double> accuracy; ///< correct sequences / tests
};

struct MetricsSummary {
	std::size_t sequences{0};
	std::size_t tp{0};
	std::size_t fp{0};
	std::size_t fn{0};
	std::size_t tn{0};
	std::size_t correct{0};

	std::optional<double> precision;  ///< TP / (TP + FP)
	std::optional<double> recall;     ///< TP / (TP + FN)
	std::optional<double> accuracy;   ///< correct sequences / sequences

	std::vector<CategoryRow> categories; ///< report order, then a "Total" row
};

/**
 * Aggregates verdicts. Ratios with a zero denominator stay empty.
 * Categories listed in `category_order` come first in that order; any others
 * follow alphabetically.
 */
MetricsSummary summarize(std::span<const SequenceVerdict> verdicts,
			 std::span<const std::string> category_order = {});

/// Table-shaped report: per-category rows, a total row, then overall metrics.
std::string render_report(const MetricsSummary &summary, char delimiter = ',');
std::string render_verdicts(std::span<const SequenceVerdict> verdicts, char delimiter = ',');

/// Ratio as a percentage truncated to two decimals, "-" when undefined.
std::string format_percent(const std::optional<double> &ratio);

} // namespace rlsad
