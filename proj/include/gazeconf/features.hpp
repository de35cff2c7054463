#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "gazeconf/aoi.hpp"
#include "gazeconf/gaze_model.hpp"

namespace gazeconf {

inline constexpr int kFeatureCount = 30;

/**
 * The per-question feature vector. Features are addressed by their 1-based
 * number f1..f30:
 *
 *   f1,f2    fixation count / ratio on the choices
 *   f3,f4    fixation count / ratio on the question
 *   f5-f8    sum / mean / max / min fixation duration on the choices (ms)
 *   f9-f12   sum / mean / max / min fixation duration on the question (ms)
 *   f13,f14  variance of fixation centroid x / y (population)
 *   f15,f16  sum / mean saccade length (px)
 *   f17-f20  saccade count: all / within question / between choices /
 *            between question and choices
 *   f21-f24  sum / mean / max / min saccade duration (ms)
 *   f25-f28  sum / mean / max / min saccade speed (px/ms)
 *   f29      reading time (s)
 *   f30      answer correctness (0/1)
 *
 * Ratios use the total fixation count as denominator. Aggregates over an
 * empty set (no saccades, no fixations on an AOI) are all reported as 0.
 */
struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double f(int number) const { return values[static_cast<std::size_t>(number - 1)]; }
    double& f(int number) { return values[static_cast<std::size_t>(number - 1)]; }
};

/// Column names for the CSV interchange format: "f1".."f30".
std::array<std::string, kFeatureCount> feature_column_names();

/// Throws ValidationError when events has no fixation.
FeatureVector extract_features(const EventStream& events, const AoiMap& aoi,
                               const AnswerRecord& answer);

} // namespace gazeconf
