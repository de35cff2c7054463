#pragma once

#include <cstdint>
#include <optional>

#include "gazeconf/aoi.hpp"
#include "gazeconf/event_detection.hpp"
#include "gazeconf/learn.hpp"

namespace gazeconf {

enum class AoiMode { Absolute, Relative };
enum class FeatureMode { All, Stepwise, ReadingTimeOnly };
enum class EvalMode { Pooled, Lopo };

const char* to_string(AoiMode m);
const char* to_string(FeatureMode m);
const char* to_string(EvalMode m);

/// Everything a pipeline stage needs: segmentation parameters, the AOI
/// source, SVM parameters, the feature-selection policy and the master seed.
struct PipelineConfig {
    DetectorParams detector;
    AoiMode aoi_mode = AoiMode::Relative;
    std::optional<AoiMap> layout; // required in absolute mode
    SvmParams svm;
    FeatureMode feature_mode = FeatureMode::Stepwise;
    EvalMode eval_mode = EvalMode::Lopo;
    std::uint64_t seed = 0;
    bool labeled_only = true;

    void validate() const;
};

struct FeaturizeStats {
    std::size_t kept = 0;
    std::size_t dropped_by_filter = 0; // low valid ratio or missing label
    std::size_t dropped_no_events = 0; // no fixations / degenerate AOI box
};

/**
 * Runs filter -> event detection -> AOI assignment -> feature extraction for
 * every surviving record of a session. Records that yield no usable events
 * (no fixation, or too few for a relative AOI box) are skipped and counted.
 */
Dataset featurize_session(const Session& session, const PipelineConfig& cfg,
                          FeaturizeStats* stats = nullptr);

Dataset featurize_sessions(std::span<const Session> sessions, const PipelineConfig& cfg,
                           FeaturizeStats* stats = nullptr);

/// Resolves the configured feature policy against a training set:
/// all 30 features, greedy forward selection, or the reading-time baseline.
std::vector<int> select_features(const Dataset& train, const PipelineConfig& cfg,
                                 std::uint64_t seed);

} // namespace gazeconf
