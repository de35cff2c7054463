#pragma once

#include <span>

#include "gazeconf/gaze_model.hpp"
#include "gazeconf/ini.hpp"

namespace gazeconf {

/**
 * Dispersion segmentation parameters. A fixation must last at least
 * min_fixation_ms and keep both its x and y spans within dispersion_px.
 * Records whose valid-sample ratio falls below min_valid_ratio are dropped
 * by filter_records.
 */
struct DetectorParams {
    std::int64_t min_fixation_ms = 100;
    double dispersion_px = 50.0;
    double min_valid_ratio = 0.8;

    void validate() const;

    /// Keys: min_fixation_ms, dispersion_px, min_valid_ratio (top level
    /// or inside a [detector] section).
    static DetectorParams from_ini(const IniFile& ini);
    static DetectorParams from_file(const std::string& path);
};

/**
 * Dispersion-based (I-DT) segmentation of one question's samples into
 * fixations and saccades. Invalid samples are transparent: they are removed
 * up front, so gaps of dropped frames inside an otherwise stationary cluster
 * do not split it. Throws ValidationError when no valid samples remain.
 *
 * Fixation centroids are quantized to 1/64 px; at that resolution the
 * quantization is far below tracker noise and it makes centroids of
 * integer-shifted streams shift by exactly the same amount.
 */
EventStream detect_events(std::span<const GazeSample> samples,
                          const DetectorParams& params = {});

/// Fraction of samples with valid == true. Throws ValidationError on empty input.
double valid_ratio(std::span<const GazeSample> samples);

/**
 * Drops records whose valid ratio is below params.min_valid_ratio.
 * With labeled_only set, records lacking a reported confidence label are
 * dropped as well (the mode used when building training data).
 */
Session filter_records(const Session& session, const DetectorParams& params = {},
                       bool labeled_only = false);

} // namespace gazeconf
