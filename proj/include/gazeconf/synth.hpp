#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeconf/gaze_model.hpp"
#include "gazeconf/ini.hpp"

namespace gazeconf {

/**
 * Per-class scanpath behavior. Confident answering shows few fixations and
 * a quick pass over the choices; unconfident answering shows many fixations,
 * frequent back-and-forth between choices, question rereading and longer
 * reading times. Counts are drawn from a clamped normal, durations and
 * reading times from log-normals.
 */
struct ClassBehavior {
    double fixation_count_mean = 0.0;
    double fixation_count_spread = 0.0;
    double fixation_duration_median_ms = 0.0;
    double fixation_duration_sigma = 0.0;
    double between_choice_rate = 0.0; // P(scan step jumps to a different choice)
    double reread_rate = 0.0;         // P(scan step returns to the question)
    double reading_time_median_s = 0.0;
    double reading_time_sigma = 0.0;
    double p_correct = 0.0;

    void validate() const;
};

/// Ranges for participant-level variation inside generate_population.
struct PopulationSpread {
    double shift_max_px = 180.0;
    double noise_min_px = 2.0;
    double noise_max_px = 5.0;
    double tempo_min = 0.85;
    double tempo_max = 1.25;
};

struct BehaviorProfile {
    ClassBehavior confident;
    ClassBehavior unconfident;
    double prior_confident = 0.6;

    // participant-level: constant gaze shift (whole pixels), per-sample
    // noise scale and overall pace multiplier
    double shift_x_px = 0.0;
    double shift_y_px = 0.0;
    double noise_px = 3.0;
    double tempo = 1.0;

    double invalid_rate = 0.04; // tracker dropout probability per sample
    int label_every = 1;        // 1 = every record labeled, 5 = one in five

    PopulationSpread population;

    void validate() const;

    static BehaviorProfile defaults();

    /// Sections [confident] / [unconfident] with the ClassBehavior keys,
    /// top-level participant/misc keys, optional [population] ranges.
    static BehaviorProfile from_ini(const IniFile& ini);
    static BehaviorProfile from_file(const std::string& path);
};

/**
 * Generates one participant's session: per question a true confidence label
 * is drawn from the class prior, a scanpath is sampled from the matching
 * behavior, and 90 Hz gaze samples (integer pixels, integer ms) are rendered
 * with the participant's constant shift applied. Reproducible bit for bit
 * from the seed.
 */
Session generate_session(const BehaviorProfile& profile, const std::string& participant_id,
                         int n_questions, std::uint64_t seed);

/// Independent per-participant sessions with heterogeneous shifts, noise
/// and pace drawn from profile.population. Requires n_participants >= 2.
std::vector<Session> generate_population(const BehaviorProfile& profile, int n_participants,
                                         int n_questions, std::uint64_t seed);

} // namespace gazeconf
