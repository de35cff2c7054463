#include "gazeconf/synth.hpp"

#include <algorithm>
#include <cmath>

#include "gazeconf/errors.hpp"
#include "gazeconf/rng.hpp"

namespace gazeconf {

namespace {

constexpr double kFrameMs = 1000.0 / 90.0; // 90 Hz remote-tracker frame clock

// canonical question/choice geometry before the participant shift
constexpr double kQuestionTrackY = 170.0;
constexpr double kQuestionGrid[7] = {200, 340, 480, 620, 760, 900, 1040};
constexpr double kChoiceCx[4] = {360, 920, 360, 920};
constexpr double kChoiceCy[4] = {450, 450, 690, 690};

} // namespace

void ClassBehavior::validate() const {
    if (!(fixation_count_mean > 0.0) || !(fixation_count_spread >= 0.0)) {
        throw ValidationError("profile: fixation count distribution must be positive");
    }
    if (!(fixation_duration_median_ms > 0.0) || !(fixation_duration_sigma >= 0.0)) {
        throw ValidationError("profile: fixation duration distribution must be positive");
    }
    if (!(between_choice_rate >= 0.0 && between_choice_rate <= 1.0) ||
        !(reread_rate >= 0.0 && reread_rate <= 1.0) ||
        between_choice_rate + reread_rate > 1.0) {
        throw ValidationError("profile: step rates must be probabilities summing to <= 1");
    }
    if (!(reading_time_median_s > 0.0) || !(reading_time_sigma >= 0.0)) {
        throw ValidationError("profile: reading time distribution must be positive");
    }
    if (!(p_correct >= 0.0 && p_correct <= 1.0)) {
        throw ValidationError("profile: p_correct must be a probability");
    }
}

void BehaviorProfile::validate() const {
    confident.validate();
    unconfident.validate();
    if (!(prior_confident > 0.0 && prior_confident < 1.0)) {
        throw ValidationError("profile: prior_confident must lie in (0, 1)");
    }
    if (!(noise_px >= 0.0) || !(tempo > 0.0)) {
        throw ValidationError("profile: noise_px must be >= 0 and tempo > 0");
    }
    if (!(invalid_rate >= 0.0 && invalid_rate < 1.0)) {
        throw ValidationError("profile: invalid_rate must lie in [0, 1)");
    }
    if (label_every < 1) {
        throw ValidationError("profile: label_every must be >= 1");
    }
    if (!(population.noise_min_px >= 0.0) ||
        population.noise_max_px < population.noise_min_px ||
        !(population.tempo_min > 0.0) || population.tempo_max < population.tempo_min ||
        !(population.shift_max_px >= 0.0)) {
        throw ValidationError("profile: population ranges are inconsistent");
    }
}

BehaviorProfile BehaviorProfile::defaults() {
    BehaviorProfile p;
    // calibrated so the two classes overlap: detection should be clearly
    // better than chance but nowhere near perfect, and reading time alone
    // should be a usable yet weaker signal than the gaze structure
    p.confident = ClassBehavior{
        /*fixation_count_mean=*/27.0,
        /*fixation_count_spread=*/9.0,
        /*fixation_duration_median_ms=*/255.0,
        /*fixation_duration_sigma=*/0.33,
        /*between_choice_rate=*/0.25,
        /*reread_rate=*/0.17,
        /*reading_time_median_s=*/10.5,
        /*reading_time_sigma=*/0.48,
        /*p_correct=*/0.82,
    };
    p.unconfident = ClassBehavior{
        /*fixation_count_mean=*/33.0,
        /*fixation_count_spread=*/10.0,
        /*fixation_duration_median_ms=*/275.0,
        /*fixation_duration_sigma=*/0.35,
        /*between_choice_rate=*/0.35,
        /*reread_rate=*/0.26,
        /*reading_time_median_s=*/13.5,
        /*reading_time_sigma=*/0.52,
        /*p_correct=*/0.66,
    };
    return p;
}

namespace {

ClassBehavior class_from_ini(const IniFile& ini, const std::string& section,
                             const ClassBehavior& base) {
    ClassBehavior c = base;
    c.fixation_count_mean = ini.get_double(section, "fixation_count_mean", c.fixation_count_mean);
    c.fixation_count_spread =
        ini.get_double(section, "fixation_count_spread", c.fixation_count_spread);
    c.fixation_duration_median_ms =
        ini.get_double(section, "fixation_duration_median_ms", c.fixation_duration_median_ms);
    c.fixation_duration_sigma =
        ini.get_double(section, "fixation_duration_sigma", c.fixation_duration_sigma);
    c.between_choice_rate = ini.get_double(section, "between_choice_rate", c.between_choice_rate);
    c.reread_rate = ini.get_double(section, "reread_rate", c.reread_rate);
    c.reading_time_median_s =
        ini.get_double(section, "reading_time_median_s", c.reading_time_median_s);
    c.reading_time_sigma = ini.get_double(section, "reading_time_sigma", c.reading_time_sigma);
    c.p_correct = ini.get_double(section, "p_correct", c.p_correct);
    return c;
}

} // namespace

BehaviorProfile BehaviorProfile::from_ini(const IniFile& ini) {
    BehaviorProfile p = defaults();
    p.confident = class_from_ini(ini, "confident", p.confident);
    p.unconfident = class_from_ini(ini, "unconfident", p.unconfident);
    p.prior_confident = ini.get_double("", "prior_confident", p.prior_confident);
    p.shift_x_px = ini.get_double("", "shift_x_px", p.shift_x_px);
    p.shift_y_px = ini.get_double("", "shift_y_px", p.shift_y_px);
    p.noise_px = ini.get_double("", "noise_px", p.noise_px);
    p.tempo = ini.get_double("", "tempo", p.tempo);
    p.invalid_rate = ini.get_double("", "invalid_rate", p.invalid_rate);
    p.label_every = static_cast<int>(ini.get_int("", "label_every", p.label_every));
    p.population.shift_max_px =
        ini.get_double("population", "shift_max_px", p.population.shift_max_px);
    p.population.noise_min_px =
        ini.get_double("population", "noise_min_px", p.population.noise_min_px);
    p.population.noise_max_px =
        ini.get_double("population", "noise_max_px", p.population.noise_max_px);
    p.population.tempo_min = ini.get_double("population", "tempo_min", p.population.tempo_min);
    p.population.tempo_max = ini.get_double("population", "tempo_max", p.population.tempo_max);
    p.validate();
    return p;
}

BehaviorProfile BehaviorProfile::from_file(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
}

namespace {

struct Target {
    double x = 0.0;
    double y = 0.0;
};

/**
 * Scanpath targets for one question: an initial left-to-right pass over the
 * question, then a scan phase mixing choice dwells, between-choice
 * comparisons and question rereads, ending on the chosen answer. Consecutive
 * targets are kept far enough apart (>= ~95 px on one axis) that dispersion
 * segmentation cannot merge neighboring fixations even under sample noise.
 */
std::vector<Target> scanpath(const ClassBehavior& b, int n_fix, int chosen_cell, Rng& rng) {
    std::vector<Target> targets;
    targets.reserve(static_cast<std::size_t>(n_fix));

    const int n_grid = 7;
    const int k_question = std::clamp(static_cast<int>(std::lround(0.35 * n_fix)), 2, n_fix - 2);

    int grid_pos = 0;
    int last_grid = -1;
    auto question_point = [&](int g) {
        return Target{kQuestionGrid[g] + rng.uniform(-15.0, 15.0),
                      kQuestionTrackY + rng.uniform(-40.0, 40.0)};
    };
    for (int i = 0; i < k_question; ++i) {
        targets.push_back(question_point(grid_pos));
        last_grid = grid_pos;
        grid_pos = (grid_pos + 1) % n_grid;
    }

    // choice dwell points alternate the sign of their x offset so that two
    // consecutive dwells in the same cell stay well apart
    int cell = rng.bernoulli(0.5) ? 0 : 1;
    int x_sign = rng.bernoulli(0.5) ? 1 : -1;
    auto cell_point = [&](int c) {
        const Target t{kChoiceCx[c] + x_sign * rng.uniform(48.0, 100.0),
                       kChoiceCy[c] + rng.uniform(-55.0, 55.0)};
        x_sign = -x_sign;
        return t;
    };

    bool last_was_question = false;
    for (int i = k_question; i < n_fix - 1; ++i) {
        const double roll = rng.uniform();
        if (roll < b.reread_rate) {
            int g = static_cast<int>(rng.below(n_grid));
            if (last_was_question) {
                while (g == last_grid) g = static_cast<int>(rng.below(n_grid));
            }
            targets.push_back(question_point(g));
            last_grid = g;
            last_was_question = true;
            continue;
        }
        if (roll < b.reread_rate + b.between_choice_rate) {
            int next = static_cast<int>(rng.below(4));
            while (next == cell) next = static_cast<int>(rng.below(4));
            cell = next;
        }
        targets.push_back(cell_point(cell));
        last_was_question = false;
    }

    targets.push_back(cell_point(chosen_cell));
    return targets;
}

} // namespace

Session generate_session(const BehaviorProfile& profile, const std::string& participant_id,
                         int n_questions, std::uint64_t seed) {
    profile.validate();
    if (n_questions < 1) {
        throw ValidationError("generate_session: n_questions must be >= 1");
    }
    if (!is_valid_participant_id(participant_id)) {
        throw ValidationError("generate_session: invalid participant id '" + participant_id +
                              "'");
    }

    Rng rng(seed);
    const std::int64_t shift_x = std::llround(profile.shift_x_px);
    const std::int64_t shift_y = std::llround(profile.shift_y_px);
    const double noise_clamp = std::min(3.0 * std::max(profile.noise_px, 1.0), 20.0);

    Session session;
    session.participant_id = participant_id;
    session.records.reserve(static_cast<std::size_t>(n_questions));

    std::int64_t frame = 0;
    auto frame_time = [&](std::int64_t f) {
        return static_cast<std::int64_t>(std::llround(static_cast<double>(f) * kFrameMs));
    };

    for (int q = 0; q < n_questions; ++q) {
        const bool truly_confident = rng.bernoulli(profile.prior_confident);
        const ClassBehavior& b = truly_confident ? profile.confident : profile.unconfident;

        const bool correct = rng.bernoulli(b.p_correct);
        const int correct_cell = static_cast<int>(rng.below(4));
        int chosen_cell = correct_cell;
        if (!correct) {
            chosen_cell = static_cast<int>(rng.below(4));
            while (chosen_cell == correct_cell) chosen_cell = static_cast<int>(rng.below(4));
        }

        const int n_fix = std::clamp(
            static_cast<int>(std::lround(rng.normal(b.fixation_count_mean,
                                                    b.fixation_count_spread))),
            6, 120);
        const std::vector<Target> targets = scanpath(b, n_fix, chosen_cell, rng);

        // duration weights, rescaled so the realized span tracks the drawn
        // reading time at the participant's pace
        std::vector<double> weights(targets.size());
        double weight_sum = 0.0;
        for (double& w : weights) {
            w = rng.lognormal(std::log(b.fixation_duration_median_ms), b.fixation_duration_sigma);
            weight_sum += w;
        }
        const double target_ms =
            1000.0 * profile.tempo * rng.lognormal(std::log(b.reading_time_median_s),
                                                   b.reading_time_sigma);
        const double gap_ms = 2.0 * kFrameMs * static_cast<double>(targets.size() - 1);
        const double scale = std::clamp((target_ms - gap_ms) / weight_sum, 0.3, 5.0);

        QuestionRecord rec;
        char qid[16];
        std::snprintf(qid, sizeof(qid), "q%04d", q + 1);
        rec.answer.question_id = qid;
        rec.answer.correct = correct;
        if (q % profile.label_every == 0) {
            rec.answer.reported_confidence = truly_confident;
        }

        for (std::size_t fi = 0; fi < targets.size(); ++fi) {
            const double dur_ms = std::max(130.0, weights[fi] * scale);
            const int n_frames = std::max(2, static_cast<int>(std::lround(dur_ms / kFrameMs)));
            for (int k = 0; k < n_frames; ++k) {
                GazeSample s;
                s.t = frame_time(frame++);
                const double nx = std::clamp(rng.normal(0.0, profile.noise_px), -noise_clamp,
                                             noise_clamp);
                const double ny = std::clamp(rng.normal(0.0, profile.noise_px), -noise_clamp,
                                             noise_clamp);
                s.x = static_cast<double>(std::llround(targets[fi].x + nx) + shift_x);
                s.y = static_cast<double>(std::llround(targets[fi].y + ny) + shift_y);
                s.valid = !rng.bernoulli(profile.invalid_rate);
                rec.samples.push_back(s);
            }
            if (fi + 1 < targets.size()) {
                frame += 2; // saccade transit: tracker frames without samples
            }
        }
        // the tracker keeps running between questions
        frame += static_cast<std::int64_t>(rng.range(40, 110));

        const std::int64_t span = rec.samples.back().t - rec.samples.front().t;
        rec.answer.reading_time_s = static_cast<double>(span) / 1000.0;
        session.records.push_back(std::move(rec));
    }
    return session;
}

std::vector<Session> generate_population(const BehaviorProfile& profile, int n_participants,
                                         int n_questions, std::uint64_t seed) {
    profile.validate();
    if (n_participants < 2) {
        throw ValidationError("generate_population: need at least 2 participants");
    }

    Rng rng(derive_seed(seed, 0));
    std::vector<Session> sessions;
    sessions.reserve(static_cast<std::size_t>(n_participants));
    for (int p = 0; p < n_participants; ++p) {
        BehaviorProfile pp = profile;
        const auto max_shift = static_cast<std::int64_t>(profile.population.shift_max_px);
        pp.shift_x_px = static_cast<double>(rng.range(-max_shift, max_shift));
        pp.shift_y_px = static_cast<double>(rng.range(-max_shift, max_shift));
        pp.noise_px = rng.uniform(profile.population.noise_min_px, profile.population.noise_max_px);
        pp.tempo = rng.uniform(profile.population.tempo_min, profile.population.tempo_max);

        char pid[16];
        std::snprintf(pid, sizeof(pid), "p%03d", p + 1);
        sessions.push_back(
            generate_session(pp, pid, n_questions, derive_seed(seed, 1000 + static_cast<std::uint64_t>(p))));
    }
    return sessions;
}

} // namespace gazeconf
