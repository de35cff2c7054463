#include "gazeconf/features.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "gazeconf/errors.hpp"

namespace gazeconf {

namespace {

struct Aggregate {
    std::size_t count = 0;
    double sum = 0.0;
    double max = -std::numeric_limits<double>::infinity();
    double min = std::numeric_limits<double>::infinity();

    void add(double v) {
        ++count;
        sum += v;
        max = std::max(max, v);
        min = std::min(min, v);
    }
    // empty-set convention: every statistic reads as 0
    double mean_or_zero() const { return count ? sum / static_cast<double>(count) : 0.0; }
    double sum_or_zero() const { return count ? sum : 0.0; }
    double max_or_zero() const { return count ? max : 0.0; }
    double min_or_zero() const { return count ? min : 0.0; }
};

// Population variance of the values shifted by their minimum. The shift
// cancels mathematically and keeps the arithmetic identical for streams
// that differ only by a constant offset.
double population_variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double anchor = *std::min_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x - anchor;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        const double d = (x - anchor) - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(v.size());
}

} // namespace

std::array<std::string, kFeatureCount> feature_column_names() {
    std::array<std::string, kFeatureCount> names;
    for (int i = 0; i < kFeatureCount; ++i) {
        names[static_cast<std::size_t>(i)] = "f" + std::to_string(i + 1);
    }
    return names;
}

FeatureVector extract_features(const EventStream& events, const AoiMap& aoi,
                               const AnswerRecord& answer) {
    if (events.fixations.empty()) {
        throw ValidationError("extract_features: event stream has no fixations");
    }

    const std::size_t n_fix = events.fixations.size();

    Aggregate dur_choices;
    Aggregate dur_question;
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(n_fix);
    ys.reserve(n_fix);
    for (const Fixation& f : events.fixations) {
        const AoiLabel label = assign_fixation(f, aoi);
        const double d = static_cast<double>(f.duration);
        if (is_choice(label)) {
            dur_choices.add(d);
        } else if (label == AoiLabel::Question) {
            dur_question.add(d);
        }
        xs.push_back(f.cx);
        ys.push_back(f.cy);
    }

    Aggregate sac_len;
    Aggregate sac_dur;
    Aggregate sac_speed;
    std::size_t n_within_question = 0;
    std::size_t n_between_choices = 0;
    std::size_t n_question_choices = 0;
    for (const Saccade& s : events.saccades) {
        sac_len.add(s.length);
        sac_dur.add(static_cast<double>(s.duration));
        sac_speed.add(s.speed);
        switch (classify_saccade(s, aoi)) {
            case SaccadeCategory::WithinQuestion: ++n_within_question; break;
            case SaccadeCategory::BetweenChoices: ++n_between_choices; break;
            case SaccadeCategory::BetweenQuestionAndChoices: ++n_question_choices; break;
            case SaccadeCategory::Other: break;
        }
    }

    const double total = static_cast<double>(n_fix);

    FeatureVector fv;
    fv.f(1) = static_cast<double>(dur_choices.count);
    fv.f(2) = static_cast<double>(dur_choices.count) / total;
    fv.f(3) = static_cast<double>(dur_question.count);
    fv.f(4) = static_cast<double>(dur_question.count) / total;
    fv.f(5) = dur_choices.sum_or_zero();
    fv.f(6) = dur_choices.mean_or_zero();
    fv.f(7) = dur_choices.max_or_zero();
    fv.f(8) = dur_choices.min_or_zero();
    fv.f(9) = dur_question.sum_or_zero();
    fv.f(10) = dur_question.mean_or_zero();
    fv.f(11) = dur_question.max_or_zero();
    fv.f(12) = dur_question.min_or_zero();
    fv.f(13) = population_variance(xs);
    fv.f(14) = population_variance(ys);
    fv.f(15) = sac_len.sum_or_zero();
    fv.f(16) = sac_len.mean_or_zero();
    fv.f(17) = static_cast<double>(events.saccades.size());
    fv.f(18) = static_cast<double>(n_within_question);
    fv.f(19) = static_cast<double>(n_between_choices);
    fv.f(20) = static_cast<double>(n_question_choices);
    fv.f(21) = sac_dur.sum_or_zero();
    fv.f(22) = sac_dur.mean_or_zero();
    fv.f(23) = sac_dur.max_or_zero();
    fv.f(24) = sac_dur.min_or_zero();
    fv.f(25) = sac_speed.sum_or_zero();
    fv.f(26) = sac_speed.mean_or_zero();
    fv.f(27) = sac_speed.max_or_zero();
    fv.f(28) = sac_speed.min_or_zero();
    fv.f(29) = answer.reading_time_s;
    fv.f(30) = answer.correct ? 1.0 : 0.0;
    return fv;
}

} // namespace gazeconf
