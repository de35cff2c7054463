#include "gazeconf/pipeline.hpp"

#include <numeric>

#include "gazeconf/errors.hpp"

namespace gazeconf {

const char* to_string(AoiMode m) {
    return m == AoiMode::Absolute ? "absolute" : "relative";
}

const char* to_string(FeatureMode m) {
    switch (m) {
        case FeatureMode::All: return "all";
        case FeatureMode::Stepwise: return "stepwise";
        case FeatureMode::ReadingTimeOnly: return "reading-time-only";
    }
    return "all";
}

const char* to_string(EvalMode m) {
    return m == EvalMode::Pooled ? "pooled" : "lopo";
}

void PipelineConfig::validate() const {
    detector.validate();
    svm.validate();
    if (aoi_mode == AoiMode::Absolute) {
        if (!layout.has_value()) {
            throw ValidationError("absolute AOI mode requires a layout");
        }
        layout->validate();
    }
}

Dataset featurize_session(const Session& session, const PipelineConfig& cfg,
                          FeaturizeStats* stats) {
    cfg.validate();
    FeaturizeStats local;
    const Session filtered = filter_records(session, cfg.detector, cfg.labeled_only);
    local.dropped_by_filter = session.records.size() - filtered.records.size();

    Dataset out;
    for (const QuestionRecord& rec : filtered.records) {
        EventStream events;
        try {
            events = detect_events(rec.samples, cfg.detector);
        } catch (const ValidationError&) {
            ++local.dropped_no_events;
            continue;
        }
        if (events.fixations.empty()) {
            ++local.dropped_no_events;
            continue;
        }

        AoiMap map;
        if (cfg.aoi_mode == AoiMode::Absolute) {
            map = *cfg.layout;
        } else {
            try {
                map = relative_layout(events.fixations);
            } catch (const ValidationError&) {
                ++local.dropped_no_events;
                continue;
            }
        }

        DataRow row;
        row.features = extract_features(events, map, rec.answer);
        row.confident = rec.answer.reported_confidence;
        row.participant = session.participant_id;
        row.question = rec.answer.question_id;
        out.rows.push_back(std::move(row));
        ++local.kept;
    }

    if (stats) {
        stats->kept += local.kept;
        stats->dropped_by_filter += local.dropped_by_filter;
        stats->dropped_no_events += local.dropped_no_events;
    }
    return out;
}

Dataset featurize_sessions(std::span<const Session> sessions, const PipelineConfig& cfg,
                           FeaturizeStats* stats) {
    Dataset all;
    for (const Session& s : sessions) {
        Dataset d = featurize_session(s, cfg, stats);
        all.rows.insert(all.rows.end(), std::make_move_iterator(d.rows.begin()),
                        std::make_move_iterator(d.rows.end()));
    }
    return all;
}

std::vector<int> select_features(const Dataset& train, const PipelineConfig& cfg,
                                 std::uint64_t seed) {
    switch (cfg.feature_mode) {
        case FeatureMode::All: {
            std::vector<int> all(kFeatureCount);
            std::iota(all.begin(), all.end(), 1);
            return all;
        }
        case FeatureMode::ReadingTimeOnly:
            return {29};
        case FeatureMode::Stepwise:
            return forward_stepwise(train, cfg.svm, seed);
    }
    throw ValidationError("unknown feature mode");
}

} // namespace gazeconf
