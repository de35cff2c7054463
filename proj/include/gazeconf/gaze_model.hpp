#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazeconf {

/**
 * One eye-tracker measurement: integer milliseconds since session start and
 * screen-pixel coordinates. When valid is false the tracker had no usable
 * estimate and every consumer ignores x/y; the sample is kept so that the
 * valid-ratio filter can still see it.
 */
struct GazeSample {
    std::int64_t t = 0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;
};

/// Gaze resting inside a small region. duration == end - start, in ms.
struct Fixation {
    std::int64_t start = 0;
    std::int64_t end = 0;
    double cx = 0.0;
    double cy = 0.0;
    std::int64_t duration = 0;
};

/// Rapid movement between two consecutive fixations. Endpoints are the
/// bounding fixations' centroids; length is their straight-line distance.
struct Saccade {
    std::int64_t start = 0;
    std::int64_t end = 0;
    double from_x = 0.0;
    double from_y = 0.0;
    double to_x = 0.0;
    double to_y = 0.0;
    double length = 0.0;
    std::int64_t duration = 0; // always > 0
    double speed = 0.0;        // length / duration, px per ms
};

/// Temporally ordered fixations and the saccades bridging them.
/// saccades.size() == max(0, fixations.size() - 1) holds by construction.
struct EventStream {
    std::vector<Fixation> fixations;
    std::vector<Saccade> saccades;
};

/**
 * Outcome of one answered question. reported_confidence is the learner's
 * own yes/no label and is absent for records that were never surveyed.
 * reading_time_s is the span from first to last gaze timestamp, in seconds.
 */
struct AnswerRecord {
    std::string question_id;
    bool correct = false;
    std::optional<bool> reported_confidence;
    double reading_time_s = 0.0;
};

struct QuestionRecord {
    std::vector<GazeSample> samples;
    AnswerRecord answer;
};

struct Session {
    std::string participant_id;
    std::vector<QuestionRecord> records;
};

/// Rejects empty/whitespace ids and the "guest" placeholder (any case).
bool is_valid_participant_id(std::string_view id);

/**
 * Gaze-log format (JSONL): each question block starts with a header line
 *   {"participant": "...", "question": "...", "correct": bool, "confidence": bool|null}
 * followed by one line per sample
 *   {"t": <int ms>, "x": <float>, "y": <float>, "v": 0|1}
 *
 * load_session expects a single participant per file; load_sessions accepts
 * multi-participant logs and groups blocks by participant id (order of first
 * appearance). Both throw ParseError with the offending line number for
 * malformed lines and ValidationError for semantic violations (non-monotonic
 * timestamps, invalid participant ids, empty blocks).
 */
Session load_session(const std::string& path);
std::vector<Session> load_sessions(const std::string& path);
std::vector<Session> parse_sessions(std::istream& in, const std::string& origin);

void save_session(const Session& session, std::ostream& out);
void save_session(const Session& session, const std::string& path);
void save_sessions(const std::vector<Session>& sessions, const std::string& path);

} // namespace gazeconf
