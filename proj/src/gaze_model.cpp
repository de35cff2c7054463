#include "gazeconf/gaze_model.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

using nlohmann::json;

bool is_valid_participant_id(std::string_view id) {
    const std::string_view trimmed = trim(id);
    if (trimmed.empty()) return false;
    return to_lower(trimmed) != "guest";
}

namespace {

std::string at(const std::string& origin, int line_no) {
    return origin + ":" + std::to_string(line_no);
}

void finish_block(std::vector<QuestionRecord>& out, QuestionRecord& block,
                  const std::string& origin, int header_line) {
    if (block.samples.empty()) {
        throw ValidationError(at(origin, header_line) + ": question '" + block.answer.question_id +
                              "' has no gaze samples");
    }
    const std::int64_t span = block.samples.back().t - block.samples.front().t;
    if (span <= 0) {
        throw ValidationError(at(origin, header_line) + ": question '" + block.answer.question_id +
                              "' has a non-positive gaze time span");
    }
    block.answer.reading_time_s = static_cast<double>(span) / 1000.0;
    out.push_back(std::move(block));
    block = QuestionRecord{};
}

} // namespace

std::vector<Session> parse_sessions(std::istream& in, const std::string& origin) {
    // participant -> index into sessions, keeping first-appearance order
    std::vector<Session> sessions;
    std::vector<std::string> order;

    auto session_for = [&](const std::string& pid) -> Session& {
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == pid) return sessions[i];
        }
        order.push_back(pid);
        sessions.push_back(Session{pid, {}});
        return sessions.back();
    };

    QuestionRecord block;
    std::string block_participant;
    int header_line = 0;
    bool in_block = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(at(origin, line_no) + ": malformed JSON: " + e.what());
        }
        if (!j.is_object()) {
            throw ParseError(at(origin, line_no) + ": expected a JSON object");
        }

        if (j.contains("participant")) {
            // header line: closes the previous block
            if (in_block) {
                finish_block(session_for(block_participant).records, block, origin, header_line);
            }
            try {
                block_participant = j.at("participant").get<std::string>();
                block.answer.question_id = j.at("question").get<std::string>();
                block.answer.correct = j.at("correct").get<bool>();
                const json& conf = j.at("confidence");
                if (conf.is_null()) {
                    block.answer.reported_confidence = std::nullopt;
                } else {
                    block.answer.reported_confidence = conf.get<bool>();
                }
            } catch (const json::exception& e) {
                throw ParseError(at(origin, line_no) + ": bad header line: " + e.what());
            }
            if (!is_valid_participant_id(block_participant)) {
                throw ValidationError(at(origin, line_no) + ": invalid participant id '" +
                                      block_participant + "'");
            }
            header_line = line_no;
            in_block = true;
            continue;
        }

        if (!in_block) {
            throw ParseError(at(origin, line_no) + ": sample line before any question header");
        }
        GazeSample s;
        try {
            s.t = j.at("t").get<std::int64_t>();
            s.x = j.at("x").get<double>();
            s.y = j.at("y").get<double>();
            const int v = j.at("v").get<int>();
            if (v != 0 && v != 1) {
                throw ParseError(at(origin, line_no) + ": field 'v' must be 0 or 1");
            }
            s.valid = (v == 1);
        } catch (const json::exception& e) {
            throw ParseError(at(origin, line_no) + ": bad sample line: " + e.what());
        }
        if (s.t < 0) {
            throw ValidationError(at(origin, line_no) + ": negative timestamp");
        }
        if (!block.samples.empty() && s.t < block.samples.back().t) {
            throw ValidationError(at(origin, line_no) + ": non-monotonic timestamp in question '" +
                                  block.answer.question_id + "'");
        }
        block.samples.push_back(s);
    }

    if (in_block) {
        finish_block(session_for(block_participant).records, block, origin, header_line);
    }
    return sessions;
}

std::vector<Session> load_sessions(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open gaze log: " + path);
    }
    return parse_sessions(in, path);
}

Session load_session(const std::string& path) {
    std::vector<Session> all = load_sessions(path);
    if (all.empty()) {
        throw ValidationError(path + ": gaze log contains no question blocks");
    }
    if (all.size() > 1) {
        throw ValidationError(path + ": expected a single participant, found " +
                              std::to_string(all.size()));
    }
    return std::move(all.front());
}

void save_session(const Session& session, std::ostream& out) {
    for (const QuestionRecord& rec : session.records) {
        json header;
        header["participant"] = session.participant_id;
        header["question"] = rec.answer.question_id;
        header["correct"] = rec.answer.correct;
        if (rec.answer.reported_confidence.has_value()) {
            header["confidence"] = *rec.answer.reported_confidence;
        } else {
            header["confidence"] = nullptr;
        }
        out << header.dump() << '\n';
        for (const GazeSample& s : rec.samples) {
            json line;
            line["t"] = s.t;
            line["x"] = s.x;
            line["y"] = s.y;
            line["v"] = s.valid ? 1 : 0;
            out << line.dump() << '\n';
        }
    }
}

void save_session(const Session& session, const std::string& path) {
    std::ostringstream ss;
    save_session(session, ss);
    write_text_file(path, ss.str());
}

void save_sessions(const std::vector<Session>& sessions, const std::string& path) {
    std::ostringstream ss;
    for (const Session& s : sessions) {
        save_session(s, ss);
    }
    write_text_file(path, ss.str());
}

} // namespace gazeconf
