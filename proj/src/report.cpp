#include "gazeconf/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

using nlohmann::json;

KnowledgeGroup categorize(bool correct, bool confident) {
    if (correct && confident) return KnowledgeGroup::CorrectConfident;
    if (correct && !confident) return KnowledgeGroup::CorrectUnconfident;
    if (!correct && !confident) return KnowledgeGroup::IncorrectUnconfident;
    return KnowledgeGroup::IncorrectConfident;
}

std::pair<bool, bool> categorize_inverse(KnowledgeGroup g) {
    switch (g) {
        case KnowledgeGroup::CorrectConfident: return {true, true};
        case KnowledgeGroup::CorrectUnconfident: return {true, false};
        case KnowledgeGroup::IncorrectUnconfident: return {false, false};
        case KnowledgeGroup::IncorrectConfident: return {false, true};
    }
    throw ValidationError("unknown knowledge group");
}

const char* to_string(KnowledgeGroup g) {
    switch (g) {
        case KnowledgeGroup::CorrectConfident: return "correct with confidence";
        case KnowledgeGroup::CorrectUnconfident: return "correct without confidence";
        case KnowledgeGroup::IncorrectUnconfident: return "incorrect without confidence";
        case KnowledgeGroup::IncorrectConfident: return "incorrect with confidence";
    }
    return "?";
}

std::vector<ReviewItem> build_review_list(const std::vector<AnswerOutcome>& answers) {
    std::vector<ReviewItem> items;
    for (const AnswerOutcome& a : answers) {
        const KnowledgeGroup g = categorize(a.correct, a.predicted_confident);
        if (g == KnowledgeGroup::CorrectConfident) continue;
        ReviewItem item;
        item.question_id = a.question_id;
        item.group = g;
        item.highlighted = (g == KnowledgeGroup::CorrectUnconfident ||
                            g == KnowledgeGroup::IncorrectConfident);
        item.decision_score = a.decision_score;
        items.push_back(std::move(item));
    }

    auto group_rank = [](KnowledgeGroup g) {
        switch (g) {
            case KnowledgeGroup::IncorrectConfident: return 0;
            case KnowledgeGroup::CorrectUnconfident: return 1;
            default: return 2; // IncorrectUnconfident
        }
    };
    std::stable_sort(items.begin(), items.end(), [&](const ReviewItem& a, const ReviewItem& b) {
        const int ra = group_rank(a.group);
        const int rb = group_rank(b.group);
        if (ra != rb) return ra < rb;
        return std::abs(a.decision_score) > std::abs(b.decision_score);
    });
    return items;
}

ReportSummary summarize(const std::vector<AnswerOutcome>& answers) {
    ReportSummary s;
    s.n_answers = answers.size();
    for (const AnswerOutcome& a : answers) {
        const int g = static_cast<int>(categorize(a.correct, a.predicted_confident));
        ++s.group_counts[static_cast<std::size_t>(g - 1)];
    }
    return s;
}

std::string report_to_json(const std::vector<ReviewItem>& items, const ReportSummary& summary) {
    json j;
    json arr = json::array();
    for (const ReviewItem& item : items) {
        json ij;
        ij["question"] = item.question_id;
        ij["group"] = static_cast<int>(item.group);
        ij["highlighted"] = item.highlighted;
        ij["score"] = item.decision_score;
        arr.push_back(std::move(ij));
    }
    j["items"] = arr;
    j["summary"] = {{"answers", summary.n_answers},
                    {"group_counts",
                     {{"1", summary.group_counts[0]},
                      {"2", summary.group_counts[1]},
                      {"3", summary.group_counts[2]},
                      {"4", summary.group_counts[3]}}},
                    {"to_review", items.size()}};
    return j.dump(2) + "\n";
}

std::vector<ReviewItem> report_items_from_json(const std::string& text,
                                               const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": malformed report JSON: " + e.what());
    }
    std::vector<ReviewItem> items;
    try {
        for (const json& ij : j.at("items")) {
            ReviewItem item;
            item.question_id = ij.at("question").get<std::string>();
            const int g = ij.at("group").get<int>();
            if (g < 1 || g > 4) {
                throw ParseError(origin + ": group out of range: " + std::to_string(g));
            }
            item.group = static_cast<KnowledgeGroup>(g);
            item.highlighted = ij.at("highlighted").get<bool>();
            item.decision_score = ij.at("score").get<double>();
            items.push_back(std::move(item));
        }
    } catch (const json::exception& e) {
        throw ParseError(origin + ": incomplete report JSON: " + e.what());
    }
    return items;
}

std::string report_to_markdown(const std::vector<ReviewItem>& items,
                               const ReportSummary& summary) {
    std::ostringstream md;
    md << "# Review report\n\n";
    md << "Answers: " << summary.n_answers << " | group 1: " << summary.group_counts[0]
       << " | group 2: " << summary.group_counts[1] << " | group 3: " << summary.group_counts[2]
       << " | group 4: " << summary.group_counts[3] << "\n\n";
    if (items.empty()) {
        md << "Nothing to review.\n";
        return md.str();
    }
    md << "| question | group | flag | score | claim |\n";
    md << "|---|---|---|---|---|\n";
    for (const ReviewItem& item : items) {
        md << "| " << item.question_id << " | " << static_cast<int>(item.group) << " ("
           << to_string(item.group) << ") | " << (item.highlighted ? "**check**" : "review")
           << " | " << format_double(item.decision_score) << " | [dispute](#claim-"
           << item.question_id << ") |\n";
    }
    return md.str();
}

void render_report(const std::vector<ReviewItem>& items, const ReportSummary& summary,
                   const std::string& json_path, const std::string& md_path) {
    write_text_file(json_path, report_to_json(items, summary));
    if (!md_path.empty()) {
        write_text_file(md_path, report_to_markdown(items, summary));
    }
}

// ---------------------------------------------------------------------------
// claims
// ---------------------------------------------------------------------------

void Claim::validate() const {
    if (question_id.empty()) {
        throw ValidationError("claim: question id is empty");
    }
    if (estimated_confident == corrected_confident) {
        throw ValidationError("claim: correction equals the estimate for question '" +
                              question_id + "'");
    }
}

ClaimStore::ClaimStore(std::string path) : path_(std::move(path)) {}

void ClaimStore::record(const Claim& claim, const std::set<std::string>& known_questions) {
    claim.validate();
    if (known_questions.find(claim.question_id) == known_questions.end()) {
        throw ValidationError("claim: unknown question id '" + claim.question_id + "'");
    }
    json j;
    j["question"] = claim.question_id;
    j["estimated"] = claim.estimated_confident ? "confident" : "unconfident";
    j["corrected"] = claim.corrected_confident ? "confident" : "unconfident";
    j["timestamp_ms"] = claim.timestamp_ms;

    std::ofstream out(path_, std::ios::app);
    if (!out) {
        throw IoError("cannot open claim log for append: " + path_);
    }
    out << j.dump() << '\n';
    out.flush();
    if (!out) {
        throw IoError("write to claim log failed: " + path_);
    }
}

std::vector<Claim> ClaimStore::all() const {
    std::ifstream in(path_);
    std::vector<Claim> claims;
    if (!in) return claims; // nothing recorded yet
    std::string line;
    int line_no = 0;
    auto parse_conf = [&](const json& j, const char* key) {
        const std::string v = j.at(key).get<std::string>();
        if (v == "confident") return true;
        if (v == "unconfident") return false;
        throw ParseError(path_ + ":" + std::to_string(line_no) + ": bad value for '" +
                         key + "': " + v);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
            Claim c;
            c.question_id = j.at("question").get<std::string>();
            c.estimated_confident = parse_conf(j, "estimated");
            c.corrected_confident = parse_conf(j, "corrected");
            c.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
            claims.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw ParseError(path_ + ":" + std::to_string(line_no) + ": bad claim line: " +
                             e.what());
        }
    }
    return claims;
}

std::map<std::string, bool> corrected_labels(const std::map<std::string, bool>& estimated,
                                             const std::vector<Claim>& claims) {
    std::map<std::string, bool> out = estimated;
    for (const Claim& c : claims) {
        auto it = out.find(c.question_id);
        if (it != out.end()) {
            it->second = c.corrected_confident;
        }
    }
    return out;
}

} // namespace gazeconf
