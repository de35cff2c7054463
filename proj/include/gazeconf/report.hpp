#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gazeconf/gaze_model.hpp"

namespace gazeconf {

/**
 * The four knowledge-quality groups spanned by (correct, confident).
 * Groups 2 and 4 are the ones worth flagging: a correct answer without
 * confidence is knowledge at risk of being lost, and an incorrect answer
 * held with confidence is a misconception.
 */
enum class KnowledgeGroup : int {
    CorrectConfident = 1,
    CorrectUnconfident = 2,
    IncorrectUnconfident = 3,
    IncorrectConfident = 4,
};

KnowledgeGroup categorize(bool correct, bool confident);

/// (correct, confident) pair that maps onto the group; categorize is a bijection.
std::pair<bool, bool> categorize_inverse(KnowledgeGroup g);

const char* to_string(KnowledgeGroup g);

/// One question's predicted outcome, input to the review-list builder.
struct AnswerOutcome {
    std::string question_id;
    bool correct = false;
    bool predicted_confident = false;
    double decision_score = 0.0;
};

struct ReviewItem {
    std::string question_id;
    KnowledgeGroup group = KnowledgeGroup::CorrectConfident;
    bool highlighted = false; // only groups 2 and 4
    double decision_score = 0.0;
};

/**
 * Review rule: every wrong answer (groups 3 and 4) goes on the list, plus
 * every correct-but-unconfident answer (group 2). Groups 4 and 2 are
 * highlighted. Group 1 never appears. Items are ordered group 4, then 2,
 * then 3, each by descending |decision score|.
 */
std::vector<ReviewItem> build_review_list(const std::vector<AnswerOutcome>& answers);

struct ReportSummary {
    std::array<std::size_t, 4> group_counts{}; // indexed by group - 1
    std::size_t n_answers = 0;
};

ReportSummary summarize(const std::vector<AnswerOutcome>& answers);

/// {"items": [{question, group, highlighted, score}], "summary": {...}}
std::string report_to_json(const std::vector<ReviewItem>& items, const ReportSummary& summary);
std::vector<ReviewItem> report_items_from_json(const std::string& text,
                                               const std::string& origin = "<string>");

std::string report_to_markdown(const std::vector<ReviewItem>& items,
                               const ReportSummary& summary);

/// Writes the JSON report and, when md_path is non-empty, the markdown
/// rendering next to it. Throws IoError on unwritable paths.
void render_report(const std::vector<ReviewItem>& items, const ReportSummary& summary,
                   const std::string& json_path, const std::string& md_path = "");

/**
 * A learner's correction of one estimate. Recording a claim whose estimate
 * equals the correction is rejected, as is a question id the session never
 * saw. Claims are persisted append-only as JSONL, one claim per line.
 */
struct Claim {
    std::string question_id;
    bool estimated_confident = false;
    bool corrected_confident = false;
    std::int64_t timestamp_ms = 0;

    void validate() const;
};

class ClaimStore {
public:
    /// Opens (or creates on first record) the JSONL log at `path`.
    explicit ClaimStore(std::string path);

    /// Appends and flushes one claim. known_questions guards against typos;
    /// throws ValidationError when the id is unknown.
    void record(const Claim& claim, const std::set<std::string>& known_questions);

    /// Every claim in log order (duplicates retained).
    std::vector<Claim> all() const;

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/**
 * Applies claims to estimated labels, later claims winning for repeated
 * question ids. Re-applying the same claims is a no-op, so exports are
 * idempotent.
 */
std::map<std::string, bool> corrected_labels(const std::map<std::string, bool>& estimated,
                                             const std::vector<Claim>& claims);

} // namespace gazeconf
