#include "gazeconf/aoi.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

using nlohmann::json;

void AoiMap::validate() const {
    auto check_area = [](const Rect& r, const std::string& name) {
        if (!(r.w > 0.0) || !(r.h > 0.0)) {
            throw ValidationError("AOI '" + name + "' must have positive area");
        }
    };
    check_area(question, "question");
    for (std::size_t i = 0; i < choices.size(); ++i) {
        check_area(choices[i], "choice " + std::to_string(i));
    }

    std::array<const Rect*, 5> all = {&question, &choices[0], &choices[1], &choices[2],
                                      &choices[3]};
    static const char* names[5] = {"question", "choice 0", "choice 1", "choice 2", "choice 3"};
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (all[i]->overlaps(*all[j])) {
                throw ValidationError(std::string("AOIs overlap: ") + names[i] + " and " +
                                      names[j]);
            }
        }
    }
}

bool is_choice(AoiLabel label) {
    return label == AoiLabel::Choice0 || label == AoiLabel::Choice1 ||
           label == AoiLabel::Choice2 || label == AoiLabel::Choice3;
}

int choice_index(AoiLabel label) {
    switch (label) {
        case AoiLabel::Choice0: return 0;
        case AoiLabel::Choice1: return 1;
        case AoiLabel::Choice2: return 2;
        case AoiLabel::Choice3: return 3;
        default: return -1;
    }
}

const char* to_string(AoiLabel label) {
    switch (label) {
        case AoiLabel::Question: return "question";
        case AoiLabel::Choice0: return "choice0";
        case AoiLabel::Choice1: return "choice1";
        case AoiLabel::Choice2: return "choice2";
        case AoiLabel::Choice3: return "choice3";
        case AoiLabel::Outside: return "outside";
    }
    return "outside";
}

const char* to_string(SaccadeCategory c) {
    switch (c) {
        case SaccadeCategory::WithinQuestion: return "within_question";
        case SaccadeCategory::BetweenChoices: return "between_choices";
        case SaccadeCategory::BetweenQuestionAndChoices: return "question_choices";
        case SaccadeCategory::Other: return "other";
    }
    return "other";
}

AoiMap absolute_layout(const AoiMap& layout) {
    layout.validate();
    return layout;
}

namespace {

Rect rect_from_json(const json& j, const std::string& name) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j.contains("w") ||
        !j.contains("h")) {
        throw ParseError("layout: '" + name + "' must be an object with x, y, w, h");
    }
    Rect r;
    try {
        r.x = j.at("x").get<double>();
        r.y = j.at("y").get<double>();
        r.w = j.at("w").get<double>();
        r.h = j.at("h").get<double>();
    } catch (const json::exception& e) {
        throw ParseError("layout: bad rectangle '" + name + "': " + e.what());
    }
    return r;
}

json rect_to_json(const Rect& r) {
    json j;
    j["x"] = r.x;
    j["y"] = r.y;
    j["w"] = r.w;
    j["h"] = r.h;
    return j;
}

} // namespace

AoiMap load_layout(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": malformed layout JSON: " + e.what());
    }
    if (!j.contains("question") || !j.contains("choices")) {
        throw ParseError(path + ": layout needs 'question' and 'choices'");
    }
    const json& ch = j.at("choices");
    if (!ch.is_array() || ch.size() != 4) {
        throw ParseError(path + ": 'choices' must be an array of exactly 4 rectangles");
    }
    AoiMap map;
    map.question = rect_from_json(j.at("question"), "question");
    for (std::size_t i = 0; i < 4; ++i) {
        map.choices[i] = rect_from_json(ch.at(i), "choice " + std::to_string(i));
    }
    map.validate();
    return map;
}

void save_layout(const AoiMap& map, const std::string& path) {
    json j;
    j["question"] = rect_to_json(map.question);
    json arr = json::array();
    for (const Rect& r : map.choices) arr.push_back(rect_to_json(r));
    j["choices"] = arr;
    write_text_file(path, j.dump(2) + "\n");
}

AoiMap relative_layout(std::span<const Fixation> fixations) {
    if (fixations.size() < 2) {
        throw ValidationError("relative_layout: need at least 2 fixations");
    }
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (const Fixation& f : fixations) {
        min_x = std::min(min_x, f.cx);
        max_x = std::max(max_x, f.cx);
        min_y = std::min(min_y, f.cy);
        max_y = std::max(max_y, f.cy);
    }
    const double w = max_x - min_x;
    const double h = max_y - min_y;
    if (!(w > 0.0) || !(h > 0.0)) {
        throw ValidationError("relative_layout: degenerate fixation bounding box");
    }

    const double question_h = 0.34 * h;
    const double row_split = 0.67 * h; // midpoint of the remaining 66%
    const double col_w = 0.5 * w;

    AoiMap map;
    map.question = Rect{min_x, min_y, w, question_h};
    map.choices[0] = Rect{min_x, min_y + question_h, col_w, row_split - question_h};
    map.choices[1] = Rect{min_x + col_w, min_y + question_h, col_w, row_split - question_h};
    map.choices[2] = Rect{min_x, min_y + row_split, col_w, h - row_split};
    map.choices[3] = Rect{min_x + col_w, min_y + row_split, col_w, h - row_split};
    return map;
}

AoiLabel assign_point(double px, double py, const AoiMap& map) {
    if (map.question.contains(px, py)) return AoiLabel::Question;
    static constexpr AoiLabel kChoiceLabels[4] = {AoiLabel::Choice0, AoiLabel::Choice1,
                                                  AoiLabel::Choice2, AoiLabel::Choice3};
    for (std::size_t i = 0; i < 4; ++i) {
        if (map.choices[i].contains(px, py)) return kChoiceLabels[i];
    }
    return AoiLabel::Outside;
}

AoiLabel assign_fixation(const Fixation& f, const AoiMap& map) {
    return assign_point(f.cx, f.cy, map);
}

SaccadeCategory classify_saccade(const Saccade& s, const AoiMap& map) {
    const AoiLabel from = assign_point(s.from_x, s.from_y, map);
    const AoiLabel to = assign_point(s.to_x, s.to_y, map);
    if (from == AoiLabel::Question && to == AoiLabel::Question) {
        return SaccadeCategory::WithinQuestion;
    }
    if (is_choice(from) && is_choice(to) && from != to) {
        return SaccadeCategory::BetweenChoices;
    }
    if ((from == AoiLabel::Question && is_choice(to)) ||
        (is_choice(from) && to == AoiLabel::Question)) {
        return SaccadeCategory::BetweenQuestionAndChoices;
    }
    return SaccadeCategory::Other;
}

} // namespace gazeconf
