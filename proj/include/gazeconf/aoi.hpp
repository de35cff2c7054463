#pragma once

#include <array>
#include <span>
#include <string>

#include "gazeconf/gaze_model.hpp"

namespace gazeconf {

/// Axis-aligned rectangle in screen pixels. Containment is half-open,
/// [x, x+w) x [y, y+h), so a point on a shared edge belongs to exactly
/// one rectangle. y grows downward (screen convention).
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double x1() const { return x + w; }
    double y1() const { return y + h; }
    bool contains(double px, double py) const {
        return px >= x && px < x1() && py >= y && py < y1();
    }
    bool overlaps(const Rect& o) const {
        return x < o.x1() && o.x < x1() && y < o.y1() && o.y < y1();
    }
};

/// The question stem plus four answer choices. Choices are indexed in
/// reading order: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
struct AoiMap {
    Rect question;
    std::array<Rect, 4> choices;

    /// positive areas, pairwise disjoint; throws ValidationError otherwise
    void validate() const;
};

enum class AoiLabel {
    Question,
    Choice0,
    Choice1,
    Choice2,
    Choice3,
    Outside,
};

bool is_choice(AoiLabel label);
int choice_index(AoiLabel label); // -1 unless is_choice
const char* to_string(AoiLabel label);

enum class SaccadeCategory {
    WithinQuestion,
    BetweenChoices,            // two distinct choices
    BetweenQuestionAndChoices, // either direction
    Other,
};

const char* to_string(SaccadeCategory c);

/// Validates and returns a caller-supplied (absolute-coordinate) map.
AoiMap absolute_layout(const AoiMap& layout);

/// Layout file: JSON {"question": {x,y,w,h}, "choices": [4 x {x,y,w,h}]}.
AoiMap load_layout(const std::string& path);
void save_layout(const AoiMap& map, const std::string& path);

/**
 * Builds AOIs from the bounding box of the fixation centroids so that the
 * map follows the gaze even when calibration drift shifts everything by a
 * constant. The top 34% of the box height (full width) is the question;
 * the remaining 66% is cut into a 2x2 grid of choices.
 * Requires >= 2 fixations spanning a box with positive width and height.
 */
AoiMap relative_layout(std::span<const Fixation> fixations);

/// Label of the rectangle containing the fixation centroid; Outside if none.
AoiLabel assign_fixation(const Fixation& f, const AoiMap& map);
AoiLabel assign_point(double px, double py, const AoiMap& map);

/// Category from the labels of the saccade's two endpoints only.
SaccadeCategory classify_saccade(const Saccade& s, const AoiMap& map);

} // namespace gazeconf
