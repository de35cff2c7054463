#include <doctest.h>

#include "gazeconf/aoi.hpp"
#include "gazeconf/errors.hpp"
#include "gazeconf/rng.hpp"
#include "test_util.hpp"

using namespace gazeconf;

namespace {

AoiMap sample_map() {
    AoiMap m;
    m.question = Rect{0, 0, 1000, 300};
    m.choices[0] = Rect{0, 300, 500, 350};
    m.choices[1] = Rect{500, 300, 500, 350};
    m.choices[2] = Rect{0, 650, 500, 350};
    m.choices[3] = Rect{500, 650, 500, 350};
    return m;
}

Fixation fix_at(double x, double y) {
    Fixation f;
    f.start = 0;
    f.end = 100;
    f.duration = 100;
    f.cx = x;
    f.cy = y;
    return f;
}

} // namespace

TEST_CASE("absolute_layout passes a valid map through and rejects overlap") {
    const AoiMap m = absolute_layout(sample_map());
    CHECK(m.question.w == 1000);

    AoiMap bad = sample_map();
    bad.choices[0] = Rect{0, 250, 500, 350}; // intrudes into the question
    CHECK_THROWS_AS(absolute_layout(bad), ValidationError);

    AoiMap zero = sample_map();
    zero.choices[2].w = 0;
    CHECK_THROWS_AS(absolute_layout(zero), ValidationError);
}

TEST_CASE("layout JSON loads, validates and round-trips") {
    test_util::TempDir tmp("aoi");
    save_layout(sample_map(), tmp.path("layout.json"));
    const AoiMap m = load_layout(tmp.path("layout.json"));
    CHECK(m.question.x == 0);
    CHECK(m.choices[3].y == 650);

    // three choices instead of four
    test_util::write_file(tmp.path("bad.json"),
                          R"({"question": {"x":0,"y":0,"w":10,"h":10},
                              "choices": [{"x":0,"y":20,"w":10,"h":10},
                                          {"x":20,"y":20,"w":10,"h":10},
                                          {"x":0,"y":40,"w":10,"h":10}]})");
    CHECK_THROWS_AS(load_layout(tmp.path("bad.json")), ParseError);
}

TEST_CASE("relative layout splits the centroid box 34/66 with a choice cross") {
    const std::vector<Fixation> fixations = {fix_at(0, 0), fix_at(100, 100)};
    const AoiMap m = relative_layout(fixations);

    CHECK(m.question.x == 0.0);
    CHECK(m.question.y == 0.0);
    CHECK(m.question.w == 100.0);
    CHECK(m.question.h == doctest::Approx(34.0).epsilon(1e-12));

    CHECK(m.choices[0].x == 0.0);
    CHECK(m.choices[0].y == doctest::Approx(34.0).epsilon(1e-12));
    CHECK(m.choices[0].w == 50.0);
    CHECK(m.choices[1].x == 50.0);
    CHECK(m.choices[2].y == doctest::Approx(67.0).epsilon(1e-12));
    CHECK(m.choices[3].x == 50.0);
    CHECK(m.choices[3].y1() == doctest::Approx(100.0).epsilon(1e-12));

    m.validate(); // the generated map is itself a valid AOI set
}

TEST_CASE("relative layout is translation covariant") {
    std::vector<Fixation> fixations;
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        fixations.push_back(
            fix_at(static_cast<double>(rng.range(0, 1000)), static_cast<double>(rng.range(0, 800))));
    }
    const AoiMap base = relative_layout(fixations);

    std::vector<Fixation> shifted = fixations;
    for (Fixation& f : shifted) {
        f.cx += 200.0;
        f.cy += 300.0;
    }
    const AoiMap moved = relative_layout(shifted);

    CHECK(moved.question.x == base.question.x + 200.0);
    CHECK(moved.question.y == base.question.y + 300.0);
    CHECK(moved.question.w == base.question.w);
    CHECK(moved.question.h == base.question.h);
    for (int c = 0; c < 4; ++c) {
        CHECK(moved.choices[c].w == base.choices[c].w);
        CHECK(moved.choices[c].h == base.choices[c].h);
    }

    // every fixation keeps its label
    for (std::size_t i = 0; i < fixations.size(); ++i) {
        CHECK(assign_fixation(fixations[i], base) == assign_fixation(shifted[i], moved));
    }
}

TEST_CASE("relative layout needs a non-degenerate box") {
    CHECK_THROWS_AS(relative_layout(std::vector<Fixation>{fix_at(10, 10)}), ValidationError);
    // distinct y but equal x -> zero width
    CHECK_THROWS_AS(relative_layout(std::vector<Fixation>{fix_at(10, 10), fix_at(10, 90)}),
                    ValidationError);
}

TEST_CASE("fixation assignment picks the containing AOI") {
    const AoiMap m = sample_map();
    CHECK(assign_fixation(fix_at(500, 150), m) == AoiLabel::Question);
    CHECK(assign_fixation(fix_at(250, 800), m) == AoiLabel::Choice2);
    CHECK(assign_fixation(fix_at(1500, 150), m) == AoiLabel::Outside);
}

TEST_CASE("boundary points belong to exactly one AOI") {
    const AoiMap m = sample_map();
    const double probes[][2] = {
        {500, 150},  // question interior
        {500, 300},  // question/choice boundary row, choice column split
        {0, 300},    // corner of choice 0
        {500, 650},  // meeting point of all four choices
        {250, 650},  // boundary between choice 0 and 2
    };
    for (const auto& p : probes) {
        int owners = 0;
        if (m.question.contains(p[0], p[1])) ++owners;
        for (const Rect& r : m.choices) {
            if (r.contains(p[0], p[1])) ++owners;
        }
        CHECK(owners == 1);
    }
}

TEST_CASE("saccade classification follows the endpoint labels") {
    const AoiMap m = sample_map();
    auto sac = [](double x0, double y0, double x1, double y1) {
        Saccade s;
        s.from_x = x0;
        s.from_y = y0;
        s.to_x = x1;
        s.to_y = y1;
        return s;
    };
    CHECK(classify_saccade(sac(100, 100, 900, 200), m) == SaccadeCategory::WithinQuestion);
    CHECK(classify_saccade(sac(100, 400, 900, 800), m) == SaccadeCategory::BetweenChoices);
    CHECK(classify_saccade(sac(100, 100, 100, 400), m) ==
          SaccadeCategory::BetweenQuestionAndChoices);
    CHECK(classify_saccade(sac(100, 400, 100, 100), m) ==
          SaccadeCategory::BetweenQuestionAndChoices);
    CHECK(classify_saccade(sac(700, 400, 1500, 400), m) == SaccadeCategory::Other);
    // a saccade within one choice is not "between choices"
    CHECK(classify_saccade(sac(100, 400, 300, 500), m) == SaccadeCategory::Other);
    CHECK(classify_saccade(sac(1500, 100, 1500, 900), m) == SaccadeCategory::Other);
}

TEST_CASE("classification depends only on the endpoint labels") {
    const AoiMap m = sample_map();
    Rng rng(17);

    auto reference = [](AoiLabel from, AoiLabel to) {
        if (from == AoiLabel::Question && to == AoiLabel::Question)
            return SaccadeCategory::WithinQuestion;
        if (is_choice(from) && is_choice(to) && from != to)
            return SaccadeCategory::BetweenChoices;
        if ((from == AoiLabel::Question && is_choice(to)) ||
            (is_choice(from) && to == AoiLabel::Question))
            return SaccadeCategory::BetweenQuestionAndChoices;
        return SaccadeCategory::Other;
    };

    for (int trial = 0; trial < 500; ++trial) {
        Saccade s;
        s.from_x = rng.uniform(-200.0, 1400.0);
        s.from_y = rng.uniform(-200.0, 1300.0);
        s.to_x = rng.uniform(-200.0, 1400.0);
        s.to_y = rng.uniform(-200.0, 1300.0);
        const AoiLabel from = assign_point(s.from_x, s.from_y, m);
        const AoiLabel to = assign_point(s.to_x, s.to_y, m);
        CHECK(classify_saccade(s, m) == reference(from, to));
    }
}
