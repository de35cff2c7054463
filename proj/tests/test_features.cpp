#include <doctest.h>

#include <cmath>

#include "gazeconf/errors.hpp"
#include "gazeconf/event_detection.hpp"
#include "gazeconf/features.hpp"
#include "gazeconf/pipeline.hpp"
#include "gazeconf/synth.hpp"

using namespace gazeconf;

namespace {

AoiMap fixture_map() {
    AoiMap m;
    m.question = Rect{0, 0, 1000, 300};
    m.choices[0] = Rect{0, 300, 500, 350};
    m.choices[1] = Rect{500, 300, 500, 350};
    m.choices[2] = Rect{0, 650, 500, 350};
    m.choices[3] = Rect{500, 650, 500, 350};
    return m;
}

Fixation fx(std::int64_t start, std::int64_t end, double cx, double cy) {
    Fixation f;
    f.start = start;
    f.end = end;
    f.duration = end - start;
    f.cx = cx;
    f.cy = cy;
    return f;
}

Saccade bridge(const Fixation& a, const Fixation& b) {
    Saccade s;
    s.start = a.end;
    s.end = b.start;
    s.from_x = a.cx;
    s.from_y = a.cy;
    s.to_x = b.cx;
    s.to_y = b.cy;
    const double dx = b.cx - a.cx;
    const double dy = b.cy - a.cy;
    s.length = std::sqrt(dx * dx + dy * dy);
    s.duration = b.start - a.end;
    s.speed = s.length / static_cast<double>(s.duration);
    return s;
}

/**
 * Hand-worked fixture. Three fixations:
 *   A: 0-200 ms   at (250, 150)  -> question
 *   B: 300-600 ms at (250, 450)  -> choice 0
 *   C: 700-1200 ms at (750, 450) -> choice 1
 * Saccades: A->B vertical 300 px in 100 ms (speed 3), B->C horizontal
 * 500 px in 100 ms (speed 5). Answer: correct, 12 s reading time.
 *
 * All expectations below are manual arithmetic on these numbers.
 */
EventStream fixture_events() {
    EventStream ev;
    ev.fixations = {fx(0, 200, 250, 150), fx(300, 600, 250, 450), fx(700, 1200, 750, 450)};
    ev.saccades = {bridge(ev.fixations[0], ev.fixations[1]),
                   bridge(ev.fixations[1], ev.fixations[2])};
    return ev;
}

} // namespace

TEST_CASE("the three-fixation fixture reproduces all 30 features") {
    AnswerRecord answer;
    answer.question_id = "q1";
    answer.correct = true;
    answer.reading_time_s = 12.0;

    const FeatureVector v = extract_features(fixture_events(), fixture_map(), answer);

    CHECK(v.f(1) == 2.0);         // fixations on choices
    CHECK(v.f(2) == 2.0 / 3.0);   // ratio on choices
    CHECK(v.f(3) == 1.0);         // fixations on question
    CHECK(v.f(4) == 1.0 / 3.0);   // ratio on question
    CHECK(v.f(5) == 800.0);       // sum of choice durations (300 + 500)
    CHECK(v.f(6) == 400.0);       // mean
    CHECK(v.f(7) == 500.0);       // max
    CHECK(v.f(8) == 300.0);       // min
    CHECK(v.f(9) == 200.0);       // sum of question durations
    CHECK(v.f(10) == 200.0);
    CHECK(v.f(11) == 200.0);
    CHECK(v.f(12) == 200.0);
    // population variance of x {250, 250, 750} = 500000/9
    CHECK(v.f(13) == doctest::Approx(500000.0 / 9.0).epsilon(1e-12));
    // population variance of y {150, 450, 450} = 20000 (exact in doubles)
    CHECK(v.f(14) == 20000.0);
    CHECK(v.f(15) == 800.0);      // saccade lengths 300 + 500
    CHECK(v.f(16) == 400.0);
    CHECK(v.f(17) == 2.0);        // saccades total
    CHECK(v.f(18) == 0.0);        // within question
    CHECK(v.f(19) == 1.0);        // between choices (B->C)
    CHECK(v.f(20) == 1.0);        // question <-> choices (A->B)
    CHECK(v.f(21) == 200.0);      // saccade durations 100 + 100
    CHECK(v.f(22) == 100.0);
    CHECK(v.f(23) == 100.0);
    CHECK(v.f(24) == 100.0);
    CHECK(v.f(25) == 8.0);        // speeds 3 + 5
    CHECK(v.f(26) == 4.0);
    CHECK(v.f(27) == 5.0);
    CHECK(v.f(28) == 3.0);
    CHECK(v.f(29) == 12.0);
    CHECK(v.f(30) == 1.0);
}

TEST_CASE("variance fixture: centroid x of 0/10/20 gives 66.67") {
    EventStream ev;
    ev.fixations = {fx(0, 150, 0, 500), fx(200, 350, 10, 500), fx(400, 550, 20, 500)};
    ev.saccades = {bridge(ev.fixations[0], ev.fixations[1]),
                   bridge(ev.fixations[1], ev.fixations[2])};
    AnswerRecord answer;
    answer.reading_time_s = 0.55;
    const FeatureVector v = extract_features(ev, fixture_map(), answer);
    CHECK(v.f(13) == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
    CHECK(v.f(14) == 0.0);
}

TEST_CASE("an event stream without fixations is rejected") {
    AnswerRecord answer;
    CHECK_THROWS_AS(extract_features(EventStream{}, fixture_map(), answer), ValidationError);
}

TEST_CASE("empty aggregates read as zero") {
    EventStream ev;
    ev.fixations = {fx(0, 200, 1500, 1500)}; // outside every AOI
    AnswerRecord answer;
    answer.correct = false;
    answer.reading_time_s = 0.2;
    const FeatureVector v = extract_features(ev, fixture_map(), answer);

    CHECK(v.f(1) == 0.0);
    CHECK(v.f(3) == 0.0);
    CHECK(v.f(2) + v.f(4) == 0.0); // ratios sum below 1 when fixations fall outside
    for (int f = 5; f <= 12; ++f) CHECK(v.f(f) == 0.0);
    for (int f = 15; f <= 28; ++f) CHECK(v.f(f) == 0.0);
    CHECK(v.f(30) == 0.0);
}

TEST_CASE("aggregate identities hold on generated questions") {
    const Session session = generate_session(BehaviorProfile::defaults(), "p001", 200, 4242);
    PipelineConfig cfg;
    cfg.labeled_only = false;
    const Dataset d = featurize_session(session, cfg);
    REQUIRE(d.rows.size() > 150);

    for (const DataRow& row : d.rows) {
        const FeatureVector& v = row.features;
        auto near = [](double a, double b) {
            return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        // sum = mean * count
        CHECK(near(v.f(5), v.f(6) * v.f(1)));
        CHECK(near(v.f(9), v.f(10) * v.f(3)));
        CHECK(near(v.f(15), v.f(16) * v.f(17)));
        CHECK(near(v.f(21), v.f(22) * v.f(17)));
        // min <= mean <= max
        CHECK(v.f(8) <= v.f(6));
        CHECK(v.f(6) <= v.f(7));
        CHECK(v.f(12) <= v.f(10));
        CHECK(v.f(10) <= v.f(11));
        CHECK(v.f(24) <= v.f(22));
        CHECK(v.f(22) <= v.f(23));
        CHECK(v.f(28) <= v.f(26));
        CHECK(v.f(26) <= v.f(27));
        // the three labeled categories never exceed the saccade total
        CHECK(v.f(17) >= v.f(18) + v.f(19) + v.f(20));
        // ratios
        CHECK(v.f(2) >= 0.0);
        CHECK(v.f(4) >= 0.0);
        CHECK(v.f(2) + v.f(4) <= 1.0 + 1e-12);
        CHECK(v.f(29) > 0.0);
        CHECK((v.f(30) == 0.0 || v.f(30) == 1.0));
    }
}

TEST_CASE("absolute AOI mode attributes fixations to a fixed layout") {
    // layout matching the generator's canonical screen geometry
    AoiMap layout;
    layout.question = Rect{100, 60, 1060, 260};
    layout.choices[0] = Rect{200, 350, 320, 200};
    layout.choices[1] = Rect{760, 350, 320, 200};
    layout.choices[2] = Rect{200, 620, 320, 200};
    layout.choices[3] = Rect{760, 620, 320, 200};
    layout.validate();

    BehaviorProfile profile = BehaviorProfile::defaults(); // no participant shift
    const Session session = generate_session(profile, "p001", 40, 8181);

    PipelineConfig cfg;
    cfg.aoi_mode = AoiMode::Absolute;
    cfg.layout = layout;
    cfg.labeled_only = false;
    const Dataset d = featurize_session(session, cfg);
    REQUIRE(d.rows.size() == 40);

    for (const DataRow& row : d.rows) {
        // every question mixes question reading with choice scanning
        CHECK(row.features.f(1) > 0.0);
        CHECK(row.features.f(3) > 0.0);
        CHECK(row.features.f(2) + row.features.f(4) > 0.8);
    }

    // absolute mode without a layout is a configuration error
    PipelineConfig broken;
    broken.aoi_mode = AoiMode::Absolute;
    CHECK_THROWS_AS(featurize_session(session, broken), ValidationError);
}

TEST_CASE("features are exactly translation invariant with relative AOIs") {
    const Session session = generate_session(BehaviorProfile::defaults(), "p001", 15, 777);
    PipelineConfig cfg;
    cfg.labeled_only = false;

    Session shifted = session;
    for (QuestionRecord& rec : shifted.records) {
        for (GazeSample& s : rec.samples) {
            s.x += 157.0;
            s.y += -93.0;
        }
    }

    const Dataset a = featurize_session(session, cfg);
    const Dataset b = featurize_session(shifted, cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        for (int f = 1; f <= kFeatureCount; ++f) {
            CHECK(a.rows[i].features.f(f) == b.rows[i].features.f(f));
        }
    }
}
