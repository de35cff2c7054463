#include "gazeconf/event_detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazeconf/errors.hpp"

namespace gazeconf {

void DetectorParams::validate() const {
    if (min_fixation_ms <= 0) {
        throw ValidationError("min_fixation_ms must be positive");
    }
    if (!(dispersion_px > 0.0)) {
        throw ValidationError("dispersion_px must be positive");
    }
    if (!(min_valid_ratio >= 0.0 && min_valid_ratio <= 1.0)) {
        throw ValidationError("min_valid_ratio must lie in [0, 1]");
    }
}

DetectorParams DetectorParams::from_ini(const IniFile& ini) {
    DetectorParams p;
    const std::string section = ini.has_section("detector") ? "detector" : "";
    p.min_fixation_ms = ini.get_int(section, "min_fixation_ms", p.min_fixation_ms);
    p.dispersion_px = ini.get_double(section, "dispersion_px", p.dispersion_px);
    p.min_valid_ratio = ini.get_double(section, "min_valid_ratio", p.min_valid_ratio);
    p.validate();
    return p;
}

DetectorParams DetectorParams::from_file(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
}

namespace {

// 1/64 px grid; see the note on detect_events in the header.
double quantize_coord(double sum, std::size_t count) {
    return std::round(64.0 * sum / static_cast<double>(count)) / 64.0;
}

struct Window {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(const GazeSample& s) {
        min_x = std::min(min_x, s.x);
        max_x = std::max(max_x, s.x);
        min_y = std::min(min_y, s.y);
        max_y = std::max(max_y, s.y);
    }
    bool within(double dispersion) const {
        return (max_x - min_x) <= dispersion && (max_y - min_y) <= dispersion;
    }
};

Fixation make_fixation(std::span<const GazeSample> v, std::size_t first, std::size_t last) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        sx += v[k].x;
        sy += v[k].y;
    }
    const std::size_t n = last - first + 1;
    Fixation f;
    f.start = v[first].t;
    f.end = v[last].t;
    f.duration = f.end - f.start;
    f.cx = quantize_coord(sx, n);
    f.cy = quantize_coord(sy, n);
    return f;
}

} // namespace

EventStream detect_events(std::span<const GazeSample> samples, const DetectorParams& params) {
    params.validate();

    std::vector<GazeSample> v;
    v.reserve(samples.size());
    for (const GazeSample& s : samples) {
        if (s.valid) v.push_back(s);
    }
    if (v.empty()) {
        throw ValidationError("detect_events: no valid samples in input");
    }

    EventStream out;
    std::size_t i = 0;
    const std::size_t n = v.size();
    while (i < n) {
        // grow the initial window until it spans the minimum duration
        std::size_t j = i;
        Window w;
        w.add(v[i]);
        while (j + 1 < n && v[j].t - v[i].t < params.min_fixation_ms) {
            ++j;
            w.add(v[j]);
        }
        if (v[j].t - v[i].t < params.min_fixation_ms) {
            break; // remaining samples cannot cover the duration threshold
        }
        if (!w.within(params.dispersion_px)) {
            ++i;
            continue;
        }
        // accrete while the dispersion criterion keeps holding
        while (j + 1 < n) {
            Window grown = w;
            grown.add(v[j + 1]);
            if (!grown.within(params.dispersion_px)) break;
            w = grown;
            ++j;
        }
        out.fixations.push_back(make_fixation(v, i, j));
        i = j + 1;
    }

    out.saccades.reserve(out.fixations.size() > 0 ? out.fixations.size() - 1 : 0);
    for (std::size_t k = 1; k < out.fixations.size(); ++k) {
        const Fixation& a = out.fixations[k - 1];
        const Fixation& b = out.fixations[k];
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
        // duplicate timestamps at a fixation boundary would give a zero gap;
        // clamp so speed stays finite
        s.duration = std::max<std::int64_t>(1, s.end - s.start);
        s.speed = s.length / static_cast<double>(s.duration);
        out.saccades.push_back(s);
    }
    return out;
}

double valid_ratio(std::span<const GazeSample> samples) {
    if (samples.empty()) {
        throw ValidationError("valid_ratio: empty sample sequence");
    }
    std::size_t valid = 0;
    for (const GazeSample& s : samples) {
        if (s.valid) ++valid;
    }
    return static_cast<double>(valid) / static_cast<double>(samples.size());
}

Session filter_records(const Session& session, const DetectorParams& params, bool labeled_only) {
    params.validate();
    Session out;
    out.participant_id = session.participant_id;
    for (const QuestionRecord& rec : session.records) {
        if (rec.samples.empty()) continue;
        if (valid_ratio(rec.samples) < params.min_valid_ratio) continue;
        if (labeled_only && !rec.answer.reported_confidence.has_value()) continue;
        out.records.push_back(rec);
    }
    return out;
}

} // namespace gazeconf
