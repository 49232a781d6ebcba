#include "qfabric/readout.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qfabric::readout {

const char* to_string(TrackEnd end) { return end == TrackEnd::low ? "low" : "high"; }

namespace {

TrackEnd track_end_from_string(const std::string& s) {
    if (s == "low") return TrackEnd::low;
    if (s == "high") return TrackEnd::high;
    throw std::invalid_argument("unknown track end: " + s);
}

const char* orientation_name(int orientation) {
    return orientation == 0 ? "vertical" : "horizontal";
}

int orientation_from_name(const std::string& s) {
    if (s == "vertical") return 0;
    if (s == "horizontal") return 1;
    throw std::invalid_argument("unknown orientation: " + s);
}

const Track& track_by_id(const ReadoutLayout& layout, int id) {
    for (const auto& t : layout.tracks)
        if (t.id == id) return t;
    throw std::invalid_argument("no track with id " + std::to_string(id));
}

std::size_t attach_stage(const Track& track, const QubitCoordinate& q) {
    const auto it = std::lower_bound(
        track.attach_points.begin(), track.attach_points.end(), q,
        [](const auto& entry, const QubitCoordinate& key) { return entry.first < key; });
    if (it == track.attach_points.end() || it->first != q)
        throw std::invalid_argument("qubit " + q.name() + " is not attached to track " +
                                    std::to_string(track.id));
    return it->second;
}

}  // namespace

std::size_t ReadoutLayout::total_stage_count() const {
    std::size_t total = 0;
    for (const auto& t : tracks) total += t.stage_count;
    return total;
}

std::size_t ReadoutLayout::shift_distance(const QubitCoordinate& q) const {
    const auto it = routing.find(q);
    if (it == routing.end())
        throw std::invalid_argument("qubit " + q.name() + " is not routed");
    const auto& track = track_by_id(*this, it->second.track);
    const auto stage = attach_stage(track, q);
    return it->second.end == TrackEnd::low ? stage : track.stage_count - 1 - stage;
}

ReadoutLayout build_layout(const TopologyGraph& g, int tracks_total, int stages_per_attach) {
    if (tracks_total < 2 || tracks_total % 2 != 0)
        throw std::invalid_argument("track count must be even and >= 2");
    if (stages_per_attach < 1) throw std::invalid_argument("stages per attach must be >= 1");

    ReadoutLayout layout;
    const int half = tracks_total / 2;
    for (int u = 0; u < 2; ++u) {
        std::vector<QubitCoordinate> qubits;
        for (const auto& q : g.vertices)
            if (q.orientation == u) qubits.push_back(q);

        const std::size_t count = qubits.size();
        const std::size_t base = count / static_cast<std::size_t>(half);
        const std::size_t remainder = count % static_cast<std::size_t>(half);
        std::size_t cursor = 0;
        for (int band = 0; band < half; ++band) {
            Track track;
            track.id = u * half + band;
            track.orientation = u;
            const std::size_t band_size =
                base + (static_cast<std::size_t>(band) < remainder ? 1 : 0);
            for (std::size_t i = 0; i < band_size; ++i)
                track.attach_points.emplace_back(
                    qubits[cursor++], i * static_cast<std::size_t>(stages_per_attach));
            track.stage_count = band_size == 0
                                    ? 0
                                    : (band_size - 1) * static_cast<std::size_t>(stages_per_attach) + 1;
            layout.tracks.push_back(std::move(track));
        }
    }

    for (auto& track : layout.tracks) {
        for (const auto& [q, stage] : track.attach_points) {
            const std::size_t from_low = stage;
            const std::size_t from_high = track.stage_count - 1 - stage;
            layout.routing[q] = Route{track.id,
                                      from_low <= from_high ? TrackEnd::low : TrackEnd::high};
        }
    }
    return layout;
}

ReadoutLayout serpentine_baseline(const TopologyGraph& g) {
    ReadoutLayout layout;
    for (int u = 0; u < 2; ++u) {
        // Boustrophedon sweep over the whole fabric: z ascending, w direction
        // alternating with z, k ascending.  Spacing between consecutive
        // attach points is the grid distance between qubit midpoints.
        std::vector<QubitCoordinate> order;
        for (int z = 0; z < g.m - 1; ++z) {
            if (z % 2 == 0)
                for (int w = 0; w < g.m; ++w)
                    for (int k = 0; k < topology::kTilePitch; ++k) order.push_back({u, w, k, z});
            else
                for (int w = g.m - 1; w >= 0; --w)
                    for (int k = 0; k < topology::kTilePitch; ++k) order.push_back({u, w, k, z});
        }

        const auto midpoint = [&](const QubitCoordinate& q) {
            const auto seg = segment_of(q, g.offsets);
            return std::pair<int, int>{seg.axis_position, seg.span_start + 6};
        };

        Track track;
        track.id = u;
        track.orientation = u;
        std::size_t position = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i > 0) {
                const auto [x0, y0] = midpoint(order[i - 1]);
                const auto [x1, y1] = midpoint(order[i]);
                const int dist = std::abs(x1 - x0) + std::abs(y1 - y0);
                position += static_cast<std::size_t>(std::max(1, dist));
            }
            track.attach_points.emplace_back(order[i], position);
        }
        track.stage_count = order.empty() ? 0 : position + 1;
        std::sort(track.attach_points.begin(), track.attach_points.end());
        layout.tracks.push_back(std::move(track));
    }

    for (auto& track : layout.tracks) {
        for (const auto& [q, stage] : track.attach_points) {
            const std::size_t from_low = stage;
            const std::size_t from_high = track.stage_count - 1 - stage;
            layout.routing[q] = Route{track.id,
                                      from_low <= from_high ? TrackEnd::low : TrackEnd::high};
        }
    }
    return layout;
}

void ClockProgram::validate() const {
    if (!(clock_hz > 0.0)) throw std::invalid_argument("clock rate must be positive");
    if (phases_per_shift < 1) throw std::invalid_argument("phases per shift must be >= 1");
}

std::vector<ReadoutEvent> simulate_readout(const ReadoutLayout& layout,
                                           const std::map<QubitCoordinate, int>& states,
                                           const ClockProgram& clock) {
    clock.validate();
    const double bit_period = clock.bit_period_s();

    struct Bit {
        std::size_t stage;
        QubitCoordinate qubit;
        int value;
    };

    std::vector<ReadoutEvent> events;
    for (const auto& track : layout.tracks) {
        // One lane per shift direction; bits in a lane move in lockstep.
        std::vector<Bit> toward_low, toward_high;
        for (const auto& [q, stage] : track.attach_points) {
            const auto state = states.find(q);
            if (state == states.end())
                throw std::invalid_argument("no state supplied for attached qubit " + q.name());
            if (state->second != 0 && state->second != 1)
                throw std::invalid_argument("state of " + q.name() + " must be 0 or 1");
            const auto route = layout.routing.find(q);
            if (route == layout.routing.end() || route->second.track != track.id)
                throw std::invalid_argument("qubit " + q.name() + " lacks a route on track " +
                                            std::to_string(track.id));
            (route->second.end == TrackEnd::low ? toward_low : toward_high)
                .push_back(Bit{stage, q, state->second});
        }

        for (auto* lane : {&toward_low, &toward_high}) {
            const bool to_low = lane == &toward_low;
            std::sort(lane->begin(), lane->end(),
                      [](const Bit& a, const Bit& b) { return a.stage < b.stage; });
            for (std::size_t i = 0; i + 1 < lane->size(); ++i)
                if ((*lane)[i].stage == (*lane)[i + 1].stage)
                    throw std::logic_error("two bits share a stage on track " +
                                           std::to_string(track.id));
            std::size_t tick = 0;
            while (!lane->empty()) {
                // Emit bits that reached their resonator, shift the rest.
                auto it = lane->begin();
                while (it != lane->end()) {
                    const bool arrived =
                        to_low ? it->stage == 0 : it->stage == track.stage_count - 1;
                    if (arrived) {
                        events.push_back(ReadoutEvent{
                            static_cast<double>(tick) * bit_period,
                            to_low ? track.resonator_low() : track.resonator_high(), it->value,
                            it->qubit});
                        it = lane->erase(it);
                    } else {
                        ++it;
                    }
                }
                for (auto& bit : *lane) {
                    if (to_low)
                        --bit.stage;
                    else
                        ++bit.stage;
                }
                for (std::size_t i = 0; i + 1 < lane->size(); ++i)
                    if ((*lane)[i].stage == (*lane)[i + 1].stage)
                        throw std::logic_error("shift collision on track " +
                                               std::to_string(track.id));
                ++tick;
            }
        }
    }

    std::sort(events.begin(), events.end(), [](const ReadoutEvent& a, const ReadoutEvent& b) {
        if (a.time_s != b.time_s) return a.time_s < b.time_s;
        if (a.resonator != b.resonator) return a.resonator < b.resonator;
        return a.qubit < b.qubit;
    });
    return events;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string events_csv(const std::vector<ReadoutEvent>& events) {
    std::string out = "time_s,resonator,bit,qubit\n";
    for (const auto& e : events) {
        append_double(out, e.time_s);
        out += ',' + std::to_string(e.resonator) + ',' + std::to_string(e.bit) + ',' +
               e.qubit.name() + '\n';
    }
    return out;
}

ReadoutTiming readout_time(const ReadoutLayout& layout, const ClockProgram& clock) {
    clock.validate();
    ReadoutTiming timing;
    timing.per_track_s.resize(layout.tracks.size(), 0.0);
    for (std::size_t i = 0; i < layout.tracks.size(); ++i) {
        const auto& track = layout.tracks[i];
        std::size_t worst = 0;
        bool any = false;
        for (const auto& [q, stage] : track.attach_points) {
            (void)stage;
            worst = std::max(worst, layout.shift_distance(q));
            any = true;
        }
        timing.per_track_s[i] = any ? static_cast<double>(worst) * clock.bit_period_s() : 0.0;
        timing.total_s = std::max(timing.total_s, timing.per_track_s[i]);
    }
    return timing;
}

double compare_layout_lengths(const ReadoutLayout& a, const ReadoutLayout& b) {
    const auto sa = a.total_stage_count();
    const auto sb = b.total_stage_count();
    if (sa == 0 || sb == 0) throw std::invalid_argument("cannot compare an empty layout");
    return static_cast<double>(sa) / static_cast<double>(sb);
}

nlohmann::json ReadoutLayout::to_json() const {
    nlohmann::json doc;
    auto& tracks_json = doc["tracks"] = nlohmann::json::array();
    for (const auto& t : tracks) {
        nlohmann::json tj;
        tj["id"] = t.id;
        tj["orientation"] = orientation_name(t.orientation);
        tj["stage_count"] = t.stage_count;
        auto& attach = tj["attach"] = nlohmann::json::array();
        for (const auto& [q, stage] : t.attach_points)
            attach.push_back({{"qubit", {q.orientation, q.w, q.k, q.z}}, {"stage", stage}});
        tracks_json.push_back(std::move(tj));
    }
    auto& routes = doc["routing"] = nlohmann::json::array();
    for (const auto& [q, route] : routing)
        routes.push_back({{"qubit", {q.orientation, q.w, q.k, q.z}},
                          {"track", route.track},
                          {"end", to_string(route.end)}});
    return doc;
}

ReadoutLayout ReadoutLayout::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("layout document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tracks") || !doc.contains("routing"))
        throw std::invalid_argument("layout document must carry tracks and routing");

    const auto parse_coordinate = [](const nlohmann::json& j) {
        if (!j.is_array() || j.size() != 4)
            throw std::invalid_argument("qubit must be a 4-element coordinate array");
        return QubitCoordinate{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
    };

    ReadoutLayout layout;
    std::set<int> ids;
    std::set<QubitCoordinate> attached;
    for (const auto& tj : doc["tracks"]) {
        Track t;
        t.id = tj.at("id").get<int>();
        if (!ids.insert(t.id).second)
            throw std::invalid_argument("duplicate track id " + std::to_string(t.id));
        t.orientation = orientation_from_name(tj.at("orientation").get<std::string>());
        t.stage_count = tj.at("stage_count").get<std::size_t>();
        std::set<std::size_t> stages;
        for (const auto& aj : tj.at("attach")) {
            const auto q = parse_coordinate(aj.at("qubit"));
            const auto stage = aj.at("stage").get<std::size_t>();
            if (stage >= t.stage_count)
                throw std::invalid_argument("attach stage beyond track " + std::to_string(t.id));
            if (!stages.insert(stage).second)
                throw std::invalid_argument("two qubits attached to one stage of track " +
                                            std::to_string(t.id));
            if (!attached.insert(q).second)
                throw std::invalid_argument("qubit " + q.name() + " attached twice");
            t.attach_points.emplace_back(q, stage);
        }
        std::sort(t.attach_points.begin(), t.attach_points.end());
        layout.tracks.push_back(std::move(t));
    }
    std::sort(layout.tracks.begin(), layout.tracks.end(),
              [](const Track& a, const Track& b) { return a.id < b.id; });

    for (const auto& rj : doc["routing"]) {
        const auto q = parse_coordinate(rj.at("qubit"));
        Route route;
        route.track = rj.at("track").get<int>();
        route.end = track_end_from_string(rj.at("end").get<std::string>());
        if (!ids.count(route.track))
            throw std::invalid_argument("route references unknown track " +
                                        std::to_string(route.track));
        if (!attached.count(q))
            throw std::invalid_argument("route references unattached qubit " + q.name());
        layout.routing[q] = route;
    }
    for (const auto& q : attached)
        if (!layout.routing.count(q))
            throw std::invalid_argument("attached qubit " + q.name() + " has no route");
    return layout;
}

nlohmann::json ResonatorPlan::to_json() const {
    nlohmann::json doc;
    doc["band"] = {band_lo_hz, band_hi_hz};
    doc["min_spacing"] = min_spacing_hz;
    auto& list = doc["resonators"] = nlohmann::json::array();
    for (const auto& r : resonators)
        list.push_back({{"id", r.id}, {"feedline", r.feedline}, {"frequency", r.frequency_hz}});
    return doc;
}

ResonatorPlan allocate_frequencies(int n_resonators, double f_lo, double f_hi,
                                   double min_spacing) {
    if (n_resonators < 1) throw std::invalid_argument("need at least one resonator");
    if (!(f_hi >= f_lo)) throw std::invalid_argument("band must satisfy f_hi >= f_lo");
    if (min_spacing < 0.0) throw std::invalid_argument("minimum spacing must be nonnegative");

    const double width = f_hi - f_lo;
    const int fuller_line = (n_resonators + 1) / 2;
    const double needed = static_cast<double>(fuller_line - 1) * min_spacing;
    if (needed > width)
        throw capacity_error("band of " + std::to_string(width) + " Hz cannot fit " +
                                 std::to_string(fuller_line) + " resonators at " +
                                 std::to_string(min_spacing) + " Hz spacing",
                             needed - width);

    ResonatorPlan plan;
    plan.band_lo_hz = f_lo;
    plan.band_hi_hz = f_hi;
    plan.min_spacing_hz = min_spacing;
    const int line_counts[2] = {fuller_line, n_resonators / 2};
    for (int id = 0; id < n_resonators; ++id) {
        const int line = id % 2;
        const int index = id / 2;
        const int count = line_counts[line];
        const double freq =
            count == 1 ? f_lo
                       : f_lo + width * (static_cast<double>(index) / static_cast<double>(count - 1));
        plan.resonators.push_back(ResonatorPlan::Entry{id, line, freq});
    }
    return plan;
}

}  // namespace qfabric::readout
