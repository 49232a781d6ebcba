#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfabric/errors.hpp"
#include "qfabric/topology.hpp"

namespace qfabric::readout {

using topology::QubitCoordinate;
using topology::TopologyGraph;

enum class TrackEnd { low, high };

const char* to_string(TrackEnd end);

/// One shift-register track: a line of stages with a sense resonator at each
/// end.  Attach points pin qubits to stages; stage indices grow from the low
/// end.
struct Track {
    int id = 0;
    int orientation = 0;  ///< orientation of the qubits this track serves
    std::size_t stage_count = 0;
    std::vector<std::pair<QubitCoordinate, std::size_t>> attach_points;  ///< sorted by qubit

    int resonator_low() const { return 2 * id; }
    int resonator_high() const { return 2 * id + 1; }
};

struct Route {
    int track = 0;
    TrackEnd end = TrackEnd::low;
};

/// Tracks plus the per-qubit shift direction.  Every attached qubit routes
/// to its nearer track end, ties resolved to the low end.
struct ReadoutLayout {
    std::vector<Track> tracks;
    std::map<QubitCoordinate, Route> routing;

    std::size_t total_stage_count() const;

    /// Stages a qubit's bit traverses before reaching its resonator.
    std::size_t shift_distance(const QubitCoordinate& q) const;

    nlohmann::json to_json() const;
    static ReadoutLayout from_json(const std::string& text);
};

/**
 * Column-parallel layout: each orientation's qubits, in coordinate order,
 * are split into tracks_total/2 contiguous bands, one track per band, with
 * one attach point per qubit every stages_per_attach stages.
 * tracks_total must be even and >= 2.
 */
ReadoutLayout build_layout(const TopologyGraph& g, int tracks_total, int stages_per_attach = 1);

/**
 * Single-register baseline: one long track per orientation threading every
 * qubit in a boustrophedon sweep (z ascending; w alternating direction;
 * k ascending), with inter-attach spacing equal to the grid distance between
 * consecutive qubit midpoints.  Models the cost of reading a whole fabric
 * through two registers.
 */
ReadoutLayout serpentine_baseline(const TopologyGraph& g);

/// Shift clocking: phases_per_shift clock edges move every bit one stage.
struct ClockProgram {
    double clock_hz = 30e6;
    int phases_per_shift = 3;

    void validate() const;
    double bit_period_s() const { return static_cast<double>(phases_per_shift) / clock_hz; }
    double bit_rate_hz() const { return clock_hz / static_cast<double>(phases_per_shift); }
};

struct ReadoutEvent {
    double time_s = 0.0;
    int resonator = 0;
    int bit = 0;
    QubitCoordinate qubit;
};

/**
 * Lockstep shift simulation: every bit moves one stage toward its resonator
 * each bit period and is emitted on arrival.  states must cover every
 * attached qubit.  Events come back sorted by (time, resonator, qubit); two
 * bits never occupy the same stage of the same track and direction.
 */
std::vector<ReadoutEvent> simulate_readout(const ReadoutLayout& layout,
                                           const std::map<QubitCoordinate, int>& states,
                                           const ClockProgram& clock);

/// "time_s,resonator,bit,qubit" rows in event order.
std::string events_csv(const std::vector<ReadoutEvent>& events);

struct ReadoutTiming {
    double total_s = 0.0;
    std::vector<double> per_track_s;  ///< indexed by track id
};

/// Worst-case drain time: the longest routed shift distance, per track and
/// overall, times the bit period.  Equals the final event time of a full
/// simulation exactly.
ReadoutTiming readout_time(const ReadoutLayout& layout, const ClockProgram& clock);

/// Total stage count of a over that of b; throws on an empty layout.
double compare_layout_lengths(const ReadoutLayout& a, const ReadoutLayout& b);

/// Frequency-multiplexed resonator assignment over two feedlines.
struct ResonatorPlan {
    double band_lo_hz = 0.0;
    double band_hi_hz = 0.0;
    double min_spacing_hz = 0.0;

    struct Entry {
        int id = 0;
        int feedline = 0;
        double frequency_hz = 0.0;
    };
    std::vector<Entry> resonators;  ///< sorted by id

    nlohmann::json to_json() const;
};

/**
 * Spread n resonators across two feedlines (even ids on line 0, odd on
 * line 1) with per-line uniform spacing over [f_lo, f_hi].  Throws
 * capacity_error carrying the missing bandwidth when the fuller line cannot
 * respect min_spacing.
 */
ResonatorPlan allocate_frequencies(int n_resonators, double f_lo, double f_hi,
                                   double min_spacing);

}  // namespace qfabric::readout
