#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace qfabric::topology {

/// Tile pitch in grid units; also the number of parallel tracks per tile
/// and the span of every qubit body.
inline constexpr int kTilePitch = 12;

/**
 * Canonical name of a qubit in the tiled fabric.
 *
 * orientation 0 is a vertical qubit body, 1 a horizontal one.  w indexes the
 * tile row/column perpendicular to the body, k the track within that tile,
 * and z the tile offset along the body.  Comparison is lexicographic over
 * (orientation, w, k, z), which fixes the canonical vertex order everywhere.
 */
struct QubitCoordinate {
    int orientation = 0;  ///< 0 = vertical, 1 = horizontal
    int w = 0;            ///< perpendicular tile offset, [0, m)
    int k = 0;            ///< track index within the tile, [0, 12)
    int z = 0;            ///< parallel tile offset, [0, m-1)

    auto operator<=>(const QubitCoordinate&) const = default;

    /// Compact display form "q<orientation>_<w>_<k>_<z>".
    std::string name() const;
};

/**
 * Per-track span offsets, one entry per track index and orientation.
 * Members of an odd pair (tracks 2j and 2j+1) must carry equal offsets so
 * that paired qubits are geometrically parallel and fully overlapping.
 */
struct OffsetTable {
    std::array<int, 12> vertical{};
    std::array<int, 12> horizontal{};

    /// The shipped table; any table satisfying the pair constraint works.
    static OffsetTable defaults();

    int of(int orientation, int k) const {
        return orientation == 0 ? vertical[static_cast<std::size_t>(k)]
                                : horizontal[static_cast<std::size_t>(k)];
    }

    /// Throws std::invalid_argument on out-of-range offsets or unequal pairs.
    void validate() const;

    bool operator==(const OffsetTable&) const = default;
};

/// Geometric realization of a qubit body: a unit-width segment spanning
/// exactly 12 grid units, at a fixed perpendicular position.
struct QubitSegment {
    int axis_position = 0;  ///< fixed coordinate of the long body
    int span_start = 0;     ///< inclusive
    int span_end = 0;       ///< exclusive; span_end - span_start == 12
};

/// Segment of a coordinate under a given offset table.
QubitSegment segment_of(const QubitCoordinate& q, const OffsetTable& offsets);

/**
 * True iff two segments of perpendicular qubits cross.  Half-open interval
 * containment on both axes, so a body crosses exactly 12 perpendicular
 * tracks.  Total function; `perpendicular` must be supplied by the caller
 * (true iff the underlying orientations differ).
 */
bool segments_cross(const QubitSegment& a, const QubitSegment& b, bool perpendicular);

enum class CouplerKind { internal, external, odd };

const char* to_string(CouplerKind kind);
CouplerKind coupler_kind_from_string(const std::string& s);

/// Typed coupler; endpoints are stored with a < b and order edges.
struct Coupler {
    CouplerKind kind = CouplerKind::internal;
    QubitCoordinate a, b;

    bool operator==(const Coupler&) const = default;
    auto operator<=>(const Coupler& other) const {
        return std::tie(a, b, kind) <=> std::tie(other.a, other.b, other.kind);
    }
};

/**
 * The generated fabric graph: every coordinate in range is a vertex, and the
 * edge list carries every internal (crossing), external (colinear-adjacent)
 * and odd (paired-track) coupler.  Vertices are in lexicographic order and
 * edges are sorted by endpoints, so identical inputs produce byte-identical
 * exports.  Immutable after construction.
 */
struct TopologyGraph {
    int m = 0;
    OffsetTable offsets;
    std::vector<QubitCoordinate> vertices;
    std::vector<Coupler> edges;

    bool contains(const QubitCoordinate& q) const;

    /// Rank of q in the lexicographic vertex order; throws if out of range.
    std::size_t vertex_index(const QubitCoordinate& q) const;
};

/**
 * Build the degree-15 tiled topology of size parameter m (m >= 2).
 * Throws std::invalid_argument for m < 2 or an invalid offset table.
 * Pure function: identical inputs yield identical graphs.
 */
TopologyGraph build_topology(int m, const OffsetTable& offsets = OffsetTable::defaults());

/// Sorted adjacency lists over vertex indices.
std::vector<std::vector<std::uint32_t>> adjacency(const TopologyGraph& g);

struct TileCensus {
    int internal_count = 0;
    int external_count = 0;
    int odd_count = 0;

    bool operator==(const TileCensus&) const = default;
};

/**
 * Count couplers whose coupling point falls in tile (tile_row, tile_col),
 * the square x in [12*tile_row, 12*(tile_row+1)), y in [12*tile_col, ...).
 * Internal couplers count at their crossing point, external couplers at the
 * shared span boundary, odd couplers at the midpoint of the pair's overlap
 * with exact-boundary midpoints assigned to the lower tile.
 * Interior tiles of any valid table count (144, 24, 12).
 */
TileCensus tile_census(const TopologyGraph& g, int tile_row, int tile_col);

/// Histogram degree -> vertex count.
std::map<int, std::size_t> degree_histogram(const TopologyGraph& g);

/// Number of 3-cycles in the graph.
long long triangle_count(const TopologyGraph& g);

/// Up to `limit` triangles, each sorted ascending; deterministic order.
std::vector<std::array<QubitCoordinate, 3>> find_triangles(const TopologyGraph& g,
                                                           std::size_t limit);

enum class ExportFormat { json, dot, edgelist };

ExportFormat export_format_from_string(const std::string& s);

/// Canonical serialization; the json format round-trips through import_graph_json.
std::string export_graph(const TopologyGraph& g, ExportFormat format);

/// Parse a graph previously produced by export_graph(..., json).
TopologyGraph import_graph_json(const std::string& text);

}  // namespace qfabric::topology
