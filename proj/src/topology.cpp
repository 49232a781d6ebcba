#include "qfabric/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace qfabric::topology {

std::string QubitCoordinate::name() const {
    return "q" + std::to_string(orientation) + "_" + std::to_string(w) + "_" +
           std::to_string(k) + "_" + std::to_string(z);
}

OffsetTable OffsetTable::defaults() {
    OffsetTable t;
    t.vertical = {2, 2, 2, 2, 6, 6, 6, 6, 10, 10, 10, 10};
    t.horizontal = {6, 6, 6, 6, 10, 10, 10, 10, 2, 2, 2, 2};
    return t;
}

void OffsetTable::validate() const {
    for (const auto* table : {&vertical, &horizontal}) {
        for (int v : *table) {
            if (v < 0 || v >= kTilePitch)
                throw std::invalid_argument("offset out of range [0, 12): " + std::to_string(v));
        }
        // Odd-pair members must agree or the paired qubits would not overlap
        // along their full bodies.
        for (int j = 0; j < kTilePitch; j += 2) {
            if ((*table)[static_cast<std::size_t>(j)] != (*table)[static_cast<std::size_t>(j + 1)])
                throw std::invalid_argument("offset pair (" + std::to_string(j) + ", " +
                                            std::to_string(j + 1) + ") differs");
        }
    }
}

QubitSegment segment_of(const QubitCoordinate& q, const OffsetTable& offsets) {
    QubitSegment s;
    s.axis_position = kTilePitch * q.w + q.k;
    s.span_start = kTilePitch * q.z + offsets.of(q.orientation, q.k);
    s.span_end = s.span_start + kTilePitch;
    return s;
}

bool segments_cross(const QubitSegment& a, const QubitSegment& b, bool perpendicular) {
    if (!perpendicular) return false;
    return b.span_start <= a.axis_position && a.axis_position < b.span_end &&
           a.span_start <= b.axis_position && b.axis_position < a.span_end;
}

const char* to_string(CouplerKind kind) {
    switch (kind) {
        case CouplerKind::internal: return "internal";
        case CouplerKind::external: return "external";
        case CouplerKind::odd: return "odd";
    }
    throw std::logic_error("unreachable coupler kind");
}

CouplerKind coupler_kind_from_string(const std::string& s) {
    if (s == "internal") return CouplerKind::internal;
    if (s == "external") return CouplerKind::external;
    if (s == "odd") return CouplerKind::odd;
    throw std::invalid_argument("unknown coupler kind: " + s);
}

bool TopologyGraph::contains(const QubitCoordinate& q) const {
    return (q.orientation == 0 || q.orientation == 1) && q.w >= 0 && q.w < m && q.k >= 0 &&
           q.k < kTilePitch && q.z >= 0 && q.z < m - 1;
}

std::size_t TopologyGraph::vertex_index(const QubitCoordinate& q) const {
    if (!contains(q)) throw std::invalid_argument("coordinate " + q.name() + " not in graph");
    auto idx = ((static_cast<std::size_t>(q.orientation) * static_cast<std::size_t>(m) +
                 static_cast<std::size_t>(q.w)) *
                    kTilePitch +
                static_cast<std::size_t>(q.k)) *
                   static_cast<std::size_t>(m - 1) +
               static_cast<std::size_t>(q.z);
    return idx;
}

namespace {

Coupler make_coupler(CouplerKind kind, QubitCoordinate a, QubitCoordinate b) {
    if (b < a) std::swap(a, b);
    return Coupler{kind, a, b};
}

}  // namespace

TopologyGraph build_topology(int m, const OffsetTable& offsets) {
    if (m < 2) throw std::invalid_argument("size parameter m must be >= 2, got " + std::to_string(m));
    offsets.validate();

    TopologyGraph g;
    g.m = m;
    g.offsets = offsets;

    g.vertices.reserve(static_cast<std::size_t>(24 * m * (m - 1)));
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w)
            for (int k = 0; k < kTilePitch; ++k)
                for (int z = 0; z < m - 1; ++z) g.vertices.push_back({u, w, k, z});

    // Internal couplers: walk each vertical body and enumerate the 12
    // perpendicular tracks it spans; the horizontal partner on track (wp, kp)
    // exists iff its own span covers our axis position, i.e. its z solves
    // 12*z + offset <= x < 12*z + offset + 12.
    for (int w = 0; w < m; ++w) {
        for (int k = 0; k < kTilePitch; ++k) {
            const int x = kTilePitch * w + k;
            for (int z = 0; z < m - 1; ++z) {
                const QubitCoordinate v{0, w, k, z};
                const int y0 = kTilePitch * z + offsets.of(0, k);
                for (int y = y0; y < y0 + kTilePitch; ++y) {
                    const int wp = y / kTilePitch;
                    const int kp = y % kTilePitch;
                    const int rel = x - offsets.of(1, kp);
                    if (rel < 0) continue;
                    const int zp = rel / kTilePitch;
                    if (zp >= m - 1) continue;
                    g.edges.push_back(make_coupler(CouplerKind::internal, v, {1, wp, kp, zp}));
                }
            }
        }
    }

    // External couplers: same track, adjacent along the body.
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w)
            for (int k = 0; k < kTilePitch; ++k)
                for (int z = 0; z + 1 < m - 1; ++z)
                    g.edges.push_back(
                        make_coupler(CouplerKind::external, {u, w, k, z}, {u, w, k, z + 1}));

    // Odd couplers: tracks 2j and 2j+1 of the same tile, same z.
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w)
            for (int k = 0; k < kTilePitch; k += 2)
                for (int z = 0; z < m - 1; ++z)
                    g.edges.push_back(make_coupler(CouplerKind::odd, {u, w, k, z}, {u, w, k + 1, z}));

    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::vector<std::vector<std::uint32_t>> adjacency(const TopologyGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.vertices.size());
    for (const auto& e : g.edges) {
        const auto ia = static_cast<std::uint32_t>(g.vertex_index(e.a));
        const auto ib = static_cast<std::uint32_t>(g.vertex_index(e.b));
        adj[ia].push_back(ib);
        adj[ib].push_back(ia);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
}

namespace {

// Coupling point of an edge, doubled so odd midpoints stay integral.
// Returns (2x, 2y) where x runs along vertical axis positions and y along
// horizontal ones.
std::pair<int, int> coupling_point_doubled(const TopologyGraph& g, const Coupler& e) {
    const auto sa = segment_of(e.a, g.offsets);
    const auto sb = segment_of(e.b, g.offsets);
    switch (e.kind) {
        case CouplerKind::internal: {
            // a is vertical, b horizontal after canonical ordering.
            return {2 * sa.axis_position, 2 * sb.axis_position};
        }
        case CouplerKind::external: {
            // Shared boundary of the two spans; a has the lower z.
            const int boundary = sa.span_end;
            if (e.a.orientation == 0) return {2 * sa.axis_position, 2 * boundary};
            return {2 * boundary, 2 * sa.axis_position};
        }
        case CouplerKind::odd: {
            // Midpoint between the two parallel bodies, halfway along the span.
            const int perp2 = sa.axis_position + sb.axis_position;
            const int along2 = sa.span_start + sa.span_end;
            if (e.a.orientation == 0) return {perp2, along2};
            return {along2, perp2};
        }
    }
    throw std::logic_error("unreachable coupler kind");
}

// Tile band of a doubled coordinate.  Odd couplers sitting exactly on a tile
// boundary belong to the lower tile; the half-open tile convention already
// covers every other case.
int band_of(int doubled, bool tie_to_lower) {
    const int pitch2 = 2 * kTilePitch;
    if (tie_to_lower && doubled % pitch2 == 0 && doubled > 0) return doubled / pitch2 - 1;
    return doubled / pitch2;
}

}  // namespace

TileCensus tile_census(const TopologyGraph& g, int tile_row, int tile_col) {
    if (tile_row < 0 || tile_row >= g.m || tile_col < 0 || tile_col >= g.m)
        throw std::invalid_argument("tile (" + std::to_string(tile_row) + ", " +
                                    std::to_string(tile_col) + ") outside grid of size " +
                                    std::to_string(g.m));
    TileCensus census;
    for (const auto& e : g.edges) {
        const auto [x2, y2] = coupling_point_doubled(g, e);
        const bool tie = e.kind == CouplerKind::odd;
        if (band_of(x2, tie) != tile_row || band_of(y2, tie) != tile_col) continue;
        switch (e.kind) {
            case CouplerKind::internal: ++census.internal_count; break;
            case CouplerKind::external: ++census.external_count; break;
            case CouplerKind::odd: ++census.odd_count; break;
        }
    }
    return census;
}

std::map<int, std::size_t> degree_histogram(const TopologyGraph& g) {
    std::map<int, std::size_t> hist;
    for (const auto& row : adjacency(g)) ++hist[static_cast<int>(row.size())];
    return hist;
}

namespace {

template <typename Visit>
void for_each_triangle(const TopologyGraph& g, Visit&& visit) {
    const auto adj = adjacency(g);
    for (const auto& e : g.edges) {
        const auto ia = static_cast<std::uint32_t>(g.vertex_index(e.a));
        const auto ib = static_cast<std::uint32_t>(g.vertex_index(e.b));
        const auto& na = adj[ia];
        const auto& nb = adj[ib];
        // Common neighbors above max(ia, ib) count each triangle once.
        const auto floor_id = std::max(ia, ib);
        auto it_a = std::upper_bound(na.begin(), na.end(), floor_id);
        auto it_b = std::upper_bound(nb.begin(), nb.end(), floor_id);
        while (it_a != na.end() && it_b != nb.end()) {
            if (*it_a < *it_b) {
                ++it_a;
            } else if (*it_b < *it_a) {
                ++it_b;
            } else {
                if (!visit(std::min(ia, ib), floor_id, *it_a)) return;
                ++it_a;
                ++it_b;
            }
        }
    }
}

}  // namespace

long long triangle_count(const TopologyGraph& g) {
    long long count = 0;
    for_each_triangle(g, [&](std::uint32_t, std::uint32_t, std::uint32_t) {
        ++count;
        return true;
    });
    return count;
}

std::vector<std::array<QubitCoordinate, 3>> find_triangles(const TopologyGraph& g,
                                                           std::size_t limit) {
    std::vector<std::array<QubitCoordinate, 3>> out;
    if (limit == 0) return out;
    for_each_triangle(g, [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        out.push_back({g.vertices[a], g.vertices[b], g.vertices[c]});
        return out.size() < limit;
    });
    return out;
}

ExportFormat export_format_from_string(const std::string& s) {
    if (s == "json") return ExportFormat::json;
    if (s == "dot") return ExportFormat::dot;
    if (s == "edgelist") return ExportFormat::edgelist;
    throw std::invalid_argument("unknown export format: " + s);
}

namespace {

nlohmann::json coordinate_to_json(const QubitCoordinate& q) {
    return nlohmann::json::array({q.orientation, q.w, q.k, q.z});
}

QubitCoordinate coordinate_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("coordinate must be a 4-element array");
    for (const auto& v : j)
        if (!v.is_number_integer()) throw std::invalid_argument("coordinate entries must be integers");
    return QubitCoordinate{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace

std::string export_graph(const TopologyGraph& g, ExportFormat format) {
    switch (format) {
        case ExportFormat::json: {
            nlohmann::json doc;
            doc["m"] = g.m;
            doc["offsets"]["vertical"] = g.offsets.vertical;
            doc["offsets"]["horizontal"] = g.offsets.horizontal;
            auto& verts = doc["vertices"] = nlohmann::json::array();
            for (const auto& q : g.vertices) verts.push_back(coordinate_to_json(q));
            auto& edges = doc["edges"] = nlohmann::json::array();
            for (const auto& e : g.edges)
                edges.push_back({{"kind", to_string(e.kind)},
                                 {"a", coordinate_to_json(e.a)},
                                 {"b", coordinate_to_json(e.b)}});
            return doc.dump(2) + "\n";
        }
        case ExportFormat::dot: {
            std::string out = "graph fabric {\n";
            for (const auto& e : g.edges) {
                out += "  \"" + e.a.name() + "\" -- \"" + e.b.name() + "\" [kind=\"" +
                       to_string(e.kind) + "\"];\n";
            }
            out += "}\n";
            return out;
        }
        case ExportFormat::edgelist: {
            std::string out;
            for (const auto& e : g.edges)
                out += e.a.name() + " " + e.b.name() + " " + to_string(e.kind) + "\n";
            return out;
        }
    }
    throw std::logic_error("unreachable export format");
}

TopologyGraph import_graph_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("graph document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("graph document must be a JSON object");
    for (const char* key : {"m", "offsets", "vertices", "edges"})
        if (!doc.contains(key))
            throw std::invalid_argument(std::string("graph document missing key: ") + key);

    TopologyGraph g;
    g.m = doc["m"].get<int>();
    if (g.m < 2) throw std::invalid_argument("graph document has m < 2");

    const auto& off = doc["offsets"];
    for (const char* key : {"vertical", "horizontal"}) {
        if (!off.contains(key) || !off[key].is_array() || off[key].size() != kTilePitch)
            throw std::invalid_argument("offsets must carry 12-entry vertical/horizontal arrays");
    }
    for (std::size_t i = 0; i < kTilePitch; ++i) {
        g.offsets.vertical[i] = off["vertical"][i].get<int>();
        g.offsets.horizontal[i] = off["horizontal"][i].get<int>();
    }
    g.offsets.validate();

    for (const auto& jq : doc["vertices"]) {
        const auto q = coordinate_from_json(jq);
        if (!g.contains(q)) throw std::invalid_argument("vertex " + q.name() + " out of range");
        g.vertices.push_back(q);
    }
    std::sort(g.vertices.begin(), g.vertices.end());
    if (std::adjacent_find(g.vertices.begin(), g.vertices.end()) != g.vertices.end())
        throw std::invalid_argument("duplicate vertex in graph document");
    if (g.vertices.size() != static_cast<std::size_t>(24 * g.m * (g.m - 1)))
        throw std::invalid_argument("graph document vertex set is incomplete");

    std::unordered_set<std::string> seen;
    for (const auto& je : doc["edges"]) {
        if (!je.is_object() || !je.contains("kind") || !je.contains("a") || !je.contains("b"))
            throw std::invalid_argument("edge entries must carry kind, a, b");
        auto e = make_coupler(coupler_kind_from_string(je["kind"].get<std::string>()),
                              coordinate_from_json(je["a"]), coordinate_from_json(je["b"]));
        if (!g.contains(e.a) || !g.contains(e.b))
            throw std::invalid_argument("edge endpoint out of range");
        if (e.a == e.b) throw std::invalid_argument("self-loop in graph document");
        if (!seen.insert(e.a.name() + "|" + e.b.name()).second)
            throw std::invalid_argument("duplicate edge in graph document");
        g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

}  // namespace qfabric::topology
