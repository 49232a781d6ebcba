#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qfabric/topology.hpp"

namespace qfabric::embedding {

using topology::QubitCoordinate;
using topology::TopologyGraph;

/**
 * Ising problem over logical variables 0..n-1: linear terms h and a sparse
 * upper-triangular coupling map J.  Keys are (i, j) with i < j; a diagonal
 * or out-of-range index is rejected at construction.
 */
struct IsingProblem {
    std::vector<double> h;
    std::map<std::pair<int, int>, double> j;

    std::size_t num_variables() const { return h.size(); }

    /// Throws std::invalid_argument on bad indices, diagonals, or duplicates.
    void validate() const;

    /// Parse {"h": [...], "J": [[i, j, value], ...]}.
    static IsingProblem from_json(const std::string& text);
    nlohmann::json to_json() const;
};

/// Map from logical variable to its chain of physical qubits.  Chains are
/// stored sorted and deduplicated; whether they are valid against a graph
/// and problem is the job of validate_embedding.
struct Embedding {
    std::map<int, std::vector<QubitCoordinate>> chains;

    /// Parse {"<variable>": [[orientation, w, k, z], ...], ...}.
    static Embedding from_json(const std::string& text);
    nlohmann::json to_json() const;
};

enum class ViolationKind {
    missing_chain,       ///< problem variable has no chain
    empty_chain,         ///< chain present but empty
    unknown_variable,    ///< chain for a variable the problem does not define
    unknown_vertex,      ///< chain references a coordinate outside the graph
    overlapping_chains,  ///< two chains share a physical qubit
    disconnected_chain,  ///< chain's induced subgraph is not connected
    missing_coupler      ///< no physical coupler realizes a nonzero J term
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string message;
};

/// Outcome of validate_embedding; structurally broken inputs are reported
/// here rather than thrown.
struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

/**
 * Check the three textbook minor-embedding conditions (chain connectivity,
 * chain disjointness, coupler coverage of every nonzero J term) plus the
 * structural ones above.  Never throws on bad embeddings; every defect
 * becomes a Violation.
 */
ValidationReport validate_embedding(const TopologyGraph& g, const IsingProblem& p,
                                    const Embedding& e);

struct ChainStatistics {
    std::size_t max_length = 0;
    double mean_length = 0.0;
    std::map<std::size_t, std::size_t> length_histogram;
};

/// Statistics over all chains in the embedding; an empty embedding yields zeros.
ChainStatistics chain_statistics(const Embedding& e);

/**
 * Effective coupling available to a logical variable spread over a chain:
 * the physical scale divided by the chain length.  chain_length must be
 * >= 1 and physical_scale > 0.
 */
double logical_energy_scale(std::size_t chain_length, double physical_scale);

/// Machine-readable report combining validation, chain statistics, and
/// per-variable logical energy scales at the given physical scale.
nlohmann::json embedding_report(const TopologyGraph& g, const IsingProblem& p, const Embedding& e,
                                double physical_scale = 1.0);

}  // namespace qfabric::embedding
