#include "qfabric/embedding.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qfabric::embedding {

void IsingProblem::validate() const {
    const auto n = static_cast<int>(h.size());
    for (const auto& [key, value] : j) {
        const auto [a, b] = key;
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument("coupling (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") references a variable outside 0.." +
                                        std::to_string(n - 1));
        if (a >= b)
            throw std::invalid_argument("coupling keys must satisfy i < j, got (" +
                                        std::to_string(a) + ", " + std::to_string(b) + ")");
        (void)value;
    }
}

IsingProblem IsingProblem::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("problem document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("h") || !doc.contains("J"))
        throw std::invalid_argument("problem document must carry h and J");
    if (!doc["h"].is_array()) throw std::invalid_argument("h must be an array of numbers");

    IsingProblem p;
    for (const auto& v : doc["h"]) {
        if (!v.is_number()) throw std::invalid_argument("h entries must be numbers");
        p.h.push_back(v.get<double>());
    }
    if (!doc["J"].is_array()) throw std::invalid_argument("J must be an array of [i, j, value]");
    for (const auto& entry : doc["J"]) {
        if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() ||
            !entry[1].is_number_integer() || !entry[2].is_number())
            throw std::invalid_argument("J entries must be [i, j, value] triples");
        int a = entry[0].get<int>();
        int b = entry[1].get<int>();
        if (a == b) throw std::invalid_argument("diagonal coupling on variable " + std::to_string(a));
        if (a > b) std::swap(a, b);
        if (!p.j.emplace(std::make_pair(a, b), entry[2].get<double>()).second)
            throw std::invalid_argument("duplicate coupling (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ")");
    }
    p.validate();
    return p;
}

nlohmann::json IsingProblem::to_json() const {
    nlohmann::json doc;
    doc["h"] = h;
    auto& couplings = doc["J"] = nlohmann::json::array();
    for (const auto& [key, value] : j)
        couplings.push_back({key.first, key.second, value});
    return doc;
}

Embedding Embedding::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("embedding document is not valid JSON: ") +
                                    e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("embedding document must be a JSON object");

    Embedding emb;
    for (const auto& [key, chain] : doc.items()) {
        std::size_t pos = 0;
        int variable = 0;
        try {
            variable = std::stoi(key, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != key.size() || variable < 0)
            throw std::invalid_argument("embedding keys must be nonnegative variable ids, got \"" +
                                        key + "\"");
        if (!chain.is_array())
            throw std::invalid_argument("chain for variable " + key + " must be an array");
        std::vector<QubitCoordinate> qubits;
        for (const auto& jq : chain) {
            if (!jq.is_array() || jq.size() != 4)
                throw std::invalid_argument("chain entries must be 4-element coordinate arrays");
            qubits.push_back({jq[0].get<int>(), jq[1].get<int>(), jq[2].get<int>(),
                              jq[3].get<int>()});
        }
        std::sort(qubits.begin(), qubits.end());
        qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
        emb.chains.emplace(variable, std::move(qubits));
    }
    return emb;
}

nlohmann::json Embedding::to_json() const {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [variable, chain] : chains) {
        auto arr = nlohmann::json::array();
        for (const auto& q : chain) arr.push_back({q.orientation, q.w, q.k, q.z});
        doc[std::to_string(variable)] = std::move(arr);
    }
    return doc;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::missing_chain: return "missing_chain";
        case ViolationKind::empty_chain: return "empty_chain";
        case ViolationKind::unknown_variable: return "unknown_variable";
        case ViolationKind::unknown_vertex: return "unknown_vertex";
        case ViolationKind::overlapping_chains: return "overlapping_chains";
        case ViolationKind::disconnected_chain: return "disconnected_chain";
        case ViolationKind::missing_coupler: return "missing_coupler";
    }
    throw std::logic_error("unreachable violation kind");
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json doc;
    doc["valid"] = valid();
    auto& list = doc["violations"] = nlohmann::json::array();
    for (const auto& v : violations)
        list.push_back({{"kind", to_string(v.kind)}, {"message", v.message}});
    return doc;
}

ValidationReport validate_embedding(const TopologyGraph& g, const IsingProblem& p,
                                    const Embedding& e) {
    p.validate();
    ValidationReport report;
    const auto push = [&](ViolationKind kind, std::string message) {
        report.violations.push_back({kind, std::move(message)});
    };

    const auto n = static_cast<int>(p.num_variables());
    for (int v = 0; v < n; ++v) {
        auto it = e.chains.find(v);
        if (it == e.chains.end())
            push(ViolationKind::missing_chain, "variable " + std::to_string(v) + " has no chain");
        else if (it->second.empty())
            push(ViolationKind::empty_chain, "variable " + std::to_string(v) + " has an empty chain");
    }
    for (const auto& [variable, chain] : e.chains) {
        (void)chain;
        if (variable >= n)
            push(ViolationKind::unknown_variable,
                 "chain for variable " + std::to_string(variable) +
                     " which the problem does not define");
    }

    // Per-chain membership restricted to coordinates the graph actually has;
    // everything downstream works on these filtered sets.
    std::map<int, std::set<QubitCoordinate>> members;
    for (const auto& [variable, chain] : e.chains) {
        auto& set = members[variable];
        for (const auto& q : chain) {
            if (!g.contains(q)) {
                push(ViolationKind::unknown_vertex, "chain for variable " + std::to_string(variable) +
                                                        " references " + q.name() +
                                                        " which is not in the graph");
                continue;
            }
            set.insert(q);
        }
    }

    std::map<QubitCoordinate, int> owner;
    for (const auto& [variable, set] : members) {
        for (const auto& q : set) {
            auto [it, inserted] = owner.emplace(q, variable);
            if (!inserted)
                push(ViolationKind::overlapping_chains,
                     "qubit " + q.name() + " is claimed by variables " +
                         std::to_string(it->second) + " and " + std::to_string(variable));
        }
    }

    const auto adj = topology::adjacency(g);
    const auto chain_connected = [&](const std::set<QubitCoordinate>& set) {
        if (set.size() <= 1) return true;
        std::set<std::size_t> indices;
        for (const auto& q : set) indices.insert(g.vertex_index(q));
        std::queue<std::size_t> frontier;
        std::set<std::size_t> seen;
        frontier.push(*indices.begin());
        seen.insert(*indices.begin());
        while (!frontier.empty()) {
            const auto at = frontier.front();
            frontier.pop();
            for (auto next : adj[at]) {
                if (!indices.count(next) || seen.count(next)) continue;
                seen.insert(next);
                frontier.push(next);
            }
        }
        return seen.size() == indices.size();
    };
    for (const auto& [variable, set] : members) {
        if (set.empty()) continue;
        if (!chain_connected(set))
            push(ViolationKind::disconnected_chain,
                 "chain for variable " + std::to_string(variable) +
                     " is not connected in the graph");
    }

    const auto chains_coupled = [&](const std::set<QubitCoordinate>& a,
                                    const std::set<QubitCoordinate>& b) {
        for (const auto& q : a) {
            for (auto next : adj[g.vertex_index(q)])
                if (b.count(g.vertices[next])) return true;
        }
        return false;
    };
    for (const auto& [key, value] : p.j) {
        if (value == 0.0) continue;
        const auto ia = members.find(key.first);
        const auto ib = members.find(key.second);
        if (ia == members.end() || ib == members.end() || ia->second.empty() ||
            ib->second.empty())
            continue;  // already reported as missing or empty
        if (!chains_coupled(ia->second, ib->second))
            push(ViolationKind::missing_coupler,
                 "no coupler joins the chains of variables " + std::to_string(key.first) +
                     " and " + std::to_string(key.second));
    }
    return report;
}

ChainStatistics chain_statistics(const Embedding& e) {
    ChainStatistics stats;
    if (e.chains.empty()) return stats;
    std::size_t total = 0;
    for (const auto& [variable, chain] : e.chains) {
        (void)variable;
        stats.max_length = std::max(stats.max_length, chain.size());
        total += chain.size();
        ++stats.length_histogram[chain.size()];
    }
    stats.mean_length = static_cast<double>(total) / static_cast<double>(e.chains.size());
    return stats;
}

double logical_energy_scale(std::size_t chain_length, double physical_scale) {
    if (chain_length == 0) throw std::invalid_argument("chain length must be >= 1");
    if (!(physical_scale > 0.0))
        throw std::invalid_argument("physical energy scale must be positive");
    return physical_scale / static_cast<double>(chain_length);
}

nlohmann::json embedding_report(const TopologyGraph& g, const IsingProblem& p, const Embedding& e,
                                double physical_scale) {
    const auto validation = validate_embedding(g, p, e);
    const auto stats = chain_statistics(e);

    nlohmann::json doc = validation.to_json();
    auto& cs = doc["chain_stats"];
    cs["max_length"] = stats.max_length;
    cs["mean_length"] = stats.mean_length;
    auto& hist = cs["length_histogram"] = nlohmann::json::object();
    for (const auto& [length, count] : stats.length_histogram)
        hist[std::to_string(length)] = count;

    auto& scales = doc["scales"] = nlohmann::json::array();
    for (const auto& [variable, chain] : e.chains) {
        if (chain.empty()) continue;
        scales.push_back({{"variable", variable},
                          {"chain_length", chain.size()},
                          {"scale", logical_energy_scale(chain.size(), physical_scale)}});
    }
    return doc;
}

}  // namespace qfabric::embedding
