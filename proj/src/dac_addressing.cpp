#include "qfabric/dac_addressing.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace qfabric::dac {

long long capacity_xyz(const XyzScheme& s) {
    if (s.address_lines < 1 || s.trigger_lines < 1 || s.power_lines < 1)
        throw std::invalid_argument("xyz scheme needs at least one line of each kind");
    return 2LL * s.address_lines * s.trigger_lines * s.power_lines;
}

void BraidedScheme::validate() const {
    if (lines < 2) throw std::invalid_argument("braided scheme needs at least 2 address lines");
    if (domains < 1) throw std::invalid_argument("braided scheme needs at least 1 power domain");
}

long long capacity_braided(const BraidedScheme& s) {
    s.validate();
    return static_cast<long long>(s.lines) * (s.lines - 1) * s.domains;
}

AddressingPlan plan(const BraidedScheme& s, long long stage_count, DomainLayout layout) {
    const long long capacity = capacity_braided(s);
    if (stage_count < 0) throw std::invalid_argument("stage count must be nonnegative");
    if (stage_count > capacity)
        throw capacity_error("braided scheme with " + std::to_string(s.lines) + " lines and " +
                                 std::to_string(s.domains) + " domains addresses " +
                                 std::to_string(capacity) + " stages, " +
                                 std::to_string(stage_count) + " requested",
                             static_cast<double>(stage_count - capacity));

    AddressingPlan p;
    p.scheme = s;
    p.layout = layout;
    p.assignments.reserve(static_cast<std::size_t>(stage_count));

    const long long base = stage_count / s.domains;
    const long long remainder = stage_count % s.domains;
    for (int d = 0; d < s.domains; ++d) {
        long long want = base + (d < remainder ? 1 : 0);
        for (int lo = 0; lo < s.lines && want > 0; ++lo) {
            for (int hi = lo + 1; hi < s.lines && want > 0; ++hi) {
                for (int pol = 0; pol < 2 && want > 0; ++pol) {
                    p.assignments.push_back(StageAddress{d, lo, hi, pol});
                    --want;
                }
            }
        }
    }
    return p;
}

namespace {

void validate_address(const BraidedScheme& s, const StageAddress& a) {
    if (a.power_domain < 0 || a.power_domain >= s.domains)
        throw std::invalid_argument("power domain " + std::to_string(a.power_domain) +
                                    " outside 0.." + std::to_string(s.domains - 1));
    if (a.line_low < 0 || a.line_high >= s.lines || a.line_low >= a.line_high)
        throw std::invalid_argument("line pair (" + std::to_string(a.line_low) + ", " +
                                    std::to_string(a.line_high) + ") invalid for " +
                                    std::to_string(s.lines) + " lines");
    if (a.relative_polarity != 0 && a.relative_polarity != 1)
        throw std::invalid_argument("relative polarity must be 0 or 1");
}

// Dense keys; selectors also serve as half-select keys when one line is
// folded out.
long long selector_key(const BraidedScheme& s, const StageAddress& a) {
    return ((static_cast<long long>(a.power_domain) * s.lines + a.line_low) * s.lines +
            a.line_high) *
               2 +
           a.relative_polarity;
}

long long line_key(const BraidedScheme& s, int domain, int line, int polarity) {
    return (static_cast<long long>(domain) * s.lines + line) * 2 + polarity;
}

}  // namespace

FireResult fire_set(const AddressingPlan& p, const StageAddress& drive) {
    p.scheme.validate();
    validate_address(p.scheme, drive);
    FireResult result;
    for (std::size_t id = 0; id < p.assignments.size(); ++id) {
        const auto& a = p.assignments[id];
        if (a == drive) {
            result.fired.push_back(id);
            continue;
        }
        if (a.power_domain != drive.power_domain || a.relative_polarity != drive.relative_polarity)
            continue;
        const int shared = (a.line_low == drive.line_low) + (a.line_low == drive.line_high) +
                           (a.line_high == drive.line_low) + (a.line_high == drive.line_high);
        if (shared == 1) ++result.half_selected;
    }
    return result;
}

PlanVerification verify(const AddressingPlan& p) {
    p.scheme.validate();
    PlanVerification report;

    std::unordered_map<long long, std::vector<std::size_t>> by_selector;
    std::unordered_map<long long, long long> by_line;
    for (std::size_t id = 0; id < p.assignments.size(); ++id) {
        const auto& a = p.assignments[id];
        try {
            validate_address(p.scheme, a);
        } catch (const std::invalid_argument& e) {
            report.violations.push_back("stage " + std::to_string(id) + ": " + e.what());
            continue;
        }
        by_selector[selector_key(p.scheme, a)].push_back(id);
        ++by_line[line_key(p.scheme, a.power_domain, a.line_low, a.relative_polarity)];
        ++by_line[line_key(p.scheme, a.power_domain, a.line_high, a.relative_polarity)];
    }

    for (const auto& [key, ids] : by_selector) {
        (void)key;
        if (ids.size() > 1) {
            std::string msg = "selector shared by stages";
            for (auto id : ids) msg += " " + std::to_string(id);
            report.violations.push_back(std::move(msg));
        }
    }

    // Equivalent to fire_set per assigned drive: the exact-match set is the
    // selector bucket, and half-selects are stages touching exactly one of
    // the drive's two lines in the same domain and polarity.
    for (std::size_t id = 0; id < p.assignments.size(); ++id) {
        const auto& a = p.assignments[id];
        const auto bucket = by_selector.find(selector_key(p.scheme, a));
        if (bucket == by_selector.end()) continue;  // invalid address, reported above
        ++report.drives_checked;
        if (bucket->second.size() != 1 || bucket->second.front() != id) continue;
        const long long exact = static_cast<long long>(bucket->second.size());
        const long long half =
            by_line[line_key(p.scheme, a.power_domain, a.line_low, a.relative_polarity)] +
            by_line[line_key(p.scheme, a.power_domain, a.line_high, a.relative_polarity)] -
            2 * exact;
        report.max_half_selected =
            std::max(report.max_half_selected, static_cast<std::size_t>(half));
    }
    return report;
}

double programming_time_estimate(const AddressingPlan& p, double per_event_seconds,
                                 bool domain_parallel) {
    p.scheme.validate();
    if (!(per_event_seconds >= 0.0))
        throw std::invalid_argument("per-event time must be nonnegative");
    if (!domain_parallel) return static_cast<double>(p.assignments.size()) * per_event_seconds;
    std::vector<long long> per_domain(static_cast<std::size_t>(p.scheme.domains), 0);
    for (const auto& a : p.assignments) {
        validate_address(p.scheme, a);
        ++per_domain[static_cast<std::size_t>(a.power_domain)];
    }
    const auto busiest = *std::max_element(per_domain.begin(), per_domain.end());
    return static_cast<double>(busiest) * per_event_seconds;
}

nlohmann::json AddressingPlan::to_json() const {
    nlohmann::json doc;
    doc["scheme"]["n"] = scheme.lines;
    doc["scheme"]["z"] = scheme.domains;
    auto& list = doc["assignments"] = nlohmann::json::array();
    for (std::size_t id = 0; id < assignments.size(); ++id) {
        const auto& a = assignments[id];
        list.push_back({{"stage", id},
                        {"domain", a.power_domain},
                        {"lines", {a.line_low, a.line_high}},
                        {"polarity", a.relative_polarity}});
    }
    return doc;
}

AddressingPlan AddressingPlan::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("plan document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("scheme") || !doc.contains("assignments"))
        throw std::invalid_argument("plan document must carry scheme and assignments");
    const auto& scheme = doc["scheme"];
    if (!scheme.contains("n") || !scheme.contains("z"))
        throw std::invalid_argument("plan scheme must carry n and z");

    AddressingPlan p;
    p.scheme.lines = scheme["n"].get<int>();
    p.scheme.domains = scheme["z"].get<int>();
    p.scheme.validate();

    const auto& list = doc["assignments"];
    if (!list.is_array()) throw std::invalid_argument("assignments must be an array");
    p.assignments.resize(list.size());
    std::vector<bool> seen(list.size(), false);
    for (const auto& entry : list) {
        if (!entry.is_object() || !entry.contains("stage") || !entry.contains("domain") ||
            !entry.contains("lines") || !entry.contains("polarity"))
            throw std::invalid_argument("assignments must carry stage, domain, lines, polarity");
        const auto stage = entry["stage"].get<long long>();
        if (stage < 0 || stage >= static_cast<long long>(list.size()))
            throw std::invalid_argument("stage ids must be dense 0.." +
                                        std::to_string(list.size() - 1));
        if (seen[static_cast<std::size_t>(stage)])
            throw std::invalid_argument("duplicate stage id " + std::to_string(stage));
        seen[static_cast<std::size_t>(stage)] = true;
        const auto& lines = entry["lines"];
        if (!lines.is_array() || lines.size() != 2)
            throw std::invalid_argument("lines must be a 2-element array");
        StageAddress a;
        a.power_domain = entry["domain"].get<int>();
        a.line_low = std::min(lines[0].get<int>(), lines[1].get<int>());
        a.line_high = std::max(lines[0].get<int>(), lines[1].get<int>());
        a.relative_polarity = entry["polarity"].get<int>();
        validate_address(p.scheme, a);
        p.assignments[static_cast<std::size_t>(stage)] = a;
    }
    return p;
}

nlohmann::json PlanVerification::to_json() const {
    nlohmann::json doc;
    doc["clean"] = clean();
    doc["drives_checked"] = drives_checked;
    doc["max_half_selected"] = max_half_selected;
    doc["violations"] = violations;
    return doc;
}

}  // namespace qfabric::dac
