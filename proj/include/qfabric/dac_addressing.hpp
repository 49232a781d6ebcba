#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfabric/errors.hpp"

namespace qfabric::dac {

/// Classic one-hot scheme: one address line, one trigger line and one power
/// line select a stage, so capacity is the plain product 2*x*y*z (the factor
/// 2 from drive polarity).
struct XyzScheme {
    int address_lines = 0;
    int trigger_lines = 0;
    int power_lines = 0;
};

long long capacity_xyz(const XyzScheme& s);

/// How stages are laid out across power domains.  Both layouts address the
/// same stage set; the choice only changes how plans are described.
enum class DomainLayout { repetition, interleaving };

/**
 * Braided scheme: a stage is selected by an unordered pair of n address
 * lines driven with a relative polarity, within one of z power domains.
 * Capacity n*(n-1)*z, quadratic in lines instead of linear.
 */
struct BraidedScheme {
    int lines = 0;    ///< n >= 2 address lines
    int domains = 1;  ///< z >= 1 power domains

    void validate() const;
};

long long capacity_braided(const BraidedScheme& s);

/// Selector for one stage: power domain, unordered line pair (stored with
/// line_low < line_high), and the relative polarity of the two lines.
struct StageAddress {
    int power_domain = 0;
    int line_low = 0;
    int line_high = 0;
    int relative_polarity = 0;  ///< 0 or 1

    auto operator<=>(const StageAddress&) const = default;
};

/**
 * Assignment of stage ids 0..count-1 to selectors.  Plans are produced in
 * canonical order (domain-major, then line pair, then polarity) with stage
 * counts split evenly across domains, so equal inputs give equal plans.
 */
struct AddressingPlan {
    BraidedScheme scheme;
    DomainLayout layout = DomainLayout::repetition;
    std::vector<StageAddress> assignments;  ///< index is the stage id

    nlohmann::json to_json() const;
    static AddressingPlan from_json(const std::string& text);
};

/**
 * Deterministically assign stage_count stages.  Throws capacity_error
 * carrying the deficit when stage_count exceeds n*(n-1)*z; the layout flag
 * is recorded on the plan but does not change which selectors exist.
 */
AddressingPlan plan(const BraidedScheme& s, long long stage_count,
                    DomainLayout layout = DomainLayout::repetition);

/// Outcome of driving one selector against a plan.
struct FireResult {
    std::vector<std::size_t> fired;  ///< stage ids matching the drive exactly
    std::size_t half_selected = 0;   ///< same domain, one shared line, matching polarity bit
};

/// Exhaustive scan of the plan; O(assignments). Suits single drives and tests.
FireResult fire_set(const AddressingPlan& p, const StageAddress& drive);

struct PlanVerification {
    long long drives_checked = 0;
    std::size_t max_half_selected = 0;
    std::vector<std::string> violations;

    bool clean() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

/**
 * Drive every assigned selector and confirm addressability: each drive fires
 * exactly its own stage and nothing else.  Uses an indexed equivalent of
 * fire_set so whole-plan verification stays O(assignments).
 */
PlanVerification verify(const AddressingPlan& p);

/**
 * Programming time under a fixed per-stage event cost: sequential sums all
 * stages; domain-parallel programs domains concurrently and is bounded by
 * the fullest domain.
 */
double programming_time_estimate(const AddressingPlan& p, double per_event_seconds,
                                 bool domain_parallel);

}  // namespace qfabric::dac
