#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfabric/embedding.hpp"

namespace qfabric::quant {

/**
 * A k-stage flux DAC with l levels per stage realizes l^k uniformly spaced
 * output codes across [lo, hi] inclusive, so the step is (hi-lo)/(l^k - 1).
 */
struct DacSpec {
    int stage_count = 0;
    int levels_per_stage = 0;
    double lo = -1.0;
    double hi = 1.0;

    void validate() const;
    long long code_count() const;  ///< l^k, overflow-checked
    double step() const;
    double code_value(long long code) const;

    /// Two-generation reference points: 2 stages vs 4 stages of 8 levels.
    static DacSpec previous_generation() { return {2, 8, -1.0, 1.0}; }
    static DacSpec current_generation() { return {4, 8, -1.0, 1.0}; }
};

struct QuantizeResult {
    long long code = 0;
    double value = 0.0;
    double error = 0.0;  ///< value - target
    bool clamped = false;
};

/**
 * Nearest representable code for a target, ties resolved toward the lower
 * code.  Targets outside [lo, hi] clamp to the nearest end and set the
 * clamped flag.  |error| <= step/2 whenever the target was in range.
 */
QuantizeResult quantize(double target, const DacSpec& spec);

enum class SamplingMode {
    grid,                 ///< uniform targets across [lo, hi]
    exhaustive_midpoints  ///< every inter-code midpoint; max error is exact
};

SamplingMode sampling_mode_from_string(const std::string& s);

struct QuantizationReport {
    DacSpec spec;
    SamplingMode sampling = SamplingMode::grid;
    std::size_t sample_count = 0;
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    double rms_error = 0.0;
    std::vector<std::uint64_t> histogram;  ///< signed-error bins over [-step/2, step/2]

    nlohmann::json to_json() const;
    std::string histogram_csv() const;
};

/// Quantization error statistics for a spec under the chosen sampling.
QuantizationReport error_report(const DacSpec& spec, SamplingMode mode,
                                std::size_t grid_samples = 100001, std::size_t bins = 32);

/**
 * Ratio of worst-case errors, older over newer.  Both specs must share
 * [lo, hi]; the ratio then equals the step ratio (l^k_new - 1)/(l^k_old - 1).
 */
double compare_specs(const DacSpec& older, const DacSpec& newer);

/// Element-wise quantization error a DAC pair imprints on an Ising problem.
struct HamiltonianError {
    std::vector<double> delta_h;
    std::vector<std::tuple<int, int, double>> delta_j;
    double max_abs_delta_h = 0.0;
    double max_abs_delta_j = 0.0;
    bool any_clamped = false;

    nlohmann::json to_json() const;
};

HamiltonianError hamiltonian_specification_error(const embedding::IsingProblem& p,
                                                 const DacSpec& h_spec, const DacSpec& j_spec);

}  // namespace qfabric::quant
