#include "qfabric/dac_quantization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qfabric::quant {

void DacSpec::validate() const {
    if (stage_count < 1) throw std::invalid_argument("DAC needs at least one stage");
    if (levels_per_stage < 2) throw std::invalid_argument("DAC stages need at least two levels");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw std::invalid_argument("DAC range must satisfy lo < hi");
    code_count();
}

long long DacSpec::code_count() const {
    unsigned long long count = 1;
    for (int i = 0; i < stage_count; ++i) {
        if (count > (1ULL << 62) / static_cast<unsigned long long>(levels_per_stage))
            throw std::invalid_argument("code count l^k overflows");
        count *= static_cast<unsigned long long>(levels_per_stage);
    }
    return static_cast<long long>(count);
}

double DacSpec::step() const { return (hi - lo) / static_cast<double>(code_count() - 1); }

double DacSpec::code_value(long long code) const {
    const auto count = code_count();
    if (code < 0 || code >= count) throw std::invalid_argument("code outside 0..l^k-1");
    return lo + (hi - lo) * (static_cast<double>(code) / static_cast<double>(count - 1));
}

QuantizeResult quantize(double target, const DacSpec& spec) {
    spec.validate();
    if (!std::isfinite(target)) throw std::invalid_argument("quantization target must be finite");
    const auto count = spec.code_count();

    QuantizeResult r;
    if (target < spec.lo) {
        r.code = 0;
        r.clamped = true;
    } else if (target > spec.hi) {
        r.code = count - 1;
        r.clamped = true;
    } else {
        // Nearest code with exact midpoints resolved to the lower code.
        const double t = (target - spec.lo) / spec.step();
        r.code = static_cast<long long>(std::ceil(t - 0.5));
        r.code = std::clamp(r.code, 0LL, count - 1);
    }
    r.value = spec.code_value(r.code);
    r.error = r.value - target;
    return r;
}

SamplingMode sampling_mode_from_string(const std::string& s) {
    if (s == "grid") return SamplingMode::grid;
    if (s == "midpoints") return SamplingMode::exhaustive_midpoints;
    throw std::invalid_argument("unknown sampling mode: " + s);
}

QuantizationReport error_report(const DacSpec& spec, SamplingMode mode,
                                std::size_t grid_samples, std::size_t bins) {
    spec.validate();
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");

    QuantizationReport report;
    report.spec = spec;
    report.sampling = mode;
    report.histogram.assign(bins, 0);

    const double step = spec.step();
    const double half = step / 2.0;
    double sum_abs = 0.0;
    double sum_sq = 0.0;

    const auto record = [&](double target) {
        const auto q = quantize(target, spec);
        const double abs_err = std::abs(q.error);
        report.max_abs_error = std::max(report.max_abs_error, abs_err);
        sum_abs += abs_err;
        sum_sq += q.error * q.error;
        auto bin = static_cast<long long>(std::floor((q.error + half) / (step / static_cast<double>(bins))));
        bin = std::clamp(bin, 0LL, static_cast<long long>(bins) - 1);
        ++report.histogram[static_cast<std::size_t>(bin)];
        ++report.sample_count;
    };

    if (mode == SamplingMode::grid) {
        if (grid_samples < 2) throw std::invalid_argument("grid sampling needs at least 2 samples");
        for (std::size_t i = 0; i < grid_samples; ++i)
            record(spec.lo + (spec.hi - spec.lo) * (static_cast<double>(i) /
                                                    static_cast<double>(grid_samples - 1)));
    } else {
        const auto count = spec.code_count();
        if (count - 1 > (1LL << 22))
            throw std::invalid_argument("midpoint sweep over " + std::to_string(count - 1) +
                                        " midpoints is not tractable");
        for (long long c = 0; c + 1 < count; ++c)
            record(spec.lo + step * (static_cast<double>(c) + 0.5));
    }

    report.mean_abs_error = sum_abs / static_cast<double>(report.sample_count);
    report.rms_error = std::sqrt(sum_sq / static_cast<double>(report.sample_count));
    return report;
}

double compare_specs(const DacSpec& older, const DacSpec& newer) {
    older.validate();
    newer.validate();
    if (older.lo != newer.lo || older.hi != newer.hi)
        throw std::invalid_argument("cannot compare DAC specs over different output ranges");
    return older.step() / newer.step();
}

HamiltonianError hamiltonian_specification_error(const embedding::IsingProblem& p,
                                                 const DacSpec& h_spec, const DacSpec& j_spec) {
    p.validate();
    HamiltonianError err;
    err.delta_h.reserve(p.h.size());
    for (double target : p.h) {
        const auto q = quantize(target, h_spec);
        err.delta_h.push_back(q.error);
        err.max_abs_delta_h = std::max(err.max_abs_delta_h, std::abs(q.error));
        err.any_clamped = err.any_clamped || q.clamped;
    }
    for (const auto& [key, value] : p.j) {
        const auto q = quantize(value, j_spec);
        err.delta_j.emplace_back(key.first, key.second, q.error);
        err.max_abs_delta_j = std::max(err.max_abs_delta_j, std::abs(q.error));
        err.any_clamped = err.any_clamped || q.clamped;
    }
    return err;
}

nlohmann::json QuantizationReport::to_json() const {
    nlohmann::json doc;
    doc["spec"] = {{"stages", spec.stage_count},
                   {"levels", spec.levels_per_stage},
                   {"lo", spec.lo},
                   {"hi", spec.hi},
                   {"codes", spec.code_count()},
                   {"step", spec.step()}};
    doc["sampling"] = sampling == SamplingMode::grid ? "grid" : "midpoints";
    doc["samples"] = sample_count;
    doc["max_abs_error"] = max_abs_error;
    doc["mean_abs_error"] = mean_abs_error;
    doc["rms_error"] = rms_error;
    doc["histogram"] = {{"lo", -spec.step() / 2.0}, {"hi", spec.step() / 2.0}, {"counts", histogram}};
    return doc;
}

std::string QuantizationReport::histogram_csv() const {
    const double lo = -spec.step() / 2.0;
    const double width = spec.step() / static_cast<double>(histogram.size());
    std::string out = "bin_lo,bin_hi,count\n";
    char buf[64];
    const auto append_double = [&](double v) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, res.ptr);
    };
    for (std::size_t b = 0; b < histogram.size(); ++b) {
        append_double(lo + width * static_cast<double>(b));
        out += ',';
        append_double(lo + width * static_cast<double>(b + 1));
        out += ',';
        out += std::to_string(histogram[b]);
        out += '\n';
    }
    return out;
}

nlohmann::json HamiltonianError::to_json() const {
    nlohmann::json doc;
    doc["delta_h"] = delta_h;
    auto& dj = doc["delta_J"] = nlohmann::json::array();
    for (const auto& [a, b, value] : delta_j) dj.push_back({a, b, value});
    doc["max_abs_delta_h"] = max_abs_delta_h;
    doc["max_abs_delta_J"] = max_abs_delta_j;
    doc["any_clamped"] = any_clamped;
    return doc;
}

}  // namespace qfabric::quant
