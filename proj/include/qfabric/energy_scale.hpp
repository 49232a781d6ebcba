#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace qfabric::energy {

/// CODATA exact values.
inline constexpr double kBoltzmann = 1.380649e-23;       ///< J/K
inline constexpr double kPlanck = 6.62607015e-34;        ///< J*s

double gigahertz_to_joules(double ghz);
double joules_to_gigahertz(double joules);

enum class EnergyUnits { gigahertz, joules };

const char* to_string(EnergyUnits u);

/**
 * Piecewise-linear annealing schedule: transverse envelope A(s) decreasing,
 * problem envelope B(s) increasing, sampled on a strictly increasing grid
 * of s values covering [0, 1] with A(0) > B(0) and A(1) < B(1).
 */
struct AnnealSchedule {
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> b;
    EnergyUnits units = EnergyUnits::gigahertz;

    /// Throws std::invalid_argument when any invariant above fails.
    void validate() const;

    double a_at(double s_query) const;
    double b_at(double s_query) const;

    /// Straight-line schedule from (a0, 0) to (0, b1) on a uniform grid.
    static AnnealSchedule synthetic(double a0, double b1, std::size_t points,
                                    EnergyUnits units = EnergyUnits::gigahertz);

    /// "s,A,B" rows; an optional "# units=..." comment fixes the units.
    static AnnealSchedule from_csv(const std::string& text);
    std::string to_csv() const;
};

/// Crossing point A(s*) = B(s*) and the energy scale there.
struct QcpResult {
    double s_star = 0.0;
    double e_qcp = 0.0;
    EnergyUnits units = EnergyUnits::gigahertz;
    double temperature_k = 0.0;
    double thermal_ratio = 0.0;  ///< E_QCP / (k_B * T)

    nlohmann::json to_json() const;
};

/**
 * Locate the unique crossing of A and B by bisection on A - B, to
 * |A(s) - B(s)| <= tol * max(A(0), B(1)), and compare the crossing energy
 * against the thermal scale at bath temperature T > 0.
 */
QcpResult qcp_find(const AnnealSchedule& schedule, double temperature_k, double tol = 1e-12);

/// Junction parameters from which the problem envelope follows.
struct QubitCouplingParams {
    double mutual_inductance_h = 0.0;           ///< M_AFM, henries
    std::vector<double> persistent_current_a;   ///< I_p per grid point, amperes
};

/// B = M_AFM * I_p^2 per grid point, in joules.
std::vector<double> b_from_persistent_current(const QubitCouplingParams& params);

enum class CouplingSign { ferromagnetic, antiferromagnetic };
enum class Boundary { open, periodic };

/**
 * Lowest eigenvalues of the transverse-field Ising chain
 *   H = -a * sum_i X_i + (sign) * b * sum_<ij> Z_i Z_j,
 * where the sign is - for ferromagnetic and + for antiferromagnetic bonds.
 * Periodic chains add the wrap-around bond only for sites >= 3.  Matrix-free
 * Lanczos with full reorthogonalization; repeated eigenvalues are recovered
 * by deflating converged eigenvectors.  Deterministic.
 */
std::vector<double> tfim_lowest_eigenvalues(int sites, double a, double b, CouplingSign sign,
                                            Boundary boundary, int count);

struct ChainSpectrum {
    double e0 = 0.0;
    double e1 = 0.0;

    double gap() const { return e1 - e0 > 0.0 ? e1 - e0 : 0.0; }
};

/// Ground and first excited level; sites is capped at 14 (dimension 16384).
ChainSpectrum tfim_chain_spectrum(int sites, double a, double b, CouplingSign sign,
                                  Boundary boundary);

/**
 * Finite-size pseudo-critical coupling of the open ferromagnetic chain at
 * unit transverse field: the r in (0, 2] minimizing the gap between the
 * ground state and the second excited level (the first level above the
 * ordered doublet), located by a coarse scan at `resolution` and refined by
 * golden-section search to a bracket width of 1e-4.
 */
double pseudo_critical_point(int sites, double resolution = 0.01);

}  // namespace qfabric::energy
