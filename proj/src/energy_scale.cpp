#include "qfabric/energy_scale.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qfabric::energy {

double gigahertz_to_joules(double ghz) { return ghz * 1e9 * kPlanck; }
double joules_to_gigahertz(double joules) { return joules / (1e9 * kPlanck); }

const char* to_string(EnergyUnits u) {
    return u == EnergyUnits::gigahertz ? "GHz" : "J";
}

void AnnealSchedule::validate() const {
    if (s.size() < 2) throw std::invalid_argument("schedule needs at least two grid points");
    if (s.size() != a.size() || s.size() != b.size())
        throw std::invalid_argument("schedule columns must have equal length");
    if (s.front() != 0.0 || s.back() != 1.0)
        throw std::invalid_argument("schedule grid must cover s = 0 to s = 1");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i]) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
            throw std::invalid_argument("schedule entries must be finite");
        if (a[i] < 0.0 || b[i] < 0.0)
            throw std::invalid_argument("envelope values must be nonnegative");
        if (i > 0) {
            if (s[i] <= s[i - 1])
                throw std::invalid_argument("schedule grid must be strictly increasing");
            if (a[i] > a[i - 1])
                throw std::invalid_argument("transverse envelope A must be nonincreasing");
            if (b[i] < b[i - 1])
                throw std::invalid_argument("problem envelope B must be nondecreasing");
        }
    }
    if (!(a.front() > b.front()))
        throw std::invalid_argument("schedule must start transverse-dominated (A(0) > B(0))");
    if (!(a.back() < b.back()))
        throw std::invalid_argument("schedule must end problem-dominated (A(1) < B(1))");
}

namespace {

double interpolate(const std::vector<double>& grid, const std::vector<double>& values,
                   double query) {
    if (query < grid.front() || query > grid.back())
        throw std::invalid_argument("query outside the schedule grid");
    if (query == grid.back()) return values.back();
    const auto upper = std::upper_bound(grid.begin(), grid.end(), query);
    const auto i = static_cast<std::size_t>(upper - grid.begin()) - 1;
    const double t = (query - grid[i]) / (grid[i + 1] - grid[i]);
    return values[i] + (values[i + 1] - values[i]) * t;
}

}  // namespace

double AnnealSchedule::a_at(double s_query) const { return interpolate(s, a, s_query); }
double AnnealSchedule::b_at(double s_query) const { return interpolate(s, b, s_query); }

AnnealSchedule AnnealSchedule::synthetic(double a0, double b1, std::size_t points,
                                         EnergyUnits units) {
    if (points < 2) throw std::invalid_argument("synthetic schedule needs at least two points");
    if (!(a0 > 0.0) || !(b1 > 0.0))
        throw std::invalid_argument("synthetic envelopes need positive endpoints");
    AnnealSchedule sched;
    sched.units = units;
    for (std::size_t i = 0; i < points; ++i) {
        const double si = static_cast<double>(i) / static_cast<double>(points - 1);
        sched.s.push_back(si);
        sched.a.push_back(a0 * (1.0 - si));
        sched.b.push_back(b1 * si);
    }
    sched.validate();
    return sched;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string AnnealSchedule::to_csv() const {
    validate();
    std::string out = std::string("# units=") + to_string(units) + "\ns,A,B\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        append_double(out, s[i]);
        out += ',';
        append_double(out, a[i]);
        out += ',';
        append_double(out, b[i]);
        out += '\n';
    }
    return out;
}

AnnealSchedule AnnealSchedule::from_csv(const std::string& text) {
    AnnealSchedule sched;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto pos = line.find("units=");
            if (pos != std::string::npos) {
                const auto unit = line.substr(pos + 6);
                if (unit == "GHz")
                    sched.units = EnergyUnits::gigahertz;
                else if (unit == "J")
                    sched.units = EnergyUnits::joules;
                else
                    throw std::invalid_argument("unknown schedule units: " + unit);
            }
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> values;
        bool numeric = true;
        while (std::getline(row, field, ',')) {
            try {
                std::size_t pos = 0;
                values.push_back(std::stod(field, &pos));
                if (pos != field.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            // Tolerate a single header row ("s,A,B").
            if (sched.s.empty()) continue;
            throw std::invalid_argument("schedule row " + std::to_string(lineno) +
                                        " is not numeric: " + line);
        }
        if (values.size() != 3)
            throw std::invalid_argument("schedule row " + std::to_string(lineno) +
                                        " must carry s,A,B");
        sched.s.push_back(values[0]);
        sched.a.push_back(values[1]);
        sched.b.push_back(values[2]);
    }
    sched.validate();
    return sched;
}

QcpResult qcp_find(const AnnealSchedule& schedule, double temperature_k, double tol) {
    schedule.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (!(temperature_k > 0.0)) throw std::invalid_argument("bath temperature must be positive");

    const auto diff = [&](double s) { return schedule.a_at(s) - schedule.b_at(s); };
    // Tolerance scales with the envelopes so joule-magnitude schedules
    // converge as tightly as gigahertz ones.
    const double tol_abs = tol * std::max(std::abs(schedule.a.front()), std::abs(schedule.b.back()));
    // diff(0) > 0 > diff(1) by the schedule invariants, and monotonicity of
    // both envelopes makes the crossing unique.
    double lo = 0.0, hi = 1.0, mid = 0.5, d = diff(mid);
    for (int iter = 0; iter < 200 && std::abs(d) > tol_abs; ++iter) {
        if (d > 0.0)
            lo = mid;
        else
            hi = mid;
        mid = 0.5 * (lo + hi);
        d = diff(mid);
    }
    if (std::abs(d) > tol_abs)
        throw std::runtime_error("crossing search stalled before reaching tolerance");

    QcpResult r;
    r.s_star = mid;
    r.e_qcp = 0.5 * (schedule.a_at(mid) + schedule.b_at(mid));
    r.units = schedule.units;
    r.temperature_k = temperature_k;
    const double joules =
        schedule.units == EnergyUnits::gigahertz ? gigahertz_to_joules(r.e_qcp) : r.e_qcp;
    r.thermal_ratio = joules / (kBoltzmann * temperature_k);
    return r;
}

nlohmann::json QcpResult::to_json() const {
    return {{"s_star", s_star},
            {"E_QCP", e_qcp},
            {"units", to_string(units)},
            {"temperature_K", temperature_k},
            {"thermal_ratio", thermal_ratio}};
}

std::vector<double> b_from_persistent_current(const QubitCouplingParams& params) {
    if (!(params.mutual_inductance_h > 0.0))
        throw std::invalid_argument("mutual inductance must be positive");
    std::vector<double> out;
    out.reserve(params.persistent_current_a.size());
    for (double ip : params.persistent_current_a) {
        if (!std::isfinite(ip)) throw std::invalid_argument("persistent current must be finite");
        out.push_back(params.mutual_inductance_h * ip * ip);
    }
    return out;
}

namespace {

/// Matrix-free transverse-field Ising chain in the computational basis; bit
/// value 0 encodes spin +1.
class TfimOperator {
public:
    TfimOperator(int sites, double a, double b, CouplingSign sign, Boundary boundary)
        : sites_(sites), a_(a), dim_(std::size_t{1} << sites) {
        const double jz = sign == CouplingSign::ferromagnetic ? -b : b;
        std::vector<std::pair<int, int>> bonds;
        for (int i = 0; i + 1 < sites; ++i) bonds.emplace_back(i, i + 1);
        if (boundary == Boundary::periodic && sites >= 3) bonds.emplace_back(sites - 1, 0);
        diagonal_.resize(dim_);
        for (std::size_t state = 0; state < dim_; ++state) {
            double e = 0.0;
            for (const auto& [i, j] : bonds) {
                const int zi = (state >> i) & 1 ? -1 : 1;
                const int zj = (state >> j) & 1 ? -1 : 1;
                e += jz * zi * zj;
            }
            diagonal_[state] = e;
        }
    }

    std::size_t dim() const { return dim_; }

    /// Coarse bound on the spectral radius, for scale-relative tolerances.
    double scale() const {
        double d = 0.0;
        for (double v : diagonal_) d = std::max(d, std::abs(v));
        return d + std::abs(a_) * sites_ + 1.0;
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (std::size_t st = 0; st < dim_; ++st) y[st] = diagonal_[st] * x[st];
        if (a_ == 0.0) return;
        for (int bit = 0; bit < sites_; ++bit) {
            const std::size_t mask = std::size_t{1} << bit;
            for (std::size_t st = 0; st < dim_; ++st) y[st] -= a_ * x[st ^ mask];
        }
    }

private:
    int sites_;
    double a_;
    std::size_t dim_;
    std::vector<double> diagonal_;
};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double norm(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

/**
 * Lowest eigenpair of op restricted to the orthogonal complement of
 * `deflated`.  Lanczos with full reorthogonalization; the deflated space is
 * projected out of every new direction, so previously found eigenvectors
 * never re-enter the Krylov basis.
 */
std::pair<double, std::vector<double>> lanczos_lowest(
    const TfimOperator& op, const std::vector<std::vector<double>>& deflated) {
    const std::size_t dim = op.dim();
    const double scale = op.scale();
    const double residual_tol = 1e-11 * scale;
    const std::size_t max_iter =
        std::min<std::size_t>(dim - deflated.size(), 600);

    const auto project_out = [&](std::vector<double>& w) {
        for (const auto& d : deflated) axpy(-dot(d, w), d, w);
    };

    // Deterministic start vector.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + deflated.size());
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = uniform(rng);
    project_out(v);
    project_out(v);
    {
        const double n0 = norm(v);
        if (n0 < 1e-12) throw std::runtime_error("start vector collapsed under deflation");
        for (auto& x : v) x /= n0;
    }

    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;
    std::vector<double> w(dim);
    basis.push_back(v);

    double best_theta = 0.0;
    Eigen::VectorXd best_y;
    bool have_candidate = false;

    for (std::size_t j = 0; j < max_iter; ++j) {
        op.apply(basis[j], w);
        project_out(w);
        if (j > 0) axpy(-beta[j - 1], basis[j - 1], w);
        const double aj = dot(basis[j], w);
        alpha.push_back(aj);
        axpy(-aj, basis[j], w);
        // Full reorthogonalization, two sweeps.
        for (int sweep = 0; sweep < 2; ++sweep)
            for (const auto& u : basis) axpy(-dot(u, w), u, w);
        project_out(w);
        const double bj = norm(w);

        const bool breakdown = bj < 1e-13 * scale;
        const bool last = j + 1 == max_iter;
        if (breakdown || last || (j + 1) % 8 == 0) {
            const auto k = static_cast<Eigen::Index>(j + 1);
            Eigen::VectorXd diag(k), sub(std::max<Eigen::Index>(k - 1, 0));
            for (Eigen::Index i = 0; i < k; ++i) diag[i] = alpha[static_cast<std::size_t>(i)];
            for (Eigen::Index i = 0; i + 1 < k; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
            solver.computeFromTridiagonal(diag, sub);
            best_theta = solver.eigenvalues()[0];
            best_y = solver.eigenvectors().col(0);
            have_candidate = true;
            // beta_j * |last Ritz component| bounds the true residual.
            if (breakdown || bj * std::abs(best_y[k - 1]) <= residual_tol) break;
        }
        if (breakdown) break;
        beta.push_back(bj);
        for (auto& x : w) x /= bj;
        basis.push_back(w);
    }

    if (!have_candidate) throw std::runtime_error("eigenvalue iteration produced no candidate");

    std::vector<double> x(dim, 0.0);
    for (Eigen::Index i = 0; i < best_y.size(); ++i)
        axpy(best_y[i], basis[static_cast<std::size_t>(i)], x);
    project_out(x);
    const double nx = norm(x);
    if (nx < 1e-12) throw std::runtime_error("Ritz vector collapsed under deflation");
    for (auto& e : x) e /= nx;

    // Accept only a verified eigenpair.
    op.apply(x, w);
    axpy(-best_theta, x, w);
    if (norm(w) > 1e-9 * scale)
        throw std::runtime_error("eigenvalue iteration did not converge");
    return {best_theta, std::move(x)};
}

}  // namespace

std::vector<double> tfim_lowest_eigenvalues(int sites, double a, double b, CouplingSign sign,
                                            Boundary boundary, int count) {
    if (sites < 2 || sites > 14)
        throw std::invalid_argument("chain length must be between 2 and 14 sites");
    if (!(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("field and coupling magnitudes must be nonnegative");
    const auto dim = std::size_t{1} << sites;
    if (count < 1 || static_cast<std::size_t>(count) > dim)
        throw std::invalid_argument("eigenvalue count outside 1..2^sites");

    const TfimOperator op(sites, a, b, sign, boundary);
    std::vector<std::vector<double>> deflated;
    std::vector<double> values;
    for (int i = 0; i < count; ++i) {
        auto [theta, vec] = lanczos_lowest(op, deflated);
        values.push_back(theta);
        deflated.push_back(std::move(vec));
    }
    // Deflation returns them lowest-first up to roundoff on degeneracies.
    std::sort(values.begin(), values.end());
    return values;
}

ChainSpectrum tfim_chain_spectrum(int sites, double a, double b, CouplingSign sign,
                                  Boundary boundary) {
    const auto values = tfim_lowest_eigenvalues(sites, a, b, sign, boundary, 2);
    return ChainSpectrum{values[0], values[1]};
}

namespace {

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > width) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double pseudo_critical_point(int sites, double resolution) {
    if (sites < 2 || sites > 14)
        throw std::invalid_argument("chain length must be between 2 and 14 sites");
    if (!(resolution > 0.0) || resolution > 0.5)
        throw std::invalid_argument("scan resolution must lie in (0, 0.5]");

    // Gap between the ground state and the level above the ordered doublet.
    const auto doublet_gap = [&](double r) {
        const auto values =
            tfim_lowest_eigenvalues(sites, 1.0, r, CouplingSign::ferromagnetic, Boundary::open, 3);
        return values[2] - values[0];
    };

    const auto steps = static_cast<long long>(std::llround(2.0 / resolution));
    double best_r = resolution;
    double best_gap = std::numeric_limits<double>::infinity();
    for (long long i = 1; i <= steps; ++i) {
        const double r = resolution * static_cast<double>(i);
        if (r > 2.0 + 1e-12) break;
        const double gap = doublet_gap(r);
        if (gap < best_gap) {
            best_gap = gap;
            best_r = r;
        }
    }

    const double lo = std::max(resolution * 0.25, best_r - resolution);
    const double hi = std::min(2.0, best_r + resolution);
    return golden_section_min(doublet_gap, lo, hi, 1e-4);
}

}  // namespace qfabric::energy
