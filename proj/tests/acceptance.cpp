// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single PASS/FAIL line.  Exit status is the failure count, so
// a clean gate exits 0.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qfabric/dac_addressing.hpp"
#include "qfabric/dac_quantization.hpp"
#include "qfabric/embedding.hpp"
#include "qfabric/energy_scale.hpp"
#include "qfabric/readout.hpp"
#include "qfabric/topology.hpp"

namespace fs = std::filesystem;
using namespace qfabric;

namespace {

struct Check {
    std::string name;
    double budget_s = 0.0;
    std::function<void(std::ostringstream&)> body;  // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

// ---------------------------------------------------------------------------
// Independent dense reference for the transverse-field chain, built state by
// state and solved with Eigen.  Shares nothing with the production solver.

std::vector<double> dense_chain_spectrum(int sites, double a, double b, energy::CouplingSign sign,
                                         energy::Boundary boundary) {
    const int dim = 1 << sites;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double bond = (sign == energy::CouplingSign::ferromagnetic ? -1.0 : 1.0) * b;

    std::vector<std::pair<int, int>> bonds;
    for (int i = 0; i + 1 < sites; ++i) bonds.emplace_back(i, i + 1);
    if (boundary == energy::Boundary::periodic && sites >= 3) bonds.emplace_back(sites - 1, 0);

    for (int st = 0; st < dim; ++st) {
        for (const auto& [i, j] : bonds) {
            const double zi = (st >> i) & 1 ? -1.0 : 1.0;
            const double zj = (st >> j) & 1 ? -1.0 : 1.0;
            h(st, st) += bond * zi * zj;
        }
        for (int i = 0; i < sites; ++i) h(st ^ (1 << i), st) -= a;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + dim};
}

// ---------------------------------------------------------------------------
// CLI battery for the determinism check.

const fs::path& work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("acceptance_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string run_cli(const std::string& args) {
    const auto out_file = work_dir() / "out.txt";
    const std::string cmd = std::string(QFABRIC_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + (work_dir() / "err.txt").string();
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    expect(code == 0, "CLI exited " + std::to_string(code) + " for: " + args);
    return slurp(out_file);
}

// ---------------------------------------------------------------------------

void check_reference_braid(std::ostringstream& detail) {
    expect(dac::capacity_braided({5, 1}) == 20, "capacity(5 lines, 1 domain) != 20");

    // Brute force every possible drive and count uniquely selectable stages.
    const auto p = dac::plan({5, 1}, 20);
    std::set<std::size_t> unique_stages;
    int drives_firing_one = 0;
    for (int lo = 0; lo < 5; ++lo)
        for (int hi = lo + 1; hi < 5; ++hi)
            for (int pol = 0; pol < 2; ++pol) {
                const auto r = dac::fire_set(p, {0, lo, hi, pol});
                expect(r.fired.size() == 1, "a drive fired " + std::to_string(r.fired.size()) +
                                                " stages instead of exactly one");
                ++drives_firing_one;
                unique_stages.insert(r.fired.front());
            }
    expect(drives_firing_one == 20, "expected 20 drives");
    expect(unique_stages.size() == 20, "drives select only " +
                                           std::to_string(unique_stages.size()) +
                                           " distinct stages");
    detail << "20 lines-pairs x polarity drives select 20 distinct stages";
}

void check_capacity_identities(std::ostringstream& detail) {
    for (int x = 1; x <= 8; ++x)
        for (int y = 1; y <= 8; ++y)
            for (int z = 1; z <= 8; ++z) {
                // Exhaustive enumeration of (address, trigger, power, polarity).
                long long enumerated = 0;
                for (int a = 0; a < x; ++a)
                    for (int t = 0; t < y; ++t)
                        for (int p = 0; p < z; ++p) enumerated += 2;
                expect(dac::capacity_xyz({x, y, z}) == enumerated,
                       "one-hot capacity mismatch at x=" + std::to_string(x));
                expect(enumerated == 2LL * x * y * z, "one-hot closed form mismatch");
            }

    for (int x = 1; x <= 8; ++x) {
        const int n = 2 * x;
        long long enumerated = 0;
        for (int lo = 0; lo < n; ++lo)
            for (int hi = lo + 1; hi < n; ++hi) enumerated += 2;
        const long long closed = 4LL * x * x - 2LL * x;
        expect(enumerated == closed, "pair enumeration != 4x^2-2x at x=" + std::to_string(x));
        expect(dac::capacity_braided({n, 1}) == closed,
               "braided capacity != 4x^2-2x at x=" + std::to_string(x));
        // The closed form is sharp: capacity+1 stages must be refused.
        bool refused = false;
        try {
            dac::plan({n, 1}, closed + 1);
        } catch (const capacity_error& e) {
            refused = e.deficit() == 1.0;
        }
        expect(refused, "plan accepted one stage over capacity at n=" + std::to_string(n));
    }
    detail << "2xyz and 4x^2-2x hold for all x,y,z <= 8";
}

void check_full_scale_plan(std::ostringstream& detail) {
    const auto p = dac::plan({57, 128}, 401408);
    expect(p.assignments.size() == 401408, "plan dropped stages");

    const auto v = dac::verify(p);
    expect(v.clean(), "verification found " + std::to_string(v.violations.size()) + " violations");
    expect(v.drives_checked == 401408, "not every stage was driven");

    std::vector<long long> per_domain(128, 0);
    for (const auto& a : p.assignments) ++per_domain[static_cast<std::size_t>(a.power_domain)];
    for (int d = 0; d < 128; ++d)
        expect(per_domain[static_cast<std::size_t>(d)] == 3136,
               "domain " + std::to_string(d) + " holds " +
                   std::to_string(per_domain[static_cast<std::size_t>(d)]) + " stages, not 3136");
    detail << "401408 stages on 57 lines / 128 domains verify clean, 3136 per domain";
}

void check_topology_census(std::ostringstream& detail) {
    for (int m = 3; m <= 5; ++m) {
        const auto g = topology::build_topology(m);
        expect(g.vertices.size() == static_cast<std::size_t>(24 * m * (m - 1)),
               "vertex count != 24m(m-1) at m=" + std::to_string(m));

        for (int i = 1; i <= m - 2; ++i)
            for (int j = 1; j <= m - 2; ++j) {
                const auto c = topology::tile_census(g, i, j);
                expect(c.internal_count == 144 && c.external_count == 24 && c.odd_count == 12,
                       "interior tile (" + std::to_string(i) + "," + std::to_string(j) +
                           ") census (" + std::to_string(c.internal_count) + "," +
                           std::to_string(c.external_count) + "," + std::to_string(c.odd_count) +
                           ") at m=" + std::to_string(m));
            }

        // Vertices away from every fabric edge see the full coupler set:
        // 12 crossing + 2 colinear + 1 parallel partner.
        const auto adj = topology::adjacency(g);
        std::size_t interior_vertices = 0;
        for (std::size_t idx = 0; idx < g.vertices.size(); ++idx) {
            const auto& q = g.vertices[idx];
            if (q.w < 1 || q.w > m - 2) continue;
            if (q.z < 1 || q.z > m - 3) continue;
            ++interior_vertices;
            expect(adj[idx].size() == 15,
                   q.name() + " has degree " + std::to_string(adj[idx].size()) + " at m=" +
                       std::to_string(m));
        }
        if (m >= 4) expect(interior_vertices > 0, "no interior vertices found");
    }
    detail << "m in {3,4,5}: interior tiles (144,24,12), interior degree 15, 24m(m-1) vertices";
}

void check_native_triangles(std::ostringstream& detail) {
    const auto g = topology::build_topology(2);
    const auto count = topology::triangle_count(g);
    expect(count > 0, "no 3-cycles at m=2");

    const auto tri = topology::find_triangles(g, 1).at(0);
    embedding::IsingProblem p;
    p.h = {0.0, 0.0, 0.0};
    p.j[{0, 1}] = -1.0;
    p.j[{0, 2}] = -1.0;
    p.j[{1, 2}] = -1.0;
    embedding::Embedding e;
    e.chains[0] = {tri[0]};
    e.chains[1] = {tri[1]};
    e.chains[2] = {tri[2]};

    const auto report = embedding::validate_embedding(g, p, e);
    expect(report.valid(), "singleton-chain 3-cycle embedding rejected: " +
                               report.to_json().dump());
    detail << count << " triangles at m=2; singleton-chain K3 embedding validates";
}

void check_quantization_bounds(std::ostringstream& detail) {
    const auto old_rep = quant::error_report(quant::DacSpec::previous_generation(),
                                             quant::SamplingMode::exhaustive_midpoints);
    const auto new_rep = quant::error_report(quant::DacSpec::current_generation(),
                                             quant::SamplingMode::exhaustive_midpoints);
    expect(new_rep.max_abs_error < 0.01,
           "current-generation max error " + std::to_string(new_rep.max_abs_error) + " >= 0.01");
    const double ratio = old_rep.max_abs_error / new_rep.max_abs_error;
    expect(ratio > 2.0, "improvement ratio " + std::to_string(ratio) + " <= 2");
    detail << "new max error " << new_rep.max_abs_error << " < 0.01, improvement " << ratio
           << "x > 2";
}

void check_crossing_solver(std::ostringstream& detail) {
    // Quadratic envelopes with a closed-form crossing: 2(1-s)^2 = 3s^2 at
    // s = sqrt(2)/(sqrt(2)+sqrt(3)).
    const auto make = [](double scale) {
        energy::AnnealSchedule sched;
        const std::size_t points = 4001;
        for (std::size_t i = 0; i < points; ++i) {
            const double s = static_cast<double>(i) / (points - 1);
            sched.s.push_back(s);
            sched.a.push_back(scale * 2.0 * (1 - s) * (1 - s));
            sched.b.push_back(scale * 3.0 * s * s);
        }
        return sched;
    };
    const double closed_form = std::sqrt(2.0) / (std::sqrt(2.0) + std::sqrt(3.0));

    const auto r = energy::qcp_find(make(1.0), 0.015);
    expect(std::abs(r.s_star - closed_form) < 1e-6,
           "crossing at " + std::to_string(r.s_star) + ", closed form " +
               std::to_string(closed_form));

    // Common rescaling of both envelopes must not move the crossing.
    const auto scaled = energy::qcp_find(make(7.25), 0.015);
    expect(std::abs(scaled.s_star - r.s_star) < 1e-9,
           "crossing moved under common rescaling by " +
               std::to_string(std::abs(scaled.s_star - r.s_star)));
    detail << "|s* - " << closed_form << "| = " << std::abs(r.s_star - closed_form)
           << " < 1e-6; invariant under common rescaling";
}

void check_chain_criticality(std::ostringstream& detail) {
    // Production eigensolver against the dense reference at every size the
    // dense path can afford.
    const std::vector<std::pair<double, double>> couplings = {{1.0, 0.5}, {0.7, 1.3}};
    for (int sites = 2; sites <= 8; ++sites)
        for (const auto& [a, b] : couplings)
            for (const auto sign :
                 {energy::CouplingSign::ferromagnetic, energy::CouplingSign::antiferromagnetic})
                for (const auto boundary : {energy::Boundary::open, energy::Boundary::periodic}) {
                    const auto dense = dense_chain_spectrum(sites, a, b, sign, boundary);
                    const auto s = energy::tfim_chain_spectrum(sites, a, b, sign, boundary);
                    const double tol0 = 1e-9 * std::max(1.0, std::abs(dense[0]));
                    const double tol1 = 1e-9 * std::max(1.0, std::abs(dense[1]));
                    expect(std::abs(s.e0 - dense[0]) <= tol0,
                           "ground level off by " + std::to_string(std::abs(s.e0 - dense[0])) +
                               " at n=" + std::to_string(sites));
                    expect(std::abs(s.e1 - dense[1]) <= tol1,
                           "first level off by " + std::to_string(std::abs(s.e1 - dense[1])) +
                               " at n=" + std::to_string(sites));
                }

    // Finite-size trend of the gap-minimizing coupling.
    std::vector<double> r_star;
    for (const int sites : {4, 6, 8, 10, 12})
        r_star.push_back(energy::pseudo_critical_point(sites));
    for (std::size_t i = 1; i < r_star.size(); ++i)
        expect(r_star[i] > r_star[i - 1], "r* not increasing between n=" +
                                              std::to_string(2 + 2 * i) + " and n=" +
                                              std::to_string(4 + 2 * i));
    expect(std::abs(r_star.back() - 1.0) < 0.25,
           "|r*(12) - 1| = " + std::to_string(std::abs(r_star.back() - 1.0)));
    detail << "spectra match dense reference to 1e-9 (n <= 8); r* rises ";
    for (std::size_t i = 0; i < r_star.size(); ++i) detail << (i ? " -> " : "") << r_star[i];
}

void check_readout_rate(std::ostringstream& detail) {
    const readout::ClockProgram clock;  // 30 MHz, 3 phases
    expect(clock.bit_rate_hz() == 10000000.0, "bit rate not exactly 10 Mbit/s");

    const auto g = topology::build_topology(2);
    const auto layout = readout::build_layout(g, 4, 1);

    // Each resonator drains its lane at one bit per period: arrival ticks
    // are consecutive integers starting at zero.
    {
        std::map<readout::QubitCoordinate, int> ones;
        for (const auto& [qubit, route] : layout.routing) {
            (void)route;
            ones[qubit] = 1;
        }
        const auto events = readout::simulate_readout(layout, ones, clock);
        std::map<int, std::vector<long long>> ticks;
        for (const auto& e : events)
            ticks[e.resonator].push_back(std::llround(e.time_s / clock.bit_period_s()));
        for (const auto& [resonator, list] : ticks)
            for (std::size_t i = 0; i < list.size(); ++i)
                expect(list[i] == static_cast<long long>(i),
                       "resonator " + std::to_string(resonator) + " skipped a bit period");
    }

    // Permutation correctness on randomized assignments.
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::map<readout::QubitCoordinate, int> states;
        for (const auto& [qubit, route] : layout.routing) {
            (void)route;
            states[qubit] = static_cast<int>(rng() & 1);
        }
        const auto events = readout::simulate_readout(layout, states, clock);
        expect(events.size() == states.size(), "event count != qubit count");
        std::set<readout::QubitCoordinate> seen;
        for (const auto& e : events) {
            const auto route = layout.routing.at(e.qubit);
            const auto& track = layout.tracks[static_cast<std::size_t>(route.track)];
            const int expected_res = route.end == readout::TrackEnd::low
                                         ? track.resonator_low()
                                         : track.resonator_high();
            expect(e.resonator == expected_res, "bit surfaced at the wrong resonator");
            expect(e.bit == states.at(e.qubit), "bit value corrupted in transit");
            const double expected_time =
                static_cast<double>(layout.shift_distance(e.qubit)) * clock.bit_period_s();
            expect(e.time_s == expected_time, "arrival time off for " + e.qubit.name());
            seen.insert(e.qubit);
        }
        expect(seen.size() == states.size(), "a qubit was dropped");

        const auto timing = readout::readout_time(layout, clock);
        expect(timing.total_s == events.back().time_s,
               "worst-case drain time != final simulated event");
    }
    detail << "10 Mbit/s exactly; 100 randomized reads correct; drain time exact";
}

void check_layout_ratio(std::ostringstream& detail) {
    const auto g = topology::build_topology(16);
    const auto baseline = readout::serpentine_baseline(g);
    const auto column = readout::build_layout(g, 16, 1);
    const double ratio = readout::compare_layout_lengths(baseline, column);
    expect(ratio > 2.0, "stage-count ratio " + std::to_string(ratio) + " <= 2");
    detail << "serpentine " << baseline.total_stage_count() << " vs 16-track "
           << column.total_stage_count() << " stages: ratio " << ratio << " > 2";
}

void check_cli_determinism(std::ostringstream& detail) {
    const auto sched_path = work_dir() / "schedule.csv";
    {
        std::ofstream out(sched_path, std::ios::binary);
        out << "# units=GHz\ns,A,B\n0,2,0\n0.5,1,1.5\n1,0,3\n";
    }
    const std::vector<std::string> battery = {
        "topology build --m 3",
        "topology export --m 2 --format dot",
        "topology export --m 2 --format edgelist",
        "topology census --m 4 --tile-row 1 --tile-col 2",
        "topology degrees --m 4",
        "topology triangles --m 2 --list 3",
        "dac capacity --lines 57 --domains 128",
        "dac plan --lines 5 --domains 2 --stages 30",
        "quant report --stages 2 --levels 8 --sampling midpoints",
        "quant report --stages 4 --levels 8 --format csv",
        "quant compare --levels 8",
        "qcp find --schedule " + sched_path.string() + " --temperature 0.015",
        "qcp tfim --sites 6 --a 1 --b 1",
        "qcp pseudo-critical --sites 4 --resolution 0.05",
        "readout layout --m 2 --tracks 4",
        "readout simulate --m 2 --tracks 4 --seed 99",
        "readout simulate --m 2 --tracks 2 --seed 7 --stages-per-attach 3",
        "readout time --m 3 --tracks 6",
        "readout compare --m 4",
        "readout freqs --count 9 --f-lo 5e9 --f-hi 7e9 --min-spacing 0.1e9",
    };
    for (const auto& args : battery) {
        const auto first = run_cli(args);
        const auto second = run_cli(args);
        expect(!first.empty(), "no output from: " + args);
        expect(first == second, "outputs differ between runs of: " + args);
    }
    detail << battery.size() << " command invocations byte-identical across two runs";
}

}  // namespace

int main() {
    const std::vector<Check> checks = {
        {"braided addressing reaches 20 stages from 5 lines", 1.0, check_reference_braid},
        {"addressing capacity identities up to 8 lines", 1.0, check_capacity_identities},
        {"full-scale plan: 401408 stages, 57 lines, 128 domains", 60.0, check_full_scale_plan},
        {"interior tile census (144, 24, 12) and degree 15", 10.0, check_topology_census},
        {"native 3-cycles embed without chains", 5.0, check_native_triangles},
        {"flux quantization error bounds and improvement", 5.0, check_quantization_bounds},
        {"envelope crossing solver against closed form", 1.0, check_crossing_solver},
        {"chain spectra and finite-size critical trend", 120.0, check_chain_criticality},
        {"readout rate, correctness and drain time", 30.0, check_readout_rate},
        {"serpentine vs column layout stage ratio", 30.0, check_layout_ratio},
        {"CLI output determinism", 60.0, check_cli_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& check = checks[i];
        std::ostringstream detail;
        std::string error;
        const auto start = std::chrono::steady_clock::now();
        try {
            check.body(detail);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > check.budget_s)
            error = "exceeded " + std::to_string(check.budget_s) + " s budget";

        const bool ok = error.empty();
        failures += ok ? 0 : 1;
        std::printf("[%2zu/%zu] %s  %s  (%.2f s)  %s\n", i + 1, checks.size(),
                    ok ? "PASS" : "FAIL", check.name.c_str(), elapsed,
                    ok ? detail.str().c_str() : error.c_str());
    }

    if (failures == 0)
        std::printf("all %zu checks passed\n", checks.size());
    else
        std::printf("%d of %zu checks FAILED\n", failures, checks.size());
    return failures;
}
