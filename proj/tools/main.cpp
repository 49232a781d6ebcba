#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qfabric/dac_addressing.hpp"
#include "qfabric/dac_quantization.hpp"
#include "qfabric/embedding.hpp"
#include "qfabric/energy_scale.hpp"
#include "qfabric/errors.hpp"
#include "qfabric/readout.hpp"
#include "qfabric/topology.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Data goes to --out when given, stdout otherwise; diagnostics use stderr.
void write_output(const std::string& out_path, const std::string& data) {
    if (out_path.empty()) {
        std::cout << data;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    out << data;
}

void write_json(const std::string& out_path, const nlohmann::json& doc) {
    write_output(out_path, doc.dump(2) + "\n");
}

qfabric::energy::CouplingSign sign_from_string(const std::string& s) {
    if (s == "ferro") return qfabric::energy::CouplingSign::ferromagnetic;
    if (s == "antiferro") return qfabric::energy::CouplingSign::antiferromagnetic;
    throw CLI::ValidationError("--sign", "must be ferro or antiferro");
}

qfabric::energy::Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return qfabric::energy::Boundary::open;
    if (s == "periodic") return qfabric::energy::Boundary::periodic;
    throw CLI::ValidationError("--boundary", "must be open or periodic");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qfabric;

    CLI::App app{"Quantum annealer fabric toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // --out may follow any subcommand

    std::string out_path;
    app.add_option("--out", out_path, "Write output to this file instead of stdout")
        ->capture_default_str();

    // ---- topology ------------------------------------------------------
    auto* topo = app.add_subcommand("topology", "Tiled qubit fabric");
    topo->require_subcommand(1);
    int topo_m = 2;
    int tile_row = 0, tile_col = 0;
    std::string format = "json";
    std::size_t triangle_limit = 0;

    auto* topo_build = topo->add_subcommand("build", "Generate the fabric graph as JSON");
    topo_build->add_option("--m", topo_m, "Fabric size parameter")->required();
    topo_build->callback([&] {
        write_output(out_path, topology::export_graph(topology::build_topology(topo_m),
                                                      topology::ExportFormat::json));
    });

    auto* topo_export = topo->add_subcommand("export", "Export the fabric graph");
    topo_export->add_option("--m", topo_m, "Fabric size parameter")->required();
    topo_export->add_option("--format", format, "json, dot, or edgelist")->capture_default_str();
    topo_export->callback([&] {
        write_output(out_path, topology::export_graph(topology::build_topology(topo_m),
                                                      topology::export_format_from_string(format)));
    });

    auto* topo_census = topo->add_subcommand("census", "Count couplers by tile");
    topo_census->add_option("--m", topo_m, "Fabric size parameter")->required();
    topo_census->add_option("--tile-row", tile_row, "Tile row index")->required();
    topo_census->add_option("--tile-col", tile_col, "Tile column index")->required();
    topo_census->callback([&] {
        const auto census =
            topology::tile_census(topology::build_topology(topo_m), tile_row, tile_col);
        write_json(out_path, {{"internal", census.internal_count},
                              {"external", census.external_count},
                              {"odd", census.odd_count}});
    });

    auto* topo_degrees = topo->add_subcommand("degrees", "Vertex degree histogram");
    topo_degrees->add_option("--m", topo_m, "Fabric size parameter")->required();
    topo_degrees->callback([&] {
        nlohmann::json doc = nlohmann::json::object();
        for (const auto& [degree, count] : topology::degree_histogram(topology::build_topology(topo_m)))
            doc[std::to_string(degree)] = count;
        write_json(out_path, doc);
    });

    auto* topo_triangles = topo->add_subcommand("triangles", "Count 3-cycles");
    topo_triangles->add_option("--m", topo_m, "Fabric size parameter")->required();
    topo_triangles->add_option("--list", triangle_limit, "Also list up to this many triangles")
        ->capture_default_str();
    topo_triangles->callback([&] {
        const auto g = topology::build_topology(topo_m);
        nlohmann::json doc{{"count", topology::triangle_count(g)}};
        if (triangle_limit > 0) {
            auto& list = doc["triangles"] = nlohmann::json::array();
            for (const auto& tri : topology::find_triangles(g, triangle_limit))
                list.push_back({tri[0].name(), tri[1].name(), tri[2].name()});
        }
        write_json(out_path, doc);
    });

    // ---- embed ---------------------------------------------------------
    auto* embed = app.add_subcommand("embed", "Minor-embedding checks");
    embed->require_subcommand(1);
    std::string graph_path, problem_path, embedding_path;
    double physical_scale = 1.0;

    auto* embed_validate = embed->add_subcommand("validate", "Validate an embedding");
    embed_validate->add_option("--graph", graph_path, "Fabric graph JSON")->required();
    embed_validate->add_option("--problem", problem_path, "Ising problem JSON")->required();
    embed_validate->add_option("--embedding", embedding_path, "Embedding JSON")->required();
    embed_validate->add_option("--scale", physical_scale, "Physical coupling scale")
        ->capture_default_str();
    embed_validate->callback([&] {
        const auto g = topology::import_graph_json(read_file(graph_path));
        const auto p = embedding::IsingProblem::from_json(read_file(problem_path));
        const auto e = embedding::Embedding::from_json(read_file(embedding_path));
        write_json(out_path, embedding::embedding_report(g, p, e, physical_scale));
    });

    auto* embed_stats = embed->add_subcommand("stats", "Chain statistics of an embedding");
    embed_stats->add_option("--embedding", embedding_path, "Embedding JSON")->required();
    embed_stats->callback([&] {
        const auto e = embedding::Embedding::from_json(read_file(embedding_path));
        const auto stats = embedding::chain_statistics(e);
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [length, count] : stats.length_histogram)
            hist[std::to_string(length)] = count;
        write_json(out_path, {{"max_length", stats.max_length},
                              {"mean_length", stats.mean_length},
                              {"length_histogram", hist}});
    });

    // ---- dac -----------------------------------------------------------
    auto* dac_cmd = app.add_subcommand("dac", "Braided DAC addressing");
    dac_cmd->require_subcommand(1);
    int lines = 2, domains = 1;
    long long stages = 0;
    std::string layout_name = "repetition";
    std::string plan_path;
    double per_event = 1e-6;
    bool parallel = false;

    auto* dac_capacity = dac_cmd->add_subcommand("capacity", "Addressable stage count");
    dac_capacity->add_option("--lines", lines, "Address line count")->required();
    dac_capacity->add_option("--domains", domains, "Power domain count")->capture_default_str();
    dac_capacity->callback([&] {
        const auto capacity = dac::capacity_braided({lines, domains});
        write_output(out_path, std::to_string(capacity) + "\n");
    });

    auto* dac_plan = dac_cmd->add_subcommand("plan", "Assign stages to selectors");
    dac_plan->add_option("--lines", lines, "Address line count")->required();
    dac_plan->add_option("--domains", domains, "Power domain count")->capture_default_str();
    dac_plan->add_option("--stages", stages, "Stage count to assign")->required();
    dac_plan->add_option("--layout", layout_name, "repetition or interleaving")
        ->capture_default_str();
    dac_plan->callback([&] {
        dac::DomainLayout layout;
        if (layout_name == "repetition")
            layout = dac::DomainLayout::repetition;
        else if (layout_name == "interleaving")
            layout = dac::DomainLayout::interleaving;
        else
            throw CLI::ValidationError("--layout", "must be repetition or interleaving");
        write_json(out_path, dac::plan({lines, domains}, stages, layout).to_json());
    });

    auto* dac_verify = dac_cmd->add_subcommand("verify", "Check a plan for misfires");
    dac_verify->add_option("--plan", plan_path, "Plan JSON")->required();
    dac_verify->callback([&] {
        const auto p = dac::AddressingPlan::from_json(read_file(plan_path));
        write_json(out_path, dac::verify(p).to_json());
    });

    auto* dac_time = dac_cmd->add_subcommand("time", "Programming time estimate");
    dac_time->add_option("--plan", plan_path, "Plan JSON")->required();
    dac_time->add_option("--per-event", per_event, "Seconds per programming event")
        ->capture_default_str();
    dac_time->add_flag("--parallel", parallel, "Program power domains concurrently");
    dac_time->callback([&] {
        const auto p = dac::AddressingPlan::from_json(read_file(plan_path));
        write_json(out_path,
                   {{"stages", p.assignments.size()},
                    {"per_event_s", per_event},
                    {"model", parallel ? "domain-parallel" : "sequential"},
                    {"total_s", dac::programming_time_estimate(p, per_event, parallel)}});
    });

    // ---- quant ---------------------------------------------------------
    auto* quant_cmd = app.add_subcommand("quant", "Flux DAC quantization error");
    quant_cmd->require_subcommand(1);
    int q_stages = 4, q_levels = 8;
    int old_stages = 2, new_stages = 4;
    double q_lo = -1.0, q_hi = 1.0;
    std::string sampling = "midpoints";
    std::size_t samples = 100001, bins = 32;

    auto* quant_report = quant_cmd->add_subcommand("report", "Quantization error statistics");
    quant_report->add_option("--stages", q_stages, "DAC stage count")->capture_default_str();
    quant_report->add_option("--levels", q_levels, "Levels per stage")->capture_default_str();
    quant_report->add_option("--lo", q_lo, "Range low end")->capture_default_str();
    quant_report->add_option("--hi", q_hi, "Range high end")->capture_default_str();
    quant_report->add_option("--sampling", sampling, "grid or midpoints")->capture_default_str();
    quant_report->add_option("--samples", samples, "Grid sample count")->capture_default_str();
    quant_report->add_option("--bins", bins, "Histogram bin count")->capture_default_str();
    quant_report->add_option("--format", format, "json or csv")->capture_default_str();
    quant_report->callback([&] {
        const auto report =
            quant::error_report({q_stages, q_levels, q_lo, q_hi},
                                quant::sampling_mode_from_string(sampling), samples, bins);
        if (format == "csv")
            write_output(out_path, report.histogram_csv());
        else if (format == "json")
            write_json(out_path, report.to_json());
        else
            throw CLI::ValidationError("--format", "must be json or csv");
    });

    auto* quant_compare = quant_cmd->add_subcommand("compare", "Worst-case error ratio");
    quant_compare->add_option("--old-stages", old_stages, "Older design stage count")
        ->capture_default_str();
    quant_compare->add_option("--new-stages", new_stages, "Newer design stage count")
        ->capture_default_str();
    quant_compare->add_option("--levels", q_levels, "Levels per stage")->capture_default_str();
    quant_compare->add_option("--lo", q_lo, "Range low end")->capture_default_str();
    quant_compare->add_option("--hi", q_hi, "Range high end")->capture_default_str();
    quant_compare->callback([&] {
        const quant::DacSpec older{old_stages, q_levels, q_lo, q_hi};
        const quant::DacSpec newer{new_stages, q_levels, q_lo, q_hi};
        write_json(out_path, {{"old", {{"stages", older.stage_count}, {"step", older.step()}}},
                              {"new", {{"stages", newer.stage_count}, {"step", newer.step()}}},
                              {"ratio", quant::compare_specs(older, newer)}});
    });

    auto* quant_problem = quant_cmd->add_subcommand("problem", "Error imprinted on a problem");
    quant_problem->add_option("--problem", problem_path, "Ising problem JSON")->required();
    quant_problem->add_option("--stages", q_stages, "DAC stage count")->capture_default_str();
    quant_problem->add_option("--levels", q_levels, "Levels per stage")->capture_default_str();
    quant_problem->add_option("--lo", q_lo, "Range low end")->capture_default_str();
    quant_problem->add_option("--hi", q_hi, "Range high end")->capture_default_str();
    quant_problem->callback([&] {
        const auto p = embedding::IsingProblem::from_json(read_file(problem_path));
        const quant::DacSpec spec{q_stages, q_levels, q_lo, q_hi};
        write_json(out_path, quant::hamiltonian_specification_error(p, spec, spec).to_json());
    });

    // ---- qcp -----------------------------------------------------------
    auto* qcp = app.add_subcommand("qcp", "Quantum critical point energy scales");
    qcp->require_subcommand(1);
    std::string schedule_path;
    double temperature = 0.0, tol = 1e-12;
    int sites = 8;
    double field_a = 1.0, coupling_b = 1.0, resolution = 0.01;
    std::string sign_name = "ferro", boundary_name = "open";

    auto* qcp_find_cmd = qcp->add_subcommand("find", "Locate A(s) = B(s) on a schedule");
    qcp_find_cmd->add_option("--schedule", schedule_path, "Schedule CSV (s,A,B)")->required();
    qcp_find_cmd->add_option("--temperature", temperature, "Bath temperature in kelvin")
        ->required();
    qcp_find_cmd->add_option("--tol", tol, "Crossing tolerance on |A - B|")
        ->capture_default_str();
    qcp_find_cmd->callback([&] {
        const auto sched = energy::AnnealSchedule::from_csv(read_file(schedule_path));
        write_json(out_path, energy::qcp_find(sched, temperature, tol).to_json());
    });

    auto* qcp_tfim = qcp->add_subcommand("tfim", "Ising chain spectrum");
    qcp_tfim->add_option("--sites", sites, "Chain length")->required();
    qcp_tfim->add_option("--a", field_a, "Transverse field magnitude")->capture_default_str();
    qcp_tfim->add_option("--b", coupling_b, "Coupling magnitude")->capture_default_str();
    qcp_tfim->add_option("--sign", sign_name, "ferro or antiferro")->capture_default_str();
    qcp_tfim->add_option("--boundary", boundary_name, "open or periodic")->capture_default_str();
    qcp_tfim->callback([&] {
        const auto spectrum =
            energy::tfim_chain_spectrum(sites, field_a, coupling_b, sign_from_string(sign_name),
                                        boundary_from_string(boundary_name));
        write_json(out_path,
                   {{"E0", spectrum.e0}, {"E1", spectrum.e1}, {"gap", spectrum.gap()}});
    });

    auto* qcp_pseudo = qcp->add_subcommand("pseudo-critical", "Finite-size gap minimum");
    qcp_pseudo->add_option("--sites", sites, "Chain length")->required();
    qcp_pseudo->add_option("--resolution", resolution, "Coarse scan step")->capture_default_str();
    qcp_pseudo->callback([&] {
        write_json(out_path,
                   {{"sites", sites}, {"r_star", energy::pseudo_critical_point(sites, resolution)}});
    });

    // ---- readout -------------------------------------------------------
    auto* readout_cmd = app.add_subcommand("readout", "Shift-register readout");
    readout_cmd->require_subcommand(1);
    int tracks_total = 2, stages_per_attach = 1;
    bool serpentine = false;
    double clock_hz = 30e6;
    int phases = 3;
    std::string states_path;
    std::uint64_t seed = 0;
    int freq_count = 1;
    double f_lo = 5e9, f_hi = 6e9, min_spacing = 0.0;

    const auto make_layout = [&](const topology::TopologyGraph& g) {
        return serpentine ? readout::serpentine_baseline(g)
                          : readout::build_layout(g, tracks_total, stages_per_attach);
    };

    auto* ro_layout = readout_cmd->add_subcommand("layout", "Track and routing plan");
    ro_layout->add_option("--m", topo_m, "Fabric size parameter")->required();
    ro_layout->add_option("--tracks", tracks_total, "Total track count")->capture_default_str();
    ro_layout->add_option("--stages-per-attach", stages_per_attach, "Stage spacing")
        ->capture_default_str();
    ro_layout->add_flag("--serpentine", serpentine, "Single-register baseline layout");
    ro_layout->callback([&] {
        write_json(out_path, make_layout(topology::build_topology(topo_m)).to_json());
    });

    auto* ro_simulate = readout_cmd->add_subcommand("simulate", "Shift-out event trace");
    ro_simulate->add_option("--m", topo_m, "Fabric size parameter")->required();
    ro_simulate->add_option("--tracks", tracks_total, "Total track count")->capture_default_str();
    ro_simulate->add_option("--stages-per-attach", stages_per_attach, "Stage spacing")
        ->capture_default_str();
    ro_simulate->add_flag("--serpentine", serpentine, "Single-register baseline layout");
    ro_simulate->add_option("--states", states_path, "State JSON: [[u,w,k,z,bit], ...]");
    ro_simulate->add_option("--seed", seed, "Random states when no --states file")
        ->capture_default_str();
    ro_simulate->add_option("--clock", clock_hz, "Shift clock in Hz")->capture_default_str();
    ro_simulate->add_option("--phases", phases, "Clock phases per shift")->capture_default_str();
    ro_simulate->callback([&] {
        const auto g = topology::build_topology(topo_m);
        const auto layout = make_layout(g);
        std::map<topology::QubitCoordinate, int> states;
        if (!states_path.empty()) {
            const auto doc = nlohmann::json::parse(read_file(states_path));
            if (!doc.is_array()) throw std::runtime_error("states file must be a JSON array");
            for (const auto& entry : doc) {
                if (!entry.is_array() || entry.size() != 5)
                    throw std::runtime_error("state entries must be [u, w, k, z, bit]");
                states[{entry[0].get<int>(), entry[1].get<int>(), entry[2].get<int>(),
                        entry[3].get<int>()}] = entry[4].get<int>();
            }
        } else {
            std::mt19937_64 rng(seed);
            for (const auto& [q, route] : layout.routing) {
                (void)route;
                states[q] = static_cast<int>(rng() & 1);
            }
        }
        const auto events =
            readout::simulate_readout(layout, states, readout::ClockProgram{clock_hz, phases});
        write_output(out_path, readout::events_csv(events));
    });

    auto* ro_time = readout_cmd->add_subcommand("time", "Worst-case drain time");
    ro_time->add_option("--m", topo_m, "Fabric size parameter")->required();
    ro_time->add_option("--tracks", tracks_total, "Total track count")->capture_default_str();
    ro_time->add_option("--stages-per-attach", stages_per_attach, "Stage spacing")
        ->capture_default_str();
    ro_time->add_flag("--serpentine", serpentine, "Single-register baseline layout");
    ro_time->add_option("--clock", clock_hz, "Shift clock in Hz")->capture_default_str();
    ro_time->add_option("--phases", phases, "Clock phases per shift")->capture_default_str();
    ro_time->callback([&] {
        const readout::ClockProgram clock{clock_hz, phases};
        const auto timing = readout::readout_time(make_layout(topology::build_topology(topo_m)), clock);
        write_json(out_path, {{"total_s", timing.total_s},
                              {"per_track_s", timing.per_track_s},
                              {"bit_rate_hz", clock.bit_rate_hz()}});
    });

    auto* ro_compare = readout_cmd->add_subcommand("compare", "Baseline vs column layout");
    ro_compare->add_option("--m", topo_m, "Fabric size parameter")->required();
    ro_compare->add_option("--tracks", tracks_total, "Total track count")->capture_default_str();
    ro_compare->add_option("--stages-per-attach", stages_per_attach, "Stage spacing")
        ->capture_default_str();
    ro_compare->callback([&] {
        const auto g = topology::build_topology(topo_m);
        const auto baseline = readout::serpentine_baseline(g);
        const auto column = readout::build_layout(g, tracks_total, stages_per_attach);
        write_json(out_path,
                   {{"serpentine_stages", baseline.total_stage_count()},
                    {"column_stages", column.total_stage_count()},
                    {"ratio", readout::compare_layout_lengths(baseline, column)}});
    });

    auto* ro_freqs = readout_cmd->add_subcommand("freqs", "Resonator frequency plan");
    ro_freqs->add_option("--count", freq_count, "Resonator count")->required();
    ro_freqs->add_option("--f-lo", f_lo, "Band low end in Hz")->capture_default_str();
    ro_freqs->add_option("--f-hi", f_hi, "Band high end in Hz")->capture_default_str();
    ro_freqs->add_option("--min-spacing", min_spacing, "Minimum same-line spacing in Hz")
        ->capture_default_str();
    ro_freqs->callback([&] {
        write_json(out_path,
                   readout::allocate_frequencies(freq_count, f_lo, f_hi, min_spacing).to_json());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const capacity_error& e) {
        std::cerr << "error: " << e.what() << " (deficit " << e.deficit() << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
