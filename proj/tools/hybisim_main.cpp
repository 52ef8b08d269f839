// Command-line front end: `check` validates a model's structural
// assumptions, `bisim` computes the minimum-state quotient of its sampled
// event-level system, `example` runs the bundled thermostat end to end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hybisim/bisim.hpp"
#include "hybisim/errors.hpp"
#include "hybisim/flow.hpp"
#include "hybisim/model.hpp"
#include "hybisim/serialize.hpp"
#include "hybisim/thermostat.hpp"

namespace {

using namespace hybisim;

struct CommonOpts {
    std::string model_path;
    FlowConfig flow;
};

void add_flow_flags(CLI::App* cmd, FlowConfig& cfg) {
    cmd->add_option("--step", cfg.step, "integrator step size");
    cmd->add_option("--event-tol", cfg.event_tol, "boundary localization tolerance");
    cmd->add_option("--eq-tol", cfg.eq_tol, "rest-point field-norm threshold");
    cmd->add_option("--t-max", cfg.t_max, "integration horizon");
}

int write_artifact(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

std::string summary_line(const QuotientGraph& q, RefinementStatus status) {
    return "k=" + std::to_string(q.k) + " classes=" + std::to_string(q.nodes.size()) +
           " grid=" + std::to_string(q.grid_size) + " eta=" + format_double(q.eta) +
           " status=" + refinement_status_name(status);
}

int run_check(const std::string& path, const FlowConfig& cfg, unsigned probes, unsigned seed) {
    HybridAutomaton h = load_model(path);
    auto diags = validate_assumptions(h, cfg, probes, seed);
    for (const auto& d : diags) {
        const char* sev = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
        std::cout << sev << ": " << d.message << "\n";
    }
    if (diags.empty()) {
        std::cout << "model OK: " << h.modes.size() << " modes, " << h.edges.size()
                  << " edges\n";
        return 0;
    }
    return 1;
}

int run_bisim(const HybridAutomaton& h, double eta, double spacing, bool sweep,
              double sweep_factor, int sweep_rounds, int k_max, const FlowConfig& cfg,
              const std::string& format, const std::string& out_path,
              const std::string& dump_points_path) {
    auto render = [&](const QuotientGraph& q) {
        return format == "dot" ? to_dot(q) : to_json(q);
    };

    if (sweep) {
        SweepResult res = eta_sweep(h, eta, sweep_factor, sweep_rounds, cfg, k_max);
        for (std::size_t r = 0; r < res.rounds.size(); ++r) {
            const SweepRound& round = res.rounds[r];
            std::cout << "round=" << r << " eta=" << format_double(round.eta)
                      << " grid=" << round.grid_size << " k=" << round.k
                      << " classes=" << round.classes
                      << " status=" << refinement_status_name(round.status) << "\n";
        }
        std::cout << "sweep=" << (res.stable ? "stable" : "inconclusive")
                  << " rounds=" << res.rounds.size()
                  << " final_classes=" << res.rounds.back().classes << "\n";
        const SweepRound& last = res.rounds.back();
        if (last.status == RefinementStatus::FixedPoint && !out_path.empty()) {
            int rc = write_artifact(render(last.quotient), out_path);
            if (rc) return rc;
        }
        return res.stable ? 0 : 3;
    }

    MappedSystem m(h, cfg);
    SampleGrid grid = sample_grid(m, eta, spacing);
    RefinementResult ref = run_refinement(m, grid, k_max);
    if (ref.status != RefinementStatus::FixedPoint) {
        std::cout << "k=" << ref.k_star << " classes=" << ref.trace.back().class_count
                  << " grid=" << grid.states.size() << " eta=" << format_double(eta)
                  << " status=" << refinement_status_name(ref.status) << "\n";
        return 3;
    }
    QuotientGraph q = build_quotient(m, grid, ref);
    std::string artifact = render(q);
    if (!dump_points_path.empty()) {
        int rc = write_artifact(points_tsv(m, grid, q), dump_points_path);
        if (rc) return rc;
    }
    if (out_path.empty()) {
        // Keep stdout parseable: artifact on stdout, summary on stderr.
        std::cout << artifact;
        std::cerr << summary_line(q, ref.status) << "\n";
    } else {
        int rc = write_artifact(artifact, out_path);
        if (rc) return rc;
        std::cout << summary_line(q, ref.status) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-level quotient construction for hybrid automata"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "validate a model's structural assumptions");
    std::string check_model;
    unsigned probes = 40, seed = 0;
    FlowConfig check_cfg;
    check->add_option("--model", check_model, "model file")->required();
    check->add_option("--probes", probes, "sample points per guard piece");
    check->add_option("--seed", seed, "probe sampling seed");
    add_flow_flags(check, check_cfg);

    // bisim
    auto* bisim = app.add_subcommand("bisim", "compute the minimum-state quotient");
    std::string bisim_model, format = "json", out_path, dump_points_path;
    double eta = 0.0, spacing = 0.0, sweep_factor = 0.5;
    int sweep_rounds = 3, k_max = 100;
    bool sweep = false;
    FlowConfig bisim_cfg;
    bisim->add_option("--model", bisim_model, "model file")->required();
    bisim->add_option("--eta", eta, "sampling resolution")->required();
    bisim->add_option("--spacing", spacing, "surface sample spacing (defaults to eta)");
    bisim->add_flag("--sweep", sweep, "re-run at shrinking resolution and compare");
    bisim->add_option("--sweep-factor", sweep_factor, "resolution shrink factor per round");
    bisim->add_option("--sweep-rounds", sweep_rounds, "sweep round count");
    bisim->add_option("--k-max", k_max, "refinement round limit");
    bisim->add_option("--format", format, "artifact format: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));
    bisim->add_option("--out", out_path, "artifact file (stdout when omitted)");
    bisim->add_option("--dump-points", dump_points_path, "write the classified grid as TSV");
    add_flow_flags(bisim, bisim_cfg);

    // example
    auto* example = app.add_subcommand("example", "run the bundled thermostat end to end");
    std::string ex_format = "json", ex_out;
    example->add_option("--format", ex_format, "artifact format: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));
    example->add_option("--out", ex_out, "artifact file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(check_model, check_cfg, probes, seed);
        if (bisim->parsed()) {
            HybridAutomaton h = load_model(bisim_model);
            return run_bisim(h, eta, spacing > 0.0 ? spacing : eta, sweep, sweep_factor,
                             sweep_rounds, k_max, bisim_cfg, format, out_path,
                             dump_points_path);
        }
        if (example->parsed()) {
            HybridAutomaton h = parse_model(thermostat_model_text());
            FlowConfig cfg;
            auto diags = validate_assumptions(h, cfg, 40, 0);
            for (const auto& d : diags)
                std::cout << (d.severity == Diagnostic::Severity::Error ? "error" : "warning")
                          << ": " << d.message << "\n";
            if (!diags.empty()) return 1;
            std::cout << "model OK: " << h.modes.size() << " modes, " << h.edges.size()
                      << " edges\n";
            double eta0 = 0.05 * std::sqrt(2.0);
            return run_bisim(h, eta0, eta0, false, 0.5, 3, 100, cfg, ex_format, ex_out, "");
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LinkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
