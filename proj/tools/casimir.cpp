// casimir — photon generation and correlation in a damped nonstationary cavity.
//
// Subcommands: fig2, fig3, sweep, steady, verify. Exit codes: 0 success,
// 1 criterion/assertion failure, 2 invalid configuration.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "casimir/scenarios.hpp"
#include "casimir/verify.hpp"

namespace {

using namespace casimir;

struct CommonFlags {
    ScenarioConfig cfg;
    std::string convention = "default";
    int points = 0;       // 0: scenario default
    double range = -1.0;  // --t-max / --tau-max; <0: scenario default
};

void add_param_flags(CLI::App* cmd, SystemParams& p) {
    cmd->add_option("--omega0", p.omega0, "cavity fundamental frequency");
    cmd->add_option("--epsilon", p.epsilon, "modulation amplitude");
    cmd->add_option("--K", p.K, "detuning (nu = 2*omega0 + K)");
    cmd->add_option("--gamma", p.gamma, "bare damping rate (microscopic model)");
    cmd->add_option("--kappa", p.kappa, "decay rate (phenomenological model)");
    cmd->add_option("--hbarK-over-kT,--hbarK_over_kT", p.hbarK_over_kT,
                    "temperature as the ratio hbar*K/(kB*T); 0 means T = 0");
}

void add_common_flags(CLI::App* cmd, CommonFlags& f, const char* range_flag) {
    add_param_flags(cmd, f.cfg.params);
    cmd->add_option("--dim", [&f](const CLI::results_t& r) {
        f.cfg.dim = std::stoi(r[0]);
        return true;
    }, "truncated Fock dimension (default: auto-selected)");
    cmd->add_option("--points", f.points, "number of grid points");
    if (range_flag) cmd->add_option(range_flag, f.range, "grid endpoint (in gamma-scaled units)");
    cmd->add_option("--output", f.cfg.output, "CSV output path");
    cmd->add_option("--convention", f.convention,
                    "C2 convention: times, divided, or both")
        ->check(CLI::IsMember({"times", "divided", "both", "default"}));
    cmd->add_flag("--quick", f.cfg.quick, "reduced grids, looser tolerances");
    cmd->add_option("--jobs", f.cfg.jobs, "worker threads")->envname("CASIMIR_JOBS");
    cmd->add_option("--plot-script", [&f](const CLI::results_t& r) {
        f.cfg.plot_script = r[0];
        return true;
    }, "also write a gnuplot script to this path");
    cmd->set_config("--config", "", "plain key = value configuration file");
}

void apply_convention(CommonFlags& f) {
    if (f.convention == "times") f.cfg.convention = C2Convention::TimesEtaTildeSq;
    else if (f.convention == "divided") f.cfg.convention = C2Convention::DividedByEtaTildeSq;
    else if (f.convention == "both") f.cfg.emit_both_conventions = true;
}

int finish(RunRecord rec) {
    rec.write();
    std::cout << rec.report();
    const std::string path =
        rec.config.output.empty() ? rec.config.default_output() : rec.config.output;
    std::cout << "wrote " << path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"damped dynamical-Casimir cavity: photon generation and g2 correlations"};
    app.require_subcommand(1);

    CommonFlags fig2f, fig3f, sweepf, steadyf;

    auto* fig2 = app.add_subcommand("fig2", "average photon number vs gamma*t, numeric + closed form");
    fig2f.cfg.scenario = ScenarioKind::Fig2;
    add_common_flags(fig2, fig2f, "--t-max");
    fig2f.cfg.params.hbarK_over_kT = 3.0;

    auto* fig3 = app.add_subcommand("fig3", "g2(tau) vs gamma*tau, numeric + closed form");
    fig3f.cfg.scenario = ScenarioKind::Fig3;
    add_common_flags(fig3, fig3f, "--tau-max");
    fig3f.cfg.params.hbarK_over_kT = 3.0;

    auto* sweep = app.add_subcommand("sweep", "derived quantities along a parameter axis");
    sweepf.cfg.scenario = ScenarioKind::Sweep;
    sweepf.cfg.grid.points = 50;
    add_common_flags(sweep, sweepf, nullptr);
    sweepf.cfg.params.hbarK_over_kT = 3.0;
    std::string axis = "ratio";
    sweep->add_option("--axis", axis, "sweep axis: ratio (eps*omega0/K), gamma, N")
        ->check(CLI::IsMember({"ratio", "gamma", "N"}));
    sweep->add_option("--from", sweepf.cfg.sweep.from, "axis start");
    sweep->add_option("--to", sweepf.cfg.sweep.to, "axis end");

    auto* steady = app.add_subcommand("steady", "steady-state diagnostics of the microscopic model");
    steadyf.cfg.scenario = ScenarioKind::Steady;
    add_common_flags(steady, steadyf, nullptr);
    steadyf.cfg.params.hbarK_over_kT = 3.0;

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria, exit 0 iff all pass");
    VerifyOptions vopts;
    verify->add_flag("--quick", vopts.quick, "reduced grids, tolerances relaxed to 1e-4");
    verify->add_option("--jobs", vopts.jobs, "worker threads")->envname("CASIMIR_JOBS");
    verify->add_option("--criterion", vopts.criteria, "run only these criteria (1-9)")
        ->check(CLI::Range(1, 9));
    std::string mutate;
    verify->add_option("--mutate", mutate, "fault injection for suite sensitivity checks")
        ->check(CLI::IsMember({"eq14-sign"}))
        ->group(""); // hidden
    verify->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fig2) {
            apply_convention(fig2f);
            if (fig2f.points > 0) fig2f.cfg.grid.points = fig2f.points;
            if (fig2f.range > 0) fig2f.cfg.grid.stop = fig2f.range;
            return finish(run_fig2(fig2f.cfg));
        }
        if (*fig3) {
            apply_convention(fig3f);
            if (fig3f.points > 0) fig3f.cfg.grid.points = fig3f.points;
            if (fig3f.range > 0) fig3f.cfg.grid.stop = fig3f.range;
            return finish(run_fig3(fig3f.cfg));
        }
        if (*sweep) {
            apply_convention(sweepf);
            if (sweepf.points > 0) sweepf.cfg.grid.points = sweepf.points;
            sweepf.cfg.sweep.axis = axis == "ratio"   ? SweepAxis::Ratio
                                    : axis == "gamma" ? SweepAxis::Gamma
                                                      : SweepAxis::NOmega;
            return finish(run_sweep(sweepf.cfg));
        }
        if (*steady) {
            apply_convention(steadyf);
            return finish(run_steady(steadyf.cfg));
        }
        if (*verify) {
            if (mutate == "eq14-sign") vopts.mutation = Mutation::Eq14SignFlip;
            return run_verify(vopts, std::cout);
        }
    } catch (const InvalidParams& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
