#include "casimir/scenarios.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace casimir {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ScenarioConfig::validate() const {
    params.validate();
    if (grid.points < 2) throw InvalidParams("grid needs at least 2 points");
    if (!(grid.stop > grid.start) || grid.start < 0)
        throw InvalidParams("grid requires stop > start >= 0");
    if (dim && *dim < 2) throw InvalidParams("dimension override must be >= 2");
    if (jobs < 0) throw InvalidParams("jobs must be >= 0");
}

std::string ScenarioConfig::default_output() const {
    switch (scenario) {
        case ScenarioKind::Fig2: return "fig2.csv";
        case ScenarioKind::Fig3: return "fig3.csv";
        case ScenarioKind::Sweep: return "sweep.csv";
        case ScenarioKind::Steady: return "steady.csv";
        case ScenarioKind::Verify: return "verify.csv";
    }
    return "out.csv";
}

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CASIMIR_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

void parallel_for(int jobs, int n, const std::function<void(int)>& fn) {
    jobs = std::min(std::max(jobs, 1), n);
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
    out.front() = a;
    out.back() = b;
    return out;
}

void append_params_header(std::ostringstream& os, const SystemParams& p) {
    os << "# omega0 = " << fmt17(p.omega0) << ", epsilon = " << fmt17(p.epsilon)
       << ", K = " << fmt17(p.K) << ", gamma = " << fmt17(p.gamma)
       << ", kappa = " << fmt17(p.kappa) << ", hbarK_over_kT = " << fmt17(p.hbarK_over_kT)
       << "\n";
}

void append_derived_header(std::ostringstream& os, const DerivedParams& d) {
    auto opt = [](const std::optional<double>& v) {
        return v ? fmt17(*v) : std::string("absent");
    };
    os << "# derived: ratio = " << fmt17(d.ratio) << ", regime = " << to_string(d.regime)
       << ", r = " << opt(d.r) << ", eta_tilde = " << opt(d.eta_tilde)
       << ", Omega = " << opt(d.Omega) << ", gamma_r = " << opt(d.gamma_r)
       << ", N_Omega = " << opt(d.N_Omega) << ", n_st0 = " << opt(d.n_st0)
       << ", n_st = " << opt(d.n_st) << ", n_st_ph = " << opt(d.n_st_ph) << "\n";
}

const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Fig2: return "fig2";
        case ScenarioKind::Fig3: return "fig3";
        case ScenarioKind::Sweep: return "sweep";
        case ScenarioKind::Steady: return "steady";
        case ScenarioKind::Verify: return "verify";
    }
    return "?";
}

} // namespace

std::string RunRecord::csv() const {
    std::ostringstream os;
    os << "# casimir " << scenario_name(config.scenario) << "\n";
    append_params_header(os, config.params);
    append_derived_header(os, derived);
    os << "# dim = " << dim_used << (config.dim ? " (override)" : " (auto)") << "\n";
    os << "# grid: start = " << fmt17(config.grid.start) << ", stop = " << fmt17(config.grid.stop)
       << ", points = " << config.grid.points << "\n";
    for (const auto& n : notes) os << "# " << n << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << columns[c] << (c + 1 < columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!std::isnan(row[c])) os << fmt17(row[c]);
            if (c + 1 < row.size()) os << ",";
        }
        os << "\n";
    }
    return os.str();
}

void RunRecord::write() const {
    const std::string path = config.output.empty() ? config.default_output() : config.output;
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open output file " + path);
        f << csv();
    }
    if (config.plot_script) {
        std::ofstream g(*config.plot_script, std::ios::binary);
        if (!g) throw Error("cannot open plot script " + *config.plot_script);
        g << "set datafile separator ','\n"
          << "set key autotitle columnhead\n"
          << "set grid\n"
          << "set xlabel '" << columns.front() << "'\n"
          << "plot ";
        for (std::size_t c = 1; c < columns.size(); ++c)
            g << "'" << path << "' using 1:" << c + 1 << " with lines"
              << (c + 1 < columns.size() ? ", " : "\n");
        g << "pause -1\n";
    }
}

std::string RunRecord::report() const {
    std::ostringstream os;
    os << "scenario " << scenario_name(config.scenario) << ": " << rows.size() << " rows, dim "
       << dim_used << ", wall " << wall_seconds << " s\n";
    os << "  final trace drift " << final_trace_drift << ", min eigenvalue " << min_eigenvalue
       << ", worst tail mass " << worst_tail_mass << "\n";
    for (const auto& n : notes) os << "  " << n << "\n";
    return os.str();
}

namespace detail {

LeakRetryResult evolve_with_leak_retry(int dim, const std::function<LeakRetrySetup(int)>& build,
                                       std::span<const double> grid,
                                       const IntegratorOptions& opts) {
    try {
        LeakRetrySetup s = build(dim);
        Trajectory t = evolve_matrix(s.L, s.initial, grid, opts, s.observables);
        return {std::move(t), dim, false};
    } catch (const TruncationLeak&) {
        const int dim2 = std::min(2 * dim, 512);
        if (dim2 <= dim) throw;
        LeakRetrySetup s = build(dim2);
        Trajectory t = evolve_matrix(s.L, s.initial, grid, opts, s.observables);
        return {std::move(t), dim2, true};
    }
}

} // namespace detail

namespace {

struct MicroRun {
    std::vector<double> n_values;
    int dim_used;
    bool retried;
    Trajectory traj;
};

// vacuum-start microscopic evolution recording <n>(t)
MicroRun run_microscopic_n(const SystemParams& p, const std::vector<double>& tgrid,
                           std::optional<int> dim_override, const IntegratorOptions& opts) {
    const DerivedParams d = derive(p);
    const double r = require_bounded(d.r, "r");
    const double N = require_bounded(d.N_Omega, "N_Omega");
    const int dim0 = dim_override ? *dim_override : auto_dimension(r, N);

    auto build = [&](int dm) {
        HilbertSpace space(dm);
        detail::LeakRetrySetup s{liouvillian_microscopic(d, space),
                                 DensityMatrix::vacuum(space).matrix(),
                                 {number_operator(space)}};
        return s;
    };
    auto [traj, dim_used, retried] = detail::evolve_with_leak_retry(dim0, build, tgrid, opts);
    MicroRun out{{}, dim_used, retried, std::move(traj)};
    out.n_values.reserve(tgrid.size());
    for (const cplx& v : out.traj.records[0]) out.n_values.push_back(v.real());
    return out;
}

void fill_diagnostics(RunRecord& rec, const Trajectory& traj) {
    if (traj.diagnostics.empty()) return;
    rec.final_trace_drift = traj.diagnostics.back().trace_drift;
    double min_eig = 0, tail = 0;
    for (const auto& dgn : traj.diagnostics) {
        min_eig = std::min(min_eig, dgn.min_eigenvalue);
        tail = std::max(tail, std::abs(dgn.tail_mass));
    }
    rec.min_eigenvalue = min_eig;
    rec.worst_tail_mass = tail;
}

} // namespace

RunRecord run_fig2(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    rec.config.scenario = ScenarioKind::Fig2;

    SystemParams pT = cfg.params;
    SystemParams p0 = cfg.params;
    p0.hbarK_over_kT = 0.0; // the N_Omega = 0 companion curve
    const DerivedParams dT = derive(pT);
    const DerivedParams d0 = derive(p0);
    rec.derived = dT;

    // grid is in gamma*t unless gamma = 0, in which case raw time is used
    const bool scaled = pT.gamma > 0;
    std::vector<double> axis = linspace(cfg.grid.start, cfg.grid.stop, cfg.grid.points);
    std::vector<double> tgrid = axis;
    if (scaled)
        for (double& t : tgrid) t /= pT.gamma;
    else
        rec.notes.push_back("gamma = 0: time column is t in reference units");

    IntegratorOptions opts;
    opts.rtol = cfg.quick ? 1e-9 : 1e-10;
    opts.atol = cfg.quick ? 1e-12 : 1e-13;

    MicroRun runT = run_microscopic_n(pT, tgrid, cfg.dim, opts);
    MicroRun run0 = run_microscopic_n(p0, tgrid, cfg.dim, opts);
    rec.dim_used = runT.dim_used;
    if (runT.retried || run0.retried)
        rec.notes.push_back("truncation leak triggered the doubled-dimension retry");

    rec.columns = {"gamma_t", "n_analytic_T0", "n_numeric_T0", "n_analytic_T", "n_numeric_T"};
    double dev = 0;
    for (int i = 0; i < cfg.grid.points; ++i) {
        const double t = tgrid[i];
        const double a0 = n_microscopic(t, d0);
        const double aT = n_microscopic(t, dT);
        rec.rows.push_back({axis[i], a0, run0.n_values[i], aT, runT.n_values[i]});
        dev = std::max({dev, std::abs(a0 - run0.n_values[i]), std::abs(aT - runT.n_values[i])});
    }
    rec.notes.push_back("analytic-vs-numeric max abs deviation: " + fmt17(dev));
    if (dT.n_st)
        rec.notes.push_back("steady-state plateaus: n_st0 = " + fmt17(*d0.n_st) +
                            ", n_st = " + fmt17(*dT.n_st));
    fill_diagnostics(rec, runT.traj);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    return rec;
}

RunRecord run_fig3(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    rec.config.scenario = ScenarioKind::Fig3;

    SystemParams pT = cfg.params;
    SystemParams p0 = cfg.params;
    p0.hbarK_over_kT = 0.0;
    const DerivedParams dT = derive(pT);
    const DerivedParams d0 = derive(p0);
    rec.derived = dT;
    if (dT.regime != Regime::Bounded)
        throw BoundedRegimeRequired("fig3 requires the bounded regime");

    const bool scaled = pT.gamma > 0;
    std::vector<double> axis = linspace(cfg.grid.start, cfg.grid.stop, cfg.grid.points);
    std::vector<double> taus = axis;
    if (scaled)
        for (double& t : taus) t /= pT.gamma;
    else
        rec.notes.push_back("gamma = 0: delay column is tau in reference units");

    IntegratorOptions opts;
    opts.rtol = cfg.quick ? 1e-9 : 1e-10;
    opts.atol = cfg.quick ? 1e-12 : 1e-13;

    const C2Convention conv = cfg.convention.value_or(kDefaultC2Convention);

    auto g2_for = [&](const SystemParams& p, const DerivedParams& d) {
        const int dim =
            cfg.dim ? *cfg.dim
                    : auto_dimension(require_bounded(d.r, "r"), require_bounded(d.N_Omega, "N"));
        return g2_numeric(p, HilbertSpace(dim), taus, opts);
    };
    G2Series gT = g2_for(pT, dT);
    G2Series g0 = g2_for(p0, d0);
    rec.dim_used = gT.dim;

    rec.columns = {"gamma_tau", "g2_analytic_T0", "g2_numeric_T0", "g2_analytic_T",
                   "g2_numeric_T"};
    if (cfg.emit_both_conventions) {
        rec.columns.push_back("g2_analytic_T_times");
        rec.columns.push_back("g2_analytic_T_divided");
    }
    double dev = 0;
    for (int i = 0; i < cfg.grid.points; ++i) {
        const double tau = taus[i];
        const double a0 = g2_analytic(tau, d0, conv);
        const double aT = g2_analytic(tau, dT, conv);
        std::vector<double> row{axis[i], a0, g0.values[i], aT, gT.values[i]};
        if (cfg.emit_both_conventions) {
            row.push_back(g2_analytic(tau, dT, C2Convention::TimesEtaTildeSq));
            row.push_back(g2_analytic(tau, dT, C2Convention::DividedByEtaTildeSq));
        }
        rec.rows.push_back(std::move(row));
        dev = std::max({dev, std::abs(a0 - g0.values[i]), std::abs(aT - gT.values[i])});
    }
    rec.notes.push_back(std::string("C2 convention: ") + to_string(conv));
    rec.notes.push_back("g2(0): numeric T0 = " + fmt17(g0.values[0]) +
                        ", numeric T = " + fmt17(gT.values[0]) +
                        ", analytic T0 = " + fmt17(g2_analytic(0, d0, conv)) +
                        ", analytic T = " + fmt17(g2_analytic(0, dT, conv)));
    rec.notes.push_back("analytic-vs-numeric max abs deviation: " + fmt17(dev));
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    return rec;
}

RunRecord run_sweep(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    rec.config.scenario = ScenarioKind::Sweep;
    rec.derived = derive(cfg.params);
    rec.dim_used = 0; // closed forms only

    const int n = cfg.grid.points;
    const double lo = cfg.sweep.from, hi = cfg.sweep.to;
    rec.columns = {"axis",  "regime", "r",     "Omega", "gamma_r",
                   "N_Omega", "n_st0",  "n_st",  "g2_0",  "n_st_ph"};
    const C2Convention conv = cfg.convention.value_or(kDefaultC2Convention);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows(n);
    std::vector<std::string> flags(n);
    parallel_for(resolve_jobs(cfg.jobs), n, [&](int i) {
        const double x = lo + (hi - lo) * double(i) / double(n - 1);
        SystemParams p = cfg.params;
        switch (cfg.sweep.axis) {
            case SweepAxis::Ratio: p.epsilon = x * p.K / p.omega0; break;
            case SweepAxis::Gamma: p.gamma = x; break;
            case SweepAxis::NOmega: p.hbarK_over_kT = temperature_for_occupancy(p, x); break;
        }
        const DerivedParams d = derive(p);
        std::vector<double> row{x,
                                double(int(d.regime)),
                                d.r ? *d.r : nan,
                                d.Omega ? *d.Omega : nan,
                                d.gamma_r ? *d.gamma_r : nan,
                                d.N_Omega ? *d.N_Omega : nan,
                                d.n_st0 ? *d.n_st0 : nan,
                                d.n_st ? *d.n_st : nan,
                                nan,
                                d.n_st_ph ? *d.n_st_ph : nan};
        if (d.regime == Regime::Bounded) row[8] = g2_analytic(0.0, d, conv);
        rows[i] = std::move(row);
        if (d.regime != Regime::Bounded)
            flags[i] = "axis = " + fmt17(x) + ": " + to_string(d.regime) +
                       " regime, microscopic-model columns left empty";
    });
    rec.rows = std::move(rows);
    for (auto& f : flags)
        if (!f.empty()) rec.notes.push_back(f);
    rec.notes.insert(rec.notes.begin(),
                     std::string("sweep axis: ") +
                         (cfg.sweep.axis == SweepAxis::Ratio    ? "eps*omega0/K"
                          : cfg.sweep.axis == SweepAxis::Gamma ? "gamma"
                                                               : "N_Omega"));
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    return rec;
}

RunRecord run_steady(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    rec.config.scenario = ScenarioKind::Steady;
    const DerivedParams d = derive(cfg.params);
    rec.derived = d;
    const double r = require_bounded(d.r, "r");
    const double N = require_bounded(d.N_Omega, "N_Omega");
    const int dim = cfg.dim ? *cfg.dim : auto_dimension(r, N);
    rec.dim_used = dim;
    const HilbertSpace space(dim);

    const Superoperator L = liouvillian_microscopic(d, space);
    const DensityMatrix rho = steady_state(L);
    const DensityMatrix reference = squeezed_thermal_state(space, r, N);

    const double n_numeric = expectation(rho, number_operator(space)).real();
    const double fid = fidelity(rho, reference);
    const double g20_numeric = g2_zero_of_state(rho);

    rec.columns = {"n_numeric",      "n_analytic", "fidelity_vs_squeezed_thermal",
                   "purity",         "min_eigenvalue", "tail_mass_3quarters",
                   "g2_zero_numeric", "g2_zero_analytic"};
    rec.rows = {{n_numeric, *d.n_st, fid, rho.purity(), rho.min_eigenvalue(),
                 tail_mass(rho, 3 * dim / 4), g20_numeric,
                 g2_analytic(0.0, d, cfg.convention.value_or(kDefaultC2Convention))}};
    rec.notes.push_back("steady <n> deviation from n_st: " + fmt17(std::abs(n_numeric - *d.n_st)));
    rec.min_eigenvalue = rho.min_eigenvalue();
    rec.worst_tail_mass = tail_mass(rho, 3 * dim / 4);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    return rec;
}

} // namespace casimir
