#ifndef CASIMIR_SCENARIOS_HPP
#define CASIMIR_SCENARIOS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casimir/analytic.hpp"
#include "casimir/correlations.hpp"
#include "casimir/dynamics.hpp"
#include "casimir/params.hpp"

namespace casimir {

enum class ScenarioKind { Fig2, Fig3, Sweep, Verify, Steady };

struct GridSpec {
    double start = 0.0;
    double stop = 3.0;  // in gamma*t (fig2) or gamma*tau (fig3)
    int points = 400;
};

enum class SweepAxis { Ratio, Gamma, NOmega }; // eps*omega0/K, gamma, N_Omega

struct SweepSpec {
    SweepAxis axis = SweepAxis::Ratio;
    double from = 0.5;
    double to = 0.99;
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::Fig2;
    SystemParams params{}; // defaults encode the Fig. 2/3 captions
    GridSpec grid;
    std::optional<int> dim; // truncation override; auto rule otherwise
    std::string output;     // CSV path; empty uses "<scenario>.csv"
    std::optional<C2Convention> convention;
    bool emit_both_conventions = false;
    SweepSpec sweep;
    bool quick = false;
    int jobs = 0; // 0: hardware concurrency
    std::optional<std::string> plot_script;

    void validate() const;
    std::string default_output() const;
};

// One finished scenario: column-aligned numeric table plus the header
// metadata that makes the CSV self-describing. Wall time is reported but
// never written into the CSV, which must be bit-identical across runs.
struct RunRecord {
    ScenarioConfig config;
    DerivedParams derived;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    int dim_used = 0;
    double final_trace_drift = 0;
    double min_eigenvalue = 0;
    double worst_tail_mass = 0;
    double wall_seconds = 0;
    std::vector<std::string> notes;

    std::string csv() const;
    // Writes the CSV (and the optional gnuplot script) to config.output.
    void write() const;
    std::string report() const; // human-readable summary for stdout
};

RunRecord run_fig2(const ScenarioConfig& cfg);
RunRecord run_fig3(const ScenarioConfig& cfg);
RunRecord run_sweep(const ScenarioConfig& cfg);
RunRecord run_steady(const ScenarioConfig& cfg);

// Bounded work pool: runs fn(0..n-1) on at most `jobs` threads.
void parallel_for(int jobs, int n, const std::function<void(int)>& fn);
int resolve_jobs(int requested); // requested, else CASIMIR_JOBS, else hardware

// 17-significant-digit float formatting shared by all writers.
std::string fmt17(double v);

namespace detail {
// evolve with the documented single retry at doubled dimension on
// TruncationLeak. build(dim) recreates the Liouvillian, the initial state and
// the observables at the requested dimension.
struct LeakRetrySetup {
    Superoperator L;
    Eigen::MatrixXcd initial;
    std::vector<Operator> observables;
};
struct LeakRetryResult {
    Trajectory traj;
    int dim_used;
    bool retried;
};
LeakRetryResult evolve_with_leak_retry(int dim,
                                       const std::function<LeakRetrySetup(int)>& build,
                                       std::span<const double> grid,
                                       const IntegratorOptions& opts);
} // namespace detail

} // namespace casimir

#endif
