#ifndef CASIMIR_DYNAMICS_HPP
#define CASIMIR_DYNAMICS_HPP

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "casimir/fock.hpp"
#include "casimir/params.hpp"

namespace casimir {

// Linear map on column-stacked density matrices, stored sparse: the
// Liouvillians here have O(dim^2) nonzeros out of dim^4 entries. dense() is
// available for small-space diagnostics (spectra, null structure).
class Superoperator {
  public:
    using SpMat = Eigen::SparseMatrix<cplx>;

    Superoperator(HilbertSpace space, SpMat m);

    const HilbertSpace& space() const { return space_; }
    int dim() const { return space_.dim; }
    const SpMat& matrix() const { return m_; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return m_ * v; }
    // unvec(L vec(rho))
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    // max |vec(I)^T L|: exact zero for any trace-preserving generator
    double trace_preservation_defect() const;

    Superoperator& operator+=(const Superoperator& o);
    friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
    friend Superoperator operator*(cplx s, const Superoperator& a) {
        return Superoperator(a.space_, SpMat(s * a.m_));
    }
    friend Superoperator operator*(double s, const Superoperator& a) {
        return Superoperator(a.space_, SpMat(cplx(s, 0) * a.m_));
    }

  private:
    HilbertSpace space_;
    SpMat m_;
};

// L[x] rho = 2 x rho x+ - x+x rho - rho x+x   (factor-2 convention)
Superoperator lindblad_dissipator(const Operator& x);

// -i[H, .] as a superoperator
Superoperator hamiltonian_superoperator(const Operator& H);

// d rho/dt = -i[H_S, rho] + gamma_r (N+1) L[b] rho + gamma_r N L[b+] rho
Superoperator liouvillian_microscopic(const DerivedParams& p, HilbertSpace space);

// d rho/dt = -i[H_eff, rho] + kappa L[a] rho
Superoperator liouvillian_phenomenological(const SystemParams& p, HilbertSpace space);

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    bool keep_states = false;        // retain the full state at each grid point
    double leak_threshold = 1e-8;    // tail mass allowed at the 3/4-dim marker
    bool spectral_diagnostics = true; // record the minimum eigenvalue per point
};

struct PointDiagnostics {
    double trace_drift = 0;       // |Tr rho(t) - Tr rho(0)|
    double hermiticity_defect = 0;
    double min_eigenvalue = 0;    // NaN when spectral diagnostics are off
    double tail_mass = 0;         // at the 3/4-dim marker
};

// Time grid plus whatever was recorded along the flow. Observables must be
// registered before evolve; full states are retained only on request to
// bound memory.
struct Trajectory {
    Trajectory() : space(2) {}
    explicit Trajectory(HilbertSpace s) : space(s) {}

    HilbertSpace space;
    std::vector<double> times;
    std::vector<Operator> observables;
    std::vector<std::vector<cplx>> records; // [observable][grid point]
    std::vector<Eigen::MatrixXcd> states;   // populated iff keep_states
    std::vector<PointDiagnostics> diagnostics;
    double initial_trace = 1.0;
    std::size_t rhs_evaluations = 0;

    // Validated state access (keep_states runs only).
    DensityMatrix state_at(std::size_t i) const;
};

struct ObservableSeries {
    std::string label;
    std::vector<double> times;
    std::vector<cplx> values;
};

// Adaptive Dormand-Prince 5(4) on the vectorized master equation. The grid
// must be monotone from 0; every grid point is hit exactly. Throws
// ToleranceNotMet on step underflow and TruncationLeak when the tail marker
// exceeds opts.leak_threshold.
Trajectory evolve(const Superoperator& L, const DensityMatrix& rho0,
                  std::span<const double> grid, const IntegratorOptions& opts = {},
                  std::span<const Operator> observables = {});

// Same integrator for a non-unit-trace conditioned operator (quantum
// regression input); density-matrix invariants are not imposed.
Trajectory evolve_matrix(const Superoperator& L, const Eigen::MatrixXcd& m0,
                         std::span<const double> grid, const IntegratorOptions& opts = {},
                         std::span<const Operator> observables = {});

// Null vector of L by shift-inverted iteration on the sparse matrix,
// Hermitized, trace-normalized and eigen-clamped within -1e-10. Throws
// DegenerateKernel when a second near-null direction exists and NoSteadyState
// when the kernel element carries no trace.
DensityMatrix steady_state(const Superoperator& L);

// Long-time-integration cross-check route for the steady state.
DensityMatrix steady_state_by_integration(const Superoperator& L, const DensityMatrix& rho0,
                                          double horizon, const IntegratorOptions& opts = {});

// Tr(rho(t) O) along a finished trajectory. O must have been registered
// (matrix equality) unless states were retained.
ObservableSeries observable_series(const Trajectory& traj, const Operator& O);

} // namespace casimir

#endif
