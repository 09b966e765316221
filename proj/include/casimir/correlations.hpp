#ifndef CASIMIR_CORRELATIONS_HPP
#define CASIMIR_CORRELATIONS_HPP

#include <span>
#include <string>
#include <vector>

#include "casimir/analytic.hpp"
#include "casimir/dynamics.hpp"
#include "casimir/fock.hpp"
#include "casimir/params.hpp"

namespace casimir {

// Normalized intensity correlation samples over a delay grid.
struct G2Series {
    std::vector<double> taus;
    std::vector<double> values;
    SystemParams params;
    DerivedParams derived;
    int dim = 0;
    double n_ss = 0; // numeric steady <n> used for normalization
    // solver hygiene of the underlying regression evolution
    double max_trace_drift = 0;
    double max_hermiticity_defect = 0;
    double min_eigenvalue = 0;
};

// g2(tau) = Tr[n sigma(tau)] / <n>_ss^2 with sigma(0) = a rho_ss a+ evolved
// under the microscopic Liouvillian (quantum regression; the conditioned
// operator keeps its trace <n>_ss, no renormalization). Plateau sanity: once
// the grid extends past 5/(2 gamma_r), the last decade must average to 1
// within 1e-3.
G2Series g2_numeric(const SystemParams& raw, HilbertSpace space, std::span<const double> taus,
                    const IntegratorOptions& opts = {});

// Same regression driven from a caller-supplied steady state and Liouvillian.
G2Series g2_numeric(const SystemParams& raw, const Superoperator& L, const DensityMatrix& rho_ss,
                    std::span<const double> taus, const IntegratorOptions& opts = {});

// <a+^2 a^2>_ss / <n>_ss^2 on the steady state, no time evolution.
double g2_zero(const SystemParams& raw, HilbertSpace space);

// Same ratio on an arbitrary state (sanity inputs: coherent -> 1, thermal -> 2).
double g2_zero_of_state(const DensityMatrix& rho);

struct ConventionReport {
    C2Convention winner = kDefaultC2Convention;
    double candidate_times = 0;    // C2 with the eta_tilde^2 factor multiplied
    double candidate_divided = 0;  // C2 with the factor divided
    double fitted_amplitude = 0;   // least-squares cosine amplitude of the residual
    double sine_fraction = 0;      // |A_sin|/|A_cos|; > 1e-3 flags model mismatch
    bool trivially_indistinguishable = false; // T = 0: both variants vanish
    std::string note;
};

// Adjudicates the eta_tilde^2 placement in C2: subtracts 1 + C1 e^{-2 gamma_r tau}
// from the numeric g2, fits the residual against e^{-2 gamma_r tau} cos/sin(2
// Omega tau), and selects the variant matching the cosine amplitude within
// 1e-4 relative. Throws ConventionUnresolvable when neither is within 1e-2.
ConventionReport resolve_c2(const SystemParams& raw, HilbertSpace space,
                            const IntegratorOptions& opts = {});

// Same adjudication on an already-computed curve.
ConventionReport resolve_c2(const DerivedParams& d, const G2Series& g2);

} // namespace casimir

#endif
