#ifndef CASIMIR_PARAMS_HPP
#define CASIMIR_PARAMS_HPP

#include <complex>
#include <optional>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

// Raw physical inputs. All frequencies and rates are in units of a single
// user-chosen reference frequency (the default configuration uses gamma = 1,
// so times read as gamma*t). hbar = kB = 1 throughout.
struct SystemParams {
    double omega0 = 10.0;  // cavity fundamental frequency
    double epsilon = 0.85; // dimensionless modulation amplitude
    double K = 10.0;       // detuning, nu = 2*omega0 + K
    double gamma = 1.0;    // bare damping rate of the microscopic model
    double kappa = 0.0;    // decay rate of the phenomenological model
    // Temperature enters as the dimensionless ratio hbar*K/(kB*T).
    // The value 0 is reserved for the exact T = 0 limit (N_Omega = 0).
    double hbarK_over_kT = 0.0;

    double pump() const { return epsilon * omega0; } // eps*omega0, the drive strength

    // Throws InvalidParams if any invariant fails.
    void validate() const;
};

enum class Regime { Unbounded, Critical, Bounded };

const char* to_string(Regime r);

struct RegimeReport {
    Regime regime;
    double ratio; // K/(eps*omega0)
    // Whether the phenomenological master equation relaxes to a steady state.
    // Unbounded: requires 2*kappa > eta*eps*omega0. Bounded: eta^2 < 0, so
    // any kappa > 0 suffices. kappa = 0 never relaxes.
    bool phenomenological_steady_state;
};

// Every derived quantity used by the closed forms. Quantities that exist only
// in the bounded regime (ratio > 1) are absent optionals elsewhere, never NaN.
struct DerivedParams {
    // copies of the raw inputs that the formulas consume
    double pump = 0;  // eps*omega0
    double K = 0;
    double gamma = 0;
    double kappa = 0;

    double ratio = 0;                 // K/(eps*omega0)
    Regime regime = Regime::Unbounded;
    double eta_sq = 0;                // 1 - ratio^2 (negative in the bounded regime)
    std::complex<double> eta;         // sqrt(1 - ratio^2), imaginary when bounded

    std::optional<double> eta_tilde;  // sqrt(ratio^2 - 1)
    std::optional<double> r;          // squeezing parameter, 0.5*ln[(K+ew)/(K-ew)]
    std::optional<double> Omega;      // pseudo-oscillator gap, eta_tilde*ew/2
    std::optional<double> gamma_r;    // exp(-r)*gamma
    std::optional<double> N_Omega;    // reservoir occupancy at Omega
    std::optional<double> n_st0;      // sinh^2(r/2)
    std::optional<double> n_st;       // n_st0*(1+2N) + N
    std::optional<double> n_st_ph;    // phenomenological steady mean, when it exists
};

// Unwraps a bounded-regime-only field; throws BoundedRegimeRequired if absent.
double require_bounded(const std::optional<double>& v, const std::string& name);

// Populates every derived quantity. Fields needing ratio > 1 stay absent when
// ratio <= 1; n_st_ph is present whenever (2kappa/ew)^2 - eta^2 > 0.
DerivedParams derive(const SystemParams& raw);

RegimeReport classify_regime(const SystemParams& raw);

// Temperature ratio hbar*K/(kB*T) that produces the requested reservoir
// occupancy N at the gap of the given system (bounded regime only).
double temperature_for_occupancy(const SystemParams& raw, double N_target);

} // namespace casimir

#endif
