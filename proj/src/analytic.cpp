#include "casimir/analytic.hpp"

#include <cmath>

namespace casimir {

namespace {

// sin(x)/x with a series guard at small |x|
double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

// sinh(x)/x with the same guard
double sinhc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
    }
    return std::sinh(x) / x;
}

} // namespace

const char* to_string(C2Convention c) {
    return c == C2Convention::TimesEtaTildeSq ? "times" : "divided";
}

double n_lossless(double t, const DerivedParams& p) {
    if (t < 0) throw InvalidParams("time must be >= 0");
    const double half = p.pump * t / 2.0; // ew*t/2
    switch (p.regime) {
        case Regime::Unbounded: {
            const double eta = std::sqrt(p.eta_sq);
            const double s = sinhc(eta * half);
            return half * half * s * s;
        }
        case Regime::Critical:
            return half * half;
        case Regime::Bounded: {
            const double s = sinc(*p.eta_tilde * half);
            return half * half * s * s;
        }
    }
    return 0;
}

double n_phenomenological(double t, const SystemParams& raw, const DerivedParams& p) {
    if (t < 0) throw InvalidParams("time must be >= 0");
    // The expression solves the moment ODEs for any sign of the denominator:
    // a negative formal n_ph yields the growing branch (eps*w0 > 2 kappa at
    // K = 0). Only the degenerate boundary 2 kappa = eta eps*w0, where the
    // true solution picks up secular terms, is refused.
    const double damp = 2.0 * raw.kappa / p.pump;
    const double den = damp * damp - p.eta_sq;
    if (std::abs(den) < 1e-12 * (damp * damp + std::abs(p.eta_sq) + 1e-300))
        throw NoSteadyState("2 kappa = eta eps*omega0: the closed form degenerates");
    const double n_ph = 0.5 / den;
    const double kappa = raw.kappa;
    const double x = p.pump * t;

    // sinh^2(eta x/2), continued to -sin^2(etat x/2) in the bounded regime
    double osc;
    // (kappa/(eta ew)) sinh(eta ew t) -> kappa t sinhc(eta x) -> kappa t sinc(etat x)
    double mix;
    switch (p.regime) {
        case Regime::Unbounded: {
            const double eta = std::sqrt(p.eta_sq);
            const double s = std::sinh(eta * x / 2.0);
            osc = s * s;
            mix = kappa * t * sinhc(eta * x);
            break;
        }
        case Regime::Critical:
            osc = 0.0;
            mix = kappa * t;
            break;
        case Regime::Bounded:
        default: {
            const double s = std::sin(*p.eta_tilde * x / 2.0);
            osc = -s * s;
            mix = kappa * t * sinc(*p.eta_tilde * x);
            break;
        }
    }
    // -expm1 keeps the small-t cancellation between the constant and the decay
    return n_ph * (-std::expm1(-2.0 * kappa * t)) -
           2.0 * n_ph * std::exp(-2.0 * kappa * t) * (osc + mix);
}

double n_microscopic(double t, const DerivedParams& p) {
    if (t < 0) throw InvalidParams("time must be >= 0");
    const double eta_t = require_bounded(p.eta_tilde, "eta_tilde");
    const double gr = require_bounded(p.gamma_r, "gamma_r");
    const double nst = require_bounded(p.n_st, "n_st");
    const double half = p.pump * t / 2.0;
    const double s = sinc(eta_t * half);
    return std::exp(-2.0 * gr * t) * half * half * s * s + (-std::expm1(-2.0 * gr * t)) * nst;
}

double eigenenergy(int n, const DerivedParams& p) {
    const double eta_t = require_bounded(p.eta_tilde, "eta_tilde");
    if (n < 0) throw InvalidParams("level index must be >= 0");
    return (p.pump * eta_t * (n + 0.5) - p.K / 2.0) / 2.0;
}

BMoments b_moment_solution(double t, const DerivedParams& p, const BMoments& init) {
    const double gr = require_bounded(p.gamma_r, "gamma_r");
    const double Om = require_bounded(p.Omega, "Omega");
    const double N = require_bounded(p.N_Omega, "N_Omega");
    BMoments out;
    out.bb = N + (init.bb - N) * std::exp(-2.0 * gr * t);
    out.b2 = init.b2 * std::exp(std::complex<double>(-2.0 * gr * t, -2.0 * Om * t));
    return out;
}

BMoments vacuum_b_moments(const DerivedParams& p) {
    const double r = require_bounded(p.r, "r");
    // b = c a + s a+  =>  <0|b+b|0> = s^2,  <0|b^2|0> = c s <0|a a+|0> = c s
    const double c = std::cosh(r / 2.0);
    const double s = std::sinh(r / 2.0);
    return {s * s, std::complex<double>(c * s, 0.0)};
}

double n_from_b_moments(double bb, std::complex<double> b2, double r) {
    const double s = std::sinh(r / 2.0);
    return std::cosh(r) * bb - std::sinh(r) * b2.real() + s * s;
}

double g2_c1(const DerivedParams& p) {
    const double n0 = require_bounded(p.n_st0, "n_st0");
    const double nst = require_bounded(p.n_st, "n_st");
    const double N = require_bounded(p.N_Omega, "N_Omega");
    const double u = 1.0 + 2.0 * n0;
    return (u * (nst - N * (nst + n0 + 2.0)) + u * u * (2.0 * N * N + N)) / (nst * nst);
}

double g2_c2(const DerivedParams& p, C2Convention conv) {
    const double nst = require_bounded(p.n_st, "n_st");
    const double N = require_bounded(p.N_Omega, "N_Omega");
    const double et2 = require_bounded(p.eta_tilde, "eta_tilde");
    const double base = N * (N + 1.0) / (nst * nst);
    return conv == C2Convention::TimesEtaTildeSq ? base * (et2 * et2) : base / (et2 * et2);
}

double g2_analytic(double tau, const DerivedParams& p, C2Convention conv) {
    tau = std::abs(tau);
    const double gr = require_bounded(p.gamma_r, "gamma_r");
    const double Om = require_bounded(p.Omega, "Omega");
    return 1.0 + std::exp(-2.0 * gr * tau) *
                     (g2_c1(p) + g2_c2(p, conv) * std::cos(2.0 * Om * tau));
}

} // namespace casimir
