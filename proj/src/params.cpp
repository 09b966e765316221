#include "casimir/params.hpp"

#include <cmath>

namespace casimir {

void SystemParams::validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(omega0) || bad(epsilon) || bad(K) || bad(gamma) || bad(kappa) ||
        bad(hbarK_over_kT))
        throw InvalidParams("parameters must be finite");
    if (omega0 <= 0) throw InvalidParams("omega0 must be > 0");
    if (epsilon <= 0) throw InvalidParams("epsilon must be > 0");
    if (K < 0) throw InvalidParams("K must be >= 0");
    if (gamma < 0) throw InvalidParams("gamma must be >= 0");
    if (kappa < 0) throw InvalidParams("kappa must be >= 0");
    if (hbarK_over_kT < 0) throw InvalidParams("hbarK_over_kT must be >= 0");
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Unbounded: return "unbounded";
        case Regime::Critical: return "critical";
        case Regime::Bounded: return "bounded";
    }
    return "?";
}

double require_bounded(const std::optional<double>& v, const std::string& name) {
    if (!v)
        throw BoundedRegimeRequired(name + " requires K/(eps*omega0) > 1");
    return *v;
}

DerivedParams derive(const SystemParams& raw) {
    raw.validate();
    const double ew = raw.pump();
    DerivedParams d;
    d.pump = ew;
    d.K = raw.K;
    d.gamma = raw.gamma;
    d.kappa = raw.kappa;
    d.ratio = raw.K / ew;
    d.eta_sq = 1.0 - d.ratio * d.ratio;
    d.eta = std::sqrt(std::complex<double>(d.eta_sq, 0.0));
    d.regime = d.ratio > 1.0   ? Regime::Bounded
               : d.ratio == 1.0 ? Regime::Critical
                                : Regime::Unbounded;

    if (d.regime == Regime::Bounded) {
        d.eta_tilde = std::sqrt(-d.eta_sq);
        d.r = 0.5 * std::log((raw.K + ew) / (raw.K - ew));
        d.Omega = *d.eta_tilde * ew / 2.0;
        d.gamma_r = std::exp(-*d.r) * raw.gamma;
        d.N_Omega = raw.hbarK_over_kT == 0.0
                        ? 0.0
                        : 1.0 / std::expm1(raw.hbarK_over_kT * *d.Omega / raw.K);
        const double s = std::sinh(*d.r / 2.0);
        d.n_st0 = s * s;
        d.n_st = *d.n_st0 * (1.0 + 2.0 * *d.N_Omega) + *d.N_Omega;
    }

    const double damp = 2.0 * raw.kappa / ew;
    if (damp * damp - d.eta_sq > 0.0)
        d.n_st_ph = 0.5 / (damp * damp - d.eta_sq);

    return d;
}

RegimeReport classify_regime(const SystemParams& raw) {
    raw.validate();
    const double ew = raw.pump();
    const double ratio = raw.K / ew;
    RegimeReport rep;
    rep.ratio = ratio;
    rep.regime = ratio > 1.0 ? Regime::Bounded : ratio == 1.0 ? Regime::Critical : Regime::Unbounded;
    // 2*kappa > eta*eps*omega0, with eta^2 < 0 in the bounded regime.
    const double damp = 2.0 * raw.kappa / ew;
    rep.phenomenological_steady_state =
        raw.kappa > 0.0 && damp * damp - (1.0 - ratio * ratio) > 0.0;
    return rep;
}

double temperature_for_occupancy(const SystemParams& raw, double N_target) {
    if (N_target < 0) throw InvalidParams("occupancy must be >= 0");
    if (N_target == 0) return 0.0;
    DerivedParams d = derive(raw);
    const double Omega = require_bounded(d.Omega, "Omega");
    // N = 1/(exp(theta*Omega/K) - 1)  =>  theta = (K/Omega) ln(1 + 1/N)
    return raw.K / Omega * std::log1p(1.0 / N_target);
}

} // namespace casimir
