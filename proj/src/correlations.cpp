#include "casimir/correlations.hpp"

#include <cmath>

namespace casimir {

namespace {

void check_g2_invariants(const G2Series& s) {
    for (double v : s.values)
        if (!(v >= 0.0))
            throw Error("g2 sample " + std::to_string(v) + " is negative");
    // decorrelation plateau, checked only when the grid reaches deep enough
    const double gr = require_bounded(s.derived.gamma_r, "gamma_r");
    if (!s.taus.empty() && s.taus.back() >= 5.0 / (2.0 * gr)) {
        const double t0 = 0.9 * s.taus.back();
        double acc = 0;
        int cnt = 0;
        for (std::size_t i = 0; i < s.taus.size(); ++i) {
            if (s.taus[i] >= t0) {
                acc += s.values[i];
                ++cnt;
            }
        }
        if (cnt > 0 && std::abs(acc / cnt - 1.0) > 1e-3)
            throw Error("g2 does not decorrelate to 1 (last-decade mean " +
                        std::to_string(acc / cnt) + ")");
    }
}

} // namespace

G2Series g2_numeric(const SystemParams& raw, const Superoperator& L, const DensityMatrix& rho_ss,
                    std::span<const double> taus, const IntegratorOptions& opts) {
    const HilbertSpace space = L.space();
    const Operator a = annihilation(space);
    const Operator n = number_operator(space);

    const double n_ss = expectation(rho_ss, n).real();
    Eigen::MatrixXcd sigma0 = a.matrix() * rho_ss.matrix() * a.matrix().adjoint();

    const std::vector<Operator> obs = {n};
    Trajectory traj = evolve_matrix(L, sigma0, taus, opts, obs);

    G2Series out;
    out.taus.assign(taus.begin(), taus.end());
    out.params = raw;
    out.derived = derive(raw);
    out.dim = space.dim;
    out.n_ss = n_ss;
    out.values.reserve(taus.size());
    for (const cplx& v : traj.records[0]) out.values.push_back(v.real() / (n_ss * n_ss));
    for (const auto& dgn : traj.diagnostics) {
        out.max_trace_drift = std::max(out.max_trace_drift, dgn.trace_drift);
        out.max_hermiticity_defect = std::max(out.max_hermiticity_defect, dgn.hermiticity_defect);
        out.min_eigenvalue = std::min(out.min_eigenvalue, dgn.min_eigenvalue);
    }
    check_g2_invariants(out);
    return out;
}

G2Series g2_numeric(const SystemParams& raw, HilbertSpace space, std::span<const double> taus,
                    const IntegratorOptions& opts) {
    const DerivedParams d = derive(raw);
    if (d.regime != Regime::Bounded)
        throw BoundedRegimeRequired("g2 regression requires the bounded regime");
    const Superoperator L = liouvillian_microscopic(d, space);
    const DensityMatrix rho_ss = steady_state(L);
    return g2_numeric(raw, L, rho_ss, taus, opts);
}

double g2_zero_of_state(const DensityMatrix& rho) {
    const Operator a = annihilation(rho.space());
    const Operator ad = a.adjoint();
    const double num = expectation(rho, ad * ad * a * a).real();
    const double den = expectation(rho, ad * a).real();
    return num / (den * den);
}

double g2_zero(const SystemParams& raw, HilbertSpace space) {
    const DerivedParams d = derive(raw);
    if (d.regime != Regime::Bounded)
        throw BoundedRegimeRequired("g2(0) requires the bounded regime");
    return g2_zero_of_state(steady_state(liouvillian_microscopic(d, space)));
}

ConventionReport resolve_c2(const DerivedParams& d, const G2Series& g2) {
    const double gr = require_bounded(d.gamma_r, "gamma_r");
    const double Om = require_bounded(d.Omega, "Omega");
    const double N = require_bounded(d.N_Omega, "N_Omega");

    ConventionReport rep;
    if (N == 0.0) {
        rep.trivially_indistinguishable = true;
        rep.winner = kDefaultC2Convention;
        rep.note = "indistinguishable, trivially: both conventions give C2 = 0 at T = 0";
        return rep;
    }
    rep.candidate_times = g2_c2(d, C2Convention::TimesEtaTildeSq);
    rep.candidate_divided = g2_c2(d, C2Convention::DividedByEtaTildeSq);

    const double C1 = g2_c1(d);
    // linear least squares of the residual on the two beat basis functions
    double scc = 0, sss = 0, scs = 0, rc = 0, rs = 0;
    for (std::size_t i = 0; i < g2.taus.size(); ++i) {
        const double env = std::exp(-2.0 * gr * g2.taus[i]);
        const double bc = env * std::cos(2.0 * Om * g2.taus[i]);
        const double bs = env * std::sin(2.0 * Om * g2.taus[i]);
        const double res = g2.values[i] - 1.0 - C1 * env;
        scc += bc * bc;
        sss += bs * bs;
        scs += bc * bs;
        rc += bc * res;
        rs += bs * res;
    }
    const double det = scc * sss - scs * scs;
    const double A_cos = (sss * rc - scs * rs) / det;
    const double A_sin = (scc * rs - scs * rc) / det;
    rep.fitted_amplitude = A_cos;
    rep.sine_fraction = std::abs(A_sin) / std::max(std::abs(A_cos), 1e-300);

    const double rel_times = std::abs(A_cos - rep.candidate_times) / std::abs(A_cos);
    const double rel_divided = std::abs(A_cos - rep.candidate_divided) / std::abs(A_cos);
    if (rel_divided <= 1e-4) {
        rep.winner = C2Convention::DividedByEtaTildeSq;
    } else if (rel_times <= 1e-4) {
        rep.winner = C2Convention::TimesEtaTildeSq;
    } else if (std::min(rel_times, rel_divided) <= 1e-2) {
        rep.winner = rel_divided < rel_times ? C2Convention::DividedByEtaTildeSq
                                             : C2Convention::TimesEtaTildeSq;
    } else {
        throw ConventionUnresolvable(
            "fitted beat amplitude " + std::to_string(A_cos) + " matches neither C2 variant (" +
            std::to_string(rep.candidate_times) + ", " + std::to_string(rep.candidate_divided) +
            ")");
    }
    rep.note = std::string("fitted amplitude matches the '") + to_string(rep.winner) +
               "' variant (rel. dev. times " + std::to_string(rel_times) + ", divided " +
               std::to_string(rel_divided) + ")";
    if (rep.sine_fraction > 1e-3)
        rep.note += "; WARNING: sine component fraction " + std::to_string(rep.sine_fraction);
    return rep;
}

ConventionReport resolve_c2(const SystemParams& raw, HilbertSpace space,
                            const IntegratorOptions& opts) {
    const DerivedParams d = derive(raw);
    const double N = require_bounded(d.N_Omega, "N_Omega");
    if (N == 0.0) {
        ConventionReport rep;
        rep.trivially_indistinguishable = true;
        rep.winner = kDefaultC2Convention;
        rep.note = "indistinguishable, trivially: both conventions give C2 = 0 at T = 0";
        return rep;
    }
    // default delay grid: 400 points over gamma*tau in [0, 3]
    std::vector<double> taus(400);
    for (std::size_t i = 0; i < taus.size(); ++i)
        taus[i] = 3.0 * double(i) / double(taus.size() - 1) / raw.gamma;
    const G2Series g2 = g2_numeric(raw, space, taus, opts);
    return resolve_c2(d, g2);
}

} // namespace casimir
