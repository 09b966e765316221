#include "casimir/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace casimir {

namespace {

using SpMat = Superoperator::SpMat;

SpMat sparse_identity(int n) {
    SpMat I(n, n);
    I.setIdentity();
    return I;
}

// vec(A rho B) = (B^T kron A) vec(rho), column stacking
SpMat left_right(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const SpMat As = A.sparseView(1.0, 1e-300);
    const SpMat Bt = B.transpose().sparseView(1.0, 1e-300);
    return Eigen::kroneckerProduct(Bt, As).eval();
}

SpMat left_only(const Eigen::MatrixXcd& A) {
    const SpMat As = A.sparseView(1.0, 1e-300);
    return Eigen::kroneckerProduct(sparse_identity(int(A.rows())), As).eval();
}

SpMat right_only(const Eigen::MatrixXcd& B) {
    const SpMat Bt = B.transpose().sparseView(1.0, 1e-300);
    return Eigen::kroneckerProduct(Bt, sparse_identity(int(B.rows()))).eval();
}

} // namespace

// --- Superoperator -----------------------------------------------------------

Superoperator::Superoperator(HilbertSpace space, SpMat m) : space_(space), m_(std::move(m)) {
    const long n = long(space_.dim) * space_.dim;
    if (m_.rows() != n || m_.cols() != n)
        throw DimensionMismatch("superoperator matrix must be dim^2 x dim^2");
}

Eigen::MatrixXcd Superoperator::apply(const Eigen::MatrixXcd& rho) const {
    if (rho.rows() != space_.dim || rho.cols() != space_.dim)
        throw DimensionMismatch("superoperator applied to a state of the wrong dimension");
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    Eigen::VectorXcd w = m_ * v;
    return Eigen::Map<const Eigen::MatrixXcd>(w.data(), space_.dim, space_.dim);
}

double Superoperator::trace_preservation_defect() const {
    const int d = space_.dim;
    Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(long(d) * d);
    for (int i = 0; i < d; ++i) tr(long(i) * d + i) = 1.0;
    return (tr * m_).cwiseAbs().maxCoeff();
}

Superoperator& Superoperator::operator+=(const Superoperator& o) {
    if (!(space_ == o.space_)) throw DimensionMismatch("superoperator+ on different spaces");
    m_ += o.m_;
    return *this;
}

// --- generators --------------------------------------------------------------

Superoperator lindblad_dissipator(const Operator& x) {
    const Eigen::MatrixXcd& m = x.matrix();
    const Eigen::MatrixXcd xdx = m.adjoint() * m;
    SpMat D = 2.0 * left_right(m, m.adjoint());
    D -= left_only(xdx);
    D -= right_only(xdx);
    return Superoperator(x.space(), std::move(D));
}

Superoperator hamiltonian_superoperator(const Operator& H) {
    SpMat C = left_only(H.matrix());
    C -= right_only(H.matrix());
    return Superoperator(H.space(), SpMat(cplx(0, -1) * C));
}

Superoperator liouvillian_microscopic(const DerivedParams& p, HilbertSpace space) {
    const double r = require_bounded(p.r, "r");
    const double gr = require_bounded(p.gamma_r, "gamma_r");
    const double N = require_bounded(p.N_Omega, "N_Omega");
    auto [b, bd] = bogoliubov_pair(space, r);
    Superoperator L = hamiltonian_superoperator(pseudo_hamiltonian(space, p));
    L += gr * (N + 1.0) * lindblad_dissipator(b);
    if (N > 0) L += gr * N * lindblad_dissipator(bd);
    return L;
}

Superoperator liouvillian_phenomenological(const SystemParams& p, HilbertSpace space) {
    p.validate();
    Superoperator L = hamiltonian_superoperator(effective_hamiltonian(space, p));
    if (p.kappa > 0) L += p.kappa * lindblad_dissipator(annihilation(space));
    return L;
}

// --- trajectory --------------------------------------------------------------

DensityMatrix Trajectory::state_at(std::size_t i) const {
    if (states.empty())
        throw ObservableNotRegistered("states were not retained; rerun with keep_states");
    return DensityMatrix(space, states.at(i));
}

ObservableSeries observable_series(const Trajectory& traj, const Operator& O) {
    if (O.space().dim != traj.space.dim)
        throw DimensionMismatch("observable does not match the trajectory space");
    for (std::size_t k = 0; k < traj.observables.size(); ++k) {
        if ((traj.observables[k].matrix() - O.matrix()).cwiseAbs().maxCoeff() < 1e-14) {
            return {"", traj.times, traj.records[k]};
        }
    }
    if (!traj.states.empty()) {
        ObservableSeries s{"", traj.times, {}};
        s.values.reserve(traj.states.size());
        for (const auto& rho : traj.states)
            s.values.push_back((O.matrix().transpose().cwiseProduct(rho)).sum());
        return s;
    }
    throw ObservableNotRegistered("observable was not registered before evolve");
}

// --- integrator --------------------------------------------------------------

namespace {

// Dormand-Prince 5(4), FSAL
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

double error_norm(const Eigen::VectorXcd& err, const Eigen::VectorXcd& y0,
                  const Eigen::VectorXcd& y1, double atol, double rtol) {
    const long n = err.size();
    double acc = 0;
    for (long i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double q = std::abs(err(i)) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / double(n));
}

double initial_step(const SpMat& L, const Eigen::VectorXcd& y0, double atol, double rtol,
                    double max_step) {
    const Eigen::VectorXcd f0 = L * y0;
    double d0 = 0, d1 = 0;
    for (long i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0(i));
        d0 += std::pow(std::abs(y0(i)) / sc, 2);
        d1 += std::pow(std::abs(f0(i)) / sc, 2);
    }
    d0 = std::sqrt(d0 / double(y0.size()));
    d1 = std::sqrt(d1 / double(y0.size()));
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, max_step);
    const Eigen::VectorXcd y1 = y0 + h0 * f0;
    const Eigen::VectorXcd f1 = L * y1;
    double d2 = 0;
    for (long i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0(i));
        d2 += std::pow(std::abs(f1(i) - f0(i)) / sc, 2);
    }
    d2 = std::sqrt(d2 / double(y0.size())) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m > 1e-15 ? std::pow(0.01 / m, 0.2) : std::max(1e-6, h0 * 1e-3);
    return std::min({100 * h0, h1, max_step});
}

Trajectory run_integrator(const Superoperator& Lop, const Eigen::MatrixXcd& m0,
                          std::span<const double> grid, const IntegratorOptions& opts,
                          std::span<const Operator> observables) {
    const int d = Lop.dim();
    if (m0.rows() != d || m0.cols() != d)
        throw DimensionMismatch("initial state does not match the Liouvillian space");
    if (grid.empty() || grid.front() != 0.0)
        throw InvalidParams("time grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw InvalidParams("time grid must be strictly increasing");

    const SpMat& L = Lop.matrix();
    Trajectory traj{Lop.space(), {}, {}, {}, {}, {}, 0.0, 0};
    traj.observables.assign(observables.begin(), observables.end());
    traj.records.resize(observables.size());
    traj.initial_trace = m0.trace().real();

    // pre-transpose observables so recording is an elementwise product
    std::vector<Eigen::MatrixXcd> obs_t;
    obs_t.reserve(observables.size());
    for (const auto& O : observables) {
        if (O.space().dim != d) throw DimensionMismatch("observable on the wrong space");
        obs_t.push_back(O.matrix().transpose());
    }

    Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(m0.data(), m0.size());

    auto record = [&](double t, const Eigen::VectorXcd& yv) {
        Eigen::Map<const Eigen::MatrixXcd> rho(yv.data(), d, d);
        traj.times.push_back(t);
        for (std::size_t k = 0; k < obs_t.size(); ++k)
            traj.records[k].push_back(obs_t[k].cwiseProduct(rho).sum());
        if (opts.keep_states) traj.states.push_back(rho);
        PointDiagnostics diag;
        double tr = 0;
        for (int i = 0; i < d; ++i) tr += rho(i, i).real();
        diag.trace_drift = std::abs(tr - traj.initial_trace);
        diag.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        diag.tail_mass = tail_mass(Eigen::MatrixXcd(rho), 3 * d / 4);
        if (opts.spectral_diagnostics) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
            diag.min_eigenvalue = es.eigenvalues().minCoeff();
        } else {
            diag.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        }
        traj.diagnostics.push_back(diag);
        if (std::abs(diag.tail_mass) > opts.leak_threshold)
            throw TruncationLeak("tail mass " + std::to_string(diag.tail_mass) + " at t = " +
                                 std::to_string(t) + " exceeds " +
                                 std::to_string(opts.leak_threshold));
    };

    record(0.0, y);

    double t = 0.0;
    double h = initial_step(L, y, opts.atol, opts.rtol, opts.max_step);
    traj.rhs_evaluations += 2;
    Eigen::VectorXcd k1 = L * y;
    ++traj.rhs_evaluations;
    Eigen::VectorXcd k2, k3, k4, k5, k6, k7, ynew, yerr;

    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        const double T = grid[gi];
        while (t < T) {
            const double h_left = T - t;
            double hs = std::min({h, h_left, opts.max_step});
            const bool hit = hs >= h_left * (1.0 - 1e-14);
            if (hit) hs = h_left;
            if (hs < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
                throw ToleranceNotMet("step size underflow at t = " + std::to_string(t));

            using D = Dopri5;
            k2 = L * (y + hs * (D::a21 * k1));
            k3 = L * (y + hs * (D::a31 * k1 + D::a32 * k2));
            k4 = L * (y + hs * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
            k5 = L * (y + hs * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
            k6 = L * (y + hs * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 +
                                D::a65 * k5));
            ynew = y + hs * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
            k7 = L * ynew;
            traj.rhs_evaluations += 6;
            yerr = hs * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 +
                         D::e7 * k7);
            const double err = error_norm(yerr, y, ynew, opts.atol, opts.rtol);

            if (err <= 1.0) {
                t = hit ? T : t + hs;
                y.swap(ynew);
                k1.swap(k7); // FSAL
                const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h = hs * std::clamp(grow, 0.2, 5.0);
            } else {
                h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            }
        }
        record(T, y);
    }
    return traj;
}

} // namespace

Trajectory evolve(const Superoperator& L, const DensityMatrix& rho0,
                  std::span<const double> grid, const IntegratorOptions& opts,
                  std::span<const Operator> observables) {
    return run_integrator(L, rho0.matrix(), grid, opts, observables);
}

Trajectory evolve_matrix(const Superoperator& L, const Eigen::MatrixXcd& m0,
                         std::span<const double> grid, const IntegratorOptions& opts,
                         std::span<const Operator> observables) {
    return run_integrator(L, m0, grid, opts, observables);
}

// --- steady state ------------------------------------------------------------

DensityMatrix steady_state(const Superoperator& Lop) {
    const int d = Lop.dim();
    const long n = long(d) * d;
    const SpMat& L = Lop.matrix();

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    double sigma = 1e-10;
    for (;;) {
        SpMat M = L;
        SpMat I(n, n);
        I.setIdentity();
        M -= sigma * I;
        M.makeCompressed();
        lu.compute(M);
        if (lu.info() == Eigen::Success) break;
        sigma *= 100.0;
        if (sigma > 1e-4) throw Error("steady state: shifted Liouvillian failed to factorize");
    }

    // inverse iteration from vec(I): guaranteed overlap with the kernel
    // element, whose trace is nonzero for a relaxing model
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < d; ++i) v(long(i) * d + i) = 1.0;
    v.normalize();
    for (int it = 0; it < 3; ++it) {
        v = lu.solve(v);
        v.normalize();
    }
    const double resid = (L * v).norm();
    const double scale = std::max(1.0, Eigen::Map<const Eigen::VectorXcd>(L.valuePtr(), L.nonZeros())
                                           .cwiseAbs()
                                           .maxCoeff());
    if (resid > 1e-9 * scale)
        throw Error("steady state: inverse iteration residual " + std::to_string(resid));

    // probe for a second near-null direction
    std::mt19937 rng(0x5eed);
    std::normal_distribution<double> dist;
    Eigen::VectorXcd w(n);
    for (long i = 0; i < n; ++i) w(i) = cplx(dist(rng), dist(rng));
    w -= v.dot(w) * v;
    w.normalize();
    double growth = 1.0;
    for (int it = 0; it < 3; ++it) {
        w = lu.solve(w);
        w -= v.dot(w) * v;
        growth = w.norm();
        if (growth == 0.0) break;
        w /= growth;
    }
    const double lambda2 = growth > 0 ? 1.0 / growth + sigma : 1e300;
    if (lambda2 < 1e-8)
        throw DegenerateKernel("second singular value " + std::to_string(lambda2) +
                               " of the Liouvillian is within 1e-8 of zero");

    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-8) throw NoSteadyState("Liouvillian kernel element carries no trace");
    rho /= tr;
    rho = ((rho + rho.adjoint()) / 2.0).eval();

    // eigen-clamp within the stated tolerance; anything worse is a failure
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10)
        throw NoSteadyState("kernel element is not positive semidefinite (min eigenvalue " +
                            std::to_string(min_eig) + ")");
    if (min_eig < 0) {
        Eigen::VectorXd wclamp = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * wclamp.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        rho /= rho.trace().real();
    }
    return DensityMatrix(Lop.space(), std::move(rho));
}

DensityMatrix steady_state_by_integration(const Superoperator& L, const DensityMatrix& rho0,
                                          double horizon, const IntegratorOptions& opts) {
    if (horizon <= 0) throw InvalidParams("integration horizon must be > 0");
    const double grid[] = {0.0, horizon};
    IntegratorOptions o = opts;
    o.keep_states = true;
    Trajectory traj = evolve(L, rho0, grid, o);
    return traj.state_at(traj.states.size() - 1);
}

} // namespace casimir
