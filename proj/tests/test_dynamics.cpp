#include "doctest.h"

#include <cmath>
#include <random>

#include "casimir/analytic.hpp"
#include "casimir/dynamics.hpp"

using namespace casimir;

namespace {

SystemParams fig2() {
    SystemParams p;
    p.omega0 = 10.0;
    p.epsilon = 0.85;
    p.K = 10.0;
    p.gamma = 1.0;
    p.hbarK_over_kT = 3.0;
    return p;
}

Eigen::MatrixXcd random_hermitian_state(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(dist(rng), dist(rng));
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
    return out;
}

} // namespace

TEST_CASE("lindblad dissipator") {
    const HilbertSpace s(6);
    SUBCASE("zero operator gives the zero superoperator") {
        const Superoperator D = lindblad_dissipator(Operator::zero(s));
        CHECK(D.dense().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("L[a] on |1><1| by hand") {
        // 2 a |1><1| a+ - a+a |1><1| - |1><1| a+a = 2|0><0| - 2|1><1|
        const Superoperator D = lindblad_dissipator(annihilation(s));
        Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Zero(6, 6);
        p1(1, 1) = 1.0;
        const Eigen::MatrixXcd out = D.apply(p1);
        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(6, 6);
        expect(0, 0) = 2.0;
        expect(1, 1) = -2.0;
        CHECK((out - expect).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("dissipators and Liouvillians preserve the trace") {
        std::mt19937 rng(3);
        std::normal_distribution<double> dist;
        Eigen::MatrixXcd x(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) x(i, j) = cplx(dist(rng), dist(rng));
        const Superoperator D = lindblad_dissipator(Operator(s, x));
        CHECK(D.trace_preservation_defect() < 1e-12);
        for (unsigned seed : {1u, 2u, 3u}) {
            const Eigen::MatrixXcd rho = random_hermitian_state(6, seed);
            CHECK(std::abs(D.apply(rho).trace()) < 1e-13);
        }
    }
}

TEST_CASE("liouvillian structure") {
    const SystemParams p = fig2();
    const DerivedParams d = derive(p);
    const HilbertSpace s(12);
    const Superoperator Lm = liouvillian_microscopic(d, s);
    SystemParams pp = fig2();
    pp.kappa = 0.8;
    const Superoperator Lp = liouvillian_phenomenological(pp, s);

    SUBCASE("vectorized identity is a left null vector") {
        CHECK(Lm.trace_preservation_defect() < 1e-9);
        CHECK(Lp.trace_preservation_defect() < 1e-9);
    }
    SUBCASE("generator preserves Hermiticity") {
        for (unsigned seed : {5u, 6u}) {
            const Eigen::MatrixXcd rho = random_hermitian_state(12, seed);
            CHECK((Lm.apply(rho) - Lm.apply(rho).adjoint()).cwiseAbs().maxCoeff() < 1e-11);
            CHECK((Lp.apply(rho) - Lp.apply(rho).adjoint()).cwiseAbs().maxCoeff() < 1e-11);
        }
    }
    SUBCASE("spectrum is dissipative") {
        for (const Superoperator* L : {&Lm, &Lp}) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L->dense(), false);
            CHECK(es.eigenvalues().real().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("slowest nonzero microscopic mode decays at gamma_r") {
        // The single-quantum coherence sector relaxes at gamma_r; the moment
        // observables of Eqs. (13) live in the sector decaying at 2 gamma_r.
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Lm.dense(), false);
        double slowest = -1e300;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double re = es.eigenvalues()(i).real();
            if (re < -1e-7) slowest = std::max(slowest, re);
        }
        CHECK(slowest == doctest::Approx(-*d.gamma_r).epsilon(1e-6));
    }
    SUBCASE("dense and sparse application agree") {
        const Eigen::MatrixXcd rho = random_hermitian_state(12, 9);
        const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), 144);
        const Eigen::VectorXcd w1 = Lm.apply(v);
        const Eigen::VectorXcd w2 = Lm.dense() * v;
        CHECK((w1 - w2).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("evolve basics") {
    const HilbertSpace s(8);
    SUBCASE("zero generator keeps the state constant") {
        const Superoperator L(s, Superoperator::SpMat(64, 64));
        const DensityMatrix rho0(s, random_hermitian_state(8, 1));
        const std::vector<double> grid = {0.0, 0.5, 1.0};
        const std::vector<Operator> obs = {number_operator(s)};
        const Trajectory t = evolve(L, rho0, grid, {}, obs);
        for (const cplx& v : t.records[0])
            CHECK(std::abs(v - t.records[0][0]) < 1e-13);
    }
    SUBCASE("grid must be monotone from zero") {
        const Superoperator L(s, Superoperator::SpMat(64, 64));
        const DensityMatrix rho0 = DensityMatrix::vacuum(s);
        const std::vector<double> bad1 = {0.1, 0.5};
        const std::vector<double> bad2 = {0.0, 0.5, 0.4};
        CHECK_THROWS_AS(evolve(L, rho0, bad1, {}), InvalidParams);
        CHECK_THROWS_AS(evolve(L, rho0, bad2, {}), InvalidParams);
    }
    SUBCASE("truncation leak aborts the run") {
        const SystemParams p = fig2();
        const DerivedParams d = derive(p);
        const HilbertSpace tiny(16);
        const Superoperator L = liouvillian_microscopic(d, tiny);
        const std::vector<double> grid = linspace(0.0, 1.0, 5);
        CHECK_THROWS_AS(evolve(L, DensityMatrix::vacuum(tiny), grid, {}), TruncationLeak);
    }
}

TEST_CASE("microscopic evolution matches the closed form at T = 0") {
    SystemParams p = fig2();
    p.hbarK_over_kT = 0.0;
    const DerivedParams d = derive(p);
    const HilbertSpace s(64);
    const Superoperator L = liouvillian_microscopic(d, s);
    const std::vector<double> grid = linspace(0.0, 1.5, 7);
    const std::vector<Operator> obs = {number_operator(s)};
    const Trajectory traj = evolve(L, DensityMatrix::vacuum(s), grid, {}, obs);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(traj.records[0][i].real() - n_microscopic(grid[i], d)) < 1e-7);
        CHECK(traj.diagnostics[i].trace_drift < 1e-9);
        CHECK(traj.diagnostics[i].hermiticity_defect < 1e-11);
        CHECK(traj.diagnostics[i].min_eigenvalue > -1e-9);
    }
}

TEST_CASE("representation equivalence of the damped evolution") {
    // evolving in the a-basis equals conjugating a plain thermal-damping
    // pseudo-oscillator evolution by S(r); mild squeezing keeps the
    // conjugation truncation-safe on the guarded block
    SystemParams p = fig2();
    p.epsilon = std::tanh(0.25) * p.K / p.omega0; // r = 0.25
    p.hbarK_over_kT = 3.0;
    const DerivedParams d = derive(p);
    const HilbertSpace s(64);
    const int g = s.guard();

    const std::vector<double> grid = linspace(0.0, 0.6, 4);
    IntegratorOptions opts;
    opts.keep_states = true;

    const Trajectory direct =
        evolve(liouvillian_microscopic(d, s), DensityMatrix::vacuum(s), grid, opts);

    // pseudo-oscillator: a plays b, H = Omega(n + 1/2) - K/4
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(s.dim, s.dim);
    for (int n = 0; n < s.dim; ++n) h(n, n) = *d.Omega * (n + 0.5) - p.K / 4.0;
    Superoperator Lb = hamiltonian_superoperator(Operator(s, h));
    Lb += (*d.gamma_r * (*d.N_Omega + 1.0)) * lindblad_dissipator(annihilation(s));
    Lb += (*d.gamma_r * *d.N_Omega) * lindblad_dissipator(creation(s));

    const Eigen::MatrixXcd S = squeeze(s, *d.r).matrix();
    Eigen::MatrixXcd sigma0 = Eigen::MatrixXcd::Zero(s.dim, s.dim);
    sigma0(0, 0) = 1.0; // vacuum in a; S+ |0><0| S handled below
    const Eigen::MatrixXcd rot0 = S.adjoint() * sigma0 * S;
    const Trajectory rotated = evolve_matrix(Lb, rot0, grid, opts);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::MatrixXcd back = S * rotated.states[i] * S.adjoint();
        CHECK((back - direct.states[i]).topLeftCorner(g, g).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("steady states") {
    const SystemParams p = fig2();
    const DerivedParams d = derive(p);
    SUBCASE("pure photon loss relaxes to vacuum") {
        const HilbertSpace s(10);
        const Superoperator L = 0.7 * lindblad_dissipator(annihilation(s));
        const DensityMatrix rho = steady_state(L);
        CHECK(rho.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("microscopic model at modest size") {
        SystemParams ps = fig2();
        ps.epsilon = 0.7 * ps.K / ps.omega0; // softer squeezing
        const DerivedParams ds = derive(ps);
        const HilbertSpace s(96);
        const DensityMatrix rho = steady_state(liouvillian_microscopic(ds, s));
        CHECK(expectation(rho, number_operator(s)).real() ==
              doctest::Approx(*ds.n_st).epsilon(1e-9));
        const DensityMatrix ref = squeezed_thermal_state(s, *ds.r, *ds.N_Omega);
        CHECK(fidelity(rho, ref) > 1.0 - 1e-9);
    }
    SUBCASE("phenomenological model reaches n_st_ph") {
        SystemParams ps = fig2();
        ps.kappa = 2.0;
        const DerivedParams ds = derive(ps);
        const HilbertSpace s(32);
        const DensityMatrix rho = steady_state(liouvillian_phenomenological(ps, s));
        CHECK(expectation(rho, number_operator(s)).real() ==
              doctest::Approx(*ds.n_st_ph).epsilon(1e-6));
    }
    SUBCASE("degenerate kernels are detected") {
        // pure dephasing: every diagonal state is stationary
        const HilbertSpace s(6);
        const Superoperator L = 0.5 * lindblad_dissipator(number_operator(s));
        CHECK_THROWS_AS(steady_state(L), DegenerateKernel);
    }
    SUBCASE("long-time integration agrees with the null-space route") {
        SystemParams ps = fig2();
        ps.kappa = 2.0;
        const HilbertSpace s(32);
        const Superoperator L = liouvillian_phenomenological(ps, s);
        const DensityMatrix direct = steady_state(L);
        const DensityMatrix integrated =
            steady_state_by_integration(L, DensityMatrix::vacuum(s), 8.0);
        CHECK(fidelity(direct, integrated) > 1.0 - 1e-6);
    }
    (void)d;
}

TEST_CASE("observable series lookup") {
    const HilbertSpace s(8);
    const Superoperator L = 0.3 * lindblad_dissipator(annihilation(s));
    const std::vector<double> grid = {0.0, 0.4, 0.8};
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
    m(1, 1) = 1.0;
    const DensityMatrix rho0(s, m);
    const std::vector<Operator> obs = {number_operator(s)};
    const Trajectory traj = evolve(L, rho0, grid, {}, obs);

    SUBCASE("registered observable is returned") {
        const ObservableSeries ser = observable_series(traj, number_operator(s));
        CHECK(ser.values.size() == 3);
        CHECK(ser.values[0].real() == doctest::Approx(1.0));
        // decay at 2*kappa with the factor-2 dissipator convention
        CHECK(ser.values[2].real() == doctest::Approx(std::exp(-2 * 0.3 * 0.8)).epsilon(1e-8));
    }
    SUBCASE("identity observable reads 1") {
        const std::vector<Operator> obs2 = {Operator::identity(s)};
        const Trajectory t2 = evolve(L, rho0, grid, {}, obs2);
        for (const cplx& v : t2.records[0]) CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unregistered observable without retained states fails") {
        CHECK_THROWS_AS(observable_series(traj, annihilation(s)), ObservableNotRegistered);
    }
    SUBCASE("retained states allow any observable") {
        IntegratorOptions opts;
        opts.keep_states = true;
        const Trajectory t2 = evolve(L, rho0, grid, opts);
        const ObservableSeries ser = observable_series(t2, number_operator(s));
        CHECK(ser.values[0].real() == doctest::Approx(1.0));
    }
}
