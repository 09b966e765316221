#include "doctest.h"

#include <cmath>
#include <random>

#include "casimir/analytic.hpp"
#include "casimir/fock.hpp"

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

SystemParams pheno_params(double K_over_ew, double kappa_over_ew) {
    SystemParams p;
    p.omega0 = 1.0;
    p.epsilon = 1.0; // eps*w0 = 1
    p.K = K_over_ew;
    p.gamma = 1.0;
    p.kappa = kappa_over_ew;
    p.hbarK_over_kT = 0.0;
    return p;
}

} // namespace

TEST_CASE("lossless photon number") {
    SUBCASE("starts at zero") {
        CHECK(n_lossless(0.0, derive(fig2())) == 0.0);
    }
    SUBCASE("resonant growth: K = 0, ew*t = 2 gives sinh^2(1)") {
        SystemParams p = fig2();
        p.K = 0.0;
        const DerivedParams d = derive(p);
        const double t = 2.0 / p.pump();
        CHECK(n_lossless(t, d) == doctest::Approx(1.3810978455418157).epsilon(1e-14));
    }
    SUBCASE("bounded oscillation closes after a full period") {
        const DerivedParams d = derive(fig2());
        const double period = 2.0 * M_PI / (*d.eta_tilde * d.pump);
        CHECK(std::abs(n_lossless(period, d)) < 1e-10);
        CHECK(n_lossless(1.0, d) == doctest::Approx(0.61534164091092916).epsilon(1e-13));
    }
    SUBCASE("continuity across the critical point") {
        const double t = 0.7;
        for (double delta : {1e-5, 1e-6}) {
            SystemParams pb = fig2();
            pb.epsilon = 1.0 / (1.0 + delta); // ratio slightly above 1
            SystemParams pu = fig2();
            pu.epsilon = 1.0 / (1.0 - delta); // ratio slightly below 1
            SystemParams pc = fig2();
            pc.epsilon = 1.0;
            const double nc = n_lossless(t, derive(pc));
            CHECK(std::abs(n_lossless(t, derive(pb)) - nc) < 1e-6 * std::max(1.0, nc));
            CHECK(std::abs(n_lossless(t, derive(pu)) - nc) < 1e-6 * std::max(1.0, nc));
        }
    }
}

TEST_CASE("phenomenological photon number") {
    SUBCASE("starts at zero and saturates at n_st_ph") {
        const SystemParams p = pheno_params(1.2, 0.3);
        const DerivedParams d = derive(p);
        CHECK(n_phenomenological(0.0, p, d) == 0.0);
        CHECK(n_phenomenological(80.0, p, d) == doctest::Approx(*d.n_st_ph).epsilon(1e-12));
        CHECK(*d.n_st_ph == doctest::Approx(0.625).epsilon(1e-14));
    }
    SUBCASE("bounded-regime values from the continued closed form") {
        // frozen 50-digit evaluations of the continued expression
        const SystemParams p1 = pheno_params(1.2, 0.3);
        CHECK(n_phenomenological(1.0, p1, derive(p1)) ==
              doctest::Approx(0.16368704900786415).epsilon(1e-13));
        CHECK(n_phenomenological(5.0, p1, derive(p1)) ==
              doctest::Approx(0.66054287309542996).epsilon(1e-13));
        const SystemParams p2 = pheno_params(1.2, 0.6);
        CHECK(n_phenomenological(1.0, p2, derive(p2)) ==
              doctest::Approx(0.11360883866169457).epsilon(1e-13));
        const SystemParams p3 = pheno_params(2.0, 1.0);
        CHECK(n_phenomenological(1.0, p3, derive(p3)) ==
              doctest::Approx(0.061963186340519746).epsilon(1e-13));
    }
    SUBCASE("resonant saturating case") {
        const SystemParams p = pheno_params(0.0, 0.75); // 2k = 1.5 > ew = 1
        const DerivedParams d = derive(p);
        CHECK(*d.n_st_ph == doctest::Approx(0.4).epsilon(1e-14));
        CHECK(n_phenomenological(1.0, p, d) ==
              doctest::Approx(0.10494317000607317).epsilon(1e-13));
        CHECK(n_phenomenological(10.0, p, d) ==
              doctest::Approx(0.39663102650184606).epsilon(1e-13));
    }
    SUBCASE("the closed form degenerates exactly at 2 kappa = eta eps*omega0") {
        const SystemParams p = pheno_params(0.0, 0.5); // 2k = 1 = ew
        const DerivedParams d = derive(p);
        CHECK_THROWS_AS(n_phenomenological(1.0, p, d), NoSteadyState);
    }
    SUBCASE("resonant behavior: growth vs saturation") {
        // eps*w0 > 2 kappa: photon number grows without bound
        const SystemParams pg = pheno_params(0.0, 0.3);
        const DerivedParams dg = derive(pg);
        CHECK(!dg.n_st_ph); // no steady state on the growth branch
        double prev = -1;
        for (double t = 0.0; t <= 4.0; t += 0.25) {
            const double v = n_phenomenological(t, pg, dg);
            CHECK(v > prev);
            prev = v;
        }
        CHECK(n_phenomenological(20.0, pg, dg) > 100.0);

        // 2 kappa > eps*w0: saturation at the steady value
        const SystemParams ps = pheno_params(0.0, 0.75);
        const DerivedParams ds = derive(ps);
        prev = -1;
        for (double t = 0.0; t <= 12.0; t += 0.5) {
            const double v = n_phenomenological(t, ps, ds);
            CHECK(v > prev - 1e-12);
            prev = v;
        }
        CHECK(std::abs(prev - *ds.n_st_ph) < 1e-2);
    }
}

TEST_CASE("microscopic photon number") {
    const DerivedParams d = derive(fig2());
    SUBCASE("frozen reference values on the Fig. 2 grid") {
        CHECK(n_microscopic(0.25, d) == doctest::Approx(1.1143915855683266).epsilon(1e-13));
        CHECK(n_microscopic(0.5, d) == doctest::Approx(2.3370016587337163).epsilon(1e-13));
        CHECK(n_microscopic(1.0, d) == doctest::Approx(1.2278860686712684).epsilon(1e-13));
        CHECK(n_microscopic(2.0, d) == doctest::Approx(1.9792264973748934).epsilon(1e-13));
        CHECK(n_microscopic(3.0, d) == doctest::Approx(2.1296511022967441).epsilon(1e-13));
    }
    SUBCASE("gamma = 0 reduces to the lossless bounded branch") {
        SystemParams p = fig2();
        p.gamma = 0.0;
        const DerivedParams d0 = derive(p);
        for (double t : {0.1, 0.5, 1.3, 2.8})
            CHECK(n_microscopic(t, d0) == doctest::Approx(n_lossless(t, d0)).epsilon(1e-14));
    }
    SUBCASE("relaxes to n_st") {
        CHECK(n_microscopic(200.0, d) == doctest::Approx(*d.n_st).epsilon(1e-12));
    }
    SUBCASE("bounded regime required") {
        SystemParams p = fig2();
        p.K = 0.0;
        CHECK_THROWS_AS(n_microscopic(1.0, derive(p)), BoundedRegimeRequired);
    }
    SUBCASE("never negative (sampled)") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uu(0.1, 0.97), ut(0.0, 6.0), ug(0.0, 2.0),
            uth(0.3, 8.0);
        for (int i = 0; i < 300; ++i) {
            SystemParams p = fig2();
            p.epsilon = uu(rng) * p.K / p.omega0;
            p.gamma = ug(rng);
            p.hbarK_over_kT = uth(rng);
            CHECK(n_microscopic(ut(rng), derive(p)) >= 0.0);
        }
    }
}

TEST_CASE("eigenenergies") {
    const DerivedParams d = derive(fig2());
    CHECK(eigenenergy(0, d) == doctest::Approx(-1.1830432808934076).epsilon(1e-14));
    for (int n = 0; n < 10; ++n)
        CHECK(eigenenergy(n + 1, d) - eigenenergy(n, d) ==
              doctest::Approx(*d.Omega).epsilon(1e-12));
    CHECK(*d.Omega / d.K == doctest::Approx(0.26339134382131847).epsilon(1e-14));
    SystemParams p = fig2();
    p.K = 0.0;
    CHECK_THROWS_AS(eigenenergy(0, derive(p)), BoundedRegimeRequired);
}

TEST_CASE("b-moment machinery") {
    const DerivedParams d = derive(fig2());
    SUBCASE("fixed point stays put") {
        const BMoments fp{*d.N_Omega, 0.0};
        for (double t : {0.0, 0.5, 3.0}) {
            const BMoments m = b_moment_solution(t, d, fp);
            CHECK(m.bb == doctest::Approx(*d.N_Omega).epsilon(1e-14));
            CHECK(std::abs(m.b2) < 1e-300);
        }
    }
    SUBCASE("decays to (N, 0)") {
        const BMoments m = b_moment_solution(100.0, d, {3.0, cplx(1.0, 0.5)});
        CHECK(m.bb == doctest::Approx(*d.N_Omega).epsilon(1e-12));
        CHECK(std::abs(m.b2) < 1e-12);
    }
    SUBCASE("vacuum initial moments from the Bogoliubov coefficients") {
        const BMoments v = vacuum_b_moments(d);
        CHECK(v.bb == doctest::Approx(0.449157995752499).epsilon(1e-14));
        CHECK(v.b2.real() == doctest::Approx(0.80678429638962415).epsilon(1e-14));
        CHECK(v.b2.imag() == 0.0);
        // independent route: evaluate <0|b+b|0> and <0|b^2|0> on a small space
        const HilbertSpace s(16);
        auto [b, bd] = bogoliubov_pair(s, *d.r);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(16);
        e0(0) = 1.0;
        const cplx bb = e0.dot((bd * b).matrix() * e0);
        const cplx b2 = e0.dot((b * b).matrix() * e0);
        CHECK(bb.real() == doctest::Approx(v.bb).epsilon(1e-12));
        CHECK(b2.real() == doctest::Approx(v.b2.real()).epsilon(1e-12));
    }
    SUBCASE("moment solution reconstructs the closed-form photon number") {
        const BMoments init = vacuum_b_moments(d);
        for (double t = 0.0; t <= 3.0; t += 0.05) {
            const BMoments m = b_moment_solution(t, d, init);
            const double n = n_from_b_moments(m.bb, m.b2, *d.r);
            CHECK(n == doctest::Approx(n_microscopic(t, d)).epsilon(1e-10));
        }
    }
}

TEST_CASE("n from b moments") {
    const double r = 1.1;
    CHECK(n_from_b_moments(0.0, 0.0, r) ==
          doctest::Approx(std::pow(std::sinh(r / 2), 2)).epsilon(1e-14));
    CHECK(n_from_b_moments(0.8, 0.0, 0.0) == doctest::Approx(0.8).epsilon(1e-14));
    const DerivedParams d = derive(fig2());
    CHECK(n_from_b_moments(*d.N_Omega, 0.0, *d.r) == doctest::Approx(*d.n_st).epsilon(1e-13));
}

TEST_CASE("analytic g2") {
    const DerivedParams d = derive(fig2());
    SUBCASE("constants, both conventions") {
        CHECK(g2_c1(d) == doctest::Approx(1.1585565771936196).epsilon(1e-13));
        CHECK(g2_c2(d, C2Convention::DividedByEtaTildeSq) ==
              doctest::Approx(0.96453565332355722).epsilon(1e-13));
        CHECK(g2_c2(d, C2Convention::TimesEtaTildeSq) ==
              doctest::Approx(0.14228809263059049).epsilon(1e-13));
    }
    SUBCASE("C1 at T = 0 reduces to 2 + 1/n_st0") {
        SystemParams p = fig2();
        p.hbarK_over_kT = 0.0;
        const DerivedParams d0 = derive(p);
        CHECK(g2_c1(d0) == doctest::Approx(2.0 + 1.0 / *d0.n_st0).epsilon(1e-13));
        CHECK(g2_c2(d0, C2Convention::DividedByEtaTildeSq) == 0.0);
    }
    SUBCASE("zero-delay bunching") {
        SystemParams p = fig2();
        p.hbarK_over_kT = 0.0;
        CHECK(g2_analytic(0.0, derive(p)) ==
              doctest::Approx(5.2263880626785798).epsilon(1e-13));
        CHECK(g2_analytic(0.0, d) == doctest::Approx(3.1230922305171768).epsilon(1e-13));
    }
    SUBCASE("frozen samples along the Fig. 3 delay axis") {
        CHECK(g2_analytic(0.25, d) == doctest::Approx(2.2148863921491371).epsilon(1e-13));
        CHECK(g2_analytic(0.5, d) == doctest::Approx(1.237450475553444).epsilon(1e-13));
        CHECK(g2_analytic(1.0, d) == doctest::Approx(1.9433041059309396).epsilon(1e-13));
        CHECK(g2_analytic(2.0, d) == doctest::Approx(1.2338388361878239).epsilon(1e-13));
        CHECK(g2_analytic(3.0, d) == doctest::Approx(1.0359413850302767).epsilon(1e-13));
    }
    SUBCASE("decorrelates to 1 and is even in tau") {
        CHECK(g2_analytic(100.0, d) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g2_analytic(-0.8, d) == g2_analytic(0.8, d));
    }
    SUBCASE("never antibunches under the resolved convention (sampled)") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> uu(0.15, 0.95), uth(0.2, 10.0), ut(0.0, 8.0);
        for (int i = 0; i < 400; ++i) {
            SystemParams p = fig2();
            p.epsilon = uu(rng) * p.K / p.omega0;
            p.hbarK_over_kT = uth(rng);
            CHECK(g2_analytic(ut(rng), derive(p)) >= 1.0 - 1e-12);
        }
    }
}
