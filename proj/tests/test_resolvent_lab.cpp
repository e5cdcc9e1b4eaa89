#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specgraph/errors.hpp"
#include "specgraph/ode.hpp"
#include "specgraph/resolvent_lab.hpp"

using namespace specgraph;
using namespace specgraph::lab;

TEST_CASE("dirichlet base extension: known real eigenvalues") {
    // A = Dirichlet Laplacian on [0, pi], eigenvalues n^2; with F = -2,
    // G = -0.5 the pencil has mu^2 = -(n^2+F)(n^2+G): n = 1 gives mu =
    // sqrt(0.5)
    IntervalExtension e = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    auto eigs = real_eigenvalues(e, 0.05, 3.0);
    REQUIRE(!eigs.empty());
    CHECK(std::abs(eigs[0] - std::sqrt(0.5)) < 1e-10);
}

TEST_CASE("resolvent defect and boundary conditions") {
    IntervalExtension e = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    cplx z(0.3, 0.7);
    FnPair f{[](double x) { return cplx(std::sin(1.3 * x), 0.2 * x); },
             [](double x) { return cplx(std::cos(0.7 * x), -0.1); }};
    Solution r = resolvent_apply(e, z, f);
    // Dirichlet values at both ends
    CHECK(std::abs(r.state(0.0)[0]) < 1e-11);
    CHECK(std::abs(r.state(0.0)[2]) < 1e-11);
    CHECK(std::abs(r.state(M_PI)[0]) < 1e-11);
    CHECK(std::abs(r.state(M_PI)[2]) < 1e-11);
    // defect by high-order finite differences at a few interior points
    double h = 1e-3;
    for (double x : {0.8, 1.9, 2.6}) {
        auto u = [&](double xx) { return r.state(xx)[0]; };
        auto v = [&](double xx) { return r.state(xx)[2]; };
        cplx upp = (-u(x + 2 * h) + 16.0 * u(x + h) - 30.0 * u(x) +
                    16.0 * u(x - h) - u(x - 2 * h)) / (12.0 * h * h);
        cplx vpp = (-v(x + 2 * h) + 16.0 * v(x + h) - 30.0 * v(x) +
                    16.0 * v(x - h) - v(x - 2 * h)) / (12.0 * h * h);
        cplx r1 = vpp - e.f_pot * v(x) - z * u(x) - f.first(x);
        cplx r2 = -upp + e.g_pot * u(x) - z * v(x) - f.second(x);
        CHECK(std::abs(r1) < 1e-9);
        CHECK(std::abs(r2) < 1e-9);
    }
}

TEST_CASE("near-spectrum resolvent solve is rejected") {
    IntervalExtension e = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    FnPair f{[](double x) { return cplx(std::sin(x), 0.0); },
             [](double) { return cplx(0.0, 0.0); }};
    CHECK_THROWS_AS(resolvent_apply(e, cplx(std::sqrt(0.5), 1e-14), f), NearSpectrum);
}

TEST_CASE("green identity holds to quadrature precision") {
    IntervalExtension e = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    CHECK(verify_green_identity(e, 20) < 1e-10);

    IntervalExtension scaled = e;
    scaled.plane_u = rotating_plane(0.6, M_PI).frame;
    scaled.plane_v = rotating_plane(0.3, M_PI).frame;
    scaled.trace_scale = 1.25;
    CHECK(verify_green_identity(scaled, 20) < 1e-10);
}

TEST_CASE("kernel-of-T test pairs kill both sides of the identity") {
    // u with vanishing trace: x^2 (l-x)^2-type; both the bracket and the
    // symplectic pairing vanish
    const double l = M_PI;
    auto poly = [l](double x) { return x * x * (l - x) * (l - x); };
    auto dpoly = [l](double x) {
        return 2 * x * (l - x) * (l - x) - 2 * x * x * (l - x);
    };
    auto d2poly = [l](double x) {
        return 2 * (l - x) * (l - x) - 8 * x * (l - x) + 2 * x * x;
    };
    // bracket <(tau N)^* u, v> - <u, (tau N)^* v> with u = (poly, 0),
    // v = (0, poly)
    double bracket = specgraph::gauss_quad(
        [&](double x) {
            double u1 = poly(x), v2 = poly(x);
            double lu1 = -d2poly(x);
            double lv2 = d2poly(x);
            (void)dpoly;
            return lu1 * 0.0 + 0.0 * v2 - (u1 * 0.0 + 0.0 * lv2);
        },
        0.0, l, 32);
    CHECK(std::abs(bracket) < 1e-12);
    // trace vanishes identically
    CHECK(std::abs(poly(0.0)) < 1e-300);
    CHECK(std::abs(dpoly(0.0)) < 1e-300);
    CHECK(std::abs(poly(l)) < 1e-12);
    CHECK(std::abs(dpoly(l)) < 1e-11);
}

TEST_CASE("symplectic resolvent difference formula") {
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    IntervalExtension robin = dd;
    robin.plane_u = rotating_plane(0.6, M_PI).frame;
    robin.plane_v = rotating_plane(0.3, M_PI).frame;
    FnPair f{[](double x) { return cplx(std::sin(1.1 * x), 0.3 * std::cos(x)); },
             [](double x) { return cplx(0.4 * x, std::sin(0.6 * x)); }};
    auto res = verify_resolvent_difference(dd, robin, cplx(0.3, 0.7), f);
    CHECK(res.full < 1e-8);
    CHECK(res.projected < 1e-8);

    auto same = verify_resolvent_difference(dd, dd, cplx(0.3, 0.7), f);
    CHECK(same.full < 1e-12);
    CHECK(same.projected < 1e-12);

    IntervalExtension shifted = dd;
    shifted.f_pot += 0.4;
    shifted.g_pot -= 0.3;
    auto l32 = verify_resolvent_difference(dd, shifted, cplx(0.25, 0.8), f);
    CHECK(l32.full < 1e-8);
}

TEST_CASE("first-order expansion slopes per mechanism") {
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    FnPair f{[](double x) { return cplx(std::sin(1.3 * x), 0.1 * x); },
             [](double x) { return cplx(std::cos(0.9 * x), 0.0); }};
    cplx z(0.3, 0.9);
    double sv = verify_first_order_expansion(v_only_family(dd, 0.4, -0.3), 0.5, z, f);
    CHECK(sv > 1.8);
    CHECK(sv < 2.2);
    double sp =
        verify_first_order_expansion(plane_only_family(M_PI, -3.0, -2.2), 0.7, z, f);
    CHECK(sp > 1.8);
    CHECK(sp < 2.2);
    double st =
        verify_first_order_expansion(trace_only_family(M_PI, -2.0, -0.5), 0.8, z, f);
    CHECK(st > 1.8);
    CHECK(st < 2.2);
}

TEST_CASE("hadamard formula vs finite differences, single mechanisms") {
    // V-only family has a closed-form eigenvalue track:
    // mu(t)^2 = -(1 + F(t))(1 + G(t))
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    LabFamily fam_v = v_only_family(dd, 0.4, -0.3);
    auto hv = verify_hadamard_abstract(fam_v, 0.0, 0.05, 3.0);
    CHECK(hv.discrepancy < 1e-6);
    {
        // closed form at t0 = 0: d/dt[-(1+F)(1+G)] / (2 mu)
        double f0 = -2.0, g0 = -0.5;
        double mu = std::sqrt(-(1 + f0) * (1 + g0));
        double dmu = -(0.4 * (1 + g0) + (1 + f0) * (-0.3)) / (2 * mu);
        CHECK(std::abs(hv.mu0 - mu) < 1e-10);
        CHECK(std::abs(hv.formula - dmu) < 1e-9);
    }

    auto hp = verify_hadamard_abstract(plane_only_family(M_PI, -3.0, -2.2), 0.7,
                                       0.05, 6.0);
    CHECK(hp.discrepancy < 1e-6);

    auto hs = verify_hadamard_abstract(trace_only_family(M_PI, -2.0, -0.5), 0.8,
                                       0.05, 6.0);
    CHECK(hs.discrepancy < 1e-6);
}

TEST_CASE("Lyapunov-Schmidt derivative ratios at crossings") {
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    CHECK(verify_ls_ratio(v_only_family(dd, 0.4, -0.3), 0.5, 0.05, 3.0) < 1e-4);
    CHECK(verify_ls_ratio(trace_only_family(M_PI, -2.0, -0.5), 0.8, 0.05, 6.0) <
          1e-4);
}

TEST_CASE("riesz projection block") {
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    LabFamily fam = v_only_family(dd, 0.4, -0.3);
    FnPair f{[](double x) { return cplx(std::sin(1.3 * x), 0.1 * x); },
             [](double x) { return cplx(std::cos(0.9 * x), 0.0); }};
    FnPair h{[](double x) { return cplx(0.2 * x * x, std::sin(0.8 * x)); },
             [](double x) { return cplx(std::cos(1.7 * x), 0.1); }};
    RieszChecks rz = verify_riesz(fam, 0.5, 0.05, 3.0, f, h);
    CHECK(rz.idempotency < 1e-8);
    CHECK(rz.tau_symmetry < 1e-8);
    CHECK(rz.reduced_prod < 1e-8);
    CHECK(rz.sandwich_slope > 1.8);
}

TEST_CASE("full identity suite passes") {
    auto results = run_identity_suite();
    for (const auto& r : results) {
        INFO(r.name, " residual=", r.residual, " tol=", r.tolerance);
        CHECK(r.pass);
    }
    CHECK(results.size() >= 18);
}
