#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specgraph/errors.hpp"
#include "specgraph/standing_wave.hpp"

using namespace specgraph;

namespace {
WaveParams bwave(double b) {
    const double a = 0.8660;
    WaveParams w;
    w.beta = -1.0;
    w.p = 3.0;
    w.center_value = 1.0;
    w.center_slopes = {-a - b, -a - 3.0, 2 * a + 3.0 + b};
    return w;
}
}  // namespace

TEST_CASE("b-wave edge lengths match the published values") {
    struct Row {
        double b;
        double l1, l2, l3;
    };
    // 2e-3 tolerance: the input a = 0.8660 carries only four digits
    const Row rows[] = {{5.0, 0.171588, 0.262628, 0.399533},
                        {3.0, 0.262628, 0.262628, 0.467768},
                        {1.0, 0.575249, 0.262628, 0.573694}};
    for (const Row& r : rows) {
        WaveProfile prof = integrate_profile(bwave(r.b), 0.0);
        REQUIRE(prof.edges() == 3);
        CHECK(std::abs(prof.lengths[0] - r.l1) < 2e-3);
        CHECK(std::abs(prof.lengths[1] - r.l2) < 2e-3);
        CHECK(std::abs(prof.lengths[2] - r.l3) < 2e-3);
        CHECK(prof.vertex_consistent);  // Kirchhoff: slopes sum to zero
        // the event is polished well below the stated tolerance
        for (int e = 0; e < 3; ++e)
            CHECK(std::abs(prof.phi(e, prof.lengths[e])) <
                  1e-12 * prof.max_abs_phi());
    }
}

TEST_CASE("profile is positive inside the edges and lengths converge") {
    WaveProfile prof = integrate_profile(bwave(5.0), 0.0);
    for (int e = 0; e < 3; ++e)
        for (double s = 1e-4; s < prof.lengths[e] - 1e-6; s += prof.lengths[e] / 37)
            CHECK(prof.phi(e, s) > 0.0);

    ProfileOptions coarse;
    coarse.rtol = 2e-13;  // halve the tolerance: lengths move below 1e-10
    WaveProfile prof2 = integrate_profile(bwave(5.0), 0.0, coarse);
    for (int e = 0; e < 3; ++e)
        CHECK(std::abs(prof.lengths[e] - prof2.lengths[e]) < 1e-9);
}

TEST_CASE("energy first integral is conserved along every edge") {
    for (double b : {5.0, 1.0}) {
        WaveProfile prof = integrate_profile(bwave(b), 0.0);
        for (int e = 0; e < 3; ++e) {
            double e0 = prof.energy(e, 0.0);
            for (int i = 1; i <= 50; ++i) {
                double s = prof.lengths[e] * i / 50.0;
                CHECK(std::abs(prof.energy(e, s) - e0) < 1e-9 * (1.0 + std::abs(e0)));
            }
        }
    }
}

TEST_CASE("first integral at beta=-1, p=1 with phi(0)=1, phi'(0)=0") {
    // (1, 0) is the phase-plane equilibrium for these parameters: the wave
    // equation keeps E = phi'^2/2 - phi^2/2 + phi^4/4 = -1/4 exactly, and the
    // trajectory never reaches zero, so the length-finding path must refuse it
    WaveParams w;
    w.beta = -1.0;
    w.p = 1.0;
    w.center_value = 1.0;
    w.center_slopes = {0.0};
    CHECK_THROWS_AS(integrate_profile(w, 0.0), NoZeroCrossing);

    OdeRhs rhs = [](double, const Vec& y, Vec& dy) {
        dy[0] = y[1];
        dy[1] = y[0] - y[0] * y[0] * y[0];
    };
    Vec y0(2);
    y0 << 1.0, 0.0;
    OdeOptions oo;
    oo.rtol = 1e-13;
    oo.atol = 1e-15;
    DenseOde traj = integrate_dense(rhs, y0, 0.0, 1.0, oo);
    for (int i = 0; i <= 1000; ++i) {
        Vec y = traj.eval(i / 1000.0);
        double e = 0.5 * y[1] * y[1] - 0.5 * y[0] * y[0] +
                   0.25 * y[0] * y[0] * y[0] * y[0];
        CHECK(std::abs(e + 0.25) < 1e-10);
    }
}

TEST_CASE("degenerate and non-crossing profiles are rejected") {
    WaveParams zero;
    zero.beta = -1.0;
    zero.p = 3.0;
    zero.center_value = 0.0;
    zero.center_slopes = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(integrate_profile(zero, 0.0), DegenerateProfile);

    // closed orbit around the center equilibrium never reaches zero
    WaveParams closed;
    closed.beta = -1.0;
    closed.p = 1.0;
    closed.center_value = 0.5;
    closed.center_slopes = {0.0};
    CHECK_THROWS_AS(integrate_profile(closed, 0.0), NoZeroCrossing);
}

TEST_CASE("half-period family: monotone decreasing, divergent at the threshold") {
    const double beta = -2.0, p = 1.0;
    const double amin = arch_amplitude_threshold(beta, p);
    CHECK(std::abs(amin - 2.0) < 1e-12);
    double prev = half_period(beta, p, amin * 1.0005);
    CHECK(prev > 4.0);  // near-homoclinic arch is long
    for (double c : {1.01, 1.1, 1.5, 2.0, 4.0}) {
        double cur = half_period(beta, p, amin * c);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(half_period(beta, p, amin * 0.9), NoPeriodicOrbit);
}

TEST_CASE("published half-period targets are attainable") {
    double a1 = amplitude_for_half_period(-2.0, 3.0, 3.28418);
    CHECK(std::abs(half_period(-2.0, 3.0, a1) - 3.28418) < 1e-8);
    CHECK(std::abs(a1 - 1.42830034) < 1e-4);

    double a2 = amplitude_for_half_period(-2.0, 1.0, 1.09868);
    CHECK(std::abs(half_period(-2.0, 1.0, a2) - 1.09868) < 1e-8);
    CHECK(std::abs(a2 - 3.78658697) < 1e-4);
}

TEST_CASE("unattainable half-period raises TargetOutOfRange") {
    CHECK_THROWS_AS(amplitude_for_half_period(-2.0, 1.0, 1e9), TargetOutOfRange);
    CHECK_THROWS_AS(amplitude_for_half_period(-2.0, 1.0, -1.0), TargetOutOfRange);
}

TEST_CASE("profile JSON round trip") {
    WaveProfile prof = integrate_profile(bwave(3.0), 0.0);
    std::string text = profile_to_json(prof, 51);
    WaveProfile back = profile_from_json(text);
    for (int e = 0; e < 3; ++e)
        CHECK(std::abs(back.lengths[e] - prof.lengths[e]) < 1e-10);
}
