#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specgraph/errors.hpp"
#include "specgraph/maslov.hpp"

using namespace specgraph;

namespace {
Problem bwave_problem(double b) {
    const double a = 0.8660;
    WaveParams w;
    w.beta = -1.0;
    w.p = 3.0;
    w.center_value = 1.0;
    w.center_slopes = {-a - b, -a - 3.0, 2 * a + 3.0 + b};
    return star_problem(integrate_profile(w, 0.0), 0.0);
}

// finite-difference slope of the curve D = 0 through (lambda0, t0) using
// fresh 1-D solves at t0 +- h (Richardson over two h)
double fd_curve_slope(const Problem& p, double lambda0, double t0) {
    auto slope = [&](double h) {
        double lp = solve_lambda_at_t(p, t0 + h, lambda0, 0.5);
        double lm = solve_lambda_at_t(p, t0 - h, lambda0, 0.5);
        return (lp - lm) / (2.0 * h);
    };
    double d1 = slope(2e-4), d2 = slope(1e-4);
    return (4.0 * d2 - d1) / 3.0;
}
}  // namespace

TEST_CASE("corner crossing forms: m_t positive, m_lambda zero, t'(0) = 0") {
    for (double b : {5.0, 1.0}) {
        Problem p = bwave_problem(b);
        CrossingData d = eigen_data_at_crossing(p, 0.0, 1.0);
        StarGraph g = p.graph();

        double mt = crossing_form_t(d, g);
        // eigenfunction is (0, v): m_t = sum l_i v'(l_i)^2 > 0
        double expect = 0.0;
        for (int e = 0; e < 3; ++e)
            expect += d.lengths[e] * d.end_slopes_v[e] * d.end_slopes_v[e];
        CHECK(mt > 0.0);
        CHECK(std::abs(mt - expect) < 1e-7 * expect);

        CHECK(std::abs(crossing_form_lambda(d)) < 1e-8);

        HadamardSlopes hs = hadamard_slopes(d, g);
        CHECK(hs.t_prime_finite);
        CHECK(hs.t_prime == 0.0);
        CHECK(!hs.lambda_prime_finite);

        CrossingForm cf = crossing_forms(d, g);
        CHECK(cf.signature_t == 1);
    }
}

TEST_CASE("synthetic crossing data: u = v gives m_lambda = -2||u||^2 at t0 = 1") {
    CrossingData d;
    d.lambda0 = 0.7;
    d.t0 = 1.0;
    d.lengths = {0.5, 0.5};
    d.end_slopes_u = Eigen::VectorXd::Zero(2);
    d.end_slopes_v = Eigen::VectorXd::Zero(2);
    d.end_slopes_u << 0.3, -0.2;
    d.end_slopes_v = d.end_slopes_u;  // equal slopes: boundary sum cancels
    d.uv_inner = 0.5;                 // = ||u||^2 when u = v and ||(u,v)|| = 1
    StarGraph g{2, {0.5, 0.5}, 0.0};
    CHECK(std::abs(crossing_form_lambda(d) + 2.0 * 0.5) < 1e-15);
    // at lambda0 = 0 the t-form is the pure boundary sum = 0 here
    d.lambda0 = 0.0;
    CHECK(std::abs(crossing_form_t(d, g)) < 1e-15);
}

TEST_CASE("hadamard slope matches finite differences at interior crossings") {
    Problem p = bwave_problem(1.0);
    // crossings of D(., t0) for two t0 values pin both the ratio and the
    // t-scaling of the crossing forms
    struct Probe {
        double t0, lam_lo, lam_hi;
    };
    for (const Probe& probe : {Probe{0.95, 20.0, 30.0}, Probe{1.0, 15.0, 25.0}}) {
        double lam0 = brent_root(
            [&](double l) { return dispersion_det(p, l, probe.t0); }, probe.lam_lo,
            probe.lam_hi, 1e-12);
        CrossingData d = eigen_data_at_crossing(p, lam0, probe.t0);
        HadamardSlopes hs = hadamard_slopes(d, p.graph());
        REQUIRE(hs.lambda_prime_finite);
        double fd = fd_curve_slope(p, lam0, probe.t0);
        CHECK(std::abs(hs.lambda_prime - fd) < 1e-3 * (1.0 + std::abs(fd)));
        // frozen magnitudes from the independent reference computation
        if (probe.t0 == 1.0) {
            CHECK(std::abs(lam0 - 19.9612) < 1e-2);
            CHECK(std::abs(fd + 183.28) < 0.5);
        } else {
            CHECK(std::abs(lam0 - 26.7471) < 1e-2);
            CHECK(std::abs(fd + 114.01) < 0.5);
        }

        // reciprocity
        REQUIRE(hs.t_prime_finite);
        CHECK(std::abs(hs.lambda_prime * hs.t_prime - 1.0) < 1e-10);

        // mu-variable slope converts by the exact chain rule
        double mu_slope_forms =
            -crossing_form_t(d, p.graph()) / crossing_form_lambda(d);
        double mu_slope_chain =
            2.0 * probe.t0 * lam0 + probe.t0 * probe.t0 * hs.lambda_prime;
        CHECK(std::abs(mu_slope_forms - mu_slope_chain) <
              1e-12 * (1.0 + std::abs(mu_slope_chain)));
    }
}

TEST_CASE("both forms vanishing is rejected") {
    CrossingData d;
    d.lambda0 = 0.0;
    d.t0 = 1.0;
    d.lengths = {1.0};
    d.end_slopes_u = Eigen::VectorXd::Zero(1);
    d.end_slopes_v = Eigen::VectorXd::Zero(1);
    d.uv_inner = 0.0;
    StarGraph g{1, {1.0}, 0.0};
    CHECK_THROWS_AS(hadamard_slopes(d, g), BothFormsVanish);
}

TEST_CASE("conjugate point counts for the three waves") {
    struct Row {
        double b, t_g;
    };
    for (const Row& r : {Row{5.0, 0.420571}, Row{3.0, 0.412030}, Row{1.0, 0.399059}}) {
        Problem p = bwave_problem(r.b);
        ConjugatePointSet cp = conjugate_points(p, 0.02, 0.999);
        CHECK(cp.p_c == 1);
        CHECK(cp.q_c == 0);
        REQUIRE(cp.locations.size() == 1);
        CHECK(cp.locations[0].block == ScalarBlock::G);
        CHECK(std::abs(cp.locations[0].t - r.t_g) < 1e-4);
        CHECK(cp.locations[0].multiplicity == 1);
    }

    // collapsed range near eps0
    Problem p5 = bwave_problem(5.0);
    ConjugatePointSet none = conjugate_points(p5, 0.02, 0.1);
    CHECK(none.p_c == 0);
    CHECK(none.q_c == 0);
}

TEST_CASE("conjugate points of the constant-potential Dirichlet interval") {
    // kernel of -u'' - c t^2 u with u(0) = u(1) = 0 at t = n pi / sqrt(c)
    const double c = 5.5 * 5.5;  // zeros at t = n pi / 5.5
    auto pot = std::make_shared<ConstantPotentials>(std::vector<double>{1.0}, c, c);
    Problem p = interval_problem(pot, EndCondition::Dirichlet, EndCondition::Dirichlet);
    ConjugatePointSet cp = conjugate_points(p, 0.05, 0.99);
    REQUIRE(cp.p_c == 1);  // only n = 1 lands inside (0.05, 0.99)
    CHECK(std::abs(cp.locations[0].t - M_PI / 5.5) < 1e-8);
}

TEST_CASE("maslov segment bookkeeping") {
    CHECK(maslov_segment({}, 0.0, 1.0) == 0);
    std::vector<PositionedCrossing> cs = {{0.3, +2.0}, {0.6, -1.5}};
    CHECK(maslov_segment(cs, 0.0, 1.0) == 0);  // +1 - 1
    cs = {{0.0, -2.0}, {0.5, +1.0}, {1.0, +3.0}};
    // left endpoint: -n_-= -1; interior: +1; right endpoint: +n_+ = +1
    CHECK(maslov_segment(cs, 0.0, 1.0) == 1);
    CHECK_THROWS_AS(maslov_segment({{0.5, 0.0}}, 0.0, 1.0),
                    NonRegularInteriorCrossing);
    // non-regular endpoint crossings are excluded rather than fatal
    CHECK(maslov_segment({{0.0, 0.0}}, 0.0, 1.0) == 0);
}

TEST_CASE("spectral index report: b = 1 is unstable with bound 1") {
    Problem p = bwave_problem(1.0);
    SpectralIndexReport rep = spectral_index_report(p);
    CHECK(rep.p_c == 1);
    CHECK(rep.q_c == 0);
    CHECK(rep.tpp_sign == 1);
    CHECK(rep.corner_c == 0);
    CHECK(rep.bound == 1);
    CHECK(rep.verdict == "unstable");
    CHECK(rep.hypothesis_zero_simple);
    CHECK(rep.corner_det < 1e-8);
    CHECK(rep.corner_u_norm < 1e-7);
    REQUIRE(rep.direct_positive_real_count == 1);
    CHECK(std::abs(rep.positive_real_eigs[0] - 19.9612) < 1e-2);
    CHECK(rep.inequality_ok);
    CHECK(rep.mas_gamma1 == 0);
    CHECK(rep.mas_gamma2 == -1);
    CHECK(rep.mas_gamma3 == 1);
    CHECK(rep.mas_gamma4 == 0);
    CHECK(rep.contour_identity_ok);
    CHECK(rep.alpha_in_theorem_range);
}

TEST_CASE("spectral index report: b = 5 is stable with bound 0") {
    Problem p = bwave_problem(5.0);
    SpectralIndexReport rep = spectral_index_report(p);
    CHECK(rep.p_c == 1);
    CHECK(rep.q_c == 0);
    CHECK(rep.tpp_sign == -1);
    CHECK(rep.corner_c == 1);
    CHECK(rep.bound == 0);
    CHECK(rep.verdict == "spectrally_stable_on_iR");
    CHECK(rep.direct_positive_real_count == 0);
    CHECK(rep.inequality_ok);
    CHECK(rep.mas_gamma2 == -1);
    CHECK(rep.mas_gamma3 == 0);
    CHECK(rep.contour_identity_ok);
}

TEST_CASE("degenerate concavity is surfaced, synthetic bounds evaluate") {
    Problem p = bwave_problem(5.0);
    ConjugatePointSet conj;
    conj.p_c = 2;
    conj.q_c = 2;
    Concavity flat{1e-9, 1e-6, 0.0};
    IndexOptions opts;
    CHECK_THROWS_AS(assemble_index_report(p, conj, flat, opts), DegenerateConcavity);
}
