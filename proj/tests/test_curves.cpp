#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specgraph/curves.hpp"
#include "specgraph/errors.hpp"

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
}  // namespace

TEST_CASE("segment scans around the homotopy rectangle") {
    Problem p = bwave_problem(5.0);
    ScanOptions opts;
    opts.resolution = 200;

    SegmentScan bottom = crossings_on_segment(p, Axis::Lambda, 0.02, 0.05, 40.0, opts);
    CHECK(bottom.roots.empty());

    SegmentScan left = crossings_on_segment(p, Axis::T, 0.0, 0.02, 0.995, opts);
    REQUIRE(left.roots.size() == 1);
    CHECK(std::abs(left.roots[0].position - 0.42057) < 1e-3);

    double lam_inf = lambda_window_bound(p);
    CHECK(lam_inf > 100.0);
    SegmentScan right = crossings_on_segment(p, Axis::T, lam_inf, 0.02, 1.0, opts);
    CHECK(right.roots.empty());

    CHECK_THROWS(crossings_on_segment(p, Axis::T, 0.0, 0.5, 0.5, opts));
}

TEST_CASE("b=1 wave: one positive real eigenvalue at t = 1") {
    Problem p = bwave_problem(1.0);
    ScanOptions opts;
    opts.resolution = 600;
    SegmentScan top = crossings_on_segment(p, Axis::Lambda, 1.0, 0.5, 40.0, opts);
    REQUIRE(top.roots.size() == 1);
    CHECK(std::abs(top.roots[0].position - 19.9612) < 2e-3);
}

TEST_CASE("1-D corner solves reproduce the curve graph t(lambda)") {
    Problem p = bwave_problem(1.0);
    double t1 = solve_t_at_lambda(p, 0.5, 1.0, 0.05);
    double t2 = solve_t_at_lambda(p, -0.5, 1.0, 0.05);
    CHECK(std::abs(t1 - 1.0) < 1e-3);
    CHECK(std::abs(t2 - 1.0) < 1e-3);
    CHECK(t1 > 1.0);  // b=1 bends upward
    CHECK(t2 > 1.0);
    CHECK(std::abs(dispersion_det(p, 0.5, t1)) < 1e-9);
}

TEST_CASE("corner curve trace covers both sides with small residuals") {
    Problem p = bwave_problem(5.0);
    TraceOptions topts;
    Rect bounds{-1.2, 1.2, 0.7, 1.2};
    EigenCurve curve = trace_curve(p, 0.0, 1.0, bounds, topts);
    REQUIRE(curve.points.size() > 20);
    double lam_min = 0, lam_max = 0;
    for (const auto& q : curve.points) {
        CHECK(q.residual < 1e-9);
        lam_min = std::min(lam_min, q.lambda);
        lam_max = std::max(lam_max, q.lambda);
    }
    CHECK(lam_min < -1.0);
    CHECK(lam_max > 1.0);

    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].lambda > curve.points[i - 1].lambda - 1e-12);
}

TEST_CASE("tracing a transversal crossing away from the corner") {
    Problem p = bwave_problem(1.0);
    double tc = crossings_on_segment(p, Axis::T, 0.0, 0.1, 0.99).roots[0].position;
    TraceOptions topts;
    topts.step = 0.005;
    topts.max_points = 120;
    Rect bounds{-2.0, 2.0, 0.2, 1.0};
    EigenCurve curve = trace_curve(p, 0.0, tc, bounds, topts);
    REQUIRE(curve.points.size() > 30);
    double lam_lo = 1e9, lam_hi = -1e9;
    for (const auto& q : curve.points) {
        CHECK(q.residual < 1e-9);
        lam_lo = std::min(lam_lo, q.lambda);
        lam_hi = std::max(lam_hi, q.lambda);
    }
    CHECK(lam_lo < -0.05);
    CHECK(lam_hi > 0.05);

    // retrace from the far endpoint; within the overlapping lambda-range the
    // two polylines sample the same zero set (point-to-segment distance)
    const auto& far = curve.points.back();
    TraceOptions fine = topts;
    fine.step = 0.002;
    fine.max_points = 500;
    EigenCurve back = trace_curve(p, far.lambda, far.t, bounds, fine);
    double blo = 1e9, bhi = -1e9;
    for (const auto& r : back.points) {
        blo = std::min(blo, r.lambda);
        bhi = std::max(bhi, r.lambda);
    }
    auto seg_dist = [](double px, double py, double ax, double ay, double bx,
                       double by) {
        double vx = bx - ax, vy = by - ay;
        double denom = vx * vx + vy * vy;
        double s = denom > 0 ? ((px - ax) * vx + (py - ay) * vy) / denom : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        return std::hypot(px - (ax + s * vx), py - (ay + s * vy));
    };
    double worst = 0.0;
    int compared = 0;
    for (std::size_t i = 0; i < curve.points.size(); i += 3) {
        const auto& q = curve.points[i];
        if (q.lambda < blo + 1e-6 || q.lambda > bhi - 1e-6) continue;
        double best = 1e9;
        for (std::size_t j = 1; j < back.points.size(); ++j)
            best = std::min(best, seg_dist(q.lambda, q.t, back.points[j - 1].lambda,
                                           back.points[j - 1].t,
                                           back.points[j].lambda, back.points[j].t));
        worst = std::max(worst, best);
        ++compared;
    }
    CHECK(compared > 10);
    CHECK(worst < 1e-6);
}

TEST_CASE("seed must lie on the zero set") {
    Problem p = bwave_problem(5.0);
    CHECK_THROWS_AS(trace_curve(p, 2.0, 0.8, Rect{-5, 5, 0.3, 1.1}, {}),
                    SeedNotACrossing);
}

TEST_CASE("parabola fit recovers exact quadratic data") {
    std::vector<double> ls, ts;
    const double c = -3.7e-4;
    for (double lam : {-1.0, -0.7, -0.4, -0.2, 0.2, 0.4, 0.7, 1.0}) {
        ls.push_back(lam);
        ts.push_back(1.0 + c * lam * lam);
    }
    double rms = 0.0;
    Eigen::Vector3d coef = fit_parabola(ls, ts, &rms);
    CHECK(std::abs(coef[0] - 1.0) < 1e-12);
    CHECK(std::abs(coef[1]) < 1e-12);
    CHECK(std::abs(coef[2] - c) < 1e-8 * std::abs(c));
    CHECK(rms < 1e-12);
}

TEST_CASE("concavity at the corner: signs for b = 5 and b = 1") {
    {
        Problem p = bwave_problem(5.0);
        EigenCurve curve = trace_curve(p, 0.0, 1.0, Rect{-1.2, 1.2, 0.7, 1.2}, {});
        Concavity c = concavity_at_seed(p, curve);
        CHECK(c.tpp < 0.0);
        CHECK(std::abs(c.tpp) > c.error_est);
        CHECK(std::abs(c.tp) < 1e-4);
        CHECK(std::abs(c.tpp + 1.65e-5) < 4e-6);  // frozen from the fit study
    }
    {
        Problem p = bwave_problem(1.0);
        EigenCurve curve = trace_curve(p, 0.0, 1.0, Rect{-1.2, 1.2, 0.7, 1.2}, {});
        Concavity c = concavity_at_seed(p, curve);
        CHECK(c.tpp > 0.0);
        CHECK(std::abs(c.tpp) > c.error_est);
        CHECK(std::abs(c.tp) < 1e-4);
        CHECK(std::abs(c.tpp - 5.30e-4) < 8e-5);
    }
}

TEST_CASE("curve points are stable under step halving") {
    Problem p = bwave_problem(1.0);
    double tc = crossings_on_segment(p, Axis::T, 0.0, 0.1, 0.99).roots[0].position;
    TraceOptions coarse, fine;
    coarse.step = 0.01;
    coarse.max_points = 60;
    fine.step = 0.005;
    fine.max_points = 120;
    Rect bounds{-1.0, 1.0, 0.25, 0.95};
    EigenCurve a = trace_curve(p, 0.0, tc, bounds, coarse);
    EigenCurve b = trace_curve(p, 0.0, tc, bounds, fine);
    for (std::size_t i = 2; i + 2 < a.points.size(); i += 7) {
        double lam = a.points[i].lambda;
        double t_ref = solve_t_at_lambda(p, lam, a.points[i].t, 0.05);
        CHECK(std::abs(a.points[i].t - t_ref) < 1e-8);
        double best = 1e9;
        for (const auto& q : b.points)
            best = std::min(best, std::abs(q.lambda - lam) + std::abs(q.t - t_ref));
        CHECK(best < 2e-2);
    }
}

TEST_CASE("lambda window bound dominates the potentials") {
    Problem p = bwave_problem(5.0);
    double lam_inf = lambda_window_bound(p);
    double vmax = 0.0;
    for (int e = 0; e < 3; ++e)
        for (double s = 0.0; s <= p.length(e); s += p.length(e) / 200)
            vmax = std::max({vmax, std::abs(p.potentials->qG(e, s)),
                             std::abs(p.potentials->qF(e, s))});
    CHECK(lam_inf >= 1.5 * vmax * 0.999);
}
