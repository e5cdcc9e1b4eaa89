#pragma once

#include <vector>

#include "specgraph/spectral.hpp"

namespace specgraph {

// Ordered polyline of (lambda, t) points on the zero set of the dispersion
// determinant, with local derivative estimates.
struct EigenCurve {
    struct Point {
        double lambda, t;
        double residual;            // |D| at the point (normalized gauge)
        double tangent_lambda = 0;  // unit tangent estimate
        double tangent_t = 0;
    };
    std::vector<Point> points;
    double seed_lambda = 0.0, seed_t = 1.0;
    bool hit_bounds = false;
    bool corrector_failed = false;
};

enum class Axis { Lambda, T };

struct SegmentScan {
    struct Root {
        double position;
        double bracket_width;
    };
    struct Dip {  // local |D| minimum below threshold without a sign change
        double position;
        double value;
    };
    std::vector<Root> roots;
    std::vector<Dip> dips;
};

struct ScanOptions {
    int resolution = 400;
    double root_tol = 1e-10;
    double dip_threshold = 1e-6;
    int threads = 0;  // 0 = hardware
    SpectralOptions spectral;
};

// Scan D along an axis-aligned segment, bracket sign changes and bisect;
// near-tangential dips are flagged, not counted.
SegmentScan crossings_on_segment(const Problem& problem, Axis axis, double fixed,
                                 double range_a, double range_b,
                                 const ScanOptions& opts = {});

struct TraceOptions {
    double step = 0.01;          // initial pseudo-arclength step (normalized coords)
    double h_min = 1e-5, h_max = 0.05;
    double lambda_scale = 0.0;   // 0 = auto (max(1,|bounds|))
    double corrector_tol = 1e-9;
    int max_newton = 5;
    std::size_t max_points = 4000;
    double fd_step = 1e-6;       // finite-difference stencil scale for grad D
    SpectralOptions spectral;
};

struct Rect {
    double lambda_min, lambda_max, t_min, t_max;
};

// Pseudo-arclength predictor-corrector on D(lambda, t) = 0 from a seed
// crossing.  At the degenerate corner (0, 1) the two half-curves are seeded
// by 1-D solves of t(lambda) at small |lambda| and merged through the corner.
EigenCurve trace_curve(const Problem& problem, double seed_lambda, double seed_t,
                       const Rect& bounds, const TraceOptions& opts = {});

// Solve D(lambda, t) = 0 for t near t_guess at fixed lambda (1-D Newton with
// numeric derivative, bisection fallback).  Used for corner seeding and for
// finite-difference slope oracles.
double solve_t_at_lambda(const Problem& problem, double lambda, double t_guess,
                         double window, const SpectralOptions& opts = {});
double solve_lambda_at_t(const Problem& problem, double t, double lambda_guess,
                         double window, const SpectralOptions& opts = {});

struct Concavity {
    double tpp;        // t''(0)
    double error_est;  // Richardson + fit residual estimate
    double tp;         // fitted t'(0), should be ~0 at the corner
};

struct ConcavityOptions {
    double delta = 0.1;     // fit window |lambda| in [delta, 10*delta]
    int points_per_side = 8;
    SpectralOptions spectral;
};

// t''(0) of the corner curve by a symmetric parabola fit over two window
// sizes with Richardson extrapolation.  The curve must cover both sides.
Concavity concavity_at_seed(const Problem& problem, const EigenCurve& curve,
                            const ConcavityOptions& opts = {});

// Least-squares parabola t = a + b*lambda + c*lambda^2 through given points;
// returns (a, b, c) and the rms residual.  Exposed for testing.
Eigen::Vector3d fit_parabola(const std::vector<double>& lambda,
                             const std::vector<double>& t, double* rms = nullptr);

// Upper bound for the real-spectrum window: 1.5 * sup |potentials| over the
// reachable positions (the pencil's real spectrum obeys |lambda| <= sup|V|).
double lambda_window_bound(const Problem& problem, double t_max = 1.0);

}  // namespace specgraph
