#include "specgraph/curves.hpp"

#include <algorithm>
#include <cmath>

#include "specgraph/errors.hpp"
#include "specgraph/parallel.hpp"

namespace specgraph {

namespace {

double eval_D(const Problem& problem, Axis axis, double fixed, double x,
              const SpectralOptions& so) {
    return axis == Axis::Lambda ? dispersion_det(problem, x, fixed, so)
                                : dispersion_det(problem, fixed, x, so);
}

}  // namespace

SegmentScan crossings_on_segment(const Problem& problem, Axis axis, double fixed,
                                 double range_a, double range_b,
                                 const ScanOptions& opts) {
    if (!(range_b > range_a) && !(range_a > range_b))
        throw std::invalid_argument("degenerate scan range");
    const int n = std::max(2, opts.resolution);
    std::vector<double> xs(n + 1), vals(n + 1);
    for (int i = 0; i <= n; ++i)
        xs[i] = range_a + (range_b - range_a) * i / n;
    parallel_for(n + 1, opts.threads, [&](std::size_t i) {
        vals[i] = eval_D(problem, axis, fixed, xs[i], opts.spectral);
    });

    SegmentScan out;
    for (int i = 1; i <= n; ++i) {
        if (vals[i - 1] == 0.0) continue;
        if ((vals[i - 1] > 0) != (vals[i] > 0)) {
            double root = brent_root(
                [&](double x) { return eval_D(problem, axis, fixed, x, opts.spectral); },
                xs[i - 1], xs[i], opts.root_tol);
            out.roots.push_back({root, std::abs(xs[i] - xs[i - 1])});
        }
    }
    // interior local minima of |D| below the dip threshold with no sign change
    for (int i = 1; i < n; ++i) {
        double a = std::abs(vals[i - 1]), b = std::abs(vals[i]), c = std::abs(vals[i + 1]);
        if (b <= a && b <= c && b < opts.dip_threshold &&
            (vals[i - 1] > 0) == (vals[i + 1] > 0)) {
            bool near_root = false;
            for (const auto& r : out.roots)
                if (std::abs(r.position - xs[i]) <= 2.0 * std::abs(xs[1] - xs[0]))
                    near_root = true;
            if (!near_root) out.dips.push_back({xs[i], b});
        }
    }
    return out;
}

double solve_t_at_lambda(const Problem& problem, double lambda, double t_guess,
                         double window, const SpectralOptions& opts) {
    auto f = [&](double t) { return dispersion_det(problem, lambda, t, opts); };
    // expand a bracket around the guess
    double lo = t_guess, hi = t_guess;
    double flo = f(lo), fhi = flo;
    for (int k = 1; k <= 40; ++k) {
        double w = window * k / 20.0;
        lo = t_guess - w;
        hi = t_guess + w;
        flo = f(lo);
        fhi = f(hi);
        if ((flo > 0) != (fhi > 0)) break;
    }
    if ((flo > 0) == (fhi > 0))
        throw SeedNotACrossing("no t-bracket for D(lambda, .) near the guess");
    return brent_root(f, lo, hi, 1e-13);
}

double solve_lambda_at_t(const Problem& problem, double t, double lambda_guess,
                         double window, const SpectralOptions& opts) {
    auto f = [&](double lam) { return dispersion_det(problem, lam, t, opts); };
    double lo = lambda_guess, hi = lambda_guess;
    double flo = f(lo), fhi = flo;
    for (int k = 1; k <= 40; ++k) {
        double w = window * k / 20.0;
        lo = lambda_guess - w;
        hi = lambda_guess + w;
        flo = f(lo);
        fhi = f(hi);
        if ((flo > 0) != (fhi > 0)) break;
    }
    if ((flo > 0) == (fhi > 0))
        throw SeedNotACrossing("no lambda-bracket for D(., t) near the guess");
    return brent_root(f, lo, hi, 1e-13);
}

namespace {

struct Tracer {
    const Problem& problem;
    const TraceOptions& opts;
    double lscale;

    double D(double lam, double t) const {
        return dispersion_det(problem, lam, t, opts.spectral);
    }

    // gradient in normalized coordinates (lambda/lscale, t)
    Eigen::Vector2d grad(double lam, double t) const {
        const double hl = opts.fd_step * lscale, ht = opts.fd_step;
        Eigen::Vector2d g;
        g[0] = (D(lam + hl, t) - D(lam - hl, t)) / (2.0 * hl) * lscale;
        g[1] = (D(lam, t + ht) - D(lam, t - ht)) / (2.0 * ht);
        return g;
    }

    // one predictor-corrector step from (lam, t) along `tangent`; h may shrink
    bool step(double& lam, double& t, Eigen::Vector2d& tangent, double& h,
              double& residual) const {
        while (true) {
            Eigen::Vector2d x(lam / lscale, t);
            Eigen::Vector2d xp = x + h * tangent;
            bool ok = false;
            Eigen::Vector2d xc = xp;
            double dval = 0.0;
            for (int it = 0; it < opts.max_newton; ++it) {
                double l = xc[0] * lscale, tt = xc[1];
                dval = D(l, tt);
                Eigen::Vector2d g = grad(l, tt);
                // solve [g^T; tangent^T] dx = -[dval; tangent.(xc-xp)]
                Eigen::Matrix2d A;
                A.row(0) = g.transpose();
                A.row(1) = tangent.transpose();
                Eigen::Vector2d rhs(-dval, -tangent.dot(xc - xp));
                double det = A.determinant();
                if (std::abs(det) < 1e-300) break;
                Eigen::Vector2d dx = A.inverse() * rhs;
                xc += dx;
                if (std::abs(D(xc[0] * lscale, xc[1])) < opts.corrector_tol &&
                    dx.norm() < 1e-10) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                double l = xc[0] * lscale, tt = xc[1];
                dval = D(l, tt);
                ok = std::abs(dval) < opts.corrector_tol;
            }
            if (ok) {
                Eigen::Vector2d xnew = xc;
                Eigen::Vector2d dir = xnew - x;
                if (dir.norm() > 0) {
                    dir.normalize();
                    if (dir.dot(tangent) > 0.2) {
                        lam = xnew[0] * lscale;
                        t = xnew[1];
                        tangent = dir;
                        residual = std::abs(D(lam, t));
                        h = std::min(h * 1.3, opts.h_max);
                        return true;
                    }
                }
            }
            h *= 0.5;
            if (h < opts.h_min) return false;
        }
    }
};

}  // namespace

EigenCurve trace_curve(const Problem& problem, double seed_lambda, double seed_t,
                       const Rect& bounds, const TraceOptions& opts) {
    EigenCurve curve;
    curve.seed_lambda = seed_lambda;
    curve.seed_t = seed_t;
    const double lscale = opts.lambda_scale > 0.0
                              ? opts.lambda_scale
                              : std::max({1.0, std::abs(bounds.lambda_min),
                                          std::abs(bounds.lambda_max)});
    Tracer tracer{problem, opts, lscale};

    const double d0 = tracer.D(seed_lambda, seed_t);
    if (std::abs(d0) > 1e-6)
        throw SeedNotACrossing("seed is not on the zero set of D");

    Eigen::Vector2d g0 = tracer.grad(seed_lambda, seed_t);
    const bool corner_degenerate = std::abs(g0[0]) < 1e-4 * (1.0 + std::abs(g0[1]));

    auto in_bounds = [&](double lam, double t) {
        return lam >= bounds.lambda_min && lam <= bounds.lambda_max &&
               t >= bounds.t_min && t <= bounds.t_max;
    };

    auto run_half = [&](Eigen::Vector2d tangent, double lam0, double t0,
                        std::vector<EigenCurve::Point>& out) {
        double lam = lam0, t = t0, h = opts.step;
        while (out.size() < opts.max_points) {
            double res = 0.0;
            Eigen::Vector2d tan = tangent;
            double lam_prev = lam, t_prev = t;
            if (!tracer.step(lam, t, tan, h, res)) {
                curve.corrector_failed = true;
                break;
            }
            tangent = tan;
            if (!in_bounds(lam, t)) {
                curve.hit_bounds = true;
                // keep the clipped point if it only barely left the box
                (void)lam_prev;
                (void)t_prev;
                break;
            }
            out.push_back({lam, t, res, tan[0], tan[1]});
        }
    };

    if (corner_degenerate) {
        // Theorem guarantees t(lambda) is the graph variable here: seed the
        // two half-curves by 1-D solves at small |lambda|.
        std::vector<EigenCurve::Point> left, right;
        const double dl = std::max(1e-4, 0.25 * opts.step) * lscale;
        for (int dir : {+1, -1}) {
            std::vector<EigenCurve::Point>& side = dir > 0 ? right : left;
            double lam1 = seed_lambda + dir * dl;
            double t1;
            try {
                t1 = solve_t_at_lambda(problem, lam1, seed_t, 0.05, opts.spectral);
            } catch (const SeedNotACrossing&) {
                continue;
            }
            side.push_back({lam1, t1,
                            std::abs(tracer.D(lam1, t1)), 0.0, 0.0});
            Eigen::Vector2d tangent(dir * dl / lscale, t1 - seed_t);
            tangent.normalize();
            double lam = lam1, t = t1, h = opts.step;
            while (side.size() < opts.max_points) {
                double res = 0.0;
                Eigen::Vector2d tan = tangent;
                if (!tracer.step(lam, t, tan, h, res)) {
                    curve.corrector_failed = true;
                    break;
                }
                tangent = tan;
                if (!in_bounds(lam, t)) {
                    curve.hit_bounds = true;
                    break;
                }
                side.push_back({lam, t, res, tan[0], tan[1]});
            }
        }
        std::reverse(left.begin(), left.end());
        curve.points = std::move(left);
        curve.points.push_back({seed_lambda, seed_t, std::abs(d0), 0.0, 0.0});
        curve.points.insert(curve.points.end(), right.begin(), right.end());
    } else {
        Eigen::Vector2d tangent(-g0[1], g0[0]);
        tangent.normalize();
        std::vector<EigenCurve::Point> fwd, bwd;
        run_half(tangent, seed_lambda, seed_t, fwd);
        run_half(-tangent, seed_lambda, seed_t, bwd);
        std::reverse(bwd.begin(), bwd.end());
        curve.points = std::move(bwd);
        curve.points.push_back({seed_lambda, seed_t, std::abs(d0), tangent[0], tangent[1]});
        curve.points.insert(curve.points.end(), fwd.begin(), fwd.end());
    }
    return curve;
}

Eigen::Vector3d fit_parabola(const std::vector<double>& lambda,
                             const std::vector<double>& t, double* rms) {
    const int n = static_cast<int>(lambda.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = lambda[i];
        A(i, 2) = lambda[i] * lambda[i];
        b[i] = t[i];
    }
    Eigen::Vector3d coef = A.colPivHouseholderQr().solve(b);
    if (rms) {
        double r = (A * coef - b).norm() / std::sqrt(std::max(1, n - 3));
        *rms = r;
    }
    return coef;
}

Concavity concavity_at_seed(const Problem& problem, const EigenCurve& curve,
                            const ConcavityOptions& opts) {
    // fresh 1-D solves on symmetric grids |lambda| in [w/10, w], two windows
    const double seed_t = curve.seed_t;
    const double seed_lambda = curve.seed_lambda;
    double lam_lo = 0.0, lam_hi = 0.0;
    for (const auto& p : curve.points) {
        lam_lo = std::min(lam_lo, p.lambda - seed_lambda);
        lam_hi = std::max(lam_hi, p.lambda - seed_lambda);
    }
    const double w_full = 10.0 * opts.delta;
    if (lam_hi < w_full || -lam_lo < w_full)
        throw InsufficientPoints(
            "corner curve does not cover the concavity fit window on both sides");

    auto fit_window = [&](double w) {
        std::vector<double> ls, ts;
        double t_guess_pos = seed_t, t_guess_neg = seed_t;
        for (int i = 0; i < opts.points_per_side; ++i) {
            double mag = w * (0.1 + 0.9 * i / (opts.points_per_side - 1.0));
            double tp = solve_t_at_lambda(problem, seed_lambda + mag, t_guess_pos,
                                          0.05, opts.spectral);
            double tn = solve_t_at_lambda(problem, seed_lambda - mag, t_guess_neg,
                                          0.05, opts.spectral);
            t_guess_pos = tp;
            t_guess_neg = tn;
            ls.push_back(seed_lambda + mag);
            ts.push_back(tp);
            ls.push_back(seed_lambda - mag);
            ts.push_back(tn);
        }
        double rms = 0.0;
        Eigen::Vector3d coef = fit_parabola(ls, ts, &rms);
        return std::make_pair(coef, rms);
    };

    auto [c_full, rms_full] = fit_window(w_full);
    auto [c_half, rms_half] = fit_window(0.5 * w_full);
    double cpp_full = 2.0 * c_full[2], cpp_half = 2.0 * c_half[2];
    Concavity out;
    out.tpp = (4.0 * cpp_half - cpp_full) / 3.0;  // Richardson, O(w^2) error model
    out.error_est = std::abs(cpp_half - cpp_full) / 3.0 +
                    8.0 * (rms_full + rms_half) / (w_full * w_full);
    out.tp = c_half[1];
    return out;
}

double lambda_window_bound(const Problem& problem, double t_max) {
    double vmax = 0.0;
    const int samples = 512;
    for (int e = 0; e < problem.edges(); ++e) {
        double smax = std::min(problem.potentials->reach(e),
                               t_max * problem.length(e));
        for (int i = 0; i <= samples; ++i) {
            double s = smax * i / samples;
            vmax = std::max({vmax, std::abs(problem.potentials->qG(e, s)),
                             std::abs(problem.potentials->qF(e, s))});
        }
    }
    return 1.5 * vmax;
}

}  // namespace specgraph
