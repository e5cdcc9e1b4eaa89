#include "specgraph/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specgraph/errors.hpp"

namespace specgraph {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous-extension coefficients (contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct Stepper {
    const OdeRhs& f;
    Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;

    explicit Stepper(const OdeRhs& rhs, int n) : f(rhs) {
        for (Vec* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &ynew, &yerr})
            v->resize(n);
    }

    // One trial step from (x, y) with k1 already holding f(x, y).
    void attempt(double x, const Vec& y, double h) {
        ytmp = y + h * a21 * k1;
        f(x + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(x + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(x + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(x + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(x + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(x + h, ynew, k7);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    }

    double error_norm(const Vec& y, const OdeOptions& o) const {
        double s = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = yerr[i] / sc;
            s += r * r;
        }
        return std::sqrt(s / y.size());
    }

    DenseStep dense(double x, const Vec& y, double h) const {
        DenseStep st;
        st.x0 = x;
        st.h = h;
        st.rcont.resize(y.size(), 5);
        Vec dy = ynew - y;
        st.rcont.col(0) = y;
        st.rcont.col(1) = dy;
        st.rcont.col(2) = h * k1 - dy;
        st.rcont.col(3) = dy - h * k7 - st.rcont.col(2);
        st.rcont.col(4) =
            h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        return st;
    }
};

double initial_step(const OdeRhs& f, double x0, const Vec& y0, const Vec& f0,
                    double dir, double span, const OdeOptions& o) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < y0.size(); ++i) {
        double sc = o.atol + o.rtol * std::abs(y0[i]);
        dnf += (f0[i] / sc) * (f0[i] / sc);
        dny += (y0[i] / sc) * (y0[i] / sc);
    }
    double h0 = (dnf <= 1e-10 || dny <= 1e-10)
                    ? 1e-6
                    : 0.01 * std::sqrt(dny / dnf);
    h0 = std::min(h0, span);
    Vec y1 = y0 + dir * h0 * f0;
    Vec f1(y0.size());
    f(x0 + dir * h0, y1, f1);
    double der2 = 0.0;
    for (int i = 0; i < y0.size(); ++i) {
        double sc = o.atol + o.rtol * std::abs(y0[i]);
        double d = (f1[i] - f0[i]) / sc;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h0;
    double der12 = std::max(der2, std::sqrt(dnf));
    double h1 = (der12 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                 : std::pow(0.01 / der12, 0.2);
    return dir * std::min({100 * h0, h1, span});
}

template <class OnStep>
void run_integration(const OdeRhs& f, Vec& y, double x0, double x1,
                     const OdeOptions& opts, OnStep&& on_step) {
    const int n = static_cast<int>(y.size());
    const double dir = (x1 >= x0) ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    if (span == 0.0) return;

    Stepper st(f, n);
    double x = x0;
    f(x, y, st.k1);
    double h = (opts.initial_step > 0.0)
                   ? dir * std::min(opts.initial_step, span)
                   : initial_step(f, x, y, st.k1, dir, span, opts);
    const double hmax = (opts.max_step > 0.0) ? opts.max_step : span;

    std::size_t nsteps = 0;
    while (dir * (x1 - x) > 0.0) {
        if (++nsteps > opts.max_steps)
            throw ComputationError("ODE step limit exceeded");
        if (std::abs(h) > hmax) h = dir * hmax;
        if (dir * (x + h - x1) > 0.0) h = x1 - x;

        st.attempt(x, y, h);
        double err = st.error_norm(y, opts);
        if (err <= 1.0) {
            DenseStep ds = st.dense(x, y, h);
            x += h;
            y = st.ynew;
            st.k1 = st.k7;  // FSAL
            bool stop = on_step(ds, x, y);
            if (stop) return;
            double fac = (err == 0.0) ? 5.0
                                      : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(x)))
                throw ComputationError("ODE step size underflow");
        }
    }
}

}  // namespace

Vec DenseOde::eval(double x) const {
    return locate(x).eval(x);
}

const DenseStep& DenseOde::locate(double x) const {
    if (steps_.empty()) throw std::logic_error("empty trajectory");
    const double lo = std::min(x_begin_, x_end_), hi = std::max(x_begin_, x_end_);
    const double slack = 1e-9 * (1.0 + hi - lo);
    if (x < lo - slack || x > hi + slack)
        throw InterpolationOutOfRange("dense evaluation outside integrated span");
    // steps are ordered along the direction of integration
    std::size_t a = 0, b = steps_.size();
    const bool fwd = forward();
    while (b - a > 1) {
        std::size_t mid = (a + b) / 2;
        if (fwd ? (x >= steps_[mid].x0) : (x <= steps_[mid].x0))
            a = mid;
        else
            b = mid;
    }
    return steps_[a];
}

Vec integrate_to(const OdeRhs& f, Vec y0, double x0, double x1,
                 const OdeOptions& opts) {
    run_integration(f, y0, x0, x1, opts,
                    [](const DenseStep&, double, const Vec&) { return false; });
    return y0;
}

DenseOde integrate_dense(const OdeRhs& f, Vec y0, double x0, double x1,
                         const OdeOptions& opts) {
    std::vector<DenseStep> steps;
    run_integration(f, y0, x0, x1, opts,
                    [&](const DenseStep& ds, double, const Vec&) {
                        steps.push_back(ds);
                        return false;
                    });
    return DenseOde(std::move(steps), x0, x1);
}

std::optional<EventResult> integrate_until_sign_change(
    const OdeRhs& f, Vec y0, double x0, double x1,
    const std::function<double(double, const Vec&)>& g, bool armed,
    const OdeOptions& opts, DenseOde* trajectory_out, double arm_threshold) {
    std::vector<DenseStep> steps;
    double gprev = g(x0, y0);
    int sign_prev = (gprev > 0) - (gprev < 0);
    bool is_armed = armed && sign_prev != 0;
    std::optional<EventResult> hit;

    run_integration(f, y0, x0, x1, opts,
                    [&](const DenseStep& ds, double x, const Vec& y) {
                        steps.push_back(ds);
                        double gv = g(x, y);
                        int sign_now = (gv > 0) - (gv < 0);
                        if (!is_armed) {
                            if (std::abs(gv) > arm_threshold && sign_now != 0) {
                                is_armed = true;
                                sign_prev = sign_now;
                            }
                            return false;
                        }
                        if (sign_now != 0 && sign_now != sign_prev) {
                            auto fn = [&](double xx) { return g(xx, ds.eval(xx)); };
                            double a = ds.x0, b = ds.x0 + ds.h;
                            // the sign change may have started exactly at a
                            double root = brent_root(fn, a, b, 1e-15);
                            hit = EventResult{root, ds.eval(root)};
                            return true;
                        }
                        sign_prev = (sign_now != 0) ? sign_now : sign_prev;
                        return false;
                    });

    if (trajectory_out) {
        double x_end = steps.empty() ? x0 : steps.back().x0 + steps.back().h;
        *trajectory_out = DenseOde(std::move(steps), x0, x_end);
    }
    return hit;
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: no sign change");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol || fb == 0.0) return b;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (xm > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    return b;
}

namespace {
const std::array<double, 16> kG16Nodes = {
    -0.9894009349916499325962, -0.9445750230732325760780,
    -0.8656312023878317438805, -0.7554044083550030338951,
    -0.6178762444026437484467, -0.4580167776572273863424,
    -0.2816035507792589132305, -0.0950125098376374401853,
    0.0950125098376374401853,  0.2816035507792589132305,
    0.4580167776572273863424,  0.6178762444026437484467,
    0.7554044083550030338951,  0.8656312023878317438805,
    0.9445750230732325760780,  0.9894009349916499325962};
const std::array<double, 16> kG16Weights = {
    0.0271524594117540948518, 0.0622535239386478928628,
    0.0951585116824927848099, 0.1246289712555338720525,
    0.1495959888165767320815, 0.1691565193950025381893,
    0.1826034150449235888667, 0.1894506104550684962854,
    0.1894506104550684962854, 0.1826034150449235888667,
    0.1691565193950025381893, 0.1495959888165767320815,
    0.1246289712555338720525, 0.0951585116824927848099,
    0.0622535239386478928628, 0.0271524594117540948518};
const std::array<double, 8> kG8Nodes = {
    -0.9602898564975362316836, -0.7966664774136267395916,
    -0.5255324099163289858177, -0.1834346424956498049395,
    0.1834346424956498049395,  0.5255324099163289858177,
    0.7966664774136267395916,  0.9602898564975362316836};
const std::array<double, 8> kG8Weights = {
    0.1012285362903762591525, 0.2223810344533744705444,
    0.3137066458778872873380, 0.3626837833783619829652,
    0.3626837833783619829652, 0.3137066458778872873380,
    0.2223810344533744705444, 0.1012285362903762591525};
}  // namespace

const std::array<double, 16>& gauss16_nodes() { return kG16Nodes; }
const std::array<double, 16>& gauss16_weights() { return kG16Weights; }

double gauss_quad(const std::function<double(double)>& f, double a, double b,
                  int panels) {
    double total = 0.0;
    double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * hp, half = 0.5 * hp;
        double s = 0.0;
        for (int i = 0; i < 16; ++i)
            s += kG16Weights[i] * f(mid + half * kG16Nodes[i]);
        total += s * half;
    }
    return total;
}

double quad_over_trajectory(const DenseOde& traj,
                            const std::function<double(double, const Vec&)>& f) {
    double total = 0.0;
    for (const auto& st : traj.steps()) {
        double mid = st.x0 + 0.5 * st.h, half = 0.5 * st.h;
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            double x = mid + half * kG8Nodes[i];
            s += kG8Weights[i] * f(x, st.eval(x));
        }
        total += s * half;
    }
    return total;  // signed with the direction of integration
}

}  // namespace specgraph
