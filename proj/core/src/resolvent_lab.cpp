#include "specgraph/resolvent_lab.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "specgraph/errors.hpp"
#include "specgraph/ode.hpp"

namespace specgraph::lab {

namespace {

using C44 = Eigen::Matrix4cd;
using C2 = Eigen::Vector2cd;

// system matrix of w' = A w for w = (u, u', v, v'):
//   u'' = g u - zeta v,  v'' = f v + zeta u
C44 system_matrix(const IntervalExtension& ext, cplx zeta) {
    C44 a = C44::Zero();
    a(0, 1) = 1.0;
    a(1, 0) = ext.g_pot;
    a(1, 2) = -zeta;
    a(2, 3) = 1.0;
    a(3, 2) = ext.f_pot;
    a(3, 0) = zeta;
    return a;
}

// Fundamental system Phi(x) = exp(A x), evaluated by diagonalization when the
// eigenbasis is well conditioned, by Pade expm otherwise.
struct Fundamental {
    C44 a;
    bool diagonal_ok = false;
    C44 s, s_inv;
    Eigen::Vector4cd eigs;

    explicit Fundamental(const C44& a_in) : a(a_in) {
        Eigen::ComplexEigenSolver<C44> es(a);
        if (es.info() == Eigen::Success) {
            s = es.eigenvectors();
            eigs = es.eigenvalues();
            Eigen::JacobiSVD<C44> svd(s);
            double cond = svd.singularValues()(0) /
                          std::max(1e-300, svd.singularValues()(3));
            if (cond < 1e7) {
                s_inv = s.inverse();
                diagonal_ok = true;
            }
        }
    }

    C44 at(double x) const {
        if (diagonal_ok) {
            Eigen::Vector4cd e;
            for (int i = 0; i < 4; ++i) e[i] = std::exp(eigs[i] * x);
            return s * e.asDiagonal() * s_inv;
        }
        C44 ax = a * x;
        return ax.exp();
    }
};

// Selection of the scaled trace from endpoint states: rows of
// (u(0), u(l), s u'(0), -s u'(l) | v(0), v(l), s v'(0), -s v'(l))
// against the stacked vector (w(0); w(l)).
Eigen::Matrix<double, 8, 8> trace_selector(double sigma) {
    Eigen::Matrix<double, 8, 8> T = Eigen::Matrix<double, 8, 8>::Zero();
    T(0, 0) = 1.0;           // u(0)
    T(1, 4) = 1.0;           // u(l)
    T(2, 1) = sigma;         // s u'(0)
    T(3, 5) = -sigma;        // -s u'(l)
    T(4, 2) = 1.0;           // v(0)
    T(5, 6) = 1.0;           // v(l)
    T(6, 3) = sigma;         // s v'(0)
    T(7, 7) = -sigma;        // -s v'(l)
    return T;
}

// Condition rows: orthogonal complements of the two planes applied to the
// scaled trace; 4 x 8 acting on (w(0); w(l)).
Eigen::Matrix<double, 4, 8> condition_rows(const IntervalExtension& ext) {
    auto complement = [](const Mat& frame) {
        Mat p = frame * frame.transpose();
        Mat n = Mat::Identity(4, 4) - p;
        Eigen::JacobiSVD<Mat> svd(n, Eigen::ComputeFullU);
        return Mat(svd.matrixU().leftCols(2).transpose());  // 2 x 4
    };
    Mat nu = complement(ext.plane_u);
    Mat nv = complement(ext.plane_v);
    Eigen::Matrix<double, 8, 8> sel = trace_selector(ext.trace_scale);
    Eigen::Matrix<double, 4, 8> rows = Eigen::Matrix<double, 4, 8>::Zero();
    // u-block trace components are sel rows 0..3, v-block rows 4..7
    rows.topRows(2) = nu * sel.topRows(4);
    rows.bottomRows(2) = nv * sel.bottomRows(4);
    return rows;
}

struct BoundaryOperator {
    Fundamental fund;
    Eigen::Matrix<double, 4, 8> cond;
    C44 phi0, phil;
    C44 b;  // cond * [phi0; phil]
    Eigen::PartialPivLU<C44> lu;
    double cond_number;

    BoundaryOperator(const IntervalExtension& ext, cplx zeta)
        : fund(system_matrix(ext, zeta)), cond(condition_rows(ext)) {
        phi0 = fund.at(0.0);
        phil = fund.at(ext.length);
        Eigen::Matrix<cplx, 8, 4> stacked;
        stacked.topRows(4) = phi0;
        stacked.bottomRows(4) = phil;
        b = cond.cast<cplx>() * stacked;
        Eigen::JacobiSVD<C44> svd(b);
        cond_number =
            svd.singularValues()(0) / std::max(1e-300, svd.singularValues()(3));
        lu = Eigen::PartialPivLU<C44>(b);
    }
};

}  // namespace

IntervalExtension IntervalExtension::dirichlet(double length, double f, double g) {
    IntervalExtension e;
    e.length = length;
    e.f_pot = f;
    e.g_pot = g;
    // Dirichlet plane in the per-block R^4: values zero, derivatives free
    Mat frame = Mat::Zero(4, 2);
    frame(2, 0) = 1.0;
    frame(3, 1) = 1.0;
    e.plane_u = frame;
    e.plane_v = frame;
    return e;
}

LabGrid LabGrid::make(double length, int panels) {
    LabGrid g;
    g.length = length;
    g.panels = panels;
    const auto& xs = gauss16_nodes();
    const auto& ws = gauss16_weights();
    double hp = length / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = (p + 0.5) * hp, half = 0.5 * hp;
        for (int i = 0; i < 16; ++i) {
            g.nodes.push_back(mid + half * xs[i]);
            g.weights.push_back(half * ws[i]);
        }
    }
    return g;
}

cplx LabGrid::inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        s += weights[i] * a[i] * std::conj(b[i]);
    return s;
}

namespace {

// Indefinite-integration matrix of the 16-point Gauss rule: W(j, i) is the
// integral of the i-th Lagrange cardinal function from -1 to node j.  Exact
// for the degree-15 interpolant, i.e. spectrally accurate for the analytic
// integrands used here.
const Eigen::Matrix<double, 16, 16>& gauss16_indefinite() {
    static const Eigen::Matrix<double, 16, 16> W = [] {
        const auto& xs = gauss16_nodes();
        const auto& ws = gauss16_weights();
        // Legendre values P_k(x_i) for k = 0..16
        double P[17][16];
        for (int i = 0; i < 16; ++i) {
            P[0][i] = 1.0;
            P[1][i] = xs[i];
            for (int k = 1; k < 16; ++k)
                P[k + 1][i] =
                    ((2 * k + 1) * xs[i] * P[k][i] - k * P[k - 1][i]) / (k + 1);
        }
        Eigen::Matrix<double, 16, 16> out;
        for (int j = 0; j < 16; ++j) {
            for (int i = 0; i < 16; ++i) {
                double acc = 0.0;
                for (int k = 0; k < 16; ++k) {
                    double coef = (2.0 * k + 1.0) / 2.0 * ws[i] * P[k][i];
                    double qk;
                    if (k == 0)
                        qk = xs[j] + 1.0;
                    else
                        qk = (P[k + 1][j] - P[k - 1][j]) / (2.0 * k + 1.0);
                    acc += coef * qk;
                }
                out(j, i) = acc;
            }
        }
        return out;
    }();
    return W;
}

}  // namespace

struct Solution::Impl {
    IntervalExtension ext;
    cplx zeta;
    std::shared_ptr<Fundamental> fund;
    C4 coeff;
    FnPair forcing;                    // empty when homogeneous
    bool homogeneous = false;
    std::vector<C4> panel_prefix;      // cumulative integral of Phi^{-1} b
    double panel_width = 0.0;
    int panels = 0;
    // cached cumulative integrals at the shared quadrature nodes (16/panel)
    std::vector<double> grid_x;
    std::vector<C4> grid_cum;

    C4 b_of(double s) const {
        C4 b = C4::Zero();
        b[1] = -forcing.second(s);
        b[3] = forcing.first(s);
        return b;
    }

    C4 phi_inv_b(double s) const {
        if (fund->diagonal_ok) {
            Eigen::Vector4cd e;
            for (int i = 0; i < 4; ++i) e[i] = std::exp(-fund->eigs[i] * s);
            return fund->s * (e.asDiagonal() * (fund->s_inv * b_of(s)));
        }
        return fund->at(-s) * b_of(s);
    }

    // single sweep: panel prefixes plus node cumulatives via the
    // indefinite-integration matrix (one forcing evaluation per node)
    void build_tables() {
        panel_prefix.resize(panels);
        grid_x.resize(16 * panels);
        grid_cum.resize(16 * panels);
        const auto& xs = gauss16_nodes();
        const auto& ws = gauss16_weights();
        const auto& W = gauss16_indefinite();
        C4 acc = C4::Zero();
        std::array<C4, 16> vals;
        for (int p = 0; p < panels; ++p) {
            panel_prefix[p] = acc;
            const double a = p * panel_width;
            const double mid = a + 0.5 * panel_width, half = 0.5 * panel_width;
            for (int i = 0; i < 16; ++i) {
                grid_x[16 * p + i] = mid + half * xs[i];
                vals[i] = phi_inv_b(grid_x[16 * p + i]);
            }
            for (int j = 0; j < 16; ++j) {
                C4 s = C4::Zero();
                for (int i = 0; i < 16; ++i) s += W(j, i) * vals[i];
                grid_cum[16 * p + j] = acc + half * s;
            }
            C4 full = C4::Zero();
            for (int i = 0; i < 16; ++i) full += ws[i] * vals[i];
            acc += half * full;
        }
        panel_end_total_ = acc;
    }

    C4 panel_end_total_ = C4::Zero();
    C4 total_cumulative() const { return panel_end_total_; }

    C4 cumulative(double x) const {
        if (homogeneous) return C4::Zero();
        // fast path: x is one of the shared quadrature nodes
        auto it = std::lower_bound(grid_x.begin(), grid_x.end(), x - 1e-13);
        if (it != grid_x.end() && std::abs(*it - x) < 1e-12)
            return grid_cum[static_cast<std::size_t>(it - grid_x.begin())];
        int p = std::clamp(static_cast<int>(x / panel_width), 0, panels - 1);
        C4 acc = panel_prefix[p];
        double a = p * panel_width;
        if (x > a) {
            double mid = 0.5 * (a + x), half = 0.5 * (x - a);
            const auto& xs = gauss16_nodes();
            const auto& ws = gauss16_weights();
            C4 s = C4::Zero();
            for (int i = 0; i < 16; ++i)
                s += ws[i] * phi_inv_b(mid + half * xs[i]);
            acc += half * s;
        }
        return acc;
    }

    C4 state(double x) const { return fund->at(x) * (coeff + cumulative(x)); }
};

C4 Solution::state(double x) const { return impl->state(x); }

FnPair Solution::as_pair() const {
    auto im = impl;
    return FnPair{[im](double x) { return im->state(x)[0]; },
                  [im](double x) { return im->state(x)[2]; }};
}

C8 trace_of(const IntervalExtension& ext, const C4& at0, const C4& atl) {
    const double s = ext.trace_scale;
    C8 tr;
    tr << at0[0], atl[0], s * at0[1], -s * atl[1],
          at0[2], atl[2], s * at0[3], -s * atl[3];
    return tr;
}

Solution resolvent_apply(const IntervalExtension& ext, cplx zeta, const FnPair& f,
                         const LabOptions& opts) {
    BoundaryOperator bop(ext, zeta);
    if (bop.cond_number > opts.near_spectrum_cond)
        throw NearSpectrum("boundary solve nearly singular: zeta close to spectrum");

    auto impl = std::make_shared<Solution::Impl>();
    impl->ext = ext;
    impl->zeta = zeta;
    impl->fund = std::make_shared<Fundamental>(bop.fund);
    impl->forcing = f;
    impl->homogeneous = !f.first || !f.second;
    impl->panels = opts.panels;
    impl->panel_width = ext.length / opts.panels;

    C4 ql = C4::Zero();
    if (!impl->homogeneous) {
        impl->build_tables();
        ql = impl->total_cumulative();
    }

    // boundary condition: cond * [phi0 c ; phil (c + q(l))] = 0
    Eigen::Matrix<cplx, 8, 1> rhs_stack = Eigen::Matrix<cplx, 8, 1>::Zero();
    rhs_stack.bottomRows(4) = bop.phil * ql;
    C4 rhs = -(bop.cond.cast<cplx>() * rhs_stack);
    impl->coeff = bop.lu.solve(rhs);

    Solution sol;
    sol.impl = impl;
    return sol;
}

C8 solution_trace(const IntervalExtension& ext, const Solution& sol) {
    return trace_of(ext, sol.state(0.0), sol.state(ext.length));
}

FnPair trace_adjoint_apply(const IntervalExtension& ext, cplx zeta, const C8& e,
                           const LabOptions& opts) {
    auto bop = std::make_shared<BoundaryOperator>(ext, zeta);
    if (bop->cond_number > opts.near_spectrum_cond)
        throw NearSpectrum("boundary solve nearly singular: zeta close to spectrum");
    auto fund = std::make_shared<Fundamental>(bop->fund);
    const double sigma = ext.trace_scale;
    const double length = ext.length;
    C8 ec = e;

    // Theta(y)^H e where Theta(y) is the 8 x 2 kernel of the trace components
    // of x |-> K_zeta(x, y): column j from delta forcing in component j.
    auto eval = [bop, fund, sigma, length, ec](double y, int j) -> cplx {
        C4 sj = C4::Zero();
        if (j == 0)
            sj[3] = 1.0;  // forcing in the first component
        else
            sj[1] = -1.0;  // forcing in the second component
        C4 phiy_inv_sj;
        if (fund->diagonal_ok) {
            Eigen::Vector4cd ee;
            for (int i = 0; i < 4; ++i) ee[i] = std::exp(-fund->eigs[i] * y);
            phiy_inv_sj = fund->s * (ee.asDiagonal() * (fund->s_inv * sj));
        } else {
            phiy_inv_sj = fund->at(-y) * sj;
        }
        Eigen::Matrix<cplx, 8, 1> stack = Eigen::Matrix<cplx, 8, 1>::Zero();
        stack.bottomRows(4) = bop->phil * phiy_inv_sj;
        C4 c = bop->lu.solve(-(bop->cond.cast<cplx>() * stack));
        C4 w0 = c;  // phi(0) = I
        C4 wl = bop->phil * (c + phiy_inv_sj);
        C8 theta_col;
        theta_col << w0[0], wl[0], sigma * w0[1], -sigma * wl[1],
                     w0[2], wl[2], sigma * w0[3], -sigma * wl[3];
        // (Theta^H e)_j = sum_k conj(theta_col[k]) e[k]
        return theta_col.dot(ec);  // Eigen dot conjugates the first argument
    };

    return FnPair{[eval](double y) { return eval(y, 0); },
                  [eval](double y) { return eval(y, 1); }};
}

double boundary_det(const IntervalExtension& ext, double mu, const LabOptions&) {
    BoundaryOperator bop(ext, cplx(mu, 0.0));
    C44 b = bop.b;
    for (int c = 0; c < 4; ++c) {
        double n = b.col(c).norm();
        if (n > 0) b.col(c) /= n;
    }
    return b.determinant().real();
}

LabEigenfunction eigenfunction_at(const IntervalExtension& ext, double mu0,
                                  const LabOptions&) {
    BoundaryOperator bop(ext, cplx(mu0, 0.0));
    C44 b = bop.b;
    Eigen::Vector4d norms;
    for (int c = 0; c < 4; ++c) {
        norms[c] = b.col(c).norm();
        if (norms[c] > 0) b.col(c) /= norms[c];
    }
    Eigen::JacobiSVD<C44> svd(b, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(3) / sv(0) > 1e-6)
        throw EigenvalueNotSimple("mu0 is not an eigenvalue of the interval pencil");
    if (sv(2) / sv(0) < 1e-8)
        throw EigenvalueNotSimple("interval eigenvalue has multiplicity above one");
    C4 c = svd.matrixV().col(3);
    for (int i = 0; i < 4; ++i)
        if (norms[i] > 0) c[i] /= norms[i];
    // real pencil at real mu: rotate the phase so the coefficients are real
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < 4; ++i)
        if (std::abs(c[i]) > amax) {
            amax = std::abs(c[i]);
            imax = i;
        }
    cplx phase = c[imax] / std::abs(c[imax]);
    c /= phase;

    auto fund = std::make_shared<Fundamental>(bop.fund);
    LabEigenfunction out;
    out.mu0 = mu0;
    out.coeff = c;
    out.state = [fund, c](double x) -> C4 { return fund->at(x) * c; };
    return out;
}

std::vector<double> real_eigenvalues(const IntervalExtension& ext, double lo,
                                     double hi, int resolution,
                                     const LabOptions& opts) {
    std::vector<double> roots;
    double prev = boundary_det(ext, lo, opts);
    double xprev = lo;
    for (int i = 1; i <= resolution; ++i) {
        double x = lo + (hi - lo) * i / resolution;
        double val = boundary_det(ext, x, opts);
        if ((prev > 0) != (val > 0)) {
            roots.push_back(brent_root(
                [&](double m) { return boundary_det(ext, m, opts); }, xprev, x,
                1e-13));
        }
        prev = val;
        xprev = x;
    }
    return roots;
}

// ---------------------------------------------------------------------------
// families

namespace {
IntervalExtension with_planes(double length, double f, double g, const Mat& pu,
                              const Mat& pv, double sigma) {
    IntervalExtension e;
    e.length = length;
    e.f_pot = f;
    e.g_pot = g;
    e.plane_u = pu;
    e.plane_v = pv;
    e.trace_scale = sigma;
    return e;
}
Mat zero42() { return Mat::Zero(4, 2); }
}  // namespace

LabFamily v_only_family(const IntervalExtension& base, double df, double dg) {
    LabFamily fam;
    fam.label = "v_only";
    fam.at = [base, df, dg](double t) {
        IntervalExtension e = base;
        e.f_pot = base.f_pot + df * t;
        e.g_pot = base.g_pot + dg * t;
        return e;
    };
    fam.df_dt = [df](double) { return df; };
    fam.dg_dt = [dg](double) { return dg; };
    fam.dplane_u = [](double) { return zero42(); };
    fam.dplane_v = [](double) { return zero42(); };
    fam.dsigma_dt = [](double) { return 0.0; };
    return fam;
}

LabFamily plane_only_family(double length, double f, double g) {
    LabFamily fam;
    fam.label = "plane_only";
    fam.at = [length, f, g](double t) {
        Mat frame = rotating_plane(t, length).frame;
        return with_planes(length, f, g, frame, frame, 1.0);
    };
    fam.df_dt = [](double) { return 0.0; };
    fam.dg_dt = [](double) { return 0.0; };
    fam.dplane_u = [](double t) { return rotating_plane_frame_derivative(t, false); };
    fam.dplane_v = [](double t) { return rotating_plane_frame_derivative(t, false); };
    fam.dsigma_dt = [](double) { return 0.0; };
    return fam;
}

LabFamily trace_only_family(double length, double f, double g) {
    LabFamily fam;
    fam.label = "trace_only";
    const Mat frame = rotating_plane(0.6, length).frame;  // fixed Robin-type plane
    fam.at = [length, f, g, frame](double t) {
        return with_planes(length, f, g, frame, frame, 1.0 / t);
    };
    fam.df_dt = [](double) { return 0.0; };
    fam.dg_dt = [](double) { return 0.0; };
    fam.dplane_u = [](double) { return zero42(); };
    fam.dplane_v = [](double) { return zero42(); };
    fam.dsigma_dt = [](double t) { return -1.0 / (t * t); };
    return fam;
}

LabFamily frozen_family(const IntervalExtension& base) {
    LabFamily fam;
    fam.label = "frozen";
    fam.at = [base](double) { return base; };
    fam.df_dt = [](double) { return 0.0; };
    fam.dg_dt = [](double) { return 0.0; };
    fam.dplane_u = [](double) { return zero42(); };
    fam.dplane_v = [](double) { return zero42(); };
    fam.dsigma_dt = [](double) { return 0.0; };
    return fam;
}

// ---------------------------------------------------------------------------
// verification

namespace {

// polynomial * trigonometric test function with analytic derivatives
struct TestFn {
    cplx a0, a1, a2;
    double omega, phase;

    cplx val(double x) const {
        return (a0 + a1 * x + a2 * x * x) * std::sin(omega * x + phase);
    }
    cplx d1(double x) const {
        return (a1 + 2.0 * a2 * x) * std::sin(omega * x + phase) +
               (a0 + a1 * x + a2 * x * x) * omega * std::cos(omega * x + phase);
    }
    cplx d2(double x) const {
        return 2.0 * a2 * std::sin(omega * x + phase) +
               2.0 * (a1 + 2.0 * a2 * x) * omega * std::cos(omega * x + phase) -
               (a0 + a1 * x + a2 * x * x) * omega * omega *
                   std::sin(omega * x + phase);
    }
};

TestFn random_testfn(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TestFn f;
    f.a0 = cplx(u(rng), u(rng));
    f.a1 = cplx(u(rng), u(rng));
    f.a2 = cplx(u(rng), u(rng));
    f.omega = 0.5 + 2.0 * std::abs(u(rng));
    f.phase = u(rng);
    return f;
}

// Omega(a, b) = <JJ a, b> on C^8 with JJ = J4 (+) (-J4)
cplx omega8(const C8& a, const C8& b) {
    auto j4 = [](const Eigen::Matrix<cplx, 4, 1>& x) {
        Eigen::Matrix<cplx, 4, 1> y;
        y << x[2], x[3], -x[0], -x[1];
        return y;
    };
    Eigen::Matrix<cplx, 4, 1> au = a.head<4>(), av = a.tail<4>();
    Eigen::Matrix<cplx, 4, 1> bu = b.head<4>(), bv = b.tail<4>();
    Eigen::Matrix<cplx, 4, 1> ju = j4(au), jv = -j4(av);
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += ju[i] * std::conj(bu[i]);
    for (int i = 0; i < 4; ++i) s += jv[i] * std::conj(bv[i]);
    return s;
}

C8 scaled_trace_of_testpair(const IntervalExtension& ext, const TestFn& u1,
                            const TestFn& u2) {
    const double l = ext.length, s = ext.trace_scale;
    C8 tr;
    tr << u1.val(0), u1.val(l), s * u1.d1(0), -s * u1.d1(l),
          u2.val(0), u2.val(l), s * u2.d1(0), -s * u2.d1(l);
    return tr;
}

}  // namespace

double verify_green_identity(const IntervalExtension& ext, int trials,
                             unsigned seed, const LabOptions& opts) {
    std::mt19937_64 rng(seed);
    LabGrid grid = LabGrid::make(ext.length, opts.panels);
    double worst = 0.0;
    std::uniform_real_distribution<double> lam_dist(-2.0, 2.0);
    for (int k = 0; k < trials; ++k) {
        TestFn u1 = random_testfn(rng), u2 = random_testfn(rng);
        TestFn v1 = random_testfn(rng), v2 = random_testfn(rng);
        const double lambda = (k % 2 == 0) ? 0.0 : lam_dist(rng);

        // bracket <(N* - lambda) tau u, v> - <u, (N* - lambda) tau v>; the
        // lambda terms cancel identically for real lambda, kept for exercise
        cplx bracket = 0.0;
        for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
            double x = grid.nodes[i], w = grid.weights[i];
            // (N^* - lambda) tau (a,b) = (-a'' - lambda b?, ...): with
            // tau(a,b)=(b,a) and N*(p,q) = (q'', -p'')... assembled directly:
            cplx nu1 = -u1.d2(x) - lambda * u2.val(x);
            cplx nu2 = u2.d2(x) - lambda * u1.val(x);
            cplx nv1 = -v1.d2(x) - lambda * v2.val(x);
            cplx nv2 = v2.d2(x) - lambda * v1.val(x);
            bracket += w * (nu1 * std::conj(v1.val(x)) + nu2 * std::conj(v2.val(x)));
            bracket -= w * (u1.val(x) * std::conj(nv1) + u2.val(x) * std::conj(nv2));
        }
        C8 tu = scaled_trace_of_testpair(ext, u1, u2);
        C8 tv = scaled_trace_of_testpair(ext, v1, v2);
        cplx om = omega8(tu, tv) / ext.trace_scale;  // triplet normalization
        worst = std::max(worst, std::abs(bracket - om));
    }
    return worst;
}

namespace {

std::vector<cplx> eval_on_grid(const LabGrid& grid, const CFun& f) {
    std::vector<cplx> out(grid.nodes.size());
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) out[i] = f(grid.nodes[i]);
    return out;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

DifferenceResiduals verify_resolvent_difference(const IntervalExtension& ext1,
                                                const IntervalExtension& ext2,
                                                cplx zeta, const FnPair& f,
                                                const LabOptions& opts) {
    if (std::abs(ext1.length - ext2.length) > 0 ||
        std::abs(ext1.trace_scale - ext2.trace_scale) > 0)
        throw std::invalid_argument("difference formula needs a shared trace");
    LabGrid grid = LabGrid::make(ext1.length, opts.panels);
    const double sigma = ext1.trace_scale;

    Solution r1 = resolvent_apply(ext1, zeta, f, opts);
    Solution r2 = resolvent_apply(ext2, zeta, f, opts);
    FnPair p1 = r1.as_pair(), p2 = r2.as_pair();

    // V-difference term: R1(zeta) (V2 - V1) R2(zeta) f, present iff potentials differ
    const double dfp = ext2.f_pot - ext1.f_pot, dgp = ext2.g_pot - ext1.g_pot;
    FnPair vterm_pair{nullptr, nullptr};
    if (dfp != 0.0 || dgp != 0.0) {
        FnPair dv{[dfp, p2](double x) { return -dfp * p2.second(x); },
                  [dgp, p2](double x) { return dgp * p2.first(x); }};
        Solution rv = resolvent_apply(ext1, zeta, dv, opts);
        vterm_pair = rv.as_pair();
    }

    C8 t2 = solution_trace(ext2, r2);

    auto assemble = [&](const C8& middle_applied) {
        // tau (T R1(conj zeta))^* [middle_applied] / sigma
        FnPair rep = trace_adjoint_apply(ext1, std::conj(zeta), middle_applied, opts);
        // tau swaps the two components
        return FnPair{[rep](double x) { return rep.second(x); },
                      [rep](double x) { return rep.first(x); }};
    };

    // full form: JJ t2
    C8 jj_t2;
    {
        auto j4 = [](const Eigen::Matrix<cplx, 4, 1>& x) {
            Eigen::Matrix<cplx, 4, 1> y;
            y << x[2], x[3], -x[0], -x[1];
            return y;
        };
        jj_t2.head<4>() = j4(t2.head<4>());
        jj_t2.tail<4>() = -j4(t2.tail<4>());
    }
    FnPair full = assemble(jj_t2);

    // projected form: (P1 J P2) (+) (-Q1 J Q2) t2
    C8 proj_t2;
    {
        Eigen::Matrix4d j4 = Eigen::Matrix4d::Zero();
        j4(0, 2) = 1;
        j4(1, 3) = 1;
        j4(2, 0) = -1;
        j4(3, 1) = -1;
        // J acting as <J a, b>: the matrix with (Ja) = (a3, a4, -a1, -a2)
        Eigen::Matrix4d pu1 = ext1.plane_u * ext1.plane_u.transpose();
        Eigen::Matrix4d pu2 = ext2.plane_u * ext2.plane_u.transpose();
        Eigen::Matrix4d pv1 = ext1.plane_v * ext1.plane_v.transpose();
        Eigen::Matrix4d pv2 = ext2.plane_v * ext2.plane_v.transpose();
        proj_t2.head<4>() = (pu1 * j4 * pu2).cast<cplx>() * t2.head<4>();
        proj_t2.tail<4>() = -(pv1 * j4 * pv2).cast<cplx>() * t2.tail<4>();
    }
    FnPair projected = assemble(proj_t2);

    auto lhs1 = eval_on_grid(grid, p1.first), lhs2 = eval_on_grid(grid, p1.second);
    auto r2g1 = eval_on_grid(grid, p2.first), r2g2 = eval_on_grid(grid, p2.second);
    for (std::size_t i = 0; i < lhs1.size(); ++i) {
        lhs1[i] -= r2g1[i];
        lhs2[i] -= r2g2[i];
    }
    if (vterm_pair.first) {
        auto v1g = eval_on_grid(grid, vterm_pair.first);
        auto v2g = eval_on_grid(grid, vterm_pair.second);
        for (std::size_t i = 0; i < lhs1.size(); ++i) {
            lhs1[i] -= v1g[i];
            lhs2[i] -= v2g[i];
        }
    }

    auto full1 = eval_on_grid(grid, full.first), full2 = eval_on_grid(grid, full.second);
    auto proj1 = eval_on_grid(grid, projected.first),
         proj2 = eval_on_grid(grid, projected.second);
    for (std::size_t i = 0; i < full1.size(); ++i) {
        full1[i] /= sigma;
        full2[i] /= sigma;
        proj1[i] /= sigma;
        proj2[i] /= sigma;
    }

    DifferenceResiduals out;
    out.full = std::max(max_abs_diff(lhs1, full1), max_abs_diff(lhs2, full2));
    out.projected =
        std::max(max_abs_diff(lhs1, proj1), max_abs_diff(lhs2, proj2));
    return out;
}

namespace {

// first-order expansion operator L applied to f at t0
FnPair expansion_term(const LabFamily& family, double t0, cplx zeta, const FnPair& f,
                      const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    const double sigma0 = e0.trace_scale;
    Solution r0 = resolvent_apply(e0, zeta, f, opts);
    FnPair r0p = r0.as_pair();

    // term 1: -R0 Vdot R0 f
    const double df = family.df_dt(t0), dg = family.dg_dt(t0);
    FnPair vdot{[df, r0p](double x) { return -df * r0p.second(x); },
                [dg, r0p](double x) { return dg * r0p.first(x); }};
    Solution rv = resolvent_apply(e0, zeta, vdot, opts);
    FnPair term1 = rv.as_pair();

    // terms 2+3 share the representer factor tau (T0 R0(conj zeta))^* / sigma
    C8 t0r0 = solution_trace(e0, r0);

    Eigen::Matrix4d j4 = Eigen::Matrix4d::Zero();
    j4(0, 2) = 1;
    j4(1, 3) = 1;
    j4(2, 0) = -1;
    j4(3, 1) = -1;
    Mat fu = e0.plane_u, fv = e0.plane_v;
    Mat dfu = family.dplane_u(t0), dfv = family.dplane_v(t0);
    Eigen::Matrix4d pdot_u = dfu * fu.transpose() + fu * dfu.transpose();
    Eigen::Matrix4d pdot_v = dfv * fv.transpose() + fv * dfv.transpose();

    C8 mid = C8::Zero();
    mid.head<4>() = (pdot_u * j4).cast<cplx>() * t0r0.head<4>();
    mid.tail<4>() = -(pdot_v * j4).cast<cplx>() * t0r0.tail<4>();

    // Tdot R0 f: only the Gamma_1 slots move, with dsigma/dt
    const double dsg = family.dsigma_dt(t0);
    C4 w0 = r0.state(0.0), wl = r0.state(e0.length);
    C8 tdot;
    tdot << 0.0, 0.0, dsg * w0[1], -dsg * wl[1],
            0.0, 0.0, dsg * w0[3], -dsg * wl[3];
    C8 jj_tdot;
    {
        auto j4c = [](const Eigen::Matrix<cplx, 4, 1>& x) {
            Eigen::Matrix<cplx, 4, 1> y;
            y << x[2], x[3], -x[0], -x[1];
            return y;
        };
        jj_tdot.head<4>() = j4c(tdot.head<4>());
        jj_tdot.tail<4>() = -j4c(tdot.tail<4>());
    }

    C8 e_total = mid + jj_tdot;
    FnPair rep = trace_adjoint_apply(e0, std::conj(zeta), e_total, opts);

    const double inv_sigma = 1.0 / sigma0;
    return FnPair{
        [term1, rep, inv_sigma](double x) {
            return -term1.first(x) + inv_sigma * rep.second(x);
        },
        [term1, rep, inv_sigma](double x) {
            return -term1.second(x) + inv_sigma * rep.first(x);
        }};
}

}  // namespace

double verify_first_order_expansion(const LabFamily& family, double t0, cplx zeta,
                                    const FnPair& f, const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    LabGrid grid = LabGrid::make(e0.length, opts.panels);
    Solution r0 = resolvent_apply(e0, zeta, f, opts);
    FnPair r0p = r0.as_pair();
    FnPair lf = expansion_term(family, t0, zeta, f, opts);

    auto r0g1 = eval_on_grid(grid, r0p.first), r0g2 = eval_on_grid(grid, r0p.second);
    auto lf1 = eval_on_grid(grid, lf.first), lf2 = eval_on_grid(grid, lf.second);

    std::vector<double> hs = {1e-2, 5e-3, 2.5e-3};
    std::vector<double> errs;
    for (double h : hs) {
        Solution rh = resolvent_apply(family.at(t0 + h), zeta, f, opts);
        FnPair rhp = rh.as_pair();
        double err = 0.0;
        for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
            double x = grid.nodes[i];
            cplx e1 = rhp.first(x) - (r0g1[i] + h * lf1[i]);
            cplx e2 = rhp.second(x) - (r0g2[i] + h * lf2[i]);
            err = std::max({err, std::abs(e1), std::abs(e2)});
        }
        errs.push_back(err);
    }
    double s1 = std::log2(errs[0] / errs[1]);
    double s2 = std::log2(errs[1] / errs[2]);
    return 0.5 * (s1 + s2);
}

namespace {

double track_eigenvalue(const LabFamily& family, double t, double mu_guess,
                        double window, const LabOptions& opts) {
    IntervalExtension e = family.at(t);
    auto f = [&](double mu) { return boundary_det(e, mu, opts); };
    double lo = mu_guess, hi = mu_guess, flo = f(lo), fhi = flo;
    for (int k = 1; k <= 60; ++k) {
        double w = window * k / 20.0;
        lo = mu_guess - w;
        hi = mu_guess + w;
        flo = f(lo);
        fhi = f(hi);
        if ((flo > 0) != (fhi > 0)) break;
    }
    if ((flo > 0) == (fhi > 0))
        throw EigenvalueNotSimple("lost the tracked eigenvalue");
    return brent_root(f, lo, hi, 1e-13);
}

struct AbstractForms {
    double m_t;      // <tau Vdot u,u> + (1/s)Omega((Pdot+Qdot)Tu,Tu) + (1/s)Omega(Tu,Tdot u)
    double m_mu;     // -<tau u, u>
    double tau_pairing;
};

AbstractForms abstract_forms(const LabFamily& family, double t0,
                             const LabEigenfunction& ef, const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    LabGrid grid = LabGrid::make(e0.length, opts.panels);
    const double sigma0 = e0.trace_scale;

    // quadrature pieces
    cplx tau_pair = 0.0, vdot_pair = 0.0;
    const double df = family.df_dt(t0), dg = family.dg_dt(t0);
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        double x = grid.nodes[i], w = grid.weights[i];
        C4 s = ef.state(x);
        cplx u1 = s[0], u2 = s[2];
        tau_pair += w * (u2 * std::conj(u1) + u1 * std::conj(u2));
        // tau Vdot (u1,u2) = (dg u1, -df u2)
        vdot_pair += w * (dg * u1 * std::conj(u1) - df * u2 * std::conj(u2));
    }

    C4 w0 = ef.state(0.0), wl = ef.state(e0.length);
    C8 tu = trace_of(e0, w0, wl);

    Eigen::Matrix4d j4 = Eigen::Matrix4d::Zero();
    (void)j4;
    Mat fu = e0.plane_u, fv = e0.plane_v;
    Mat dfu = family.dplane_u(t0), dfv = family.dplane_v(t0);
    Eigen::Matrix4d pdot_u = dfu * fu.transpose() + fu * dfu.transpose();
    Eigen::Matrix4d pdot_v = dfv * fv.transpose() + fv * dfv.transpose();
    C8 pq_tu;
    pq_tu.head<4>() = pdot_u.cast<cplx>() * tu.head<4>();
    pq_tu.tail<4>() = pdot_v.cast<cplx>() * tu.tail<4>();

    const double dsg = family.dsigma_dt(t0);
    C8 tdot_u;
    tdot_u << 0.0, 0.0, dsg * w0[1], -dsg * wl[1],
              0.0, 0.0, dsg * w0[3], -dsg * wl[3];

    cplx m_t = vdot_pair + (omega8(pq_tu, tu) + omega8(tu, tdot_u)) / sigma0;

    AbstractForms out;
    out.m_t = m_t.real();
    out.m_mu = -tau_pair.real();
    out.tau_pairing = tau_pair.real();
    return out;
}

}  // namespace

HadamardCheck verify_hadamard_abstract(const LabFamily& family, double t0,
                                       double mu_lo, double mu_hi,
                                       const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    auto eigs = real_eigenvalues(e0, mu_lo, mu_hi, 600, opts);
    if (eigs.empty())
        throw EigenvalueNotSimple("no real eigenvalue in the requested window");
    const double mu0 = eigs.front();
    LabEigenfunction ef = eigenfunction_at(e0, mu0, opts);

    AbstractForms forms = abstract_forms(family, t0, ef, opts);
    if (std::abs(forms.tau_pairing) < 1e-10)
        throw TauPairingZero("<tau u, u> vanishes; Hadamard hypothesis violated");
    const double formula = forms.m_t / forms.tau_pairing;  // = -m_t/m_mu

    auto deriv = [&](double h) {
        double mp = track_eigenvalue(family, t0 + h, mu0, 0.5, opts);
        double mm = track_eigenvalue(family, t0 - h, mu0, 0.5, opts);
        return (mp - mm) / (2.0 * h);
    };
    double d1 = deriv(1e-3), d2 = deriv(5e-4);
    double fd = (4.0 * d2 - d1) / 3.0;

    HadamardCheck out;
    out.mu0 = mu0;
    out.formula = formula;
    out.fd = fd;
    out.discrepancy = std::abs(formula - fd);
    return out;
}

double verify_ls_ratio(const LabFamily& family, double t0, double mu_lo,
                       double mu_hi, const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    auto eigs = real_eigenvalues(e0, mu_lo, mu_hi, 600, opts);
    if (eigs.empty())
        throw EigenvalueNotSimple("no real eigenvalue in the requested window");
    const double mu0 = eigs.front();
    LabEigenfunction ef = eigenfunction_at(e0, mu0, opts);
    AbstractForms forms = abstract_forms(family, t0, ef, opts);

    const double hm = 1e-5 * std::max(1.0, std::abs(mu0));
    const double ht = 1e-5;
    double dmu = (boundary_det(e0, mu0 + hm, opts) -
                  boundary_det(e0, mu0 - hm, opts)) /
                 (2.0 * hm);
    double dt = (boundary_det(family.at(t0 + ht), mu0, opts) -
                 boundary_det(family.at(t0 - ht), mu0, opts)) /
                (2.0 * ht);
    double fd_ratio = dmu / dt;
    double form_ratio = forms.m_mu / forms.m_t;
    return std::abs(fd_ratio - form_ratio) / std::abs(form_ratio);
}

RieszChecks verify_riesz(const LabFamily& family, double t0, double mu_lo,
                         double mu_hi, const FnPair& f, const FnPair& h,
                         const LabOptions& opts) {
    IntervalExtension e0 = family.at(t0);
    LabGrid grid = LabGrid::make(e0.length, opts.panels);
    auto eigs = real_eigenvalues(e0, mu_lo, mu_hi, 600, opts);
    if (eigs.empty()) throw EigenvalueNotSimple("no eigenvalue for the Riesz check");
    const double mu0 = eigs.front();
    // contour radius: half the distance to the nearest other determinant root
    double nearest = 1e300;
    auto all = real_eigenvalues(e0, mu0 - 6.0, mu0 + 6.0, 1200, opts);
    for (double r : all)
        if (std::abs(r - mu0) > 1e-8) nearest = std::min(nearest, std::abs(r - mu0));
    double radius = std::min(0.5 * nearest, 0.5);
    if (!(radius > 1e-3)) radius = 0.25;

    const int nq = 16;
    struct Node {
        cplx zeta, weight_p, weight_s;
    };
    std::vector<Node> contour;
    for (int k = 0; k < nq; ++k) {
        double th = 2.0 * M_PI * k / nq;
        cplx z = mu0 + radius * std::exp(cplx(0, th));
        // P = -(1/2pi i) sum R(z) dz, dz = i r e^{i th} (2pi/nq)
        cplx dz = cplx(0, 1) * radius * std::exp(cplx(0, th)) * (2.0 * M_PI / nq);
        cplx wp = -dz / (2.0 * M_PI * cplx(0, 1));
        cplx ws = -wp / (z - mu0);  // S = (1/2pi i) contour-sum (z-mu0)^{-1} R(z) dz
        contour.push_back({z, wp, ws});
    }

    auto apply_contour = [&](const FnPair& in, bool reduced) {
        auto sols = std::make_shared<std::vector<Solution>>();
        sols->reserve(nq);
        for (const auto& nd : contour)
            sols->push_back(resolvent_apply(e0, nd.zeta, in, opts));
        auto weights = std::make_shared<std::vector<cplx>>();
        for (const auto& nd : contour)
            weights->push_back(reduced ? nd.weight_s : nd.weight_p);
        auto evalc = [sols, weights](double x, int comp) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < sols->size(); ++k) {
                C4 s = (*sols)[k].state(x);
                acc += (*weights)[k] * (comp == 0 ? s[0] : s[2]);
            }
            return acc;
        };
        return FnPair{[evalc](double x) { return evalc(x, 0); },
                      [evalc](double x) { return evalc(x, 1); }};
    };

    FnPair pf = apply_contour(f, false);
    FnPair ppf = apply_contour(pf, false);
    FnPair spf = apply_contour(pf, true);
    FnPair ph = apply_contour(h, false);

    auto pf1 = eval_on_grid(grid, pf.first), pf2 = eval_on_grid(grid, pf.second);
    auto ppf1 = eval_on_grid(grid, ppf.first), ppf2 = eval_on_grid(grid, ppf.second);
    auto spf1 = eval_on_grid(grid, spf.first), spf2 = eval_on_grid(grid, spf.second);

    double pf_norm = 0.0, idem = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        pf_norm = std::max({pf_norm, std::abs(pf1[i]), std::abs(pf2[i])});
        idem = std::max({idem, std::abs(ppf1[i] - pf1[i]), std::abs(ppf2[i] - pf2[i])});
        sp = std::max({sp, std::abs(spf1[i]), std::abs(spf2[i])});
    }

    // <tau P f, h> vs <f, tau P h>
    auto f1 = eval_on_grid(grid, f.first), f2 = eval_on_grid(grid, f.second);
    auto h1 = eval_on_grid(grid, h.first), h2 = eval_on_grid(grid, h.second);
    auto ph1 = eval_on_grid(grid, ph.first), ph2 = eval_on_grid(grid, ph.second);
    cplx lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        double w = grid.weights[i];
        lhs += w * (pf2[i] * std::conj(h1[i]) + pf1[i] * std::conj(h2[i]));
        rhs += w * (f1[i] * std::conj(ph2[i]) + f2[i] * std::conj(ph1[i]));
    }

    // P0 P(t) P0 = P0 + o(t - t0): Richardson slope of the deviation
    auto sandwich_err = [&](double dt) {
        IntervalExtension et = family.at(t0 + dt);
        // P(t) with the same contour (it still encircles the moved eigenvalue)
        std::vector<Solution> sols_t;
        for (const auto& nd : contour)
            sols_t.push_back(resolvent_apply(et, nd.zeta, pf, opts));
        auto ptpf = [&](double x, int comp) {
            cplx acc = 0.0;
            for (int k = 0; k < nq; ++k) {
                C4 s = sols_t[k].state(x);
                acc += contour[k].weight_p * (comp == 0 ? s[0] : s[2]);
            }
            return acc;
        };
        FnPair mid{[&](double x) { return ptpf(x, 0); },
                   [&](double x) { return ptpf(x, 1); }};
        FnPair outer = apply_contour(mid, false);
        double err = 0.0;
        auto o1 = eval_on_grid(grid, outer.first), o2 = eval_on_grid(grid, outer.second);
        for (std::size_t i = 0; i < grid.nodes.size(); ++i)
            err = std::max({err, std::abs(o1[i] - pf1[i]), std::abs(o2[i] - pf2[i])});
        return err;
    };
    double e1 = sandwich_err(2e-2), e2 = sandwich_err(1e-2);

    RieszChecks out;
    out.idempotency = idem / std::max(1e-300, pf_norm);
    out.tau_symmetry = std::abs(lhs - rhs);
    out.reduced_prod = sp / std::max(1e-300, pf_norm);
    out.sandwich_slope = std::log2(e1 / e2);
    return out;
}

std::vector<CheckResult> run_identity_suite(unsigned seed, const LabOptions& opts) {
    std::vector<CheckResult> results;
    auto add = [&](const std::string& name, double residual, double tol) {
        results.push_back({name, residual, tol, residual < tol});
    };
    std::mt19937_64 rng(seed);

    // base extensions
    IntervalExtension dd = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
    IntervalExtension robin = dd;
    robin.plane_u = rotating_plane(0.6, M_PI).frame;
    robin.plane_v = rotating_plane(0.3, M_PI).frame;
    IntervalExtension neumann = dd;
    {
        Mat f(4, 2);  // Neumann-Neumann plane: derivatives zero, values free
        f = Mat::Zero(4, 2);
        f(0, 0) = 1.0;
        f(1, 1) = 1.0;
        neumann.plane_u = f;
        neumann.plane_v = f;
    }
    IntervalExtension scaled = robin;
    scaled.trace_scale = 1.25;

    // Green identity
    add("green_identity_dirichlet", verify_green_identity(dd, 20, seed, opts), 1e-10);
    add("green_identity_scaled_trace", verify_green_identity(scaled, 20, seed + 1, opts),
        1e-10);

    // resolvent differences, 3 pairs x 3 zetas
    TestFn tf1 = random_testfn(rng), tf2 = random_testfn(rng);
    FnPair f{[tf1](double x) { return tf1.val(x); },
             [tf2](double x) { return tf2.val(x); }};
    std::vector<std::pair<IntervalExtension, IntervalExtension>> pairs = {
        {dd, neumann}, {dd, robin}, {robin, neumann}};
    std::vector<cplx> zetas = {cplx(0.3, 0.7), cplx(-0.4, 1.1), cplx(0.15, -0.9)};
    double worst_full = 0.0, worst_proj = 0.0;
    for (const auto& pr : pairs)
        for (cplx z : zetas) {
            auto res = verify_resolvent_difference(pr.first, pr.second, z, f, opts);
            worst_full = std::max(worst_full, res.full);
            worst_proj = std::max(worst_proj, res.projected);
        }
    add("resolvent_difference_full", worst_full, 1e-8);
    add("resolvent_difference_projected", worst_proj, 1e-8);

    // same-extension sanity: both sides vanish
    auto same = verify_resolvent_difference(dd, dd, cplx(0.2, 0.6), f, opts);
    add("resolvent_difference_identical", std::max(same.full, same.projected), 1e-12);

    // Lemma 3.2 variant with V1 != V2
    IntervalExtension dd_shift = dd;
    dd_shift.f_pot += 0.4;
    dd_shift.g_pot -= 0.3;
    auto l32 = verify_resolvent_difference(dd, dd_shift, cplx(0.25, 0.8), f, opts);
    add("difference_with_potential_term", l32.full, 1e-8);

    // first-order expansions
    LabFamily fam_v = v_only_family(dd, 0.4, -0.3);
    LabFamily fam_p = plane_only_family(M_PI, -3.0, -2.2);
    LabFamily fam_s = trace_only_family(M_PI, -2.0, -0.5);
    LabFamily fam_0 = frozen_family(robin);
    cplx zexp(0.3, 0.9);
    add("expansion_slope_v", std::abs(verify_first_order_expansion(fam_v, 0.5, zexp, f, opts) - 2.0),
        0.2);
    add("expansion_slope_plane",
        std::abs(verify_first_order_expansion(fam_p, 0.7, zexp, f, opts) - 2.0), 0.2);
    add("expansion_slope_trace",
        std::abs(verify_first_order_expansion(fam_s, 0.8, zexp, f, opts) - 2.0), 0.2);
    add("expansion_frozen_second_order",
        std::abs(verify_first_order_expansion(fam_0, 0.5, zexp, f, opts) - 2.0), 1.0);

    // Hadamard formulas per mechanism
    auto had_v = verify_hadamard_abstract(fam_v, 0.5, 0.05, 3.0, opts);
    add("hadamard_v_only", had_v.discrepancy, 1e-6);
    auto had_p = verify_hadamard_abstract(fam_p, 0.7, 0.05, 6.0, opts);
    add("hadamard_plane_only", had_p.discrepancy, 1e-6);
    auto had_s = verify_hadamard_abstract(fam_s, 0.8, 0.05, 6.0, opts);
    add("hadamard_trace_only", had_s.discrepancy, 1e-6);

    // Lyapunov-Schmidt derivative ratios
    add("ls_ratio_v_only", verify_ls_ratio(fam_v, 0.5, 0.05, 3.0, opts), 1e-4);
    add("ls_ratio_trace_only", verify_ls_ratio(fam_s, 0.8, 0.05, 6.0, opts), 1e-4);

    // Riesz projection block
    TestFn tg1 = random_testfn(rng), tg2 = random_testfn(rng);
    FnPair h{[tg1](double x) { return tg1.val(x); },
             [tg2](double x) { return tg2.val(x); }};
    auto rz = verify_riesz(fam_v, 0.5, 0.05, 3.0, f, h, opts);
    add("riesz_idempotency", rz.idempotency, 1e-8);
    add("riesz_tau_symmetry", rz.tau_symmetry, 1e-8);
    add("riesz_reduced_resolvent", rz.reduced_prod, 1e-8);
    add("riesz_sandwich_slope", std::abs(rz.sandwich_slope - 2.0), 0.7);

    // resolvent defect and conjugation symmetry
    {
        cplx z(0.4, 0.8);
        Solution r = resolvent_apply(robin, z, f, opts);
        // defect via 5-point finite differences of the representation
        double defect = 0.0;
        LabGrid grid = LabGrid::make(robin.length, 16);
        double hh = 1e-3;
        for (std::size_t i = 0; i < grid.nodes.size(); i += 7) {
            double x = grid.nodes[i];
            if (x < 2 * hh || x > robin.length - 2 * hh) continue;
            auto u = [&](double xx) { return r.state(xx)[0]; };
            auto v = [&](double xx) { return r.state(xx)[2]; };
            cplx upp = (-u(x + 2 * hh) + 16.0 * u(x + hh) - 30.0 * u(x) +
                        16.0 * u(x - hh) - u(x - 2 * hh)) /
                       (12.0 * hh * hh);
            cplx vpp = (-v(x + 2 * hh) + 16.0 * v(x + hh) - 30.0 * v(x) +
                        16.0 * v(x - hh) - v(x - 2 * hh)) /
                       (12.0 * hh * hh);
            // (N+V-z)(u,v) = (v'' - f v - z u, -u'' + g u - z v)
            cplx r1 = vpp - robin.f_pot * v(x) - z * u(x) - tf1.val(x);
            cplx r2 = -upp + robin.g_pot * u(x) - z * v(x) - tf2.val(x);
            defect = std::max({defect, std::abs(r1), std::abs(r2)});
        }
        add("resolvent_defect", defect, 1e-9);

        Solution rbar = resolvent_apply(robin, std::conj(z), f, opts);
        FnPair fconj{[tf1](double x) { return std::conj(tf1.val(x)); },
                     [tf2](double x) { return std::conj(tf2.val(x)); }};
        Solution rconj = resolvent_apply(robin, z, fconj, opts);
        double sym = 0.0;
        for (std::size_t i = 0; i < grid.nodes.size(); i += 5) {
            double x = grid.nodes[i];
            C4 a = rbar.state(x);
            C4 b = rconj.state(x);
            sym = std::max({sym, std::abs(a[0] - std::conj(b[0])),
                            std::abs(a[2] - std::conj(b[2]))});
        }
        add("resolvent_conjugation_symmetry", sym, 1e-10);
    }

    // decoupled-eigenspace block formula
    {
        IntervalExtension e = IntervalExtension::dirichlet(M_PI, -2.0, -0.5);
        const int n = 1;
        double a_n = n * n;
        Eigen::Matrix2cd block;
        block << 0.0, -(a_n + e.f_pot), (a_n + e.g_pot), 0.0;
        cplx z(0.35, 0.0);
        Eigen::Matrix2cd inv = (block - z * Eigen::Matrix2cd::Identity()).inverse();
        cplx ca(0.7, -0.2), cb(-0.4, 0.5);
        FnPair fe{[ca, n](double x) { return ca * std::sin(n * x); },
                  [cb, n](double x) { return cb * std::sin(n * x); }};
        Solution r = resolvent_apply(e, z, fe, opts);
        Eigen::Vector2cd expect = inv * Eigen::Vector2cd(ca, cb);
        double worst = 0.0;
        for (double x : {0.4, 1.1, 2.2, 2.9}) {
            worst = std::max(worst,
                             std::abs(r.state(x)[0] - expect[0] * std::sin(n * x)));
            worst = std::max(worst,
                             std::abs(r.state(x)[2] - expect[1] * std::sin(n * x)));
        }
        add("eigenspace_block_formula", worst, 1e-10);
    }

    return results;
}

}  // namespace specgraph::lab
