#include "specgraph/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "specgraph/errors.hpp"

namespace specgraph {

WavePotentials::WavePotentials(WaveProfile profile)
    : profile_(std::move(profile)), two_p_(2.0 * profile_.params.p) {}

double WavePotentials::reach(int edge) const {
    return profile_.edge_ode[edge].forward() ? profile_.edge_ode[edge].x_end()
                                             : profile_.edge_ode[edge].x_begin();
}

double WavePotentials::qF(int edge, double s) const {
    double ph = std::abs(profile_.phi(edge, s));
    return std::pow(ph, two_p_) + profile_.params.beta;
}

double WavePotentials::qG(int edge, double s) const {
    double ph = std::abs(profile_.phi(edge, s));
    return (two_p_ + 1.0) * std::pow(ph, two_p_) + profile_.params.beta;
}

StarGraph Problem::graph() const {
    StarGraph g;
    g.m = edges();
    for (int e = 0; e < g.m; ++e) g.lengths.push_back(length(e));
    g.alpha = bc.alpha;
    return g;
}

Problem star_problem(WaveProfile profile, double alpha) {
    Problem p;
    p.potentials = std::make_shared<WavePotentials>(std::move(profile));
    p.bc.kind = BoundaryScheme::Kind::StarDelta;
    p.bc.alpha = alpha;
    return p;
}

Problem interval_problem(std::shared_ptr<const EdgePotentials> potentials,
                         EndCondition left, EndCondition right) {
    if (potentials->edges() != 1)
        throw std::invalid_argument("interval scenarios have a single edge");
    Problem p;
    p.potentials = std::move(potentials);
    p.bc.kind = BoundaryScheme::Kind::Interval;
    p.bc.left = left;
    p.bc.right = right;
    return p;
}

Eigen::VectorXd ScaledTrace::to_vector() const {
    Eigen::VectorXd v(gamma0_u.size() * 4);
    v << gamma0_u, gamma1_u, gamma0_v, gamma1_v;
    return v;
}

OdeRhs edge_rhs(const Problem& problem, int edge, double lambda, double t) {
    const EdgePotentials* pot = problem.potentials.get();
    const double t2 = t * t;
    const double mu = t2 * lambda;
    return [pot, edge, t, t2, mu](double x, const Vec& y, Vec& dy) {
        const double s = t * x;
        dy[0] = y[1];
        dy[1] = -t2 * pot->qG(edge, s) * y[0] - mu * y[2];
        dy[2] = y[3];
        dy[3] = -t2 * pot->qF(edge, s) * y[2] + mu * y[0];
    };
}

Vec4 evolve_edge(const Problem& problem, int edge, double lambda, double t,
                 const Vec4& y0, double x_from, double x_to,
                 const SpectralOptions& opts) {
    const double reach = problem.potentials->reach(edge);
    if (t * std::max(std::abs(x_from), std::abs(x_to)) > reach * (1.0 + 1e-12))
        throw InterpolationOutOfRange("profile interpolation does not cover t*x");
    OdeOptions oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    Vec y = y0;
    y = integrate_to(edge_rhs(problem, edge, lambda, t), y, x_from, x_to, oo);
    return Vec4(y);
}

namespace {

// Rows constraining the scaled trace at an interval endpoint; `at_left` flips
// the sign convention of the co-normal slot.
//   rotating: cos(pi t/2)*w + sin(pi t/2)*(sgn * w'/t) = 0
void interval_rows(EndCondition cond, bool at_left, double t, double& cw, double& cwp) {
    if (cond == EndCondition::Dirichlet) {
        cw = 1.0;
        cwp = 0.0;
        return;
    }
    const double c = std::cos(M_PI * t / 2.0), s = std::sin(M_PI * t / 2.0);
    cw = c;
    cwp = (at_left ? 1.0 : -1.0) * s / t;
}

// Seeds spanning the solutions admissible at the far (x = length) end.
std::pair<Vec4, Vec4> end_seeds(const Problem& problem, double t) {
    if (problem.bc.kind == BoundaryScheme::Kind::StarDelta)
        return {Vec4(0, 1, 0, 0), Vec4(0, 0, 0, 1)};
    double cw, cwp;
    interval_rows(problem.bc.right, false, t, cw, cwp);
    // null direction of (cw, cwp) on the (w(l), -w'(l)/t) pair mapped to the
    // raw state (w, w'): row reads cw*w(l) + cwp*(-?)...
    // condition on state: cw*w(l) - (s/t)*w'(l) for rotating; direction:
    Eigen::Vector2d dir(-cwp, cw);  // satisfies cw*dir0 + cwp*... see below
    // For the state (w, w') the row is (cw, cwp') with cwp' = -s/t (right end),
    // i.e. cwp' = cwp from interval_rows(at_left=false).  Null: (-cwp, cw).
    dir.normalize();
    Vec4 s1(dir[0], dir[1], 0, 0), s2(0, 0, dir[0], dir[1]);
    return {s1, s2};
}

}  // namespace

ShootingAssembly shooting_assembly(const Problem& problem, double lambda, double t,
                                   const SpectralOptions& opts) {
    const int m = problem.edges();
    ShootingAssembly out;
    out.seeds.resize(2 * m);
    out.states0.resize(2 * m);

    auto [s1, s2] = end_seeds(problem, t);
    for (int e = 0; e < m; ++e) {
        const double len = problem.length(e);
        out.seeds[e] = s1;
        out.seeds[m + e] = s2;
        out.states0[e] = evolve_edge(problem, e, lambda, t, s1, len, 0.0, opts);
        out.states0[m + e] = evolve_edge(problem, e, lambda, t, s2, len, 0.0, opts);
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    if (problem.bc.kind == BoundaryScheme::Kind::StarDelta) {
        const double ta = t * problem.bc.alpha;
        // rows: u-continuity (m-1), u-flux, v-continuity (m-1), v-flux;
        // columns: [seed1 per edge | seed2 per edge]
        for (int col = 0; col < 2 * m; ++col) {
            const int e = col % m;
            const Vec4& y = out.states0[col];
            int r = 0;
            for (int i = 1; i < m; ++i) {
                double val = 0.0;
                if (e == 0) val = -y[0];
                if (e == i) val = y[0];
                M(r++, col) = val;
            }
            M(r++, col) = y[1] - (e == 0 ? ta * y[0] : 0.0);
            for (int i = 1; i < m; ++i) {
                double val = 0.0;
                if (e == 0) val = -y[2];
                if (e == i) val = y[2];
                M(r++, col) = val;
            }
            M(r++, col) = y[3] - (e == 0 ? ta * y[2] : 0.0);
        }
    } else {
        double cw, cwp;
        interval_rows(problem.bc.left, true, t, cw, cwp);
        for (int col = 0; col < 2; ++col) {
            const Vec4& y = out.states0[col];
            M(0, col) = cw * y[0] + cwp * y[1];
            M(1, col) = cw * y[2] + cwp * y[3];
        }
    }

    out.matrix = M;
    // smooth positive gauge: the norm of each column's generating state at
    // x = 0 (never vanishes, unlike matrix columns of size one)
    out.col_norms.resize(2 * m);
    for (int col = 0; col < 2 * m; ++col) out.col_norms[col] = out.states0[col].norm();
    return out;
}

double ShootingAssembly::normalized_det() const {
    Eigen::MatrixXd Mn = matrix;
    for (int c = 0; c < Mn.cols(); ++c) {
        double n = col_norms[c];
        if (n > 0.0) Mn.col(c) /= n;
    }
    return Mn.determinant();
}

double dispersion_det(const Problem& problem, double lambda, double t,
                      const SpectralOptions& opts) {
    return shooting_assembly(problem, lambda, t, opts).normalized_det();
}

namespace {

// Scalar (2-dim) analog of the shooting assembly for one decoupled block.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> scalar_matrix_and_norms(
    const Problem& problem, ScalarBlock which, double t,
    const SpectralOptions& opts) {
    const int m = problem.edges();
    const EdgePotentials* pot = problem.potentials.get();
    const double t2 = t * t;
    const bool use_g = which == ScalarBlock::G;

    std::vector<Eigen::Vector2d> states0(m);
    Eigen::Vector2d seed;
    if (problem.bc.kind == BoundaryScheme::Kind::StarDelta) {
        seed << 0.0, 1.0;
    } else {
        double cw, cwp;
        interval_rows(problem.bc.right, false, t, cw, cwp);
        seed << -cwp, cw;
        seed.normalize();
    }
    OdeOptions oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    for (int e = 0; e < m; ++e) {
        auto rhs = [pot, e, t, t2, use_g](double x, const Vec& y, Vec& dy) {
            const double q = use_g ? pot->qG(e, t * x) : pot->qF(e, t * x);
            dy[0] = y[1];
            dy[1] = -t2 * q * y[0];
        };
        Vec y(2);
        y << seed[0], seed[1];
        y = integrate_to(rhs, y, problem.length(e), 0.0, oo);
        states0[e] = Eigen::Vector2d(y[0], y[1]);
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    if (problem.bc.kind == BoundaryScheme::Kind::StarDelta) {
        const double ta = t * problem.bc.alpha;
        for (int col = 0; col < m; ++col) {
            int r = 0;
            for (int i = 1; i < m; ++i) {
                double val = 0.0;
                if (col == 0) val = -states0[col][0];
                if (col == i) val = states0[col][0];
                M(r++, col) = val;
            }
            M(r, col) = states0[col][1] - (col == 0 ? ta * states0[col][0] : 0.0);
        }
    } else {
        double cw, cwp;
        interval_rows(problem.bc.left, true, t, cw, cwp);
        M(0, 0) = cw * states0[0][0] + cwp * states0[0][1];
    }
    Eigen::VectorXd norms(m);
    for (int c = 0; c < m; ++c) norms[c] = states0[c].norm();
    return {M, norms};
}

}  // namespace

double scalar_det(const Problem& problem, ScalarBlock which, double t,
                  const SpectralOptions& opts) {
    auto [M, norms] = scalar_matrix_and_norms(problem, which, t, opts);
    for (int c = 0; c < M.cols(); ++c)
        if (norms[c] > 0.0) M.col(c) /= norms[c];
    return M.determinant();
}

std::pair<double, double> scalar_det_smallest_svs(const Problem& problem,
                                                  ScalarBlock which, double t,
                                                  const SpectralOptions& opts) {
    auto [M, norms] = scalar_matrix_and_norms(problem, which, t, opts);
    for (int c = 0; c < M.cols(); ++c)
        if (norms[c] > 0.0) M.col(c) /= norms[c];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    if (smax == 0.0) return {0.0, 0.0};
    double s_last = sv(sv.size() - 1) / smax;
    double s_prev = sv.size() > 1 ? sv(sv.size() - 2) / smax : 1.0;
    return {s_last, s_prev};
}

namespace {

void scatter_trace(ScaledTrace& tr, int m, int edge, double t, const Vec4& at0,
                   const Vec4& at_end) {
    tr.gamma0_u[edge] = at0[0];
    tr.gamma0_u[m + edge] = at_end[0];
    tr.gamma1_u[edge] = at0[1] / t;
    tr.gamma1_u[m + edge] = -at_end[1] / t;
    tr.gamma0_v[edge] = at0[2];
    tr.gamma0_v[m + edge] = at_end[2];
    tr.gamma1_v[edge] = at0[3] / t;
    tr.gamma1_v[m + edge] = -at_end[3] / t;
}

ScaledTrace zero_trace(int m, double t) {
    ScaledTrace tr;
    tr.t = t;
    tr.gamma0_u = Eigen::VectorXd::Zero(2 * m);
    tr.gamma1_u = Eigen::VectorXd::Zero(2 * m);
    tr.gamma0_v = Eigen::VectorXd::Zero(2 * m);
    tr.gamma1_v = Eigen::VectorXd::Zero(2 * m);
    return tr;
}

}  // namespace

LagrangianFrame cauchy_frame(const Problem& problem, double lambda, double t,
                             const SpectralOptions& opts) {
    const int m = problem.edges();
    // Solutions on different edges have disjoint trace support, so a per-edge
    // QR yields a globally orthonormal frame.
    Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(8 * m, 4 * m);
    for (int e = 0; e < m; ++e) {
        Eigen::MatrixXd local(8, 4);
        for (int k = 0; k < 4; ++k) {
            Vec4 y0 = Vec4::Zero();
            y0[k] = 1.0;
            Vec4 y1 = evolve_edge(problem, e, lambda, t, y0, 0.0, problem.length(e),
                                  opts);
            // slots of edge e inside (g0u|g1u|g0v|g1v), scaled trace
            local.col(k) << y0[0], y1[0], y0[1] / t, -y1[1] / t,
                            y0[2], y1[2], y0[3] / t, -y1[3] / t;
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(local);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(8, 4);
        const int slot[8] = {e,         m + e,         2 * m + e, 3 * m + e,
                             4 * m + e, 5 * m + e,     6 * m + e, 7 * m + e};
        for (int r = 0; r < 8; ++r)
            for (int k = 0; k < 4; ++k) frame(slot[r], 4 * e + k) = q(r, k);
    }
    return LagrangianFrame{SymplecticSpace::doubled(2 * m), frame};
}

LagrangianFrame vertex_plane_doubled(const Problem& problem, double t) {
    LagrangianFrame single;
    if (problem.bc.kind == BoundaryScheme::Kind::StarDelta) {
        single = vertex_lagrangian(problem.graph());
    } else {
        if (problem.bc.left == EndCondition::Rotating)
            single = rotating_plane_both_ends(t, problem.length(0));
        else
            single = rotating_plane(t, problem.length(0));
    }
    const int m = problem.edges();
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(8 * m, 4 * m);
    basis.topLeftCorner(4 * m, 2 * m) = single.frame;
    basis.bottomRightCorner(4 * m, 2 * m) = single.frame;
    return LagrangianFrame{SymplecticSpace::doubled(2 * m), basis};
}

CrossingData eigen_data_at_crossing(const Problem& problem, double lambda0,
                                    double t0, const SpectralOptions& opts) {
    const int m = problem.edges();
    ShootingAssembly asmb = shooting_assembly(problem, lambda0, t0, opts);

    Eigen::MatrixXd Mn = asmb.matrix;
    for (int c = 0; c < Mn.cols(); ++c)
        if (asmb.col_norms[c] > 0.0) Mn.col(c) /= asmb.col_norms[c];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mn, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double s_min = sv(sv.size() - 1) / smax;
    const double s_second = sv.size() > 1 ? sv(sv.size() - 2) / smax : 1.0;
    if (s_min > opts.crossing_tol)
        throw NotACrossing("(lambda0, t0) is not a crossing of the dispersion determinant");
    if (s_second < opts.multiplicity_tol)
        throw MultiplicityAboveOne("crossing has geometric multiplicity above one");

    Eigen::VectorXd c = svd.matrixV().col(2 * m - 1);
    for (int i = 0; i < c.size(); ++i)
        if (asmb.col_norms[i] > 0.0) c[i] /= asmb.col_norms[i];
    // sign convention: first nonzero coefficient positive
    double cmax = c.cwiseAbs().maxCoeff();
    for (int i = 0; i < c.size(); ++i) {
        if (std::abs(c[i]) > 1e-9 * cmax) {
            if (c[i] < 0.0) c = -c;
            break;
        }
    }

    CrossingData data;
    data.lambda0 = lambda0;
    data.t0 = t0;
    data.second_singular_ratio = s_second;
    data.end_slopes_u.resize(m);
    data.end_slopes_v.resize(m);
    data.trace = zero_trace(m, t0);
    data.trace.t = t0;

    OdeOptions oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    double nu2 = 0.0, nv2 = 0.0, inner = 0.0;
    double cv_u = 0.0, cv_v = 0.0;
    for (int e = 0; e < m; ++e) {
        Vec4 y0 = c[e] * asmb.states0[e] + c[m + e] * asmb.states0[m + e];
        if (e == 0) {
            cv_u = y0[0];
            cv_v = y0[2];
        }
        DenseOde traj = integrate_dense(edge_rhs(problem, e, lambda0, t0), Vec(y0),
                                        0.0, problem.length(e), oo);
        Vec y1 = traj.eval(problem.length(e));
        data.end_slopes_u[e] = y1[1];
        data.end_slopes_v[e] = y1[3];
        scatter_trace(data.trace, m, e, t0, y0, Vec4(y1));
        nu2 += quad_over_trajectory(traj, [](double, const Vec& y) { return y[0] * y[0]; });
        nv2 += quad_over_trajectory(traj, [](double, const Vec& y) { return y[2] * y[2]; });
        inner += quad_over_trajectory(traj, [](double, const Vec& y) { return y[0] * y[2]; });
    }

    const double norm = std::sqrt(nu2 + nv2);
    if (!(norm > 0.0)) throw NotACrossing("null solution vanished identically");
    data.norm_u = std::sqrt(std::max(0.0, nu2)) / norm;
    data.norm_v = std::sqrt(std::max(0.0, nv2)) / norm;
    data.uv_inner = inner / (norm * norm);
    data.center_value_u = cv_u / norm;
    data.center_value_v = cv_v / norm;
    data.end_slopes_u /= norm;
    data.end_slopes_v /= norm;
    data.trace.gamma0_u /= norm;
    data.trace.gamma1_u /= norm;
    data.trace.gamma0_v /= norm;
    data.trace.gamma1_v /= norm;
    for (int e = 0; e < m; ++e) data.lengths.push_back(problem.length(e));

    // vertex-condition residual of the reconstructed trace
    LagrangianFrame plane = vertex_plane_doubled(problem, t0);
    Eigen::VectorXd tv = data.trace.to_vector();
    double rel = (tv - plane.frame * (plane.frame.transpose() * tv)).norm() /
                 std::max(1e-300, tv.norm());
    if (rel > opts.vertex_residual_tol)
        throw NotACrossing("reconstructed eigenfunction violates the vertex conditions");
    return data;
}

}  // namespace specgraph
