#include "specgraph/symplectic.hpp"

#include <cmath>
#include <stdexcept>

#include "specgraph/errors.hpp"

namespace specgraph {

void StarGraph::validate() const {
    if (m < 1) throw std::invalid_argument("star graph needs m >= 1 edges");
    if (static_cast<int>(lengths.size()) != m)
        throw std::invalid_argument("length count does not match edge count");
    for (double l : lengths)
        if (!(l > 0.0)) throw std::invalid_argument("edge lengths must be positive");
}

SymplecticSpace SymplecticSpace::standard(int k) {
    SymplecticSpace s;
    s.dim = 2 * k;
    s.form = Mat::Zero(s.dim, s.dim);
    s.form.block(0, k, k, k) = Mat::Identity(k, k);
    s.form.block(k, 0, k, k) = -Mat::Identity(k, k);
    return s;
}

SymplecticSpace SymplecticSpace::doubled(int k) {
    SymplecticSpace half = standard(k);
    SymplecticSpace s;
    s.dim = 4 * k;
    s.form = Mat::Zero(s.dim, s.dim);
    s.form.block(0, 0, 2 * k, 2 * k) = half.form;
    s.form.block(2 * k, 2 * k, 2 * k, 2 * k) = -half.form;
    return s;
}

double LagrangianFrame::isotropy_residual() const {
    Mat r = frame.transpose() * space.form * frame;
    return r.cwiseAbs().maxCoeff();
}

LagrangianFrame make_lagrangian_frame(const SymplecticSpace& space, const Mat& basis,
                                      double isotropy_tol) {
    const int half = space.dim / 2;
    if (basis.rows() != space.dim || basis.cols() != half)
        throw std::invalid_argument("frame basis has wrong shape");
    Eigen::HouseholderQR<Mat> qr(basis);
    Mat q = qr.householderQ() * Mat::Identity(space.dim, half);
    Mat r = qr.matrixQR().topRows(half).triangularView<Eigen::Upper>();
    double rmin = r.diagonal().cwiseAbs().minCoeff();
    double rmax = r.diagonal().cwiseAbs().maxCoeff();
    if (rmax == 0.0 || rmin < 1e-12 * rmax)
        throw std::invalid_argument("frame basis is rank-deficient");
    LagrangianFrame f{space, q};
    if (f.isotropy_residual() > isotropy_tol)
        throw std::invalid_argument("subspace is not isotropic for the given form");
    return f;
}

LagrangianFrame vertex_lagrangian(const StarGraph& graph) {
    graph.validate();
    const int m = graph.m;
    const int dim = 4 * m;
    // rows: continuity (m-1), Dirichlet at free ends (m), flux (1)
    Mat cond = Mat::Zero(2 * m, dim);
    int r = 0;
    for (int i = 1; i < m; ++i) {
        cond(r, 0) = 1.0;
        cond(r, i) = -1.0;
        ++r;
    }
    for (int i = 0; i < m; ++i) {
        cond(r, m + i) = 1.0;
        ++r;
    }
    for (int i = 0; i < m; ++i) cond(r, 2 * m + i) = 1.0;
    cond(r, 0) = -graph.alpha;
    ++r;

    Eigen::JacobiSVD<Mat> svd(cond, Eigen::ComputeFullV);
    Mat basis = svd.matrixV().rightCols(dim - r);
    return make_lagrangian_frame(SymplecticSpace::standard(2 * m), basis);
}

namespace {
Mat rotating_basis(double t, bool both_ends) {
    const double s = std::sin(M_PI * t / 2.0), c = std::cos(M_PI * t / 2.0);
    Mat basis(4, 2);
    if (both_ends) {
        basis << s, 0,
                 0, s,
                 -c, 0,
                 0, -c;
    } else {
        basis << 0, 0,
                 0, s,
                 1, 0,
                 0, -c;
    }
    return basis;
}
}  // namespace

LagrangianFrame rotating_plane(double t, double /*ell*/) {
    // columns are orthonormal for every t; keep them as-is so the analytic
    // frame derivative below matches
    return LagrangianFrame{SymplecticSpace::standard(2), rotating_basis(t, false)};
}

LagrangianFrame rotating_plane_both_ends(double t, double /*ell*/) {
    return LagrangianFrame{SymplecticSpace::standard(2), rotating_basis(t, true)};
}

Mat rotating_plane_frame_derivative(double t, bool both_ends) {
    const double hp = M_PI / 2.0;
    const double ds = hp * std::cos(M_PI * t / 2.0), dc = -hp * std::sin(M_PI * t / 2.0);
    Mat d(4, 2);
    if (both_ends) {
        d << ds, 0,
             0, ds,
             -dc, 0,
             0, -dc;
    } else {
        d << 0, 0,
             0, ds,
             0, 0,
             0, -dc;
    }
    return d;  // the rotating basis columns are unit for all t
}

int intersection_dim(const LagrangianFrame& a, const LagrangianFrame& b, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("intersection tolerance must be positive");
    if (a.space.dim != b.space.dim)
        throw std::invalid_argument("frames live in different ambient spaces");
    Mat stacked(a.space.dim, a.frame.cols() + b.frame.cols());
    stacked << a.frame, -b.frame;
    Eigen::JacobiSVD<Mat> svd(stacked);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    if (smax == 0.0) return static_cast<int>(a.frame.cols());
    int count = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < tol * smax) ++count;
    return count;
}

LagrangianFrame dirichlet_plane(int m) {
    Mat basis = Mat::Zero(4 * m, 2 * m);
    basis.bottomRows(2 * m) = Mat::Identity(2 * m, 2 * m);
    return make_lagrangian_frame(SymplecticSpace::standard(2 * m), basis);
}

}  // namespace specgraph
