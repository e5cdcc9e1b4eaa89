#pragma once

#include <Eigen/Dense>
#include <vector>

namespace specgraph {

using Mat = Eigen::MatrixXd;

// Combinatorial/metric star graph: m edges of positive length joined at one
// central vertex, delta-type coupling constant alpha at the center.
struct StarGraph {
    int m = 1;
    std::vector<double> lengths;
    double alpha = 0.0;

    void validate() const;  // throws std::invalid_argument on bad data
};

// A real symplectic vector space (R^dim, form_matrix), form skew and orthogonal.
struct SymplecticSpace {
    int dim = 0;
    Mat form;  // dim x dim, skew-symmetric, form^2 = -I

    // omega on h^2 = R^{2k}: J = [[0, I_k], [-I_k, 0]].
    static SymplecticSpace standard(int k);
    // Omega on h^4 = R^{4k}: script-J = J oplus (-J).
    static SymplecticSpace doubled(int k);

    // omega(a, b) = <J a, b>
    double apply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return (form * a).dot(b);
    }
};

// Half-dimensional isotropic subspace given by an orthonormal frame.
struct LagrangianFrame {
    SymplecticSpace space;
    Mat frame;  // dim x (dim/2), orthonormal columns

    double isotropy_residual() const;  // max |frame^T J frame|
    Mat projector() const { return frame * frame.transpose(); }
};

// Orthonormalize the columns of `basis` and wrap as a frame of `space`.
// Throws if the basis is rank-deficient or the span is not isotropic
// within `isotropy_tol`.
LagrangianFrame make_lagrangian_frame(const SymplecticSpace& space, const Mat& basis,
                                      double isotropy_tol = 1e-10);

// Vertex-condition plane L in R^{4m} for delta-type coupling at the center and
// Dirichlet conditions at the free vertices.  Boundary ordering:
//   (u_1(0)..u_m(0), u_1(l_1)..u_m(l_m) | u_1'(0)..u_m'(0), -u_1'(l_1)..-u_m'(l_m)).
LagrangianFrame vertex_lagrangian(const StarGraph& graph);

// Single-edge plane in R^4: Dirichlet at x=0; at x=ell the trace pair
// (value, co-normal) constrained to span{(sin(pi t/2), -cos(pi t/2))}.
// t=0 gives Dirichlet-Dirichlet, t=1 Dirichlet-Neumann, t=2 Dirichlet-Dirichlet.
LagrangianFrame rotating_plane(double t, double ell);

// As above but with the rotating condition applied at both endpoints
// (Neumann-Neumann at t=1).
LagrangianFrame rotating_plane_both_ends(double t, double ell);

// Derivative of the rotating-plane orthonormal frame with respect to t
// (frames above are analytic in t).
Mat rotating_plane_frame_derivative(double t, bool both_ends);

// dim(a cap b) via singular values of [frame_a | -frame_b]: the count of
// singular values below tol relative to the largest.  Frames must share the
// ambient space.  tol <= 0 is rejected.
int intersection_dim(const LagrangianFrame& a, const LagrangianFrame& b,
                     double tol = 1e-8);

// Pure-Dirichlet plane in R^{4m}: all boundary values zero, derivatives free.
LagrangianFrame dirichlet_plane(int m);

}  // namespace specgraph
