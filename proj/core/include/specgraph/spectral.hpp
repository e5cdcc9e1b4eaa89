#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "specgraph/ode.hpp"
#include "specgraph/standing_wave.hpp"
#include "specgraph/symplectic.hpp"

namespace specgraph {

using Vec4 = Eigen::Vector4d;

// Edgewise potentials of the linearized pencil.  In the eigenvalue system
//   u'' = -t^2 qG(t x) u - t^2 lambda v,
//   v'' = -t^2 qF(t x) v + t^2 lambda u,
// qG = (2p+1) phi^{2p} + beta and qF = phi^{2p} + beta for wave-backed
// problems; constants for closed-form checks.
class EdgePotentials {
public:
    virtual ~EdgePotentials() = default;
    virtual int edges() const = 0;
    virtual double length(int edge) const = 0;
    virtual double reach(int edge) const = 0;  // largest s with phi(s) evaluable
    virtual double qF(int edge, double s) const = 0;
    virtual double qG(int edge, double s) const = 0;
};

class WavePotentials final : public EdgePotentials {
public:
    explicit WavePotentials(WaveProfile profile);
    int edges() const override { return profile_.edges(); }
    double length(int edge) const override { return profile_.lengths[edge]; }
    double reach(int edge) const override;
    double qF(int edge, double s) const override;
    double qG(int edge, double s) const override;
    const WaveProfile& profile() const { return profile_; }

private:
    WaveProfile profile_;
    double two_p_;
};

class ConstantPotentials final : public EdgePotentials {
public:
    ConstantPotentials(std::vector<double> lengths, double qg, double qf)
        : lengths_(std::move(lengths)), qg_(qg), qf_(qf) {}
    int edges() const override { return static_cast<int>(lengths_.size()); }
    double length(int edge) const override { return lengths_[edge]; }
    double reach(int) const override { return 1e300; }
    double qF(int, double) const override { return qf_; }
    double qG(int, double) const override { return qg_; }

private:
    std::vector<double> lengths_;
    double qg_, qf_;
};

enum class EndCondition { Dirichlet, Rotating };

// Vertex/boundary conditions of a scenario, imposed on the scaled trace
// tr_t = (Gamma_0, (1/t) Gamma_1).
struct BoundaryScheme {
    enum class Kind { StarDelta, Interval };
    Kind kind = Kind::StarDelta;
    double alpha = 0.0;                            // star: delta coupling
    EndCondition left = EndCondition::Dirichlet;   // interval x = 0
    EndCondition right = EndCondition::Rotating;   // interval x = length
};

// A spectral scenario: potentials plus boundary behavior.
struct Problem {
    std::shared_ptr<const EdgePotentials> potentials;
    BoundaryScheme bc;

    int edges() const { return potentials->edges(); }
    double length(int e) const { return potentials->length(e); }
    StarGraph graph() const;  // star scenarios: the metric graph
};

Problem star_problem(WaveProfile profile, double alpha);
Problem interval_problem(std::shared_ptr<const EdgePotentials> potentials,
                         EndCondition left, EndCondition right);

struct SpectralOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double crossing_tol = 1e-6;      // |D| (normalized) accepted as a crossing
    double multiplicity_tol = 1e-6;  // sigma_2/sigma_1 below -> multiplicity > 1
    double vertex_residual_tol = 1e-8;
};

// Scaled boundary trace tr_t u = (Gamma_0 u, (1/t) Gamma_1 u) of a pair (u,v),
// blocks of length 2m each, ordering (values at 0, values at l | derivatives
// at 0, -derivatives at l).
struct ScaledTrace {
    Eigen::VectorXd gamma0_u, gamma1_u, gamma0_v, gamma1_v;
    double t = 1.0;

    Eigen::VectorXd to_vector() const;  // (g0u | g1u | g0v | g1v) in R^{8m}
};

// Eigenfunction boundary data at a conjugate point, enough to evaluate both
// crossing forms.  Normalized to ||(u,v)||_{L^2} = 1.
struct CrossingData {
    double lambda0 = 0.0, t0 = 1.0;
    Eigen::VectorXd end_slopes_u, end_slopes_v;  // u_i'(l_i), v_i'(l_i)
    double center_value_u = 0.0, center_value_v = 0.0;
    double uv_inner = 0.0;          // <u, v>_{L^2(G)}
    double norm_u = 0.0, norm_v = 0.0;
    ScaledTrace trace;
    std::vector<double> lengths;
    double second_singular_ratio = 0.0;
};

// Right-hand side of the first-order edge system at (lambda, t).
OdeRhs edge_rhs(const Problem& problem, int edge, double lambda, double t);

// Evolve the 4-vector (u, u', v, v') along an edge between two positions.
Vec4 evolve_edge(const Problem& problem, int edge, double lambda, double t,
                 const Vec4& y0, double x_from, double x_to,
                 const SpectralOptions& opts = {});

// Raw shooting assembly: per edge the 2-dimensional family satisfying the
// free-end (or right-end) conditions, integrated toward x = 0, then the
// central/left condition rows.  Columns are grouped seed-1-per-edge first,
// then seed-2-per-edge, so at lambda = 0 the matrix is block diagonal
// diag(M_G, M_F).
struct ShootingAssembly {
    Eigen::MatrixXd matrix;     // 2m x 2m condition matrix (unnormalized)
    Eigen::VectorXd col_norms;  // per-column norms used by the gauge
    std::vector<Vec4> seeds;    // 2 per edge, at x = length(e)
    std::vector<Vec4> states0;  // 2 per edge, the seeds integrated to x = 0
    double normalized_det() const;
};

ShootingAssembly shooting_assembly(const Problem& problem, double lambda, double t,
                                   const SpectralOptions& opts = {});

// Normalized dispersion determinant; zero iff t^2 lambda is an eigenvalue of
// the scenario pencil iff the Cauchy data plane meets the vertex plane.
double dispersion_det(const Problem& problem, double lambda, double t,
                      const SpectralOptions& opts = {});

enum class ScalarBlock { F, G };

// m x m shooting determinant of the decoupled scalar operator (A + F_t or
// A + G_t); zero iff its kernel is nontrivial.
double scalar_det(const Problem& problem, ScalarBlock which, double t,
                  const SpectralOptions& opts = {});

// Smallest two singular values (normalized by the largest) of the scalar
// shooting matrix; used for kernel multiplicity counting.
std::pair<double, double> scalar_det_smallest_svs(const Problem& problem,
                                                  ScalarBlock which, double t,
                                                  const SpectralOptions& opts = {});

// Scaled traces of a basis of the full 4m-dimensional solution space at
// (lambda, t); Lagrangian for the doubled form on R^{8m}.
LagrangianFrame cauchy_frame(const Problem& problem, double lambda, double t,
                             const SpectralOptions& opts = {});

// The vertex plane L+L (or L_t+L_t for rotating intervals) inside R^{8m}.
LagrangianFrame vertex_plane_doubled(const Problem& problem, double t);

// Null-vector eigenfunction data at a crossing of the dispersion determinant.
// Throws NotACrossing / MultiplicityAboveOne.
CrossingData eigen_data_at_crossing(const Problem& problem, double lambda0,
                                    double t0, const SpectralOptions& opts = {});

}  // namespace specgraph
