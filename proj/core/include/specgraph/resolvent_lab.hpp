#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/symplectic.hpp"

namespace specgraph::lab {

using cplx = std::complex<double>;
using CFun = std::function<cplx(double)>;
using C4 = Eigen::Vector4cd;
using C8 = Eigen::Matrix<cplx, 8, 1>;
using CMat = Eigen::MatrixXcd;

// Constant-coefficient interval model of the canonically symplectic pencil
//   (N + V - zeta)(u, v) = (v'' - F v - zeta u, -u'' + G u - zeta v)
// with boundary conditions "scaled trace tr = (Gamma_0, sigma Gamma_1) of each
// block lies in its Lagrangian plane".  Trace ordering per block:
//   (w(0), w(l) | w'(0), -w'(l)) with the sigma factor on the second pair.
struct IntervalExtension {
    double length = M_PI;
    Mat plane_u = Mat();  // 4 x 2 orthonormal frame
    Mat plane_v = Mat();
    double f_pot = 0.0;  // F
    double g_pot = 0.0;  // G
    double trace_scale = 1.0;  // sigma

    static IntervalExtension dirichlet(double length, double f, double g);
};

// Composite 16-point Gauss grid on [0, length].
struct LabGrid {
    double length = M_PI;
    int panels = 64;
    std::vector<double> nodes;    // panels * 16
    std::vector<double> weights;  // matching weights

    static LabGrid make(double length, int panels = 64);
    cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const;
};

// A pair of scalar functions on the interval (value plus first and second
// derivative where analytic test functions are involved).
struct FnPair {
    CFun first, second;
};

// Resolvent image with its full first-order state, valid anywhere on [0, l].
class Solution {
public:
    C4 state(double x) const;  // (u, u', v, v')
    cplx u(double x) const { return state(x)[0]; }
    cplx v(double x) const { return state(x)[2]; }
    FnPair as_pair() const;

    struct Impl;
    std::shared_ptr<const Impl> impl;
};

// Scaled trace of a state pair, as a C^8 vector (g0u | g1u | g0v | g1v).
C8 trace_of(const IntervalExtension& ext, const C4& at0, const C4& atl);

struct LabOptions {
    int panels = 64;
    double near_spectrum_cond = 1e12;
};

// Apply (N + V - zeta)^{-1} to f by variation of parameters with the
// closed-form fundamental system.  Throws NearSpectrum when the boundary
// solve is ill-conditioned.
Solution resolvent_apply(const IntervalExtension& ext, cplx zeta, const FnPair& f,
                         const LabOptions& opts = {});

// Scaled trace of a Solution.
C8 solution_trace(const IntervalExtension& ext, const Solution& sol);

// Riesz representer pair of the functional e |-> <(T R(zeta))^* e applied at y:
// returns the FnPair y |-> Theta(y)^H e.
FnPair trace_adjoint_apply(const IntervalExtension& ext, cplx zeta, const C8& e,
                           const LabOptions& opts = {});

// Normalized boundary determinant of (N + V - mu) at real mu; its zeros on
// the real axis are the pencil's real eigenvalues.
double boundary_det(const IntervalExtension& ext, double mu,
                    const LabOptions& opts = {});

// Eigenfunction state coefficients at a simple real eigenvalue mu0 (null
// vector of the boundary matrix).  Throws EigenvalueNotSimple.
struct LabEigenfunction {
    double mu0;
    C4 coeff;                       // fundamental-system coefficients
    std::function<C4(double)> state;  // (u, u', v, v')(x)
};
LabEigenfunction eigenfunction_at(const IntervalExtension& ext, double mu0,
                                  const LabOptions& opts = {});

// Locate real eigenvalues of the pencil in [lo, hi] by a det scan.
std::vector<double> real_eigenvalues(const IntervalExtension& ext, double lo,
                                     double hi, int resolution = 600,
                                     const LabOptions& opts = {});

// ---- one-parameter families ------------------------------------------------

// C^2 family of extensions with analytic derivative data at each t.
struct LabFamily {
    std::function<IntervalExtension(double)> at;
    std::function<double(double)> df_dt;       // dF/dt
    std::function<double(double)> dg_dt;       // dG/dt
    std::function<Mat(double)> dplane_u;       // derivative of the plane_u frame
    std::function<Mat(double)> dplane_v;
    std::function<double(double)> dsigma_dt;   // derivative of the trace scale
    std::string label;
};

// The three single-mechanism families used by the identity suite.
LabFamily v_only_family(const IntervalExtension& base, double df, double dg);
LabFamily plane_only_family(double length, double f, double g);   // rotating planes
LabFamily trace_only_family(double length, double f, double g);   // sigma(t) = 1/t
LabFamily frozen_family(const IntervalExtension& base);

// ---- verification operations ------------------------------------------------

// max residual of the modified Green identity (with the boundary-triplet
// normalization 1/sigma when the extension's trace is scaled), over random
// polynomial*trigonometric test pairs; also exercises the lambda-shifted form.
double verify_green_identity(const IntervalExtension& ext, int trials,
                             unsigned seed = 12345, const LabOptions& opts = {});

struct DifferenceResiduals {
    double full;       // symplectic difference formula with the full form
    double projected;  // projected (plane-to-plane) version
};

// Residuals of the symplectic resolvent difference formula between two
// extensions sharing the potentials; with differing potentials the
// V-difference term is included (the t,s-difference formula).
DifferenceResiduals verify_resolvent_difference(const IntervalExtension& ext1,
                                                const IntervalExtension& ext2,
                                                cplx zeta, const FnPair& f,
                                                const LabOptions& opts = {});

// Richardson order estimate of || R_{t0+h} f - [R_{t0} + h L] f || for
// h in {1e-2, 5e-3, 2.5e-3}; L is the first-order resolvent expansion
// operator.  Expected slope ~ 2.
double verify_first_order_expansion(const LabFamily& family, double t0, cplx zeta,
                                    const FnPair& f, const LabOptions& opts = {});

struct HadamardCheck {
    double mu0;
    double formula;  // eigenvalue derivative from the crossing-form expression
    double fd;       // central finite differences with Richardson
    double discrepancy;
};
HadamardCheck verify_hadamard_abstract(const LabFamily& family, double t0,
                                       double mu_lo, double mu_hi,
                                       const LabOptions& opts = {});

// |ratio of FD partial derivatives of the boundary determinant - m_lam/m_t| /
// |m_lam/m_t| at a crossing: the Lyapunov-Schmidt derivative identities at
// ratio level (gauge-invariant).
double verify_ls_ratio(const LabFamily& family, double t0, double mu_lo,
                       double mu_hi, const LabOptions& opts = {});

struct RieszChecks {
    double idempotency;    // ||P^2 f - P f|| / ||P f||
    double tau_symmetry;   // |<tau P f, h> - <f, tau P h>|
    double reduced_prod;   // ||S P f||
    double sandwich_slope; // Richardson slope of ||(P0 P(t) P0 - P0) f||
};
RieszChecks verify_riesz(const LabFamily& family, double t0, double mu_lo,
                         double mu_hi, const FnPair& f, const FnPair& h,
                         const LabOptions& opts = {});

// ---- the packaged identity suite --------------------------------------------

struct CheckResult {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

std::vector<CheckResult> run_identity_suite(unsigned seed = 20240801,
                                            const LabOptions& opts = {});

}  // namespace specgraph::lab
