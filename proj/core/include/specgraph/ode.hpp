#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace specgraph {

using Vec = Eigen::VectorXd;

// Right-hand side of y' = f(x, y).  `dydx` is preallocated to y.size().
using OdeRhs = std::function<void(double x, const Vec& y, Vec& dydx)>;

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double initial_step = 0.0;   // 0 = automatic
    double max_step = 0.0;       // 0 = |x1 - x0|
    std::size_t max_steps = 2'000'000;
};

// One accepted Dormandâ€“Prince step with its quartic interpolant.
// eval() is the standard continuous extension (Hairer's contd5 form).
struct DenseStep {
    double x0, h;                // step covers [x0, x0+h]; h may be negative
    Eigen::MatrixXd rcont;       // n x 5 interpolation coefficients

    Vec eval(double x) const {
        double theta = (x - x0) / h;
        double th1 = 1.0 - theta;
        return rcont.col(0) +
               theta * (rcont.col(1) +
                        th1 * (rcont.col(2) +
                               theta * (rcont.col(3) + th1 * rcont.col(4))));
    }
};

// Dense-output trajectory of a single integration.
class DenseOde {
public:
    DenseOde() = default;
    DenseOde(std::vector<DenseStep> steps, double x_begin, double x_end)
        : steps_(std::move(steps)), x_begin_(x_begin), x_end_(x_end) {}

    double x_begin() const { return x_begin_; }
    double x_end() const { return x_end_; }
    bool forward() const { return x_end_ >= x_begin_; }
    const std::vector<DenseStep>& steps() const { return steps_; }

    // Evaluate the interpolated state; x must lie within the integrated span
    // (a small roundoff slack is allowed at the ends).
    Vec eval(double x) const;

private:
    const DenseStep& locate(double x) const;
    std::vector<DenseStep> steps_;
    double x_begin_ = 0.0, x_end_ = 0.0;
};

// Integrate from x0 to x1 (either direction), returning only the final state.
Vec integrate_to(const OdeRhs& f, Vec y0, double x0, double x1,
                 const OdeOptions& opts = {});

// Integrate keeping the dense interpolant of every accepted step.
DenseOde integrate_dense(const OdeRhs& f, Vec y0, double x0, double x1,
                         const OdeOptions& opts = {});

// First root of `g(x, y(x))` strictly after the integration start.  `armed`
// controls whether a sign is already established at x0 (pass false when
// g(x0,y0)=0, e.g. a profile starting on its own zero).  Returns the root
// location polished by Brent on the dense interpolant, or nullopt if no sign
// change occurs before x1.
struct EventResult {
    double x;
    Vec y;
};
std::optional<EventResult> integrate_until_sign_change(
    const OdeRhs& f, Vec y0, double x0, double x1,
    const std::function<double(double, const Vec&)>& g, bool armed,
    const OdeOptions& opts = {}, DenseOde* trajectory_out = nullptr,
    double arm_threshold = 0.0);

// Brent root finder on a scalar function with a sign-changing bracket.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-14, int max_iter = 200);

// Nodes and weights of the 16-point Gaussâ€“Legendre rule on [-1, 1].
const std::array<double, 16>& gauss16_nodes();
const std::array<double, 16>& gauss16_weights();

// Composite 16-point Gauss quadrature of f over [a, b] with `panels` panels.
double gauss_quad(const std::function<double(double)>& f, double a, double b,
                  int panels = 64);

// Quadrature of a function of the dense trajectory, one 8-point Gauss rule
// per accepted step (exact for the degree-4 interpolant products).
double quad_over_trajectory(const DenseOde& traj,
                            const std::function<double(double, const Vec&)>& f);

}  // namespace specgraph
