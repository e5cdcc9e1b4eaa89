#pragma once

#include <string>
#include <vector>

#include "specgraph/ode.hpp"

namespace specgraph {

// Data determining a standing-wave profile: phi'' + beta phi + phi^{2p+1} = 0
// integrated edgewise from the central vertex.
struct WaveParams {
    double beta = -1.0;
    double p = 1.0;                     // nonlinearity exponent, p > 0
    double center_value = 1.0;          // phi(0), shared by all edges
    std::vector<double> center_slopes;  // phi_i'(0), one per edge

    int edges() const { return static_cast<int>(center_slopes.size()); }
};

struct ProfileOptions {
    double rtol = 1e-13;
    double atol = 1e-15;
    double extension_factor = 1.25;  // integrate each edge to this multiple of l_i
    double horizon_factor = 50.0;    // NoZeroCrossing beyond horizon_factor * max(1, 2pi/sqrt|beta|)
};

// Sampled standing-wave profile with dense-output interpolation per edge.
// Each edge is integrated past its first zero so that phi(t x) stays
// evaluable for t up to the extension factor (stretched graphs, t > 1).
class WaveProfile {
public:
    WaveParams params;
    double alpha = 0.0;
    bool vertex_consistent = false;  // sum of slopes == alpha * center value
    std::vector<double> lengths;     // first zero of phi per edge
    std::vector<double> end_slopes;  // phi_i'(l_i)
    std::vector<DenseOde> edge_ode;  // state (phi, phi') on [0, ext * l_i]

    int edges() const { return static_cast<int>(lengths.size()); }
    double phi(int edge, double s) const { return edge_ode[edge].eval(s)[0]; }
    double dphi(int edge, double s) const { return edge_ode[edge].eval(s)[1]; }
    double max_abs_phi() const;

    // First integral E = phi'^2/2 + beta phi^2/2 + phi^{2p+2}/(2p+2).
    double energy(int edge, double s) const;
};

// Integrate the profile from the central vertex data.  Throws
// DegenerateProfile when phi == 0, NoZeroCrossing when an edge never crosses.
WaveProfile integrate_profile(const WaveParams& params, double graph_alpha,
                              const ProfileOptions& opts = {});

// Half-period of the non-negative arch through zero: the x-distance between
// consecutive zeros of the solution with phi(0)=0 and max phi = amplitude.
// Requires beta < 0 and amplitude above the homoclinic threshold
// ((p+1)(-beta))^{1/(2p)}; below it the energy level has no arch through zero
// (NoPeriodicOrbit).  The half-period decreases from +inf (near the
// threshold) to 0 as the amplitude grows.
double half_period(double beta, double p, double amplitude,
                   const ProfileOptions& opts = {});

// Inverse of half_period in amplitude (monotone family); relative residual
// below 1e-10.  Throws TargetOutOfRange when no amplitude in the searchable
// bracket attains the target.
double amplitude_for_half_period(double beta, double p, double target,
                                 const ProfileOptions& opts = {});

// Lowest admissible arch amplitude for given (beta, p).
double arch_amplitude_threshold(double beta, double p);

// JSON-shaped export: {beta, p, alpha, center_value, center_slopes[],
// lengths[], samples per edge as (x, phi, dphi) triples}.
std::string profile_to_json(const WaveProfile& profile, int samples_per_edge = 201);

// Rebuild a profile from an exported record (re-integrates from the stored
// parameters and cross-checks the stored lengths).
WaveProfile profile_from_json(const std::string& text,
                              const ProfileOptions& opts = {});

}  // namespace specgraph
