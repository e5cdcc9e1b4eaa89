#include "specgraph/standing_wave.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "specgraph/errors.hpp"

namespace specgraph {

namespace {

double odd_power(double x, double q) {
    // sign-preserving |x|^q, matches x^q for odd integer exponents and keeps
    // the ODE well-defined while the integrator overshoots through zero
    return (x >= 0.0) ? std::pow(x, q) : -std::pow(-x, q);
}

OdeRhs wave_rhs(double beta, double p) {
    return [beta, p](double, const Vec& y, Vec& dy) {
        dy[0] = y[1];
        dy[1] = -beta * y[0] - odd_power(y[0], 2.0 * p + 1.0);
    };
}

struct EdgeIntegration {
    double length;
    double end_slope;
    DenseOde ode;
};

EdgeIntegration integrate_edge(double beta, double p, double phi0, double dphi0,
                               const ProfileOptions& opts) {
    const double horizon =
        opts.horizon_factor * std::max(1.0, 2.0 * M_PI / std::sqrt(std::abs(beta) + 1e-300));
    OdeOptions oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;

    Vec y0(2);
    y0 << phi0, dphi0;
    auto g = [](double, const Vec& y) { return y[0]; };
    const bool armed = phi0 != 0.0;
    const double arm_threshold = 1e-10 * std::max(1.0, std::abs(phi0) + std::abs(dphi0));

    auto hit = integrate_until_sign_change(wave_rhs(beta, p), y0, 0.0, horizon, g,
                                           armed, oo, nullptr, arm_threshold);
    if (!hit)
        throw NoZeroCrossing("edge profile has no zero within the integration horizon");
    const double length = hit->x;

    // one clean pass with dense output covering the stretched range
    DenseOde traj = integrate_dense(wave_rhs(beta, p), y0, 0.0,
                                    opts.extension_factor * length, oo);
    Vec at_end = traj.eval(length);
    return EdgeIntegration{length, at_end[1], std::move(traj)};
}

}  // namespace

double WaveProfile::max_abs_phi() const {
    double m = 0.0;
    for (int e = 0; e < edges(); ++e)
        for (const auto& st : edge_ode[e].steps())
            m = std::max({m, std::abs(st.eval(st.x0)[0]),
                          std::abs(st.eval(st.x0 + st.h)[0]),
                          std::abs(st.eval(st.x0 + 0.5 * st.h)[0])});
    return m;
}

double WaveProfile::energy(int edge, double s) const {
    Vec y = edge_ode[edge].eval(s);
    const double p = params.p;
    return 0.5 * y[1] * y[1] + 0.5 * params.beta * y[0] * y[0] +
           std::pow(std::abs(y[0]), 2.0 * p + 2.0) / (2.0 * p + 2.0);
}

WaveProfile integrate_profile(const WaveParams& params, double graph_alpha,
                              const ProfileOptions& opts) {
    if (params.edges() < 1)
        throw std::invalid_argument("profile needs at least one edge slope");
    if (!(params.p > 0.0)) throw std::invalid_argument("nonlinearity exponent must be positive");
    bool all_zero = params.center_value == 0.0;
    for (double s : params.center_slopes) all_zero = all_zero && s == 0.0;
    if (all_zero) throw DegenerateProfile("phi == 0 never crosses zero");

    WaveProfile prof;
    prof.params = params;
    prof.alpha = graph_alpha;
    double flux = 0.0;
    for (double s : params.center_slopes) flux += s;
    prof.vertex_consistent =
        std::abs(flux - graph_alpha * params.center_value) <=
        1e-9 * (1.0 + std::abs(flux) + std::abs(graph_alpha * params.center_value));

    for (int e = 0; e < params.edges(); ++e) {
        auto edge = integrate_edge(params.beta, params.p, params.center_value,
                                   params.center_slopes[e], opts);
        prof.lengths.push_back(edge.length);
        prof.end_slopes.push_back(edge.end_slope);
        prof.edge_ode.push_back(std::move(edge.ode));
    }
    return prof;
}

double arch_amplitude_threshold(double beta, double p) {
    return std::pow((p + 1.0) * (-beta), 1.0 / (2.0 * p));
}

double half_period(double beta, double p, double amplitude, const ProfileOptions& opts) {
    if (!(beta < 0.0)) throw std::invalid_argument("half_period requires beta < 0");
    if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");
    const double energy = 0.5 * beta * amplitude * amplitude +
                          std::pow(amplitude, 2.0 * p + 2.0) / (2.0 * p + 2.0);
    if (!(energy > 0.0))
        throw NoPeriodicOrbit("energy level has no non-negative arch through zero");
    const double slope = std::sqrt(2.0 * energy);

    OdeOptions oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    const double horizon =
        opts.horizon_factor * std::max(1.0, 2.0 * M_PI / std::sqrt(-beta));
    Vec y0(2);
    y0 << 0.0, slope;
    auto g = [](double, const Vec& y) { return y[0]; };
    auto hit = integrate_until_sign_change(wave_rhs(beta, p), y0, 0.0, horizon, g,
                                           false, oo, nullptr, 1e-10 * slope);
    if (!hit) throw NoPeriodicOrbit("arch does not return to zero within the horizon");
    return hit->x;
}

double amplitude_for_half_period(double beta, double p, double target,
                                 const ProfileOptions& opts) {
    if (!(target > 0.0)) throw TargetOutOfRange("half-period target must be positive");
    const double amin = arch_amplitude_threshold(beta, p);
    double lo = amin * (1.0 + 1e-9);
    double hi = amin * 2.0;

    double t_lo = half_period(beta, p, lo, opts);  // large
    if (target > t_lo)
        throw TargetOutOfRange("half-period target exceeds the searchable range");
    double t_hi = half_period(beta, p, hi, opts);
    int expansions = 0;
    while (t_hi > target) {
        hi *= 2.0;
        if (++expansions > 48)
            throw TargetOutOfRange("no amplitude attains the requested half-period");
        t_hi = half_period(beta, p, hi, opts);
    }
    // monotone decreasing in amplitude on [lo, hi]
    double a = brent_root(
        [&](double amp) { return half_period(beta, p, amp, opts) - target; }, lo, hi,
        1e-12 * amin);
    return a;
}

std::string profile_to_json(const WaveProfile& profile, int samples_per_edge) {
    nlohmann::json j;
    j["beta"] = profile.params.beta;
    j["p"] = profile.params.p;
    j["alpha"] = profile.alpha;
    j["center_value"] = profile.params.center_value;
    j["center_slopes"] = profile.params.center_slopes;
    j["lengths"] = profile.lengths;
    nlohmann::json samples = nlohmann::json::array();
    for (int e = 0; e < profile.edges(); ++e) {
        nlohmann::json edge = nlohmann::json::array();
        for (int i = 0; i < samples_per_edge; ++i) {
            double x = profile.lengths[e] * i / (samples_per_edge - 1);
            edge.push_back({x, profile.phi(e, x), profile.dphi(e, x)});
        }
        samples.push_back(std::move(edge));
    }
    j["samples"] = std::move(samples);
    return j.dump(2);
}

WaveProfile profile_from_json(const std::string& text, const ProfileOptions& opts) {
    nlohmann::json j = nlohmann::json::parse(text);
    WaveParams params;
    params.beta = j.at("beta").get<double>();
    params.p = j.at("p").get<double>();
    params.center_value = j.at("center_value").get<double>();
    params.center_slopes = j.at("center_slopes").get<std::vector<double>>();
    double alpha = j.at("alpha").get<double>();
    WaveProfile prof = integrate_profile(params, alpha, opts);
    auto stored = j.at("lengths").get<std::vector<double>>();
    if (stored.size() != prof.lengths.size())
        throw ConfigError("profile record edge count mismatch");
    for (std::size_t e = 0; e < stored.size(); ++e)
        if (std::abs(stored[e] - prof.lengths[e]) > 1e-6 * (1.0 + stored[e]))
            throw ConfigError("stored edge lengths disagree with re-integration");
    return prof;
}

}  // namespace specgraph
