#include "specgraph/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specgraph/errors.hpp"

namespace specgraph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double boundary_sum(const CrossingData& data) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.lengths.size(); ++i)
        s += data.lengths[i] * (data.end_slopes_v[i] * data.end_slopes_v[i] -
                                data.end_slopes_u[i] * data.end_slopes_u[i]);
    return s;
}
}  // namespace

double crossing_form_t(const CrossingData& data, const StarGraph& /*graph*/) {
    const double t0 = data.t0;
    const double mu0 = t0 * t0 * data.lambda0;
    return (boundary_sum(data) + 4.0 * mu0 * data.uv_inner) / (t0 * t0);
}

double crossing_form_lambda(const CrossingData& data) {
    return -2.0 * data.uv_inner / data.t0;
}

CrossingForm crossing_forms(const CrossingData& data, const StarGraph& graph) {
    CrossingForm f;
    f.m_t = crossing_form_t(data, graph);
    f.m_lambda = crossing_form_lambda(data);
    f.signature_t = (f.m_t > 0) - (f.m_t < 0);
    f.multiplicity = 1;
    return f;
}

HadamardSlopes hadamard_slopes(const CrossingData& data, const StarGraph& graph) {
    const double t0 = data.t0;
    const double m_t_mu = crossing_form_t(data, graph);
    const double m_mu = crossing_form_lambda(data);
    // chain rule mu = t^2 lambda: the lambda-variable pair
    const double m_t_lam = m_t_mu + 2.0 * t0 * data.lambda0 * m_mu;
    const double m_lam_lam = t0 * t0 * m_mu;

    const double scale = 1.0 + std::abs(m_t_lam) + std::abs(m_lam_lam);
    const bool t_form_zero = std::abs(m_t_lam) < 1e-10 * scale;
    const bool lam_form_zero = std::abs(m_lam_lam) < 1e-10 * scale;
    if (t_form_zero && lam_form_zero)
        throw BothFormsVanish("both crossing forms vanish; first order is degenerate");

    HadamardSlopes out{};
    if (lam_form_zero) {
        out.lambda_prime = (m_t_lam > 0) == (m_lam_lam >= 0) ? -kInf : kInf;
        out.lambda_prime_finite = false;
        out.t_prime = 0.0;
        out.t_prime_finite = true;
    } else if (t_form_zero) {
        out.lambda_prime = 0.0;
        out.lambda_prime_finite = true;
        out.t_prime = (m_lam_lam > 0) == (m_t_lam >= 0) ? -kInf : kInf;
        out.t_prime_finite = false;
    } else {
        out.lambda_prime = -m_t_lam / m_lam_lam;
        out.t_prime = -m_lam_lam / m_t_lam;
        out.lambda_prime_finite = true;
        out.t_prime_finite = true;
    }
    return out;
}

ConjugatePointSet conjugate_points(const Problem& problem, double t_lo, double t_hi,
                                   const ScanOptions& opts) {
    ConjugatePointSet out;
    if (!(t_hi > t_lo)) return out;
    for (ScalarBlock block : {ScalarBlock::G, ScalarBlock::F}) {
        const int n = std::max(2, opts.resolution);
        std::vector<double> ts(n + 1), vals(n + 1);
        for (int i = 0; i <= n; ++i) ts[i] = t_lo + (t_hi - t_lo) * i / n;
        for (int i = 0; i <= n; ++i)
            vals[i] = scalar_det(problem, block, ts[i], opts.spectral);
        for (int i = 1; i <= n; ++i) {
            if ((vals[i - 1] > 0) == (vals[i] > 0)) continue;
            double root = brent_root(
                [&](double t) { return scalar_det(problem, block, t, opts.spectral); },
                ts[i - 1], ts[i], opts.root_tol);
            auto [s_min, s_second] =
                scalar_det_smallest_svs(problem, block, root, opts.spectral);
            int mult = 1;
            if (s_second < 1e-6) mult = 2;  // double kernel; rank deficit >= 2
            (void)s_min;
            out.locations.push_back({root, mult, block});
            (block == ScalarBlock::G ? out.p_c : out.q_c) += mult;
        }
    }
    std::sort(out.locations.begin(), out.locations.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

int maslov_segment(const std::vector<PositionedCrossing>& crossings, double a,
                   double b, double regular_tol) {
    int total = 0;
    const double span = std::abs(b - a);
    for (const auto& c : crossings) {
        const bool at_left = std::abs(c.position - a) <= 1e-12 * (1.0 + span);
        const bool at_right = std::abs(c.position - b) <= 1e-12 * (1.0 + span);
        const int n_plus = c.form > regular_tol ? 1 : 0;
        const int n_minus = c.form < -regular_tol ? 1 : 0;
        if (n_plus == 0 && n_minus == 0) {
            if (at_left || at_right) continue;  // non-regular endpoint: excluded
            throw NonRegularInteriorCrossing(
                "interior crossing with vanishing form; homotope or exclude it");
        }
        if (at_left)
            total -= n_minus;
        else if (at_right)
            total += n_plus;
        else
            total += n_plus - n_minus;
    }
    return total;
}

SpectralIndexReport assemble_index_report(const Problem& problem,
                                          const ConjugatePointSet& conj,
                                          const Concavity& concavity,
                                          const IndexOptions& opts) {
    SpectralIndexReport rep;
    rep.p_c = conj.p_c;
    rep.q_c = conj.q_c;
    rep.conjugate_locations = conj.locations;
    rep.tpp = concavity.tpp;
    rep.tpp_err = concavity.error_est;
    rep.alpha_in_theorem_range = problem.bc.alpha >= 0.0;

    if (std::abs(concavity.tpp) <= concavity.error_est)
        throw DegenerateConcavity(
            "t''(0) is below its error estimate; Theorem hypotheses not met");
    rep.tpp_sign = concavity.tpp > 0 ? 1 : -1;
    rep.corner_c = concavity.tpp < 0 ? 1 : 0;
    rep.bound = std::abs(rep.p_c - rep.q_c - rep.corner_c);

    if (rep.p_c == 1 && rep.q_c == 0)
        rep.verdict = rep.tpp_sign > 0 ? "unstable" : "spectrally_stable_on_iR";
    else
        rep.verdict = "inconclusive";

    ScanOptions scan = opts.scan;
    scan.threads = opts.threads;

    // Hypothesis 1.1 at the corner
    SpectralOptions so = scan.spectral;
    rep.corner_det = std::abs(dispersion_det(problem, 0.0, 1.0, so));
    try {
        CrossingData corner = eigen_data_at_crossing(problem, 0.0, 1.0, so);
        rep.corner_u_norm = corner.norm_u;
        rep.hypothesis_zero_simple = rep.corner_det < 1e-8;
    } catch (const ComputationError&) {
        rep.hypothesis_zero_simple = false;
    }

    // Gamma_3: direct count of D(., 1) zeros on (0, lambda_inf]
    rep.lambda_inf = lambda_window_bound(problem);
    const double eps_lam = opts.lambda_eps_frac * rep.lambda_inf;
    ScanOptions g3 = scan;
    g3.resolution = opts.gamma3_resolution;
    SegmentScan s3 = crossings_on_segment(problem, Axis::Lambda, 1.0, eps_lam,
                                          rep.lambda_inf, g3);
    std::vector<PositionedCrossing> g3_forms;
    for (const auto& r : s3.roots) {
        rep.positive_real_eigs.push_back(r.position);
        CrossingData d = eigen_data_at_crossing(problem, r.position, 1.0, so);
        g3_forms.push_back({r.position, crossing_form_lambda(d)});
    }
    rep.direct_positive_real_count = static_cast<int>(rep.positive_real_eigs.size());
    rep.inequality_ok = rep.direct_positive_real_count >= rep.bound;

    // Gamma_2: signatures of the t-crossing form at the lambda = 0 conjugate
    // points (corner excluded; its contribution is corner_c).
    std::vector<PositionedCrossing> g2_forms;
    for (const auto& loc : conj.locations) {
        CrossingData d = eigen_data_at_crossing(problem, 0.0, loc.t, so);
        g2_forms.push_back({loc.t, crossing_form_t(d, problem.graph())});
    }
    rep.mas_gamma2 = maslov_segment(g2_forms, opts.eps0, 1.0 - opts.corner_delta);
    rep.mas_gamma3 = maslov_segment(g3_forms, eps_lam, rep.lambda_inf);

    // Gamma_1 (t = eps0) and Gamma_4 (lambda = lambda_inf) must carry no
    // crossings; verified by scans.
    SegmentScan s1 = crossings_on_segment(problem, Axis::Lambda, opts.eps0, eps_lam,
                                          rep.lambda_inf, scan);
    SegmentScan s4 = crossings_on_segment(problem, Axis::T, rep.lambda_inf,
                                          opts.eps0, 1.0, scan);
    rep.mas_gamma1 = s1.roots.empty() ? 0 : -999;
    rep.mas_gamma4 = s4.roots.empty() ? 0 : -999;

    rep.contour_identity_ok =
        (rep.mas_gamma1 + rep.mas_gamma2 + rep.corner_c + rep.mas_gamma3 +
         rep.mas_gamma4) == 0;
    return rep;
}

SpectralIndexReport spectral_index_report(const Problem& problem,
                                          const IndexOptions& opts) {
    if (problem.bc.kind != BoundaryScheme::Kind::StarDelta)
        throw std::invalid_argument("spectral index report requires a star scenario");

    ScanOptions scan = opts.scan;
    scan.resolution = opts.scan_resolution;
    scan.threads = opts.threads;
    ConjugatePointSet conj =
        conjugate_points(problem, opts.eps0, 1.0 - opts.corner_delta, scan);

    // strict-positivity check below eps0: no conjugate points hiding there
    ScanOptions low = scan;
    low.resolution = 100;
    ConjugatePointSet below = conjugate_points(problem, 2e-3, opts.eps0, low);
    if (below.p_c + below.q_c != 0)
        throw ComputationError("conjugate points below eps0; shrink eps0");

    // collar (1 - delta, 1): the corner must be the only crossing there
    ScanOptions collar = scan;
    collar.resolution = 60;
    ConjugatePointSet in_collar =
        conjugate_points(problem, 1.0 - opts.corner_delta, 1.0 - 1e-9, collar);
    if (in_collar.p_c + in_collar.q_c != 0)
        throw ComputationError("conjugate point inside the corner collar; shrink delta");

    TraceOptions traceopts;
    traceopts.spectral = opts.scan.spectral;
    Rect bounds{-12.0 * opts.concavity.delta, 12.0 * opts.concavity.delta, 0.5, 1.5};
    EigenCurve corner_curve = trace_curve(problem, 0.0, 1.0, bounds, traceopts);
    ConcavityOptions copts = opts.concavity;
    copts.spectral = opts.scan.spectral;
    Concavity conc = concavity_at_seed(problem, corner_curve, copts);

    IndexOptions o2 = opts;
    o2.scan = scan;
    return assemble_index_report(problem, conj, conc, o2);
}

}  // namespace specgraph
