#include "mgt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/charroots.hpp"
#include "mgt/errors.hpp"

namespace mgt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        default: return 4.0 * kPi;
    }
}

// Composite Simpson over a uniform grid of an odd number of nodes.
template <typename F>
double simpson(F f, double a, double b, int nodes) {
    if (nodes % 2 == 0) ++nodes;
    const double h = (b - a) / (nodes - 1);
    double acc = f(a) + f(b);
    for (int i = 1; i + 1 < nodes; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

struct LineFit {
    double slope, intercept, rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    LineFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += r * r;
    }
    fit.rms = std::sqrt(rss / m);
    return fit;
}

} // namespace

double TimeSeriesRecord::final_over_initial() const {
    if (values.empty() || values.front() == 0.0) return 0.0;
    return values.back() / values.front();
}

RateFit fit_decay_rate(const TimeSeriesRecord& series, double t0, double t1) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.times[i];
        if (t < t0 || t > t1) continue;
        const double v = series.values[i];
        if (!(v > 0.0)) throw NonPositiveValue("log-log fit requires positive values");
        if (!(t > 0.0)) throw NonPositiveValue("log-log fit requires positive times");
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
    }
    if (lx.size() < 10) throw InsufficientData("fewer than 10 samples in fit window");
    const LineFit f = least_squares(lx, ly);
    return RateFit{f.slope, f.intercept, f.rms, t0, t1, static_cast<int>(lx.size())};
}

ProfileErrorSeries weighted_profile_error(const std::vector<double>& times,
                                          const std::function<Field(double)>& numeric,
                                          const std::function<Field(double)>& profile, int j,
                                          double sigma) {
    ProfileErrorSeries out;
    out.weighted_error.id = "weighted_profile_error";
    out.floor.id = "profile_floor";
    out.raw_norm.id = "raw_norm";
    for (double t : times) {
        if (!(t > 0.0)) throw InvalidParameter("profile comparison requires t > 0");
        Field num = numeric(t);
        Field prof = profile(t);
        const int n = num.grid().dim();
        const double w = std::pow(t, (n + 2.0 * sigma + 4.0 + 2.0 * j) / 4.0);
        const NormSpec spec = NormSpec::hdot(sigma + 2.0 - j);
        Field diff = num;
        diff -= prof;
        out.weighted_error.push(t, w * sobolev_norm(diff, spec));
        out.floor.push(t, w * sobolev_norm(prof, spec));
        out.raw_norm.push(t, sobolev_norm(num, spec));
    }
    return out;
}

LemmaCheckResult lemma_scaling_check(double s, int n, double c, LemmaKind kind, double t0,
                                     double t1, double ell, double bump_radius,
                                     const CutoffPartition& cutoffs) {
    LemmaCheckResult res;
    res.max_bound_ratio = 0.0;
    if (kind == LemmaKind::SmallFrequency) {
        if (!(n + 2.0 * s > 0.0)) throw InvalidParameter("small-frequency lemma needs n + 2s > 0");
        const double area = sphere_area(n);
        auto norm_at = [&](double t) {
            // integral over r in (0, eps0] of chi^2 r^{2s+n-1} e^{-2 c r^2 t},
            // log substitution keeps the integrand O(1)-scaled for all t.
            const double p = 2.0 * s + n;
            const double r_star = std::min(cutoffs.eps0(), std::sqrt(p / (4.0 * c * t + 1e-300)));
            const double u_min = std::log(r_star) - 60.0 / p;
            const double u_max = std::log(cutoffs.eps0());
            auto integrand = [&](double u) {
                const double r = std::exp(u);
                const double chi = cutoffs.chi_int(r);
                return chi * chi * std::exp(p * u) * std::exp(-2.0 * c * r * r * t);
            };
            const double val = simpson(integrand, u_min, u_max, 4001);
            if (!(val >= 0.0) || !std::isfinite(val)) throw Error("divergent quadrature");
            return std::sqrt(area * val);
        };
        for (double t : geometric_times(t0, t1, 40)) res.series.push(t, norm_at(t));
        res.series.id = "lemma_smallfreq_norm";
        res.fit = fit_decay_rate(res.series, t0, t1);
        return res;
    }

    // Large-frequency bound check with a radial bump of unit H^{s+ell} norm.
    const double R = bump_radius > 0.0 ? bump_radius : 2.0 * cutoffs.n0();
    if (R < cutoffs.n0()) throw InvalidParameter("bump must sit inside the exterior zone");
    auto bump = [&](double r) {
        const double u = (r - R) / R; // support [R, 2R]
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (4.0 * u * (1.0 - u)));
    };
    const double area = sphere_area(n);
    const double reg2 = simpson(
        [&](double r) {
            const double b = bump(r);
            return std::pow(1.0 + r * r, s + ell) * b * b * std::pow(r, n - 1);
        },
        R, 2.0 * R, 2001);
    const double hnorm = std::sqrt(area * reg2 * std::pow(2.0 * kPi, -n));
    res.series.id = "lemma_largefreq_norm";
    for (double t : geometric_times(t0, t1, 40)) {
        const double val2 = simpson(
            [&](double r) {
                const double b = bump(r) * cutoffs.chi_ext(r);
                const double w = std::pow(r, s) * std::exp(-c * t / (r * r));
                return w * w * b * b * std::pow(r, n - 1);
            },
            R, 2.0 * R, 2001);
        const double lhs = std::sqrt(area * val2 * std::pow(2.0 * kPi, -n)) / hnorm;
        const double bound = std::pow(1.0 + t, -0.5 * ell);
        res.series.push(t, lhs);
        res.max_bound_ratio = std::max(res.max_bound_ratio, lhs / bound);
    }
    res.fit = fit_decay_rate(res.series, t0, t1);
    return res;
}

std::vector<AnnulusDecay> regularity_loss_experiment(const ModelParams& params,
                                                     const std::vector<double>& radii,
                                                     const SpectralGrid& grid, double T_factor) {
    std::vector<AnnulusDecay> out;
    const double tau = params.tau(), gamma = params.gamma(), delta = params.delta();
    const double xi_max = kPi * grid.points() / grid.box_length();
    LinearPropagator prop(grid, params);
    for (double R : radii) {
        if (2.0 * R > xi_max) throw InvalidParameter("annulus exceeds the grid Nyquist frequency");
        const Field phi0 = synthesize_annulus(grid, R, 2.0 * R);
        const Field zero(grid);

        const double r_mid = std::sqrt(2.0) * R;
        const double kappa_pred = params.critical()
                                      ? gamma / (2.0 * tau * tau * r_mid * r_mid)
                                      : delta / (2.0 * tau * (delta + tau));
        const double te_pred = 1.0 / kappa_pred;
        // Skip the fast transient e^{-c t / tau}, then fit the slow tail.
        const double t_start = std::max(20.0 * tau, 0.05 * te_pred);
        const double t_end = t_start + T_factor * te_pred;

        TimeSeriesRecord series;
        series.id = "annulus_l2";
        for (int i = 0; i < 40; ++i) {
            const double t = t_start + (t_end - t_start) * i / 39.0;
            const LinearState st = prop.propagate(phi0, zero, zero, t);
            series.push(t, std::sqrt(l2_norm_squared(st.phi)));
        }
        std::vector<double> ly(series.values.size());
        for (std::size_t i = 0; i < ly.size(); ++i) ly[i] = std::log(series.values[i]);
        const LineFit f = least_squares(series.times, ly);
        const double kappa = -f.slope;
        out.push_back(AnnulusDecay{R, 1.0 / kappa, kappa,
                                   params.critical() ? gamma / (2.0 * tau * tau * R * R)
                                                     : kappa_pred});
    }
    return out;
}

TimeSeriesRecord subcritical_to_critical_convergence(const ModelParams& sub,
                                                     const ModelParams& crit, const Field& phi0,
                                                     const Field& phi1, const Field& phi2, int j,
                                                     double s, const std::vector<double>& times) {
    if (!(sub.tau() == crit.tau()) || !(sub.gamma() == crit.gamma()))
        throw InvalidParameter("convergence check requires identical tau and gamma");
    if (!crit.critical()) throw InvalidParameter("second parameter set must have delta = 0");
    const SpectralGrid& g = phi0.grid();
    LinearPropagator ps(g, sub), pc(g, crit);
    const int n = g.dim();
    TimeSeriesRecord rec;
    rec.id = "subcritical_to_critical";
    for (double t : times) {
        const LinearState a = ps.propagate(phi0, phi1, phi2, t);
        const LinearState b = pc.propagate(phi0, phi1, phi2, t);
        const Field* fa = j == 0 ? &a.phi : (j == 1 ? &a.phi_t : &a.phi_tt);
        const Field* fb = j == 0 ? &b.phi : (j == 1 ? &b.phi_t : &b.phi_tt);
        Field diff = *fa;
        diff -= *fb;
        const double w = std::pow(t, (n + 2.0 * s + 4.0 + 2.0 * j) / 4.0);
        rec.push(t, w * sobolev_norm(diff, NormSpec::hdot(s + 2.0 - j)));
    }
    return rec;
}

std::vector<double> geometric_times(double t0, double t1, int count) {
    if (!(0.0 < t0 && t0 < t1) || count < 2) throw InvalidParameter("bad time range");
    std::vector<double> out;
    const double r = std::pow(t1 / t0, 1.0 / (count - 1));
    double t = t0;
    for (int i = 0; i < count; ++i, t *= r) out.push_back(t);
    out.back() = t1;
    return out;
}

} // namespace mgt
