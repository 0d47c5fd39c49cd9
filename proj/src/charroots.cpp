#include "mgt/charroots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Horner evaluation of tau l^3 + l^2 + b l + c and its derivative.
inline cplx eval_p(double tau, double b, double c, cplx l) {
    return ((tau * l + 1.0) * l + b) * l + c;
}
inline cplx eval_dp(double tau, double b, cplx l) {
    return (3.0 * tau * l + 2.0) * l + b;
}

// A few Newton steps on the original (unnormalized) cubic. The step is capped
// by `guard` to keep the iterate on its own branch near coalescing roots.
cplx polish(double tau, double b, double c, cplx l, double guard) {
    for (int it = 0; it < 12; ++it) {
        const cplx dp = eval_dp(tau, b, l);
        if (dp == cplx(0.0, 0.0)) break;
        cplx step = eval_p(tau, b, c, l) / dp;
        if (std::abs(step) > guard) break;
        l -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(l) + 1e-300))
            break;
    }
    return l;
}

double real_polish(double tau, double b, double c, double l, double guard) {
    for (int it = 0; it < 12; ++it) {
        const double dp = (3.0 * tau * l + 2.0) * l + b;
        if (dp == 0.0) break;
        const double step = (((tau * l + 1.0) * l + b) * l + c) / dp;
        if (std::abs(step) > guard) break;
        l -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(l) + 1e-300))
            break;
    }
    return l;
}

double min_pairwise_distance(const std::array<cplx, 3>& r) {
    return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]), std::abs(r[1] - r[2])});
}

double std_discriminant(double a, double b, double c, double d) {
    return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
           27.0 * a * a * d * d;
}

} // namespace

const char* to_string(RootStructure s) {
    switch (s) {
        case RootStructure::OneRealPlusConjugatePair: return "OneRealPlusConjugatePair";
        case RootStructure::ThreeReal: return "ThreeReal";
        case RootStructure::NearDegenerate: return "NearDegenerate";
    }
    return "?";
}

double RootTriple::max_abs() const {
    return std::max({std::abs(lambda[0]), std::abs(lambda[1]), std::abs(lambda[2])});
}

RootTriple solve_characteristic(const ModelParams& params, double xi_mag) {
    if (!(xi_mag >= 0.0)) throw InvalidParameter("xi_mag must be >= 0");
    const double tau = params.tau();
    const double b = params.coeff_b(xi_mag);
    const double c = params.coeff_c(xi_mag);

    RootTriple out;
    out.xi_mag = xi_mag;

    if (xi_mag == 0.0) {
        // The cubic factors as l (tau l^2 + l + gamma) = 0.
        const double gamma = params.gamma();
        const double disc_q = 1.0 - 4.0 * gamma * tau;
        out.lambda[0] = 0.0;
        if (disc_q < 0.0) {
            const double re = -0.5 / tau;
            const double im = std::sqrt(-disc_q) / (2.0 * tau);
            out.lambda[1] = cplx(re, im);
            out.lambda[2] = cplx(re, -im);
            out.structure = RootStructure::OneRealPlusConjugatePair;
        } else {
            // Stable quadratic roots without cancellation.
            const double q = -0.5 * (1.0 + std::sqrt(disc_q));
            const double r1 = q / tau;
            const double r2 = gamma / q;
            out.lambda[1] = std::max(r1, r2);
            out.lambda[2] = std::min(r1, r2);
            out.structure = RootStructure::ThreeReal;
        }
        out.degeneracy_margin = min_pairwise_distance(out.lambda);
        if (out.degeneracy_margin < 1e-6 * out.max_abs())
            out.structure = RootStructure::NearDegenerate;
        return out;
    }

    // Monic form l^3 + A l^2 + B l + C, depressed via l = y - A/3.
    const double A = 1.0 / tau;
    const double B = b / tau;
    const double C = c / tau;
    const double shift = A / 3.0;
    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const double disc = std_discriminant(tau, 1.0, b, c);

    std::array<cplx, 3> roots;
    bool pair;
    if (disc > 0.0) {
        // Three distinct real roots; trigonometric form.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots[k] = m * std::cos((theta - 2.0 * kPi * k) / 3.0) - shift;
        pair = false;
    } else {
        // One real root plus a conjugate pair; Cardano with the stable branch.
        const double rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u3 = (q >= 0.0) ? (-q / 2.0 - rad) : (-q / 2.0 + rad);
        const double u = std::cbrt(u3);
        const double v = (u == 0.0) ? 0.0 : -p / (3.0 * u);
        const double y1 = u + v;
        roots[0] = y1 - shift;
        const double re = -0.5 * y1 - shift;
        const double im = 0.5 * std::sqrt(3.0) * std::abs(u - v);
        roots[1] = cplx(re, im);
        roots[2] = cplx(re, -im);
        pair = true;
    }

    // Newton polish on the original coefficients, step-capped at half the
    // closest seed separation.
    const double guard = 0.5 * std::max(min_pairwise_distance(roots),
                                        1e-12 * std::abs(roots[0]));
    if (pair) {
        const double l1 = real_polish(tau, b, c, roots[0].real(), guard);
        cplx l2 = polish(tau, b, c, roots[1], guard);
        out.lambda[0] = l1;
        out.lambda[1] = cplx(l2.real(), std::abs(l2.imag()));
        out.lambda[2] = std::conj(out.lambda[1]);
        out.structure = RootStructure::OneRealPlusConjugatePair;
    } else {
        std::array<double, 3> re;
        for (int k = 0; k < 3; ++k) re[k] = real_polish(tau, b, c, roots[k].real(), guard);
        // lambda1: the branch through 0, i.e. nearest to -c/b at both extremes.
        const double anchor = -c / b;
        int i1 = 0;
        for (int k = 1; k < 3; ++k)
            if (std::abs(re[k] - anchor) < std::abs(re[i1] - anchor)) i1 = k;
        std::array<double, 2> rest;
        int w = 0;
        for (int k = 0; k < 3; ++k)
            if (k != i1) rest[w++] = re[k];
        out.lambda[0] = re[i1];
        out.lambda[1] = std::max(rest[0], rest[1]);
        out.lambda[2] = std::min(rest[0], rest[1]);
        out.structure = RootStructure::ThreeReal;
    }

    out.degeneracy_margin = min_pairwise_distance(out.lambda);
    if (out.degeneracy_margin < 1e-6 * out.max_abs())
        out.structure = RootStructure::NearDegenerate;

    for (const auto& l : out.lambda) {
        if (scaled_residual(params, xi_mag, l) > 1e-10) {
            std::ostringstream os;
            os << "root refinement failed at |xi|=" << xi_mag;
            throw NonConvergence(os.str());
        }
    }
    return out;
}

DiscriminantReport discriminant(const ModelParams& params, double xi_mag,
                                const CutoffPartition& cutoffs) {
    DiscriminantReport rep;
    rep.xi_mag = xi_mag;
    rep.disc_std = std_discriminant(params.tau(), 1.0, params.coeff_b(xi_mag),
                                    params.coeff_c(xi_mag));
    if (rep.disc_std > 0.0)
        rep.sign_class = RootStructure::ThreeReal;
    else if (rep.disc_std < 0.0)
        rep.sign_class = RootStructure::OneRealPlusConjugatePair;
    else
        rep.sign_class = RootStructure::NearDegenerate;

    const double g = params.gamma(), t = params.tau(), d = params.delta();
    if (xi_mag <= cutoffs.eps0())
        rep.paper_leading_term = -3.0 * g * g * (1.0 - 4.0 * g * t);
    else if (xi_mag >= cutoffs.n0())
        rep.paper_leading_term = 12.0 * t * std::pow(d + t, 3) * std::pow(xi_mag, 6);
    return rep;
}

RootTriple asymptotic_roots_small(const ModelParams& params, double xi_mag,
                                  const CutoffPartition& cutoffs) {
    if (xi_mag > cutoffs.eps0()) throw WrongZone("small-frequency expansion outside zone");
    const double tau = params.tau(), gamma = params.gamma();
    RootTriple out;
    out.xi_mag = xi_mag;
    out.lambda[0] = -xi_mag * xi_mag / gamma;
    const double disc_q = 4.0 * gamma * tau - 1.0;
    if (disc_q > 0.0) {
        out.lambda[1] = cplx(-0.5 / tau, std::sqrt(disc_q) / (2.0 * tau));
        out.lambda[2] = std::conj(out.lambda[1]);
        out.structure = RootStructure::OneRealPlusConjugatePair;
    } else {
        const double spread = std::sqrt(-disc_q) / (2.0 * tau);
        out.lambda[1] = -0.5 / tau + spread;
        out.lambda[2] = -0.5 / tau - spread;
        out.structure = RootStructure::ThreeReal;
    }
    out.degeneracy_margin = min_pairwise_distance(out.lambda);
    return out;
}

RootTriple asymptotic_roots_large(const ModelParams& params, double xi_mag,
                                  const CutoffPartition& cutoffs) {
    if (xi_mag < cutoffs.n0()) throw WrongZone("large-frequency expansion outside zone");
    const double tau = params.tau(), delta = params.delta(), gamma = params.gamma();
    if (delta < 0.0) throw InvalidParameter("large-frequency expansion requires delta >= 0");
    RootTriple out;
    out.xi_mag = xi_mag;
    out.structure = RootStructure::OneRealPlusConjugatePair;
    if (delta > 0.0) {
        out.lambda[0] = -1.0 / (delta + tau);
        const double re = -delta / (2.0 * tau * (delta + tau));
        const double im = std::sqrt(delta / tau + 1.0) * xi_mag;
        out.lambda[1] = cplx(re, im);
    } else {
        out.lambda[0] = -1.0 / tau;
        const double re = -gamma / (2.0 * tau * tau) / (xi_mag * xi_mag);
        const double im = xi_mag + gamma / (2.0 * tau) / xi_mag;
        out.lambda[1] = cplx(re, im);
    }
    out.lambda[2] = std::conj(out.lambda[1]);
    out.degeneracy_margin = min_pairwise_distance(out.lambda);
    return out;
}

OrderFit expansion_order_check(const ModelParams& params, ExpansionZone zone,
                               ExpansionBranch branch, double xi_lo, double xi_hi, int count) {
    if (!(0.0 < xi_lo && xi_lo < xi_hi)) throw InvalidParameter("bad frequency range");
    if (count < 10) throw InsufficientData("need at least 10 samples");

    std::vector<double> lx, ly;
    const double ratio = std::pow(xi_hi / xi_lo, 1.0 / (count - 1));
    double xi = xi_lo;
    for (int i = 0; i < count; ++i, xi *= ratio) {
        const RootTriple exact = solve_characteristic(params, xi);
        RootTriple approx;
        switch (zone) {
            case ExpansionZone::Small: approx = asymptotic_roots_small(params, xi); break;
            case ExpansionZone::LargeSubCritical:
            case ExpansionZone::LargeCritical:
                approx = asymptotic_roots_large(params, xi);
                break;
        }
        double err = 0.0, scale = 1.0;
        switch (branch) {
            case ExpansionBranch::Lambda1:
                err = std::abs(exact.lambda1() - approx.lambda1());
                scale = std::max(1.0, std::abs(exact.lambda1()));
                break;
            case ExpansionBranch::PairRealPart:
                err = std::abs(exact.lambda2().real() - approx.lambda2().real());
                scale = std::max(1.0, std::abs(exact.lambda2()));
                break;
            case ExpansionBranch::Pair:
                err = std::abs(exact.lambda2() - approx.lambda2());
                scale = std::max(1.0, std::abs(exact.lambda2()));
                break;
        }
        if (err < 1e-13 * scale) continue; // at rounding level
        lx.push_back(std::log(xi));
        ly.push_back(std::log(err));
    }
    if (lx.size() < 10)
        throw FitUnstable("expansion remainder at rounding level over most of the zone");

    const std::size_t m = lx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - icept - slope * lx[i];
        rss += r * r;
    }
    return OrderFit{slope, std::sqrt(rss / m), static_cast<int>(m)};
}

AbscissaScan spectral_abscissa_scan(const ModelParams& params,
                                    const std::vector<double>& xi_samples) {
    AbscissaScan scan{-std::numeric_limits<double>::infinity(), 0.0};
    for (double xi : xi_samples) {
        const RootTriple r = solve_characteristic(params, xi);
        for (const auto& l : r.lambda) {
            if (l.real() > scan.max_real) {
                scan.max_real = l.real();
                scan.argmax_xi = xi;
            }
        }
    }
    return scan;
}

RootPath track_roots(const ModelParams& params, const std::vector<double>& xi_path) {
    if (xi_path.empty()) throw InvalidParameter("empty frequency path");
    if (!std::is_sorted(xi_path.begin(), xi_path.end()))
        throw InvalidParameter("frequency path must be sorted");

    RootPath path;
    path.xi = xi_path;
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

    std::array<cplx, 3> prev{};
    for (std::size_t i = 0; i < xi_path.size(); ++i) {
        const RootTriple r = solve_characteristic(params, xi_path[i]);
        std::array<cplx, 3> cur = r.lambda;
        if (i > 0) {
            // Greedy matching: the permutation minimizing total displacement.
            int best = 0;
            double best_cost = std::numeric_limits<double>::infinity();
            for (int p = 0; p < 6; ++p) {
                double cost = 0.0;
                for (int k = 0; k < 3; ++k) cost += std::abs(cur[perms[p][k]] - prev[k]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = p;
                }
            }
            std::array<cplx, 3> matched;
            for (int k = 0; k < 3; ++k) matched[k] = cur[perms[best][k]];
            cur = matched;
        }
        if (r.degeneracy_margin < 1e-6 * r.max_abs()) {
            path.collision = true;
            path.collision_at.push_back(i);
        }
        for (int k = 0; k < 3; ++k) path.branch[k].push_back(cur[k]);
        prev = cur;
    }
    return path;
}

double scaled_residual(const ModelParams& params, double xi_mag, cplx root) {
    const double tau = params.tau();
    const cplx p = eval_p(tau, params.coeff_b(xi_mag), params.coeff_c(xi_mag), root);
    const double mag = std::abs(root);
    return std::abs(p) / std::max(1.0, tau * mag * mag * mag);
}

std::array<double, 3> vieta_defects(const ModelParams& params, const RootTriple& r) {
    const double tau = params.tau();
    const double b = params.coeff_b(r.xi_mag);
    const double c = params.coeff_c(r.xi_mag);
    const cplx s1 = r.lambda[0] + r.lambda[1] + r.lambda[2];
    const cplx s2 = r.lambda[0] * r.lambda[1] + r.lambda[0] * r.lambda[2] +
                    r.lambda[1] * r.lambda[2];
    const cplx s3 = r.lambda[0] * r.lambda[1] * r.lambda[2];
    const double e1 = std::abs(s1 + 1.0 / tau) / std::max(1.0, std::abs(s1));
    const double e2 = std::abs(s2 - b / tau) / std::max(1.0, std::abs(s2));
    const double e3 = std::abs(s3 + c / tau) / std::max(1.0, std::abs(s3));
    return {e1, e2, e3};
}

} // namespace mgt
