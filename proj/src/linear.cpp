#include "mgt/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

// sin(x + j pi/2) and cos(x + j pi/2) for j in {0,..,3}.
inline double shifted_sin(double x, int j) {
    switch (j & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}
inline double shifted_cos(double x, int j) {
    switch (j & 3) {
        case 0: return std::cos(x);
        case 1: return -std::sin(x);
        case 2: return -std::cos(x);
        default: return std::sin(x);
    }
}

// First divided difference of exp(x t) over two nodes, stable for close nodes.
cplx dd1_exp(cplx u, cplx v, double t) {
    const cplx h = 0.5 * (u - v);
    const cplx m = 0.5 * (u + v);
    const cplx ht = h * t;
    if (std::abs(ht) < 1e-5) {
        const cplx ht2 = ht * ht;
        return std::exp(m * t) * t * (1.0 + ht2 / 6.0 + ht2 * ht2 / 120.0);
    }
    return std::exp(m * t) * std::sinh(ht) / h;
}

// Exact divided difference of x^p over two nodes: sum u^i v^{p-1-i}.
cplx dd1_pow(cplx u, cplx v, int p) {
    cplx acc = 0.0;
    cplx upow = 1.0;
    for (int i = 0; i < p; ++i) {
        cplx vpow = 1.0;
        for (int k = 0; k < p - 1 - i; ++k) vpow *= v;
        acc += upow * vpow;
        upow *= u;
    }
    return acc;
}

inline cplx gfun(cplx x, int p, double t) {
    cplx xp = 1.0;
    for (int i = 0; i < p; ++i) xp *= x;
    return xp * std::exp(x * t);
}

// dd over two nodes of x^p e^{xt}, via the product split
// dd[fg](u,v) = f(u) dd[g] + dd[f] g(v), exact in both factors.
cplx dd1_g(cplx u, cplx v, int p, double t) {
    cplx up = 1.0;
    for (int i = 0; i < p; ++i) up *= u;
    return up * dd1_exp(u, v, t) + dd1_pow(u, v, p) * std::exp(v * t);
}

// Second divided difference of x^p e^{xt} over (far, close1, close2).
cplx dd2_g(cplx far, cplx c1, cplx c2, int p, double t) {
    const cplx top = (gfun(far, p, t) - gfun(c1, p, t)) / (far - c1);
    const cplx bot = dd1_g(c1, c2, p, t);
    return (top - bot) / (far - c2);
}

// f''(x)/2 for f = x^p e^{xt}: used when all three roots nearly coincide.
cplx half_second_derivative_g(cplx x, int p, double t) {
    cplx xp2 = 1.0, xp1 = 1.0, xp = 1.0;
    for (int i = 0; i < p - 2; ++i) xp2 *= x;
    for (int i = 0; i < p - 1; ++i) xp1 *= x;
    for (int i = 0; i < p; ++i) xp *= x;
    cplx poly = t * t * xp;
    if (p >= 1) poly += 2.0 * t * static_cast<double>(p) * xp1;
    if (p >= 2) poly += static_cast<double>(p) * static_cast<double>(p - 1) * xp2;
    return 0.5 * poly * std::exp(x * t);
}

KernelValues kernels_pair(const RootTriple& roots, double t) {
    const double r1 = roots.lambda1().real();
    const double a = roots.lambda2().real();
    const double b = roots.lambda2().imag();
    const double D = (r1 - a) * (r1 - a) + b * b;

    // Coefficients of e^{r1 t}, cos(bt) e^{at}, sin(bt) e^{at} per kernel.
    const double A[3] = {(a * a + b * b) / D, -2.0 * a / D, 1.0 / D};
    const double B[3] = {(r1 - 2.0 * a) * r1 / D, 2.0 * a / D, -1.0 / D};
    const double C[3] = {(a * (a - r1) - b * b) * r1 / (b * D),
                         (r1 * r1 - a * a + b * b) / (b * D), (a - r1) / (b * D)};

    const double e1 = std::exp(r1 * t);
    const double ea = std::exp(a * t);
    const double cb = std::cos(b * t);
    const double sb = std::sin(b * t);

    KernelValues kv;
    for (int l = 0; l < 3; ++l) {
        // d/dt of e^{at}(B cos bt + C sin bt) shifts (B, C) -> (aB + bC, aC - bB)
        double Bj = B[l], Cj = C[l];
        double r1pow = 1.0;
        for (int j = 0; j < 4; ++j) {
            kv.d[l][j] = A[l] * r1pow * e1 + ea * (Bj * cb + Cj * sb);
            const double Bn = a * Bj + b * Cj;
            const double Cn = a * Cj - b * Bj;
            Bj = Bn;
            Cj = Cn;
            r1pow *= r1;
        }
    }
    return kv;
}

KernelValues kernels_three_real(const RootTriple& roots, double t) {
    const double l[3] = {roots.lambda[0].real(), roots.lambda[1].real(),
                         roots.lambda[2].real()};
    const double s1 = l[0] + l[1] + l[2];
    const double s2 = l[0] * l[1] + l[0] * l[2] + l[1] * l[2];

    KernelValues kv{};
    for (auto& row : kv.d) row.fill(0.0);
    for (int i = 0; i < 3; ++i) {
        double denom = 1.0;
        for (int k = 0; k < 3; ++k)
            if (k != i) denom *= l[i] - l[k];
        const double e = std::exp(l[i] * t) / denom;
        const double w0 = l[i] * l[i] - s1 * l[i] + s2; // product of the other two
        const double w1 = -(s1 - l[i]);                 // minus their sum
        double pw = 1.0;
        for (int j = 0; j < 4; ++j) {
            kv.d[0][j] += w0 * pw * e;
            kv.d[1][j] += w1 * pw * e;
            kv.d[2][j] += pw * e;
            pw *= l[i];
        }
    }
    return kv;
}

KernelValues kernels_confluent(const RootTriple& roots, double t) {
    // Order nodes so the closest pair sits together.
    const std::array<cplx, 3>& r = roots.lambda;
    const double d01 = std::abs(r[0] - r[1]);
    const double d02 = std::abs(r[0] - r[2]);
    const double d12 = std::abs(r[1] - r[2]);
    cplx far, c1, c2;
    if (d12 <= d01 && d12 <= d02) {
        far = r[0];
        c1 = r[1];
        c2 = r[2];
    } else if (d01 <= d02) {
        far = r[2];
        c1 = r[0];
        c2 = r[1];
    } else {
        far = r[1];
        c1 = r[0];
        c2 = r[2];
    }

    const cplx s1 = r[0] + r[1] + r[2];
    const cplx s2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
    const double scale = std::max(1.0, roots.max_abs());
    const bool all_close = std::abs(far - c1) < 1e-6 * scale;

    std::array<cplx, 6> dd;
    for (int p = 0; p < 6; ++p)
        dd[p] = all_close ? half_second_derivative_g((r[0] + r[1] + r[2]) / 3.0, p, t)
                          : dd2_g(far, c1, c2, p, t);

    KernelValues kv;
    for (int j = 0; j < 4; ++j) {
        const cplx k2 = dd[j];
        const cplx k1 = dd[j + 1] - s1 * dd[j];
        const cplx k0 = dd[j + 2] - s1 * dd[j + 1] + s2 * dd[j];
        const cplx vals[3] = {k0, k1, k2};
        for (int l = 0; l < 3; ++l) {
            const cplx v = vals[l];
            if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-6 * (std::abs(v.real()) + 1.0))
                throw DegenerateUnresolved("confluent kernel evaluation lost all significance");
            kv.d[l][j] = v.real();
        }
    }
    return kv;
}

} // namespace

KernelValues kernel_values(const RootTriple& roots, double t) {
    if (!(t >= 0.0)) throw InvalidParameter("kernel time must be >= 0");
    switch (roots.structure) {
        case RootStructure::OneRealPlusConjugatePair: return kernels_pair(roots, t);
        case RootStructure::ThreeReal: return kernels_three_real(roots, t);
        case RootStructure::NearDegenerate: return kernels_confluent(roots, t);
    }
    throw Error("unreachable");
}

double kernel_ode_residual(const ModelParams& params, double xi_mag, const KernelValues& kv) {
    const double tau = params.tau();
    const double b = params.coeff_b(xi_mag);
    const double c = params.coeff_c(xi_mag);
    double worst = 0.0;
    for (int l = 0; l < 3; ++l) {
        const double r = tau * kv.d[l][3] + kv.d[l][2] + b * kv.d[l][1] + c * kv.d[l][0];
        const double scale = std::max({std::abs(tau * kv.d[l][3]), std::abs(kv.d[l][2]),
                                       std::abs(b * kv.d[l][1]), std::abs(c * kv.d[l][0]), 1e-30});
        worst = std::max(worst, std::abs(r) / scale);
    }
    return worst;
}

CombinedData combine_data(const Field& phi0, const Field& phi1, const Field& phi2,
                          const ModelParams& params) {
    Field c0 = params.gamma() * Field(phi0);
    c0 += phi1;
    c0 += params.tau() * Field(phi2);
    Field c1 = (1.0 / (params.tau() * params.tau())) * Field(phi0);
    c1 += phi1;
    return CombinedData{std::move(c0), std::move(c1)};
}

LinearPropagator::LinearPropagator(const SpectralGrid& grid, const ModelParams& params)
    : grid_(grid), params_(params) {
    if (params.supercritical())
        throw InvalidParameter("propagation rejects the super-critical case (analysis only)");
    roots_.reserve(grid.total());
    for (std::size_t i = 0; i < grid.total(); ++i)
        roots_.push_back(solve_characteristic(params, std::sqrt(grid.xi_squared(i))));
}

LinearState LinearPropagator::propagate(const Field& phi0, const Field& phi1, const Field& phi2,
                                        double t) const {
    if (!(phi0.grid() == grid_) || !(phi1.grid() == grid_) || !(phi2.grid() == grid_))
        throw ShapeMismatch("data grids do not match the propagator grid");
    LinearState out{Field(grid_), Field(grid_), Field(grid_), t};
    for (std::size_t i = 0; i < grid_.total(); ++i) {
        const KernelValues kv = kernel_values(roots_[i], t);
        const cplx a0 = phi0.coeff(i), a1 = phi1.coeff(i), a2 = phi2.coeff(i);
        out.phi.coeff(i) = kv.d[0][0] * a0 + kv.d[1][0] * a1 + kv.d[2][0] * a2;
        out.phi_t.coeff(i) = kv.d[0][1] * a0 + kv.d[1][1] * a1 + kv.d[2][1] * a2;
        out.phi_tt.coeff(i) = kv.d[0][2] * a0 + kv.d[1][2] * a1 + kv.d[2][2] * a2;
    }
    return out;
}

Field LinearPropagator::apply_kernel(const Field& f, int l, int j, double t) const {
    if (!(f.grid() == grid_)) throw ShapeMismatch("field grid does not match propagator");
    if (l < 0 || l > 2 || j < 0 || j > 3) throw InvalidParameter("kernel index out of range");
    Field out(grid_);
    for (std::size_t i = 0; i < grid_.total(); ++i)
        out.coeff(i) = kernel_values(roots_[i], t).d[l][j] * f.coeff(i);
    return out;
}

Field subcritical_profile(const Field& phi0, const Field& phi1, const Field& phi2,
                          const ModelParams& params, double t, int j, ProfileForm form) {
    const double gamma = params.gamma();
    CombinedData cd = combine_data(phi0, phi1, phi2, params);
    if (form == ProfileForm::PointMass)
        return gaussian_profile_from_mass(phi0.grid(), gamma, moment(cd.phi0_comb), t, j);
    return apply_radial_multiplier(cd.phi0_comb, [gamma, t, j](double r) {
        return cplx(std::pow(r * r, j) * std::exp(-r * r * t / gamma) / gamma, 0.0);
    });
}

Field gaussian_profile_from_mass(const SpectralGrid& grid, double gamma, double mass, double t,
                                 int j) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.total(); ++i) {
        const double xi2 = grid.xi_squared(i);
        out.coeff(i) = mass * std::pow(xi2, j) * std::exp(-xi2 * t / gamma) / gamma;
    }
    return out;
}

Field critical_profile(const Field& phi0, const Field& phi1, const Field& phi2,
                       const ModelParams& params, double t, int j,
                       const CutoffPartition& cutoffs) {
    if (!params.critical()) throw InvalidParameter("critical profile requires delta = 0");
    const double gamma = params.gamma();
    const double tau = params.tau();
    const SpectralGrid& g = phi0.grid();
    CombinedData cd = combine_data(phi0, phi1, phi2, params);

    Field out(g);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const double r2 = g.xi_squared(i);
        const double r = std::sqrt(r2);
        cplx v = 0.0;
        const double ci = cutoffs.chi_int(r);
        if (ci > 0.0)
            v += ci * std::pow(r2, j) * std::exp(-r2 * t / gamma) / gamma * cd.phi0_comb.coeff(i);
        const double ce = cutoffs.chi_ext(r);
        if (ce > 0.0) {
            const double damp = std::exp(-gamma * t / (2.0 * tau * tau * r2));
            const double sj = std::pow(r, j - 1) * shifted_sin(r * t, j);
            const double cj = std::pow(r, j - 2) * shifted_cos(r * t, j);
            v += ce * damp * (sj * cd.phi1_comb.coeff(i) - cj * phi2.coeff(i));
        }
        out.coeff(i) = v;
    }
    return out;
}

namespace {

// Default free constant for a pointwise estimate: half the relevant decay
// rate measured from the roots at the zone edge.
double default_c(const ModelParams& params, PointwiseEstimate which,
                 const CutoffPartition& cutoffs) {
    switch (which) {
        case PointwiseEstimate::Es111:
        case PointwiseEstimate::Es112: {
            const RootTriple r = solve_characteristic(params, cutoffs.eps0());
            const double diff_rate = std::abs(r.lambda1().real()) / (cutoffs.eps0() * cutoffs.eps0());
            const double exp_rate = std::abs(r.lambda2().real());
            return 0.5 * std::min(diff_rate, exp_rate);
        }
        case PointwiseEstimate::Es211: {
            const RootTriple r = solve_characteristic(params, cutoffs.n0());
            return 0.5 * std::min(std::abs(r.lambda1().real()), std::abs(r.lambda2().real()));
        }
        case PointwiseEstimate::Es221:
        case PointwiseEstimate::Es222: {
            const RootTriple r = solve_characteristic(params, cutoffs.n0());
            return 0.5 * std::abs(r.lambda2().real()) * cutoffs.n0() * cutoffs.n0();
        }
        case PointwiseEstimate::Es3: {
            double worst = -std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 200; ++i) {
                const double xi = cutoffs.eps0() +
                                  (cutoffs.n0() - cutoffs.eps0()) * (static_cast<double>(i) / 200.0);
                const RootTriple r = solve_characteristic(params, xi);
                for (const auto& l : r.lambda) worst = std::max(worst, l.real());
            }
            return 0.5 * std::abs(worst);
        }
    }
    return 0.0;
}

} // namespace

BoundCheckResult pointwise_bound_check(const ModelParams& params, PointwiseEstimate which,
                                       const std::vector<std::pair<double, double>>& samples,
                                       const std::array<double, 3>& amps, int j, double c,
                                       const CutoffPartition& cutoffs) {
    if (j < 0 || j > 3) throw InvalidParameter("derivative order must be in {0,..,3}");
    if (c <= 0.0) c = default_c(params, which, cutoffs);

    const bool zone_int = which == PointwiseEstimate::Es111 || which == PointwiseEstimate::Es112;
    const bool zone_ext = which == PointwiseEstimate::Es211 || which == PointwiseEstimate::Es221 ||
                          which == PointwiseEstimate::Es222;
    if ((which == PointwiseEstimate::Es221 || which == PointwiseEstimate::Es222) &&
        !params.critical())
        throw InvalidParameter("estimate requires the critical regime");
    if (which == PointwiseEstimate::Es211 && !(params.delta() > 0.0))
        throw InvalidParameter("estimate requires delta > 0");

    const double gamma = params.gamma(), tau = params.tau();
    double sup = 0.0;
    for (const auto& [t, xi] : samples) {
        if (zone_int && xi > cutoffs.eps0()) throw ZoneViolation("sample above eps0");
        if (zone_ext && xi < cutoffs.n0()) throw ZoneViolation("sample below n0");
        if (which == PointwiseEstimate::Es3 && (xi < cutoffs.eps0() || xi > cutoffs.n0()))
            throw ZoneViolation("sample outside bounded zone");

        const RootTriple roots = solve_characteristic(params, xi);
        const KernelValues kv = kernel_values(roots, t);
        const double amp_sum = amps[0] + amps[1] + amps[2];
        const double dphi =
            kv.d[0][j] * amps[0] + kv.d[1][j] * amps[1] + kv.d[2][j] * amps[2];

        double lhs = 0.0, rhs = 1.0;
        switch (which) {
            case PointwiseEstimate::Es111:
                lhs = std::abs(dphi);
                rhs = (std::pow(xi * xi, j) * std::exp(-c * xi * xi * t) + std::exp(-c * t)) *
                      amp_sum;
                break;
            case PointwiseEstimate::Es112: {
                const double combined = gamma * amps[0] + amps[1] + tau * amps[2];
                const double gsym = std::exp(-xi * xi * t / gamma) / gamma;
                lhs = std::abs(dphi - std::pow(xi * xi, j) * gsym * combined);
                rhs = (std::pow(xi * xi, j + 1) * std::exp(-c * xi * xi * t) + std::exp(-c * t)) *
                      amp_sum;
                break;
            }
            case PointwiseEstimate::Es211:
            case PointwiseEstimate::Es221: {
                lhs = std::abs(dphi);
                const double decay = which == PointwiseEstimate::Es211
                                         ? std::exp(-c * t)
                                         : std::exp(-c * t / (xi * xi));
                rhs = decay * (std::pow(xi, std::max(j - 1, 0)) * amps[0] +
                               std::pow(xi, j - 1) * amps[1] + std::pow(xi, j - 2) * amps[2]);
                break;
            }
            case PointwiseEstimate::Es222: {
                const double damp = std::exp(-gamma * t / (2.0 * tau * tau * xi * xi));
                const double sj = std::pow(xi, j) * shifted_sin(xi * t, j) / xi;
                const double cj = std::pow(xi, j) * shifted_cos(xi * t, j) / (xi * xi);
                const double profile =
                    damp * (sj * (amps[0] / (tau * tau) + amps[1]) - cj * amps[2]);
                lhs = std::abs(dphi - profile);
                rhs = std::exp(-c * t / (xi * xi)) / xi *
                      (std::pow(xi, std::max(j - 1, 0)) * amps[0] + std::pow(xi, j - 1) * amps[1] +
                       std::pow(xi, j - 2) * amps[2]);
                break;
            }
            case PointwiseEstimate::Es3:
                lhs = std::abs(dphi);
                rhs = std::exp(-c * t) * amp_sum;
                break;
        }
        sup = std::max(sup, lhs / rhs);
    }
    return BoundCheckResult{sup, c};
}

double l2_norm_squared(const Field& f) {
    double vol = 1.0;
    for (int a = 0; a < f.grid().dim(); ++a) vol *= f.grid().box_length();
    double acc = 0.0;
    for (const auto& v : f.coeffs()) acc += std::norm(v);
    return acc / vol;
}

double critical_energy(const LinearState& s, const ModelParams& params) {
    const double tau = params.tau(), gamma = params.gamma();
    const SpectralGrid& g = s.phi.grid();
    double vol = 1.0;
    for (int a = 0; a < g.dim(); ++a) vol *= g.box_length();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
        const cplx u = s.phi.coeff(i), ut = s.phi_t.coeff(i), utt = s.phi_tt.coeff(i);
        const double xi2 = g.xi_squared(i);
        acc += std::norm(tau * utt + ut) + xi2 * std::norm(tau * ut + u) +
               gamma * tau * std::norm(ut);
    }
    return acc / vol;
}

EnergyCheckResult energy_dissipation_check(const std::vector<LinearState>& traj,
                                           const ModelParams& params) {
    if (!params.critical()) throw InvalidParameter("energy identity requires delta = 0");
    if (traj.size() < 3) throw InsufficientData("need at least 3 trajectory samples");
    const double dt = traj[1].t - traj[0].t;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (std::abs(traj[i].t - traj[i - 1].t - dt) > 1e-9 * std::max(1.0, dt))
            throw InvalidParameter("energy check requires uniform sampling");
    }
    EnergyCheckResult res;
    res.energy.reserve(traj.size());
    std::vector<double> dissip(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        res.energy.push_back(critical_energy(traj[i], params));
        dissip[i] = 2.0 * params.gamma() * l2_norm_squared(traj[i].phi_t);
    }
    const double scale = std::max(res.energy.front(), 1e-300);
    res.max_residual = 0.0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double d = (res.energy[i + 1] - res.energy[i - 1]) / (2.0 * dt);
        res.max_residual = std::max(res.max_residual, std::abs(d + dissip[i]) / scale);
    }
    res.monotone = true;
    for (std::size_t i = 1; i < res.energy.size(); ++i)
        if (res.energy[i] > res.energy[i - 1] * (1.0 + 1e-12)) res.monotone = false;
    return res;
}

} // namespace mgt
