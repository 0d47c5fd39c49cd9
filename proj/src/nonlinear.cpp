#include "mgt/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

// 2/3-rule mask: zero every mode with an axis mode number above N/3.
void dealias(Field& f) {
    const SpectralGrid& g = f.grid();
    const double cut = g.points() / 3.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
        auto idx = g.unflatten(i);
        for (int a = 0; a < g.dim(); ++a) {
            if (std::abs(g.mode_number(idx[a])) > cut) {
                f.coeff(i) = 0.0;
                break;
            }
        }
    }
}

Field product_field(const SpectralGrid& g, const std::vector<double>& a,
                    const std::vector<double>& b, double scale) {
    std::vector<double> prod(g.total());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = scale * a[i] * b[i];
    return Field::from_physical(g, prod);
}

} // namespace

const char* to_string(NonlinearityKind k) {
    return k == NonlinearityKind::Kuznetsov ? "kuznetsov" : "westervelt";
}

Field evaluate_nonlinearity(const Field& psi_t, const std::vector<Field>& grad_psi,
                            NonlinearityKind kind, double b_over_2a) {
    const SpectralGrid& g = psi_t.grid();
    auto pt = psi_t.to_physical();
    std::vector<double> prod(g.total(), 0.0);
    if (kind == NonlinearityKind::Westervelt) {
        const double coef = 1.0 + b_over_2a;
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = coef * pt[i] * pt[i];
    } else {
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = b_over_2a * pt[i] * pt[i];
        for (const Field& gp : grad_psi) {
            if (!(gp.grid() == g)) throw ShapeMismatch("gradient grid mismatch");
            auto gphys = gp.to_physical();
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += gphys[i] * gphys[i];
        }
    }
    Field out = Field::from_physical(g, prod);
    dealias(out);
    return out;
}

namespace {

Field dt_nonlinearity_fields(const Field& psi, const Field& psi_t, const Field& psi_tt,
                             NonlinearityKind kind, double b_over_2a) {
    const SpectralGrid& g = psi.grid();
    auto pt = psi_t.to_physical();
    auto ptt = psi_tt.to_physical();
    if (kind == NonlinearityKind::Westervelt) {
        Field out = product_field(g, pt, ptt, 2.0 * (1.0 + b_over_2a));
        dealias(out);
        return out;
    }
    std::vector<double> prod(g.total());
    const double ba = 2.0 * b_over_2a; // B/A
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = ba * pt[i] * ptt[i];
    for (int a = 0; a < g.dim(); ++a) {
        auto gp = derivative(psi, a).to_physical();
        auto gpt = derivative(psi_t, a).to_physical();
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += 2.0 * gp[i] * gpt[i];
    }
    Field out = Field::from_physical(g, prod);
    dealias(out);
    return out;
}

} // namespace

Field dt_nonlinearity(const NonlinearState& s, NonlinearityKind kind, double b_over_2a) {
    return dt_nonlinearity_fields(s.psi, s.psi_t, s.psi_tt, kind, b_over_2a);
}

RhsResult rhs(const NonlinearState& s, const ModelParams& params, NonlinearityKind kind) {
    const SpectralGrid& g = s.psi.grid();
    const double tau = params.tau(), gamma = params.gamma(), dpt = params.delta() + tau;
    Field f = dt_nonlinearity(s, kind, params.b_over_2a());
    RhsResult out{s.psi_t, s.psi_tt, Field(g)};
    for (std::size_t i = 0; i < g.total(); ++i) {
        const double xi2 = g.xi_squared(i);
        out.d_psi_tt.coeff(i) = (-s.psi_tt.coeff(i) - xi2 * s.psi.coeff(i) -
                                 dpt * xi2 * s.psi_t.coeff(i) - gamma * s.psi_t.coeff(i) +
                                 f.coeff(i)) /
                                tau;
    }
    return out;
}

namespace {

struct StepMatrices {
    std::vector<std::array<double, 9>> full;  // e^{A h}
    std::vector<std::array<double, 9>> half;  // e^{A h/2}
};

StepMatrices build_matrices(const LinearPropagator& prop, double h) {
    const SpectralGrid& g = prop.grid();
    StepMatrices m;
    m.full.resize(g.total());
    m.half.resize(g.total());
    for (std::size_t i = 0; i < g.total(); ++i) {
        const KernelValues kf = kernel_values(prop.mode_roots(i), h);
        const KernelValues kh = kernel_values(prop.mode_roots(i), 0.5 * h);
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                m.full[i][3 * j + l] = kf.d[l][j];
                m.half[i][3 * j + l] = kh.d[l][j];
            }
    }
    return m;
}

struct Triple {
    Field a, b, c;
    explicit Triple(const SpectralGrid& g) : a(g), b(g), c(g) {}
};

void apply_matrix(const std::vector<std::array<double, 9>>& m, const Field& u0, const Field& u1,
                  const Field& u2, Triple& out) {
    const std::size_t n = u0.coeffs().size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = m[i];
        const cplx a = u0.coeff(i), b = u1.coeff(i), c = u2.coeff(i);
        out.a.coeff(i) = e[0] * a + e[1] * b + e[2] * c;
        out.b.coeff(i) = e[3] * a + e[4] * b + e[5] * c;
        out.c.coeff(i) = e[6] * a + e[7] * b + e[8] * c;
    }
}

// out += scale * (third column of m) * f, i.e. the matrix applied to (0,0,f).
void add_column_apply(const std::vector<std::array<double, 9>>& m, const Field& f, double scale,
                      Triple& out) {
    const std::size_t n = f.coeffs().size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = m[i];
        const cplx v = scale * f.coeff(i);
        out.a.coeff(i) += e[2] * v;
        out.b.coeff(i) += e[5] * v;
        out.c.coeff(i) += e[8] * v;
    }
}

double data_scale(const Field& a, const Field& b, const Field& c) {
    return std::sqrt(l2_norm_squared(a) + l2_norm_squared(b) + l2_norm_squared(c));
}

} // namespace

Trajectory integrate(const Field& psi0, const Field& psi1, const Field& psi2,
                     const ModelParams& params, NonlinearityKind kind, double T,
                     const IntegrateOptions& opts) {
    if (!(opts.dt > 0.0) || !(T >= 0.0)) throw InvalidParameter("integrate requires dt > 0, T >= 0");
    if (opts.sample_stride < 1) throw InvalidParameter("sample_stride must be >= 1");
    const SpectralGrid& g = psi0.grid();
    const long n_steps = std::max(1L, std::lround(T / opts.dt));
    if (opts.store_samples && n_steps % opts.sample_stride != 0)
        throw InvalidParameter("sample_stride must divide the step count for uniform samples");
    const double h = T / static_cast<double>(n_steps);
    const double tau = params.tau();
    const double b2a = params.b_over_2a();
    const double nl_scale = opts.nonlinearity_scale / tau;

    if (no_wrap_budget(g, params.tau(), params.delta(), params.gamma(), T) > 1.0)
        std::fputs("warning: no-wrap budget exceeded; decay tails may wrap the box\n", stderr);

    LinearPropagator prop(g, params); // also rejects delta < 0
    StepMatrices mats = build_matrices(prop, h);

    Trajectory traj;
    traj.dt = h;
    traj.sample_dt = h * opts.sample_stride;
    traj.kind = kind;

    NonlinearState state{psi0, psi1, psi2, 0.0};
    const double guard = opts.blowup_guard * (data_scale(psi0, psi1, psi2) + 1e-300);

    auto emit = [&](const NonlinearState& s) {
        if (opts.store_samples) traj.samples.push_back(s);
        if (opts.observer) opts.observer(s);
    };
    emit(state);

    Triple eu(g), e2u(g), stage(g);
    auto nl = [&](const Field& u0, const Field& u1, const Field& u2) {
        Field f = dt_nonlinearity_fields(u0, u1, u2, kind, b2a);
        f *= nl_scale;
        return f;
    };

    for (long k = 1; k <= n_steps; ++k) {
        if (opts.nonlinearity_scale == 0.0) {
            apply_matrix(mats.full, state.psi, state.psi_t, state.psi_tt, eu);
            state.psi = eu.a;
            state.psi_t = eu.b;
            state.psi_tt = eu.c;
        } else {
            const Field f1 = nl(state.psi, state.psi_t, state.psi_tt);
            apply_matrix(mats.full, state.psi, state.psi_t, state.psi_tt, eu);
            apply_matrix(mats.half, state.psi, state.psi_t, state.psi_tt, e2u);

            stage = e2u;
            add_column_apply(mats.half, f1, 0.5 * h, stage);
            const Field f2 = nl(stage.a, stage.b, stage.c);

            stage = e2u;
            for (std::size_t i = 0; i < g.total(); ++i) stage.c.coeff(i) += 0.5 * h * f2.coeff(i);
            const Field f3 = nl(stage.a, stage.b, stage.c);

            stage = eu;
            add_column_apply(mats.half, f3, h, stage);
            const Field f4 = nl(stage.a, stage.b, stage.c);

            add_column_apply(mats.full, f1, h / 6.0, eu);
            add_column_apply(mats.half, f2, 2.0 * h / 6.0, eu);
            add_column_apply(mats.half, f3, 2.0 * h / 6.0, eu);
            for (std::size_t i = 0; i < g.total(); ++i)
                eu.c.coeff(i) += (h / 6.0) * f4.coeff(i);

            state.psi = eu.a;
            state.psi_t = eu.b;
            state.psi_tt = eu.c;
        }
        state.t = h * static_cast<double>(k);

        if (std::sqrt(l2_norm_squared(state.psi_t)) > guard) {
            std::ostringstream os;
            os << "norm guard tripped at t=" << state.t << " (left the small-data regime)";
            throw BlowUpDetected(os.str());
        }
        if (k % opts.sample_stride == 0 || k == n_steps) emit(state);
    }
    return traj;
}

double moment_M(const Field& psi0, const Field& psi1, const Field& psi2,
                const ModelParams& params, NonlinearityKind kind) {
    CombinedData cd = combine_data(psi0, psi1, psi2, params);
    std::vector<Field> grad;
    for (int a = 0; a < psi0.grid().dim(); ++a) grad.push_back(derivative(psi0, a));
    Field n_data = evaluate_nonlinearity(psi1, grad, kind, params.b_over_2a());
    return moment(cd.phi0_comb) - params.tau() * moment(n_data);
}

Field nonlinear_profile(const SpectralGrid& grid, const ModelParams& params, double mass,
                        double t, int j) {
    return gaussian_profile_from_mass(grid, params.gamma(), mass, t, j);
}

namespace {

std::vector<double> simpson_weights(std::size_t count, double dt) {
    // count nodes spanning an even number of intervals
    std::vector<double> w(count, 0.0);
    for (std::size_t i = 0; i + 2 < count; i += 2) {
        w[i] += dt / 3.0;
        w[i + 1] += 4.0 * dt / 3.0;
        w[i + 2] += dt / 3.0;
    }
    return w;
}

} // namespace

DuhamelResult duhamel_mild_solution(const Field& psi0, const Field& psi1, const Field& psi2,
                                    const ModelParams& params, NonlinearityKind kind,
                                    const Trajectory& traj, double T) {
    const SpectralGrid& g = psi0.grid();
    const std::size_t count = traj.samples.size();
    if (count < 5 || (count - 1) % 4 != 0)
        throw MissingTrajectory("need 4k+1 uniform samples covering [0, T]");
    const double dt = traj.sample_dt;
    if (std::abs(traj.samples.back().t - T) > 1e-9 * std::max(1.0, T) ||
        std::abs(dt * static_cast<double>(count - 1) - T) > 1e-9 * std::max(1.0, T))
        throw MissingTrajectory("trajectory does not cover [0, T] uniformly");

    LinearPropagator prop(g, params);
    const double b2a = params.b_over_2a();

    // Nonlinearity of the initial data.
    std::vector<Field> grad0;
    for (int a = 0; a < g.dim(); ++a) grad0.push_back(derivative(psi0, a));
    const Field n_data = evaluate_nonlinearity(psi1, grad0, kind, b2a);

    const std::size_t mid = (count - 1) / 2;
    const auto w_full = simpson_weights(count, dt);
    const auto w_head = simpson_weights(mid + 1, dt);        // [0, T/2]
    const auto w_tail = simpson_weights(count - mid, dt);    // [T/2, T]

    Field acc_j0(g), acc_j1(g), acc_cn(g), acc_head(g), acc_tail(g);
    Field n_mid(g);
    for (std::size_t i = 0; i < count; ++i) {
        const NonlinearState& s = traj.samples[i];
        std::vector<Field> grad;
        for (int a = 0; a < g.dim(); ++a) grad.push_back(derivative(s.psi, a));
        const Field n_eta = evaluate_nonlinearity(s.psi_t, grad, kind, b2a);
        if (i == mid) n_mid = n_eta;

        const double back = T - s.t;
        const Field dtn_eta =
            (i >= mid) ? dt_nonlinearity(s, kind, b2a) : Field(g);

        for (std::size_t m = 0; m < g.total(); ++m) {
            const KernelValues kv = kernel_values(prop.mode_roots(m), back);
            const cplx nv = n_eta.coeff(m);
            acc_j0.coeff(m) += w_full[i] * kv.d[2][1] * nv;
            acc_j1.coeff(m) += w_full[i] * kv.d[2][2] * nv;
            acc_cn.coeff(m) += w_full[i] * kv.d[2][3] * nv;
            if (i <= mid) acc_head.coeff(m) += w_head[i] * kv.d[2][3] * nv;
            if (i >= mid) acc_tail.coeff(m) += w_tail[i - mid] * kv.d[2][2] * dtn_eta.coeff(m);
        }
    }

    const LinearState lin = prop.propagate(psi0, psi1, psi2, T);
    const Field bk0 = prop.apply_kernel(n_data, 2, 0, T);
    const Field bk1 = prop.apply_kernel(n_data, 2, 1, T);
    const Field bk2 = prop.apply_kernel(n_data, 2, 2, T);
    const Field mid_bk = prop.apply_kernel(n_mid, 2, 2, 0.5 * T);

    DuhamelResult out{lin.phi, lin.phi_t, lin.phi_tt, lin.phi_tt};
    out.psi -= bk0;
    out.psi += acc_j0;
    out.psi_t -= bk1;
    out.psi_t += acc_j1;

    // Split representation: boundary term at t/2 plus the two half-range
    // integrals, the second against d_t N.
    out.psi_tt -= bk2;
    out.psi_tt += mid_bk;
    out.psi_tt += acc_head;
    out.psi_tt += acc_tail;

    // Direct representation keeps N(t) itself.
    const NonlinearState& last = traj.samples.back();
    std::vector<Field> gradT;
    for (int a = 0; a < g.dim(); ++a) gradT.push_back(derivative(last.psi, a));
    out.psi_tt_cn += evaluate_nonlinearity(last.psi_t, gradT, kind, b2a);
    out.psi_tt_cn -= bk2;
    out.psi_tt_cn += acc_cn;

    return out;
}

double state_weighted_norm(const NonlinearState& s, int j, double sigma, double) {
    const Field* f = j == 0 ? &s.psi : (j == 1 ? &s.psi_t : &s.psi_tt);
    const int n = s.psi.grid().dim();
    const double w = std::pow(1.0 + s.t, (n + 2.0 * sigma + 4.0 + 2.0 * j) / 4.0);
    return w * sobolev_norm(*f, NormSpec::hdot(sigma + 2.0 - j));
}

double solution_space_norm(const Trajectory& traj, double s) {
    double sup = 0.0;
    for (const auto& st : traj.samples) {
        for (int j = 0; j <= 2; ++j) {
            for (double sigma : {static_cast<double>(j) - 2.0, s}) {
                sup = std::max(sup, state_weighted_norm(st, j, sigma, s));
            }
        }
    }
    return sup;
}

} // namespace mgt
