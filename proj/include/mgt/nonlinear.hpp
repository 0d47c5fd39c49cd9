#ifndef MGT_NONLINEAR_HPP
#define MGT_NONLINEAR_HPP

#include <functional>
#include <vector>

#include "mgt/linear.hpp"
#include "mgt/params.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

enum class NonlinearityKind { Kuznetsov, Westervelt };
const char* to_string(NonlinearityKind k);

struct NonlinearState {
    Field psi, psi_t, psi_tt;
    double t = 0.0;
};

// N(psi_t, grad psi) = (B/2A)|psi_t|^2 + |grad psi|^2 (Kuznetsov) or
// (1 + B/2A)|psi_t|^2 (Westervelt). Pointwise in physical space, 2/3-rule
// dealiasing applied to the product spectrum.
Field evaluate_nonlinearity(const Field& psi_t, const std::vector<Field>& grad_psi,
                            NonlinearityKind kind, double b_over_2a);

// d/dt N along the flow: (B/A) psi_t psi_tt + 2 grad psi . grad psi_t
// (Kuznetsov), 2 (1 + B/2A) psi_t psi_tt (Westervelt). Dealiased.
Field dt_nonlinearity(const NonlinearState& s, NonlinearityKind kind, double b_over_2a);

struct RhsResult {
    Field d_psi, d_psi_t, d_psi_tt;
};

// Time derivative of the state triple; psi_ttt is explicit because psi_tt is
// a state component.
RhsResult rhs(const NonlinearState& s, const ModelParams& params, NonlinearityKind kind);

struct Trajectory {
    std::vector<NonlinearState> samples; // uniform spacing sample_dt, first at t=0
    double dt = 0.0;                     // integration step used
    double sample_dt = 0.0;
    NonlinearityKind kind = NonlinearityKind::Kuznetsov;
};

struct IntegrateOptions {
    double dt = 0.01;
    int sample_stride = 1;          // store/observe every k-th step
    double blowup_guard = 1e6;      // times the initial data scale
    double nonlinearity_scale = 1.0; // 0 reduces exactly to the linear flow
    bool store_samples = true;
    std::function<void(const NonlinearState&)> observer; // optional
};

// Exponential time integrator: the linear part is advanced exactly per mode
// by the kernel matrix, the nonlinearity by classical RK4 on the
// integrating-factor system. Global order 4 in dt.
Trajectory integrate(const Field& psi0, const Field& psi1, const Field& psi2,
                     const ModelParams& params, NonlinearityKind kind, double T,
                     const IntegrateOptions& opts);

// M_{tau,gamma} = integral of
//   gamma psi0 + psi1 + tau psi2 - tau (B/2A)|psi1|^2 - tau |grad psi0|^2.
double moment_M(const Field& psi0, const Field& psi1, const Field& psi2,
                const ModelParams& params, NonlinearityKind kind = NonlinearityKind::Kuznetsov);

// (-Delta)^j profile with symbol |xi|^{2j} (1/gamma) e^{-|xi|^2 t/gamma} M.
Field nonlinear_profile(const SpectralGrid& grid, const ModelParams& params, double mass,
                        double t, int j);

struct DuhamelResult {
    Field psi, psi_t;
    Field psi_tt;    // via the split representation with boundary term at t/2
    Field psi_tt_cn; // via the direct representation carrying N(t)
};

// Mild-solution reconstruction at time T from a trajectory providing the
// nonlinearity at uniform quadrature nodes (composite Simpson; the node count
// minus one must be divisible by 4 so T/2 falls on a node).
DuhamelResult duhamel_mild_solution(const Field& psi0, const Field& psi1, const Field& psi2,
                                    const ModelParams& params, NonlinearityKind kind,
                                    const Trajectory& traj, double T);

// sup over samples, j in {0,1,2}, sigma in {j-2, s} of
//   (1+t)^{(n+2 sigma+4+2j)/4} ||d_t^j psi||_{Hdot^{sigma+2-j}}.
double solution_space_norm(const Trajectory& traj, double s);
double state_weighted_norm(const NonlinearState& s, int j, double sigma, double s_reg);

} // namespace mgt

#endif
