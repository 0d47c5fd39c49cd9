#ifndef MGT_LINEAR_HPP
#define MGT_LINEAR_HPP

#include <array>
#include <vector>

#include "mgt/charroots.hpp"
#include "mgt/params.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

// Values of the three solution kernels and their time derivatives at one
// (t, |xi|): d[l][j] = (d/dt)^j Khat_l(t, |xi|). All real.
//
// At t = 0 the triple matches the initial data: (Khat_0, Khat_1, Khat_2)
// and their first two derivatives reproduce the identity matrix, and each
// kernel solves the mode ODE
//   tau K''' + K'' + (gamma + (delta+tau)|xi|^2) K' + |xi|^2 K = 0.
struct KernelValues {
    std::array<std::array<double, 4>, 3> d;

    double k(int l, int j = 0) const { return d[l][j]; }
};

// Kernel evaluation dispatching on root structure: the conjugate-pair case
// uses the real trigonometric form, three real roots use the Lagrange form,
// near-degenerate triples fall back to confluent divided differences.
KernelValues kernel_values(const RootTriple& roots, double t);

// Mode-ODE residual of the stored derivative ladder, relative to the largest
// term; diagnostic for tests.
double kernel_ode_residual(const ModelParams& params, double xi_mag, const KernelValues& kv);

struct LinearState {
    Field phi, phi_t, phi_tt;
    double t = 0.0;
};

// Combined data Phi_0 = gamma phi0 + phi1 + tau phi2 and
// Phi_1 = (1/tau^2) phi0 + phi1.
struct CombinedData {
    Field phi0_comb;
    Field phi1_comb;
};

CombinedData combine_data(const Field& phi0, const Field& phi1, const Field& phi2,
                          const ModelParams& params);

// Exact per-mode evolution of the linear equation: roots are solved once per
// mode at construction, kernel values are evaluated per requested time.
// Rejects super-critical parameters (delta < 0 is analysis-only).
class LinearPropagator {
public:
    LinearPropagator(const SpectralGrid& grid, const ModelParams& params);

    const SpectralGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }

    LinearState propagate(const Field& phi0, const Field& phi1, const Field& phi2,
                          double t) const;

    // (d/dt)^j Khat_l(t) applied as a multiplier.
    Field apply_kernel(const Field& f, int l, int j, double t) const;

    const RootTriple& mode_roots(std::size_t flat) const { return roots_[flat]; }

private:
    SpectralGrid grid_;
    ModelParams params_;
    std::vector<RootTriple> roots_;
};

enum class ProfileForm { Multiplier, PointMass };

// Sub-critical diffusion profile for the j-th time derivative:
//   Multiplier form: |xi|^{2j} Ghat(t,|xi|) Phi0_hat(xi)
//   PointMass form:  |xi|^{2j} Ghat(t,|xi|) P_{Phi_0}
// with Ghat(t,|xi|) = (1/gamma) exp(-|xi|^2 t / gamma).
Field subcritical_profile(const Field& phi0, const Field& phi1, const Field& phi2,
                          const ModelParams& params, double t, int j,
                          ProfileForm form = ProfileForm::PointMass);

// Same profile driven by an explicit mass value (used for the nonlinear
// moment).
Field gaussian_profile_from_mass(const SpectralGrid& grid, double gamma, double mass,
                                 double t, int j);

// Critical-case two-zone profile:
//   chi_int |xi|^{2j} Ghat Phi0_hat
//   + chi_ext e^{-gamma/(2 tau^2) |xi|^{-2} t}
//       [d_t^j sin(|xi|t)/|xi| Phi1_hat - d_t^j cos(|xi|t)/|xi|^2 phi2_hat],
// where d_t^j acts on the sine/cosine factors only.
Field critical_profile(const Field& phi0, const Field& phi1, const Field& phi2,
                       const ModelParams& params, double t, int j,
                       const CutoffPartition& cutoffs = CutoffPartition());

enum class PointwiseEstimate { Es111, Es112, Es211, Es221, Es222, Es3 };

struct BoundCheckResult {
    double sup_ratio; // sup over samples of |LHS| / RHS
    double c_used;
};

// Empirical check of one pointwise kernel estimate over (t, |xi|) samples
// inside its zone, with uniform data amplitudes (a0, a1, a2). A c <= 0
// requests the default derived from computed root real parts at the zone
// edge. Throws ZoneViolation for samples outside the estimate's zone.
BoundCheckResult pointwise_bound_check(const ModelParams& params, PointwiseEstimate which,
                                       const std::vector<std::pair<double, double>>& t_xi_samples,
                                       const std::array<double, 3>& data_amps, int j,
                                       double c = 0.0,
                                       const CutoffPartition& cutoffs = CutoffPartition());

// E(t) = ||tau phi_tt + phi_t||^2_{L2} + ||tau grad phi_t + grad phi||^2_{L2}
//        + gamma tau ||phi_t||^2_{L2}
double critical_energy(const LinearState& s, const ModelParams& params);
double l2_norm_squared(const Field& f);

struct EnergyCheckResult {
    double max_residual;   // max |centered dE/dt + 2 gamma ||phi_t||^2| / max(E(0), eps)
    bool monotone;         // E nonincreasing at all samples (1e-12 relative slack)
    std::vector<double> energy;
};

// Requires the critical regime and a trajectory sampled at uniform dt.
EnergyCheckResult energy_dissipation_check(const std::vector<LinearState>& trajectory,
                                           const ModelParams& params);

} // namespace mgt

#endif
