#ifndef MGT_PARAMS_HPP
#define MGT_PARAMS_HPP

#include <string>

namespace mgt {

enum class DeltaRegime { SubCritical, Critical, SuperCritical };
enum class GammaRegime { Oscillatory, Overdamped };

// Regime classification of the (tau, delta, gamma) parameter point.
//
// delta_regime follows the sign of delta; gamma_regime follows the sign of
// gamma - 1/(4 tau) (the value gamma = 1/(4 tau) itself is rejected at
// construction of ModelParams).
struct RegimeTag {
    DeltaRegime delta_regime;
    GammaRegime gamma_regime;
};

const char* to_string(DeltaRegime r);
const char* to_string(GammaRegime r);

// Raw, unvalidated parameter record as read from configuration.
struct RawParams {
    double tau = 1.0;        // thermal relaxation, > 0
    double delta = 1.0;      // diffusivity of sound; < 0 only for instability scans
    double gamma = 1.0;      // weak attenuation coefficient, > 0
    double b_over_2a = 0.5;  // nonlinearity ratio B/(2A), > 0
    bool allow_supercritical = false;
};

// Validated physical parameters. Immutable after construction and safe to
// share across workers.
class ModelParams {
public:
    // Validates and classifies; throws InvalidParameter naming the violated
    // constraint. gamma within relative tolerance 1e-9 of 1/(4 tau) is
    // rejected. delta < 0 requires raw.allow_supercritical.
    static ModelParams validate(const RawParams& raw);

    double tau() const { return tau_; }
    double delta() const { return delta_; }
    double gamma() const { return gamma_; }
    double b_over_2a() const { return b_over_2a_; }
    const RegimeTag& regime() const { return regime_; }

    bool supercritical() const { return regime_.delta_regime == DeltaRegime::SuperCritical; }
    bool critical() const { return regime_.delta_regime == DeltaRegime::Critical; }

    // Cubic coefficients at frequency magnitude |xi|:
    //   tau*l^3 + l^2 + (gamma + (delta+tau)|xi|^2)*l + |xi|^2 = 0
    double coeff_b(double xi_mag) const { return gamma_ + (delta_ + tau_) * xi_mag * xi_mag; }
    double coeff_c(double xi_mag) const { return xi_mag * xi_mag; }

private:
    ModelParams(double tau, double delta, double gamma, double b2a, RegimeTag tag)
        : tau_(tau), delta_(delta), gamma_(gamma), b_over_2a_(b2a), regime_(tag) {}

    double tau_, delta_, gamma_, b_over_2a_;
    RegimeTag regime_;
};

// Pure classification of an admissible parameter point (no validation).
RegimeTag classify_regime(double tau, double delta, double gamma);

// Smooth three-zone partition of the frequency axis:
//   chi_int = 1 on [0, eps0/2], 0 on [eps0, inf)
//   chi_ext = 0 on [0, n0],     1 on [2 n0, inf)
//   chi_bdd = 1 - chi_int - chi_ext   (support in [eps0/2, 2 n0])
// Transitions use a C-infinity step, so the three functions sum to 1 exactly.
class CutoffPartition {
public:
    CutoffPartition(double eps0 = 0.5, double n0 = 4.0);

    double eps0() const { return eps0_; }
    double n0() const { return n0_; }

    double chi_int(double r) const;
    double chi_ext(double r) const;
    double chi_bdd(double r) const { return 1.0 - chi_int(r) - chi_ext(r); }

private:
    double eps0_, n0_;
};

} // namespace mgt

#endif
