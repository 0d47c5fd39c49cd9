#ifndef MGT_CHARROOTS_HPP
#define MGT_CHARROOTS_HPP

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "mgt/params.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

enum class RootStructure { OneRealPlusConjugatePair, ThreeReal, NearDegenerate };
const char* to_string(RootStructure s);

// The three roots of tau l^3 + l^2 + (gamma + (delta+tau)|xi|^2) l + |xi|^2.
//
// lambda[0] is the branch through lambda(0) = 0: the unique real root in the
// conjugate-pair structure, otherwise the real root nearest -|xi|^2/b (the
// same branch at both frequency extremes). In the pair structure lambda[1]
// has positive imaginary part and lambda[2] = conj(lambda[1]) exactly; for
// three real roots lambda[1] >= lambda[2].
struct RootTriple {
    std::array<cplx, 3> lambda;
    RootStructure structure;
    double degeneracy_margin; // min pairwise root distance
    double xi_mag;

    cplx lambda1() const { return lambda[0]; }
    cplx lambda2() const { return lambda[1]; }
    cplx lambda3() const { return lambda[2]; }
    double max_abs() const;
};

struct DiscriminantReport {
    double xi_mag;
    double disc_std;           // standard cubic discriminant
    RootStructure sign_class;  // disc > 0: ThreeReal, disc < 0: pair
    // -3 gamma^2 (1 - 4 gamma tau) in the small zone, 12 tau (delta+tau)^3 |xi|^6
    // in the large zone; empty in the bounded zone. Note the sign convention of
    // this leading term is opposite to disc_std.
    std::optional<double> paper_leading_term;
};

RootTriple solve_characteristic(const ModelParams& params, double xi_mag);

DiscriminantReport discriminant(const ModelParams& params, double xi_mag,
                                const CutoffPartition& cutoffs = CutoffPartition());

// Leading-order small-frequency expansions (requires xi_mag <= eps0):
//   lambda1 = -|xi|^2/gamma
//   lambda_{2,3} = -1/(2 tau) +- i sqrt(4 gamma tau - 1)/(2 tau)   (oscillatory)
//   lambda_{2,3} = -1/(2 tau) +- sqrt(1 - 4 gamma tau)/(2 tau)     (overdamped)
RootTriple asymptotic_roots_small(const ModelParams& params, double xi_mag,
                                  const CutoffPartition& cutoffs = CutoffPartition());

// Large-frequency expansions (requires xi_mag >= n0 and delta >= 0):
//   delta > 0: lambda1 = -1/(delta+tau),
//              lambda_{2,3} = +-i sqrt(delta/tau+1)|xi| - delta/(2 tau (delta+tau))
//   delta = 0: lambda1 = -1/tau,
//              lambda_{2,3} = +-i(|xi| + gamma/(2 tau)|xi|^-1) - gamma/(2 tau^2)|xi|^-2
RootTriple asymptotic_roots_large(const ModelParams& params, double xi_mag,
                                  const CutoffPartition& cutoffs = CutoffPartition());

enum class ExpansionZone { Small, LargeSubCritical, LargeCritical };
enum class ExpansionBranch { Lambda1, PairRealPart, Pair };

struct OrderFit {
    double slope;        // fitted log-log convergence order of the remainder
    double rms_residual;
    int samples_used;
};

// Log-log regression of |exact - expansion| over a geometric frequency sample
// inside the zone. Samples at rounding level are dropped; FitUnstable when
// fewer than 10 survive.
OrderFit expansion_order_check(const ModelParams& params, ExpansionZone zone,
                               ExpansionBranch branch, double xi_lo, double xi_hi,
                               int count = 40);

struct AbscissaScan {
    double max_real;   // max over samples of max_j Re lambda_j
    double argmax_xi;
};

AbscissaScan spectral_abscissa_scan(const ModelParams& params,
                                    const std::vector<double>& xi_samples);

// Continuous branch tracking along an increasing frequency path. Branches are
// matched greedily between consecutive samples; when two roots approach
// within the degeneracy margin the path is flagged, not reordered.
struct RootPath {
    std::vector<double> xi;
    std::array<std::vector<cplx>, 3> branch;
    bool collision = false;
    std::vector<std::size_t> collision_at;
};

RootPath track_roots(const ModelParams& params, const std::vector<double>& xi_path);

// |p(lambda)| / max(1, tau |lambda|^3), the scaled residual of one root.
double scaled_residual(const ModelParams& params, double xi_mag, cplx root);

// Vieta defects (relative): sum, pairwise sum, product against the cubic
// coefficients. Used by property tests and the sweep CSV.
std::array<double, 3> vieta_defects(const ModelParams& params, const RootTriple& roots);

} // namespace mgt

#endif
