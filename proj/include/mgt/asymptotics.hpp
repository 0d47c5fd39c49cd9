#ifndef MGT_ASYMPTOTICS_HPP
#define MGT_ASYMPTOTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "mgt/linear.hpp"
#include "mgt/params.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

struct TimeSeriesRecord {
    std::vector<double> times;  // strictly increasing
    std::vector<double> values;
    std::string id;

    void push(double t, double v) {
        times.push_back(t);
        values.push_back(v);
    }
    std::size_t size() const { return times.size(); }
    double final_over_initial() const;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    double window_t0 = 0.0, window_t1 = 0.0;
    int samples = 0;
};

// Least-squares line in (log t, log value) over the window. Requires at
// least 10 in-window samples with positive values.
RateFit fit_decay_rate(const TimeSeriesRecord& series, double t0, double t1);

struct ProfileErrorSeries {
    TimeSeriesRecord weighted_error; // t^w ||numeric - profile||
    TimeSeriesRecord floor;          // t^w ||profile||   (lower-bound shadow)
    TimeSeriesRecord raw_norm;       // ||numeric||       (unweighted)
};

// Weighted profile error t^{(n+2 sigma+4+2j)/4} ||numeric(t) - profile(t)||
// in Hdot^{sigma+2-j}, with the companion profile-norm floor.
ProfileErrorSeries weighted_profile_error(const std::vector<double>& times,
                                          const std::function<Field(double)>& numeric,
                                          const std::function<Field(double)>& profile, int j,
                                          double sigma);

enum class LemmaKind { SmallFrequency, LargeFrequency };

struct LemmaCheckResult {
    RateFit fit;            // small-frequency: fitted slope of the quadrature norm
    double max_bound_ratio; // large-frequency: sup of norm / bound
    TimeSeriesRecord series;
};

// SmallFrequency: || chi_int |xi|^s e^{-c |xi|^2 t} ||_{L2(R^n)} by radial
// quadrature over t in [t0, t1]; the fitted slope approaches -(n+2s)/4.
// LargeFrequency: for a radial bump of unit H^{s+l} norm at |xi| ~ R, checks
// || chi_ext |xi|^s e^{-c |xi|^{-2} t} fhat || <= (1+t)^{-l/2}.
LemmaCheckResult lemma_scaling_check(double s, int n, double c, LemmaKind kind,
                                     double t0 = 1e2, double t1 = 1e4, double ell = 0.0,
                                     double bump_radius = 0.0,
                                     const CutoffPartition& cutoffs = CutoffPartition());

struct AnnulusDecay {
    double radius;
    double efolding_time;
    double decay_constant;
    double predicted_constant; // gamma/(2 tau^2) R^{-2} in the critical case
};

// Evolves data supported in |xi| in [R, 2R] and fits the exponential tail of
// the L2 norm per annulus; the e-folding ratio T_e(2R)/T_e(R) exposes the
// |xi|^{-2} dissipation scaling in the critical case.
std::vector<AnnulusDecay> regularity_loss_experiment(const ModelParams& params,
                                                     const std::vector<double>& radii,
                                                     const SpectralGrid& grid, double T_factor = 3.0);

// Weighted difference t^{(n+2s+4+2j)/4} || d_t^j phi^{delta>0} - d_t^j phi^{delta=0} ||
// in Hdot^{s+2-j} over the sample times, for identical tau, gamma, grid, data.
TimeSeriesRecord subcritical_to_critical_convergence(const ModelParams& sub,
                                                     const ModelParams& crit,
                                                     const Field& phi0, const Field& phi1,
                                                     const Field& phi2, int j, double s,
                                                     const std::vector<double>& times);

// Geometric sample times in [t0, t1].
std::vector<double> geometric_times(double t0, double t1, int count);

} // namespace mgt

#endif
