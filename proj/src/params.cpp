#include "mgt/params.hpp"

#include <cmath>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt {

const char* to_string(DeltaRegime r) {
    switch (r) {
        case DeltaRegime::SubCritical: return "SubCritical";
        case DeltaRegime::Critical: return "Critical";
        case DeltaRegime::SuperCritical: return "SuperCritical";
    }
    return "?";
}

const char* to_string(GammaRegime r) {
    switch (r) {
        case GammaRegime::Oscillatory: return "Oscillatory";
        case GammaRegime::Overdamped: return "Overdamped";
    }
    return "?";
}

RegimeTag classify_regime(double tau, double delta, double gamma) {
    RegimeTag tag;
    if (delta > 0.0)
        tag.delta_regime = DeltaRegime::SubCritical;
    else if (delta == 0.0)
        tag.delta_regime = DeltaRegime::Critical;
    else
        tag.delta_regime = DeltaRegime::SuperCritical;
    tag.gamma_regime = (gamma > 0.25 / tau) ? GammaRegime::Oscillatory
                                            : GammaRegime::Overdamped;
    return tag;
}

ModelParams ModelParams::validate(const RawParams& raw) {
    auto fail = [](const std::string& what) -> ModelParams {
        throw InvalidParameter("invalid parameter: " + what);
    };
    if (!(raw.tau > 0.0) || !std::isfinite(raw.tau)) fail("tau must be > 0");
    if (!(raw.gamma > 0.0) || !std::isfinite(raw.gamma)) fail("gamma must be > 0");
    if (!(raw.b_over_2a > 0.0) || !std::isfinite(raw.b_over_2a)) fail("b_over_2a must be > 0");
    if (!std::isfinite(raw.delta)) fail("delta must be finite");

    const double quarter = 0.25 / raw.tau;
    if (std::abs(raw.gamma - quarter) < 1e-9 * quarter) {
        std::ostringstream os;
        os << "gamma = 1/(4 tau) excluded (gamma=" << raw.gamma
           << ", 1/(4 tau)=" << quarter << ")";
        fail(os.str());
    }
    if (raw.delta < 0.0 && !raw.allow_supercritical)
        fail("delta < 0 requires the instability-scan flag");

    return ModelParams(raw.tau, raw.delta, raw.gamma, raw.b_over_2a,
                       classify_regime(raw.tau, raw.delta, raw.gamma));
}

namespace {

// C-infinity bump-based step: 0 for x <= 0, 1 for x >= 1, strictly monotone.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

} // namespace

CutoffPartition::CutoffPartition(double eps0, double n0) : eps0_(eps0), n0_(n0) {
    if (!(eps0 > 0.0) || !(n0 > eps0))
        throw InvalidParameter("cutoffs require 0 < eps0 < n0");
}

double CutoffPartition::chi_int(double r) const {
    // 1 on [0, eps0/2], 0 at eps0
    return smooth_step((eps0_ - r) / (0.5 * eps0_));
}

double CutoffPartition::chi_ext(double r) const {
    // 0 on [0, n0], 1 from 2 n0
    return smooth_step((r - n0_) / n0_);
}

} // namespace mgt
