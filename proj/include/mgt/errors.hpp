#ifndef MGT_ERRORS_HPP
#define MGT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mgt {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct NormUndefined : Error {
    explicit NormUndefined(const std::string& msg) : Error(msg) {}
};

struct BoxTooSmall : Error {
    explicit BoxTooSmall(const std::string& msg) : Error(msg) {}
};

struct WrongZone : Error {
    explicit WrongZone(const std::string& msg) : Error(msg) {}
};

struct ZoneViolation : Error {
    explicit ZoneViolation(const std::string& msg) : Error(msg) {}
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

struct DegenerateUnresolved : Error {
    explicit DegenerateUnresolved(const std::string& msg) : Error(msg) {}
};

struct BlowUpDetected : Error {
    explicit BlowUpDetected(const std::string& msg) : Error(msg) {}
};

struct MissingTrajectory : Error {
    explicit MissingTrajectory(const std::string& msg) : Error(msg) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

struct NonPositiveValue : Error {
    explicit NonPositiveValue(const std::string& msg) : Error(msg) {}
};

struct FitUnstable : Error {
    explicit FitUnstable(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace mgt

#endif
