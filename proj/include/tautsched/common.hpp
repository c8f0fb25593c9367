#ifndef TAUTSCHED_COMMON_HPP
#define TAUTSCHED_COMMON_HPP

#include <stdexcept>
#include <string>

namespace tautsched {

/// A point on a cumulative (time, bits) plane.
struct Point {
    double time_s = 0.0;
    double bits = 0.0;
};

/// Input failed structural validation (bad packet fields, malformed schedule, ...).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Instance class not handled (e.g. more than one deadline-order violation).
class unsupported_error : public std::runtime_error {
public:
    explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

/// No feasible transmission exists; carries the first offending instant.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, double time_s)
        : std::runtime_error(what + " (at t=" + std::to_string(time_s) + ")"), time_s_(time_s) {}

    double time_s() const { return time_s_; }

private:
    double time_s_;
};

}  // namespace tautsched

#endif
