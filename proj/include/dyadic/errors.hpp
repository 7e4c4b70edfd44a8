#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Base class for every error raised by the library.  Catching this is
/// enough to map any failure onto a process exit code.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter or configuration value outside its documented range
/// (lambda <= 1, negative tolerance, inadmissible gamma, ...).
class range_error : public error {
public:
    explicit range_error(const std::string& what) : error(what) {}
};

/// Vectors of mismatched length fed to a binary operation.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& what) : error(what) {}
};

/// A weighted sum left the double range.  Raised instead of silently
/// returning infinity; the message names the offending quantity.
class overflow_error : public error {
public:
    explicit overflow_error(const std::string& what) : error(what) {}
};

/// Non-finite state detected after a step attempt.
class finite_check_error : public error {
public:
    explicit finite_check_error(const std::string& what) : error(what) {}
};

/// Evaluation of a comparison curve past its singularity time.
class past_singularity_error : public error {
public:
    explicit past_singularity_error(const std::string& what) : error(what) {}
};

/// Change of variables requested for a model it does not apply to.
class unsupported_conversion_error : public error {
public:
    explicit unsupported_conversion_error(const std::string& what) : error(what) {}
};

/// Data fails the structural requirements of a fit (too short, not monotone).
class fit_rejected_error : public error {
public:
    explicit fit_rejected_error(const std::string& what) : error(what) {}
};

/// Malformed input file (config, initial data, ...).
class parse_error : public error {
public:
    explicit parse_error(const std::string& what) : error(what) {}
};

}  // namespace dyadic
