#ifndef OPA_ERRORS_HPP
#define OPA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, bad domain, mismatch).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The truncated Hilbert space would exceed the configured dimension cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown: non-finite values, runaway amplitudes or overflow.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace opa

#endif // OPA_ERRORS_HPP
