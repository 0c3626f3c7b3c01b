#pragma once

#include <stdexcept>
#include <string>

namespace corrsurf {

// Base for every numeric-domain failure raised by the library. The CLI maps
// these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoBracketError : public Error {
public:
    using Error::Error;
};

class InfiniteMomentError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class HypothesisError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidParamsError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    enum class Bound { lower, upper };
    OutOfRangeError(Bound b, const std::string& what) : Error(what), bound_(b) {}
    Bound bound() const noexcept { return bound_; }

private:
    Bound bound_;
};

} // namespace corrsurf
