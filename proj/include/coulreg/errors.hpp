#ifndef COULREG_ERRORS_HPP
#define COULREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coulreg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Potential evaluated at a coalescence point (a required denominator is zero).
struct SingularEvaluation : Error {
    using Error::Error;
};

/// Jet lifting hit |.| or a division at (numerically) zero.
struct NonSmoothPoint : Error {
    using Error::Error;
};

/// Selector does not describe a usable singular subset (e.g. empty-support alpha).
struct InvalidSelector : Error {
    using Error::Error;
};

/// Variant not admissible for the requested operation.
struct InvalidVariant : Error {
    using Error::Error;
};

struct InvalidAlpha : Error {
    using Error::Error;
};

/// Finite-difference stencil would cross the singular set.
struct StepTooLarge : Error {
    using Error::Error;
};

struct OnSingularSet : Error {
    using Error::Error;
};

struct CenterOnSingularSet : Error {
    using Error::Error;
};

struct CenterElectronAtOrigin : Error {
    using Error::Error;
};

struct CenterAtNucleus : Error {
    using Error::Error;
};

struct DegenerateRay : Error {
    using Error::Error;
};

struct EmptySupportSample : Error {
    using Error::Error;
};

struct BudgetExhausted : Error {
    using Error::Error;
};

struct MethodUnavailable : Error {
    using Error::Error;
};

struct ResidualTooLarge : Error {
    using Error::Error;
};

struct UnsupportedN : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace coulreg

#endif
