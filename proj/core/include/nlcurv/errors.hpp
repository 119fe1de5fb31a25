#pragma once

#include <stdexcept>
#include <string>

namespace nlcurv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A ray/segment root with near-zero transversality; callers jitter or redraw.
struct TangencyDetected : Error {
    using Error::Error;
};

struct EndpointOnSurface : Error {
    using Error::Error;
};

struct PointNotOnSurface : Error {
    using Error::Error;
};

// Target point lies on the normal line: no tangent direction exists.
struct DegenerateProjection : Error {
    using Error::Error;
};

// The symbolic eps^{-sigma} coefficients did not sum to zero.
struct CancellationFailure : Error {
    using Error::Error;
};

struct NearSingularityUnresolved : Error {
    using Error::Error;
};

struct RepresentationUnavailable : Error {
    using Error::Error;
};

struct UnsupportedDecay : Error {
    using Error::Error;
};

struct PeriodizationError : Error {
    using Error::Error;
};

struct NonConvergent : Error {
    using Error::Error;
};

struct QuadBudgetExceeded : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct PoleError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

} // namespace nlcurv
