#pragma once

#include <stdexcept>
#include <string>

namespace citeflow {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (TSV/JSON syntax, bad numbers, duplicate records).
class ParseError : public Error {
public:
    using Error::Error;
};

// Classification tree violates the embedded scheme (orphan, multi-parent,
// duplicate id, leaf above the specialty level).
class HierarchyError : public Error {
public:
    using Error::Error;
};

// A membership or query names a domain that does not exist at the stated level.
class UnknownDomainError : public Error {
public:
    using Error::Error;
};

// An edge endpoint is not a known article (strict policy only).
class DanglingEdgeError : public Error {
public:
    using Error::Error;
};

// No citation edge falls inside the requested period window.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

// A domain emits citations but has zero citing-period volume.
class ZeroVolumeError : public Error {
public:
    using Error::Error;
};

// A citing domain carries flow but its citing propensity is zero.
class ZeroPropensityError : public Error {
public:
    using Error::Error;
};

// Fewer than two usable domains for dispersion statistics.
class InsufficientDomainsError : public Error {
public:
    using Error::Error;
};

// Roll-up target is finer than the source level.
class LevelOrderError : public Error {
public:
    using Error::Error;
};

// A scenario cannot be realized (e.g. references target an empty domain).
class InfeasibleSpecError : public Error {
public:
    using Error::Error;
};

// Brute-force oracle invoked on a corpus above its size limit.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

}  // namespace citeflow
