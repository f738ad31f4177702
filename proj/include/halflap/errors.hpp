#pragma once

// Error taxonomy shared across the library.  Argument and domain mistakes use
// the std exception types; everything that can only be detected while running
// the numerics gets its own class so callers can map it to an exit code.

#include <stdexcept>
#include <string>

namespace halflap {

// A computation ran but produced something unusable (non-finite energy,
// line search collapse, ...).
class numerical_failure : public std::runtime_error {
public:
    explicit numerical_failure(const std::string& what) : std::runtime_error(what) {}
};

// Mountain-pass geometry is absent: no valley endpoint, or the path maximum
// drifted into an endpoint.
class degenerate_geometry : public std::runtime_error {
public:
    explicit degenerate_geometry(const std::string& what) : std::runtime_error(what) {}
};

// No sign/positivity witness exists on the search grid.
class no_witness_error : public std::runtime_error {
public:
    explicit no_witness_error(const std::string& what) : std::runtime_error(what) {}
};

// c_f is requested for a nonlinearity whose ratio |f(t)/t| never rises above
// zero on the scan range (e.g. f == 0).
class undefined_cf_error : public std::runtime_error {
public:
    explicit undefined_cf_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation needs an eigenbasis / quadrature grid that this domain kind does
// not carry (balls are thresholds-only).
class unsupported_domain : public std::invalid_argument {
public:
    explicit unsupported_domain(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent run configuration (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace halflap
