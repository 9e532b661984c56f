#pragma once

#include <stdexcept>
#include <string>

namespace abflux {

// Bad mathematical arguments (negative radius, x <= 0 for Gamma, ...).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally invalid inputs (mismatched grids, open path where closed is
// required, degenerate sample grids, ...).
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A request that only converges on a damped time contour was made on the
// real contour.
struct ContourError : std::invalid_argument {
    explicit ContourError(const std::string& what) : std::invalid_argument(what) {}
};

// Real-time oscillator propagator evaluated too close to a focal time
// (sin(w dt) below the guard margin).
struct CausticError : std::invalid_argument {
    explicit CausticError(const std::string& what) : std::invalid_argument(what) {}
};

// Kernel composition cannot be resolved on the supplied radial grid.
struct ResolutionError : std::runtime_error {
    explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// A sampled wavefunction loses more norm to grid truncation than tolerated.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// Operation asked for in a gauge the mode decomposition does not support.
struct UnsupportedRepresentationError : std::invalid_argument {
    explicit UnsupportedRepresentationError(const std::string& what)
        : std::invalid_argument(what) {}
};

}  // namespace abflux
