#pragma once

#include <stdexcept>
#include <string>

namespace gridcascade {

// Malformed input file (bad JSON, bad .m table, wrong types).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid file whose contents violate a case invariant.
// The message enumerates every violation found, one per line.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// HVDC link whose commutation-resistance denominator vanishes.
struct DegenerateLink : std::runtime_error {
    explicit DegenerateLink(const std::string& what) : std::runtime_error(what) {}
};

// Reduced island system failed the relative-residual check (1e-8).
struct SingularIsland : std::runtime_error {
    explicit SingularIsland(const std::string& what) : std::runtime_error(what) {}
};

// Initial disturbance aimed at a branch that is already out of service.
struct DisturbedBranchSevered : std::runtime_error {
    explicit DisturbedBranchSevered(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gridcascade
