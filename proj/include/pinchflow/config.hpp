#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pinchflow/geometry.hpp"
#include "pinchflow/solver.hpp"

namespace pinchflow {

/// Full run configuration. Serialized as flat key=value lines with dotted
/// section prefixes; parsing rejects unknown or duplicate keys, and
/// serialize(parse(text)) == text for canonically written files.
struct RunConfig {
    FlowGeometry geometry;

    std::string initial_family = "bump"; // bump | cylinder
    double initial_c0 = 0.9 * 1.4142135623730951; // family parameter c0
    double initial_c2 = 0.25;                     // quadratic strength
    double initial_bump_scale = 5.0;              // saturation radius R

    SolverConfig solver;
    WindowSpec window;

    std::string output_dir = "out";
    std::uint64_t seed = 0; // synthetic-noise tests only

    void validate() const;
    std::string serialize() const;
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);

    /// FNV-1a 64-bit hash of the canonical serialization, in hex.
    std::string hash() const;

    /// Initial profile of the configured family on the configured grid.
    GridProfile make_initial() const;
};

} // namespace pinchflow
