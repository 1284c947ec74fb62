#pragma once

#include "chns/grid.hpp"
#include "chns/io.hpp"
#include "chns/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace chns {

struct PotentialSettings {
    PotentialKind kind = PotentialKind::logarithmic;
    double theta = 0.8;
    double theta0 = 1.0;
    double eps_barrier = 1e-12;

    Potential build() const;
};

struct OutputSettings {
    std::string dir;
    int csv_every = 1;
    int snapshot_every = 0;
    SnapshotEncoding format = SnapshotEncoding::ascii;
    bool heatmap = false;
};

/// Initial data and run length.
struct InitialSettings {
    std::string name = "run";
    /// spinodal | stripe | constant | snapshot
    std::string initial = "spinodal";
    std::uint64_t seed = 1;
    double phi_mean = 0.0;
    double phi_amplitude = 0.05;
    double stripe_width = 0.5;
    double stripe_thickness = 0.02;
    double sigma0 = 0.0;
    double vortex_amplitude = 0.0;
    std::string phi_snapshot;
    std::string sigma_snapshot;
    /// Stop time; when 0 the run length is given by `steps`.
    double t_end = 0.0;
    long steps = 100;
};

struct RunConfig {
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    PhysParams physics;
    PotentialSettings potential;
    StepperConfig stepper;
    OutputSettings output;
    InitialSettings experiment;

    Grid grid() const { return Grid(nx, ny, lx, ly); }
};

/// Output directory used when the config does not set one: $CHNS_OUTPUT_DIR or "chns_output".
std::string default_output_dir();

/// Parses key = value text with [section] headers and '#' comments.
/// Errors are ConfigError with "line:column" locations, unknown keys named.
/// Missing keys take their defaults; an absent dt becomes 0.1 min(hx, hy)^2 / B.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_and_validate(const std::filesystem::path& path);

/// Checks every hypothesis and builds the initial data once to check |mean(phi0)| < 1.
void validate(const RunConfig& cfg);

/// Canonical text of the effective configuration; parse_config(emit_config(c)) emits identically.
std::string emit_config(const RunConfig& cfg);

/// Initial state described by the [experiment] section.
SimState initial_state(const RunConfig& cfg);

}  // namespace chns
