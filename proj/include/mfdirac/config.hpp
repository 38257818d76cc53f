#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfdirac/coupling.hpp"
#include "mfdirac/dynamics.hpp"
#include "mfdirac/grid.hpp"
#include "mfdirac/potential.hpp"

namespace mfd {

struct TimeBlock {
    double dt = 0.01;
    double T = 10.0;
    int recordStride = 10;    // trajectory rows every this many steps
    int snapshotStride = 0;   // 0 disables field snapshots
    int substeps = 4;         // scalar-flow substeps per Strang kick
};

struct ToleranceBlock {
    double sigmaQuad = 1e-10;  // radial quadrature for sigma / atlas
    double kernel = 1e-9;      // memory-kernel quadrature
    double engineGap = 5e-3;   // flag threshold for dual-engine divergence
};

// Initial data for evolve/attract. "solitary" and "perturbed_solitary" pick a
// wave by frequency and amplitude branch; "packet" is a free Gaussian packet.
struct InitialBlock {
    std::string type = "perturbed_solitary";
    double omega = 0.5;
    int branch = 0;
    double phase = 0.0;
    double delta = 0.2;  // perturbation size (perturbed_solitary only)
    GaussianPacketParams packet;
};

struct ExperimentBlock {
    std::string name;  // sigma | atlas | evolve | attract | selftest

    // sigma / atlas: uniform frequency grid (sigma also drives the
    // assumption report; atlas requires the range strictly inside the gap)
    double omegaMin = 0.0;
    double omegaMax = 0.0;  // both 0 -> per-command default range
    int omegaCount = -1;    // negative -> per-command default; 0 is an empty grid

    InitialBlock initial;  // evolve / attract

    // attract extras
    int distStride = 0;  // steps between distance samples; 0 -> once per unit time
    std::vector<std::array<double, 2>> windows;  // spectrum windows; empty -> first/last 10/m
    double gapDelta = 0.0;                       // band half-width margin; 0 -> 0.1 m

    bool corruptBeta = false;  // selftest hook: breaks the algebra on purpose
};

// Full experiment description. Loading fills defaults and validates
// everything the modules would reject (potential shape, coupling, Nyquist
// rule), and unknown keys anywhere are errors naming the offending path.
// to_json() emits the normalized form: load(to_json()) is the identity.
struct RunConfig {
    double m = 1.0;
    std::vector<double> potential{0.0, 1.0};
    std::vector<GaussTerm> couplingTerms;  // normalized by load; never empty

    int N = 64;
    double L = 32.0;

    TimeBlock time;
    ExperimentBlock experiment;

    std::string engine = "spectral";  // spectral | volterra | both
    std::uint64_t seed = 1;
    std::string outputDir = "out";
    ToleranceBlock tolerances;

    CouplingProfile coupling() const { return CouplingProfile(couplingTerms, m); }
    PolynomialPotential potential_terms() const { return PolynomialPotential(potential); }
    FourierGrid grid() const { return make_grid(N, L, m); }

    // Frequency grid for sigma/atlas with per-command defaults applied.
    std::vector<double> omega_grid() const;

    static RunConfig defaults(const std::string& experimentName);
    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load(const std::filesystem::path& path);

    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
};

} // namespace mfd
