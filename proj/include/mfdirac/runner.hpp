#pragma once

#include "mfdirac/config.hpp"
#include "mfdirac/grid.hpp"

namespace mfd {

// Experiment drivers. Each creates the output directory, echoes the
// normalized config there as config.json, and writes its results:
//   sigma   -> sigma.csv, assumptions.json
//   atlas   -> atlas.csv, atlas.json
//   evolve  -> trajectory.csv, state_final.snap, report.json,
//              volterra_y.csv (volterra/both), periodic snapshots (stride > 0)
//   attract -> trajectory.csv, distance.csv, spectrum_window_<k>.csv,
//              state_final.snap, attract_report.json
// Invalid requests throw std::invalid_argument; numerical failures throw
// NumericalError or QuadratureError. The quiet flag only silences progress
// text, never changes results.

void cmd_sigma(const RunConfig& cfg, bool quiet = false);
void cmd_atlas(const RunConfig& cfg, bool quiet = false);
void cmd_evolve(const RunConfig& cfg, bool quiet = false);
void cmd_attract(const RunConfig& cfg, bool quiet = false);

// Full invariant suite on canonical fixtures (mass 1, normalized Gaussian
// coupling, quartic potential); the config contributes only the seed and the
// corrupt-beta hook. Writes selftest.json; returns whether every check
// passed.
bool cmd_selftest(const RunConfig& cfg, bool quiet = false);

// Initial data for evolve/attract in momentum space: an exact solitary wave,
// a perturbed one (seeded), or a Gaussian packet.
SpinorField initial_state(const RunConfig& cfg, const CouplingProfile& rho,
                          const PolynomialPotential& U, const FourierGrid& grid, FftEngine& fft);

} // namespace mfd
