#pragma once

#include <filesystem>

#include "mfdirac/diagnostics.hpp"
#include "mfdirac/dynamics.hpp"
#include "mfdirac/model.hpp"
#include "mfdirac/solitary.hpp"

namespace mfd {

// Every numeric CSV field is printed with 17 significant digits so values
// round-trip exactly and identical runs produce byte-identical files.

void write_sigma_csv(const std::filesystem::path& path, const SigmaCurve& curve);

// One row per (frequency, branch). Points without usable branches (quadrature
// failure or |sigma| too small) appear once with branch -1 and nan amplitudes
// so the frequency is still accounted for.
void write_atlas_csv(const std::filesystem::path& path, const ManifoldAtlas& atlas);

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec);

// Bare scalar history t, re_y, im_y (the Volterra engine's native output).
void write_y_csv(const std::filesystem::path& path, const std::vector<double>& t,
                 const std::vector<cplx>& y);

// The distance series has its own time axis: it is sampled far less often
// than charge and energy because each evaluation costs a stack of FFTs.
void write_distance_csv(const std::filesystem::path& path, const TrajectoryRecord& rec);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& spec);

// Snapshot layout: one JSON header line (grid size, box, mass, time, space,
// element count, byte order), then raw little-endian complex doubles in the
// field's native component-fastest order. Host must be little-endian.
void write_snapshot(const std::filesystem::path& path, const SpinorField& f, double m,
                    double time);

struct Snapshot {
    SpinorField field;
    double m = 0.0;
    double time = 0.0;
};

Snapshot read_snapshot(const std::filesystem::path& path);

} // namespace mfd
