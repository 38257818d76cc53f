#pragma once

#include <map>
#include <vector>

#include "mfdirac/util.hpp"

namespace mfd {

// Periodic box [-L/2, L/2)^3 sampled at N points per axis, with the dual
// lattice xi in (2pi/L) {-N/2 .. N/2-1}^3. Both position and momentum
// samples are stored in FFT (wrap-around) order, so index i along an axis
// means coordinate signed(i) h respectively frequency (2pi/L) signed(i),
// signed(i) = i < N/2 ? i : i - N. With that storage the conventions
//   psi_hat(xi) = h^3 sum_j psi_j exp(-i xi x_j)     (forward, no 2pi)
//   psi_j      = L^{-3} sum_k psi_hat_k exp(+i xi x_j)
// are realized exactly by unnormalized FFTs times h^3 / L^{-3}: the phase
// corrections from the wrapped ordering are integer multiples of 2pi.
struct FourierGrid {
    int N = 0;
    double L = 0.0;

    double h() const { return L / N; }
    double cellVolume() const { return h() * h() * h(); }
    double dualStep() const { return 2.0 * kPi / L; }
    double dualCellVolume() const { const double d = dualStep(); return d * d * d; }
    std::size_t modes() const { return std::size_t(N) * N * N; }

    int signedIndex(int i) const { return i < N / 2 ? i : i - N; }
    double coord(int i) const { return signedIndex(i) * h(); }
    double xi(int i) const { return signedIndex(i) * dualStep(); }

    std::vector<double> coordAxis() const;
    std::vector<double> xiAxis() const;
};

// Validates N (even, >= 8), L > 0, and the resolution rule that the
// largest resolved frequency magnitude sqrt(3) pi N / L covers the
// dispersion relation well above the mass gap (>= 8 m).
FourierGrid make_grid(int N, double L, double m);

enum class Space { position, momentum };

// 4-component complex field, component-fastest interleaved layout:
// data[((ix N + iy) N + iz) * 4 + c].
struct SpinorField {
    FourierGrid grid;
    Space space = Space::position;
    std::vector<cplx> data;

    cplx* at(std::size_t mode) { return data.data() + mode * 4; }
    const cplx* at(std::size_t mode) const { return data.data() + mode * 4; }
};

SpinorField zero_field(const FourierGrid& grid, Space space);

// In-place FFTs with cached FFTW plans (FFTW_ESTIMATE for run-to-run
// deterministic plan choice). Execution goes through an engine-owned scratch
// buffer, which keeps plan alignment requirements away from field storage.
class FftEngine {
public:
    FftEngine() = default;
    ~FftEngine();
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    void to_momentum(SpinorField& f);
    void to_position(SpinorField& f);

private:
    struct Plans;
    Plans& plans_for(int N);
    std::map<int, Plans*> plans_;
};

// Shell decomposition of the dual lattice: modes grouped by the integer
// square norm of their index triple, on which |xi| and the dispersion value
// are constant. Propagator tables, radial profile sampling, and the
// manifold-distance cross terms all reduce per-mode work to per-shell work
// through this.
struct ShellTable {
    std::vector<std::int32_t> key;  // per mode: sx^2 + sy^2 + sz^2 (signed indices)
    std::vector<double> radius;     // per key: |xi| = dualStep * sqrt(key)
    std::vector<double> lambda;     // per key: sqrt(|xi|^2 + m^2)
    int maxKey = 0;
};

ShellTable make_shells(const FourierGrid& grid, double m);

// Grid sesquilinear form <f, g> (conjugate-linear in f), same-space operands:
// h^3 sum conj(f) g in position, (2pi)^{-3} dualCellVolume sum conj(f_hat) g_hat
// in momentum; the two agree exactly by Parseval.
cplx inner_product(const SpinorField& f, const SpinorField& g);
double norm_sq(const SpinorField& f);

} // namespace mfd
