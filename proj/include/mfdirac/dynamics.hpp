#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mfdirac/solitary.hpp"

namespace mfd {

// Raised by the engines when an iteration fails to converge or a tolerance
// cannot be met; stepIndex locates the failing step where applicable.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what, std::size_t stepIndex_ = 0)
        : std::runtime_error(what), stepIndex(stepIndex_) {}
    std::size_t stepIndex = 0;
};

// ---------------------------------------------------------------------------
// initial data

struct GaussianPacketParams {
    cplx amplitude{1.0, 0.0};
    double width = 1.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> k0{0.0, 0.0, 0.0};  // carrier momentum
    std::array<cplx, 4> dir{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}};
};

// amp exp(-|x-c|^2/(2w^2)) exp(i k0.x) dir, sampled in position space. A zero
// amplitude is permitted (the zero solution is legitimate if dull); callers
// that consider it a mistake warn, not this function.
SpinorField gaussian_packet(const FourierGrid& grid, const GaussianPacketParams& p);

// The wave's own profile as initial data (momentum space).
SpinorField solitary_data(const SolitaryWave& wave);

// (1 + delta) phi plus a seeded smooth perturbation of relative L2 size
// delta. The perturbation is a fixed count of randomly placed Gaussian bumps
// (localized, so its dispersive decay is visible in local norms), then
// hard-projected onto |xi| <= 4m in momentum space (band-limited, so runs
// are grid-independent), then rescaled to ||noise|| = delta ||phi||.
SpinorField perturbed_solitary(const SolitaryWave& wave, double delta, std::uint64_t seed,
                               double m, FftEngine& fft);

SpinorField superpose(const SpinorField& a, const SpinorField& b, cplx ca, cplx cb);

// ---------------------------------------------------------------------------
// spectral engine

// The rank-one flow i psi_dot = rho F(<rho, psi>) closes on the scalar
// y = <rho, psi>: y' = -i g0 F(y) with g0 = ||rho||^2 on the grid (|y| is
// conserved, the exact solution is a circle y0 e^{i g0 g(|y0|^2) t}). RK4
// substeps march y across one dt; J = int_0^dt F(y(s)) ds by composite
// Simpson on the substep values drives the field update psi -= i J rho_hat.
struct BFlowResult {
    cplx J{0.0, 0.0};
    cplx yEnd{0.0, 0.0};
};

BFlowResult b_flow(const PolynomialPotential& U, double g0, cplx y0, double dt, int substeps);

// Strang splitting A(dt/2) B(dt) A(dt/2) in momentum space. A is the exact
// free flow, applied per mode with cos/sin tables cached per dispersion
// shell; B is the b_flow above. No FFTs anywhere in a step. Globally second
// order in dt.
class StrangStepper {
public:
    StrangStepper(SpinorField psi0, const CouplingProfile& rho, const PolynomialPotential& U,
                  double dt, int substeps = 4);

    void step();
    double time() const { return t_; }
    const SpinorField& state() const { return psi_; }
    SpinorField& state() { return psi_; }
    const SpinorField& rho_hat_grid() const { return rhoHat_; }
    double rho_norm_sq_grid() const { return g0_; }
    cplx y() const;  // <rho, psi>_grid of the current state

    // Rebuilds the propagator tables; negative dt runs the flow backwards.
    void set_dt(double dt);

private:
    void half_free_flow();

    SpinorField psi_;
    SpinorField rhoHat_;
    PolynomialPotential U_;
    ShellTable shells_;
    std::vector<double> xiAxis_;
    std::vector<double> cosTab_, sincTab_;  // per shell, for dt/2
    double mass_ = 0.0;
    double g0_ = 0.0;
    double dt_ = 0.0;
    int substeps_ = 4;
    double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Volterra engine (box-free: kernel and inhomogeneity from continuum
// quadrature / exact per-mode propagation)

// K(tau) = <rho, exp(-i D tau) rho> on a uniform tau grid, by radial
// quadrature of (2 pi^2)^{-1} int r^2 [cos(lam tau) |rho_hat|^2
//   - i sin(lam tau)/lam (m rho_hat^dag beta rho_hat)] dr.
// The default tol is what the Gauss-Kronrod error certificate can still
// guarantee on the oscillatory large-tau integrands; the achieved estimate
// (typically a decade or two better) is reported in errEstimate.
struct MemoryKernel {
    double dt = 0.0;
    std::vector<cplx> K;  // K[j] = K(j dt)
    double errEstimate = 0.0;
};

MemoryKernel kernel(const CouplingProfile& rho, double dt, double T, double tol = 1e-9);

// Y0(t) = <rho, exp(-i D t) psi0>_grid, exact per-mode propagation reduced to
// per-shell cosine/sine sums; no time-stepping error.
std::vector<cplx> free_projection(const CouplingProfile& rho, const SpinorField& psi0,
                                  const std::vector<double>& tGrid, FftEngine& fft);

// Product-trapezoidal marching for
//   y(t) = Y0(t) - i int_0^t K(t-s) F(y(s)) ds,
// each step solving the implicit scalar relation by damped fixed-point
// iteration with a Newton fallback on R^2 (tolerance 1e-12). The quadratic
// memory sum caps the horizon at 2e4 steps.
std::vector<cplx> solve_volterra(const MemoryKernel& K, const std::vector<cplx>& Y0,
                                 const PolynomialPotential& U, double dt);

// Duhamel reconstruction of the field at t = index * dt from the scalar
// series: psi(t) = e^{-iDt} psi0 - i int_0^t e^{-iD(t-s)} rho F(y(s)) ds,
// the s-integral per dispersion shell by the same trapezoidal weights.
SpinorField reconstruct_field(const std::vector<cplx>& ySeries, const SpinorField& psi0,
                              std::size_t index, const CouplingProfile& rho,
                              const PolynomialPotential& U, double dt);

// ---------------------------------------------------------------------------

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<cplx> y;
    std::vector<double> charge;
    std::vector<double> energy;
    std::vector<double> distToS;  // empty unless the run measures it
    std::vector<double> distOmega;
    std::vector<double> distTime;
};

} // namespace mfd
