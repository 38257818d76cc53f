#pragma once

#include <optional>
#include <vector>

#include "mfdirac/coupling.hpp"
#include "mfdirac/grid.hpp"
#include "mfdirac/potential.hpp"

namespace mfd {

struct SigmaResult {
    double value = 0.0;
    double err = 0.0;
};

// Spectral function
//   sigma(omega) = (2pi)^{-3} int rho_hat^dag (omega + D(xi)) rho_hat
//                  / (omega^2 - |xi|^2 - m^2) d^3 xi,
// computed by exact angular reduction (the alpha.xi part integrates to zero
// over spheres because rho_hat is radial times constant spinors) followed by
// adaptive radial quadrature:
//   sigma = (2pi^2)^{-1} int_0^inf r^2 [omega |rho_hat|^2 + m rho_hat^dag beta rho_hat]
//           / (omega^2 - r^2 - m^2) dr.
// Requires |omega| <= m; at the endpoints the integrand stays absolutely
// integrable (the r^2 measure offsets the -r^2 denominator).
SigmaResult sigma(const CouplingProfile& rho, double omega, double tol = 1e-10);

struct SigmaCurve {
    std::vector<double> omega;
    std::vector<double> sigma;
    std::vector<double> quadError;
    std::vector<double> zeros;                 // refined locations of sign changes / endpoint zeros
    std::optional<double> omegaSigmaZero;      // set when the zero is unique
};

// sigma on a sorted grid in [-m, m], with zero detection: sign-change
// bisection between grid points plus endpoint checks. Multiple zeros are all
// recorded (an assumption violation for the checker to report, not an error).
SigmaCurve sigma_curve(const CouplingProfile& rho, const std::vector<double>& omegaGrid,
                       double tol = 1e-10);

struct SphereMass {
    double plus = 0.0;
    double minus = 0.0;
};

// int_{|xi| = radius} |Pi_pm(xi) rho_hat(xi)|^2 dOmega by angular quadrature.
// The callable overload exists so degenerate profiles (for instance a
// Pi_plus-projected field) can be probed; the profile overload forwards its
// exact rho_hat.
using RhoHatFn = std::function<std::array<cplx, 4>(const Momentum&)>;
SphereMass sphere_mass(const RhoHatFn& rhoHat, double m, double radius);
SphereMass sphere_mass(const CouplingProfile& rho, double radius);

struct SolitaryProfile {
    double omega = 0.0;
    FourierGrid grid;
    SpinorField sigmaHat;  // momentum space
};

// Samples Sigma_hat(xi, omega) = (omega + D(xi)) rho_hat(xi) / (omega^2 - |xi|^2 - m^2)
// on the grid's dual lattice. Only |omega| < m is admitted: outside the gap
// the profile is not square-integrable, and the gap-edge case (which would
// need rho_hat(0) = 0) is not implemented.
SolitaryProfile profile_sigma_hat(const CouplingProfile& rho, double omega,
                                  const FourierGrid& grid);

// Grid samplers for rho itself: exact closed forms in either space.
SpinorField sample_rho_hat(const CouplingProfile& rho, const FourierGrid& grid);
SpinorField sample_rho(const CouplingProfile& rho, const FourierGrid& grid);

} // namespace mfd
