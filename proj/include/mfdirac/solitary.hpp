#pragma once

#include <optional>
#include <vector>

#include "mfdirac/model.hpp"

namespace mfd {

// phi_omega = C Sigma(., omega) with |C|^2 = rootR solving the amplitude
// condition sigma(omega) g(rootR sigma^2) = -1.
struct SolitaryWave {
    double omega = 0.0;
    cplx C{0.0, 0.0};
    SpinorField profileHat;  // momentum space
    double charge = 0.0;
};

// Positive solutions r of sigma g(r sigma^2) = -1, i.e. positive real roots
// of the degree-(p-1) polynomial 1 + sum_j 2j u_j sigma s^{j-1} in s = r sigma^2,
// found by companion-matrix eigenvalues and polished by Newton. Every
// returned root satisfies |sigma g(r sigma^2) + 1| <= rootTol. Empty result
// means only the zero wave exists at this sigma value.
std::vector<double> amplitude_roots(const PolynomialPotential& U, double sigmaValue,
                                    double rootTol = 1e-12);

// Rejects (omega, rootR, sigmaValue) triples that do not satisfy the
// amplitude condition for this potential.
SolitaryWave build_wave(double omega, double rootR, double phase, const SolitaryProfile& profile,
                        double sigmaValue, const PolynomialPotential& U);

// Relative stationary-equation residual, entirely in momentum space:
// ||(D - omega) phi_hat + rho_hat F(<rho, phi>_grid)|| / ||phi_hat||.
double residual(const SolitaryWave& wave, const CouplingProfile& rho,
                const PolynomialPotential& U);

struct AtlasBranch {
    double rootR = 0.0;
    double charge = 0.0;
    double residual = 0.0;
};

struct AtlasPoint {
    double omega = 0.0;
    double sigma = 0.0;
    double sigmaErr = 0.0;
    bool nearSingular = false;  // |sigma| < 1e-6: amplitudes blow up like |sigma|^{-3}, skipped
    bool quadFailed = false;
    std::vector<AtlasBranch> branches;
};

struct ManifoldAtlas {
    double m = 0.0;
    FourierGrid grid;
    std::vector<AtlasPoint> points;
};

// Atlas over a frequency grid strictly inside (-m, m); any |omega| >= m entry
// is rejected outright (no nonzero solitary waves exist out there). Charges
// and residuals are evaluated on the given grid per branch; quadrature
// failures annotate their point and the build continues.
ManifoldAtlas build_atlas(const CouplingProfile& rho, const PolynomialPotential& U,
                          const std::vector<double>& omegaGrid, const FourierGrid& grid,
                          double sigmaTol = 1e-10, double rootTol = 1e-12);

// Materialize one atlas entry as a wave (atlas stores roots, not fields).
SolitaryWave atlas_wave(const ManifoldAtlas& atlas, const CouplingProfile& rho,
                        const PolynomialPotential& U, std::size_t pointIndex,
                        std::size_t branchIndex, double phase);

struct AssumptionReport {
    bool potentialAdmissible = false;  // false in the F == 0 validation mode
    bool item1Tested = false;
    bool item1Pass = false;
    std::vector<double> probeRadii;
    std::vector<SphereMass> sphereMasses;
    bool item2Pass = false;
    SigmaCurve curve;
};

// Assumption checker: item 1 = both spectral-projection masses positive on
// each probe sphere; item 2 = sigma vanishes at most once on [-m, m].
AssumptionReport check_assumptions(const CouplingProfile& rho, const PolynomialPotential& U,
                                   const std::vector<double>& lambdaProbes,
                                   const std::vector<double>& omegaGrid, double sigmaTol = 1e-10);

} // namespace mfd
