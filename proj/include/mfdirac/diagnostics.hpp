#pragma once

#include <optional>

#include "mfdirac/solitary.hpp"

namespace mfd {

// Conserved charge Q = ||psi||^2 (either space; Parseval makes them agree).
double charge(const SpinorField& psi);

// E = (1/2) <psi, D psi> - U(<rho, psi>), evaluated in momentum space. The
// kinetic form is real for any field (D is Hermitian); roundoff imaginaries
// are dropped.
double kinetic_energy(const SpinorField& psiHat, double m);
double energy(const SpinorField& psiHat, const SpinorField& rhoHatGrid,
              const PolynomialPotential& U, double m);
double energy(const SpinorField& psiHat, const CouplingProfile& rho,
              const PolynomialPotential& U);

// ---------------------------------------------------------------------------
// Weighted local-decay norm: ||psi||_Y = sum_{R=1..Rmax} 2^{-R} ||chi_R psi||_{H^{-eps}},
// chi_R a smooth radial cutoff at scale R (quintic smoothstep, identically 1
// inside |x| <= R, 0 beyond 2R). Dispersive fields leak through every fixed
// cutoff, so this norm decays along radiation while plain L2 does not.

struct YMetricSpec {
    double epsilon = 0.5;
    int Rmax = 0;  // 0: largest R with 2R <= L/2 (cutoff must fit in the box)
};

class YMetric {
public:
    YMetric(const FourierGrid& grid, double m, YMetricSpec spec = {});

    const FourierGrid& grid() const { return grid_; }
    double m() const { return m_; }
    double epsilon() const { return eps_; }
    int Rmax() const { return rmax_; }
    double weight(int R) const { return std::pow(2.0, -double(R)); }
    const std::vector<double>& mask(int R) const { return masks_.at(R - 1); }   // per mode
    const std::vector<double>& multiplier() const { return mult_; }             // (m^2+|xi|^2)^{-eps}

    // a_R = ||chi_R psi||^2_{H^{-eps}} for R = 1..Rmax; psi in either space.
    std::vector<double> localized_norms(const SpinorField& psi, FftEngine& fft) const;

    double ynorm(const SpinorField& psi, FftEngine& fft) const;

    // Contribution the truncation at Rmax can hide: sum_{R > Rmax} 2^{-R} ||...||
    // is at most 2^{-Rmax} m^{-eps} ||psi||.
    double tail_bound(const SpinorField& psi) const;

private:
    FourierGrid grid_;
    double m_ = 0.0;
    double eps_ = 0.5;
    int rmax_ = 0;
    std::vector<std::vector<double>> masks_;
    std::vector<double> mult_;
};

// ---------------------------------------------------------------------------
// Distance from a state to the solitary manifold (atlas candidates plus the
// zero wave), in the Y metric, minimized over the candidate's global phase
// analytically and over omega by golden-section refinement between atlas
// nodes. The cross terms reduce to per-shell sums because every candidate
// profile is (omega + D) rho_hat times a radial factor.

struct DistResult {
    double dist = 0.0;
    double distZero = 0.0;  // candidate "zero wave": just the ynorm
    bool zeroBest = false;
    double omega = 0.0;     // meaningful only when !zeroBest
    double rootR = 0.0;
    double phase = 0.0;
    std::size_t pointIndex = 0;
    std::size_t branchIndex = 0;
};

class DistanceCalculator {
public:
    // Precomputes per-candidate localized profile norms (the expensive part)
    // once; evaluate() then costs a handful of FFT passes per state.
    DistanceCalculator(const ManifoldAtlas& atlas, const CouplingProfile& rho,
                       const PolynomialPotential& U, const YMetric& metric, FftEngine& fft,
                       double sigmaTol = 1e-10);

    DistResult evaluate(const SpinorField& psi, FftEngine& fft) const;

    std::size_t candidate_count() const { return nodes_.size(); }

private:
    struct Node {
        std::size_t pointIndex = 0;
        double omega = 0.0;
        double sigma = 0.0;
        std::vector<double> roots;            // usable branches at this omega
        std::vector<double> profileNorms;     // b~_R of the unit profile, R = 1..Rmax
    };

    double node_distance(const std::vector<double>& aR,
                         const std::vector<std::vector<cplx>>& P,
                         const std::vector<std::vector<cplx>>& Q, double omega, double rootR,
                         const std::vector<double>& profileNorms, double* phaseOut) const;

    const ManifoldAtlas* atlas_;
    const CouplingProfile* rho_;
    PolynomialPotential U_;
    const YMetric* metric_;
    double sigmaTol_;
    ShellTable shells_;
    SpinorField rhoHat_;
    std::vector<cplx> dRhoHat_;  // D(xi) rho_hat per mode, interleaved
    std::vector<int> keys_;      // realized shell keys
    std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Windowed spectral density of a scalar time series: Hann window on
// [t0, t1], density(omega) = |sum w_j y_j e^{+i omega t_j}|^2 / (sum w_j)^2,
// so a pure tone y = e^{-i omega0 t} has density ~ 1 at omega = omega0.

struct SpectrumSpec {
    double omegaMax = 0.0;  // 0: 5 m
    int count = 1001;
    double gapDelta = 0.0;  // 0: 0.1 m; the gap band is |omega| <= m + gapDelta
};

struct SpectrumResult {
    std::vector<double> omega;
    std::vector<double> density;
    double massInside = 0.0;   // integral of density over |omega| <= m + gapDelta
    double massOutside = 0.0;  // integral over the rest of the computed range
    double peakOmega = 0.0;    // parabolically refined argmax
    double peakDensity = 0.0;
};

SpectrumResult time_spectrum(const std::vector<cplx>& y, double dt, double t0, double t1,
                             double m, SpectrumSpec spec = {});

// Single-tone weighted least squares on a window: amplitude is the Hann
// projection c(omega) = sum w_j y_j e^{+i omega t_j} / sum w_j, omega refined
// by golden-section maximization of |c|^2 within one frequency bin of the
// guess. For a pure tone the fit is exact.
struct ToneFit {
    cplx amp{0.0, 0.0};
    double omega = 0.0;
    double density = 0.0;  // |amp|^2 at the fitted frequency
};

ToneFit fit_tone(const std::vector<cplx>& y, double dt, double t0, double t1,
                 double omegaGuess);

// y minus amp * e^{-i omega t} over the whole series.
std::vector<cplx> subtract_tone(const std::vector<cplx>& y, double dt, const ToneFit& tone);

// Raw spectrum together with the carrier-removed residual spectrum. On a
// window of length T the carrier's own leakage floors the outside-band mass
// near |peak|^2 * (bandEdge - peakOmega)^-3-ish once the band edge sits
// inside the mainlobe (width 4 pi / T), masking radiation orders of
// magnitude below it; the residual spectrum measures that radiation. The
// dominant peak is subtracted only when it lies inside the gap band, so a
// genuine outside-band peak is never removed from the measure.
struct CarrierSpectra {
    SpectrumResult raw;
    SpectrumResult residual;
    ToneFit carrier;
    bool subtracted = false;
};

CarrierSpectra carrier_spectra(const std::vector<cplx>& y, double dt, double t0, double t1,
                               double m, SpectrumSpec spec = {});

} // namespace mfd
