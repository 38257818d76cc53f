#include "mfdirac/solitary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mfdirac/quadrature.hpp"

namespace mfd {

std::vector<double> amplitude_roots(const PolynomialPotential& U, double sigmaValue,
                                    double rootTol) {
    if (sigmaValue == 0.0 || U.is_zero()) return {};
    const auto& u = U.coefficients();
    const int p = U.p();

    // P(s) = 1 + sum_{j=1..p} 2j u_j sigma s^{j-1}; coeffs[k] multiplies s^k
    std::vector<double> coeffs(p);
    coeffs[0] = 1.0 + 2.0 * u[0] * sigmaValue;
    for (int j = 2; j <= p; ++j) coeffs[j - 1] = 2.0 * j * u[j - 1] * sigmaValue;
    int deg = p - 1;
    while (deg > 0 && coeffs[deg] == 0.0) --deg;
    if (deg == 0) return {};

    std::vector<double> candidates;
    if (deg == 1) {
        candidates.push_back(-coeffs[0] / coeffs[1]);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        for (int i = 0; i < deg; ++i) {
            const cplx z = es.eigenvalues()[i];
            if (std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z.real())))
                candidates.push_back(z.real());
        }
    }

    const double s2 = sigmaValue * sigmaValue;
    std::vector<double> roots;
    for (double s : candidates) {
        if (!(s > 0.0)) continue;
        // Newton polish on Q(s) = sigma g(s) + 1
        for (int it = 0; it < 50; ++it) {
            const double q = sigmaValue * U.g_of(s) + 1.0;
            if (std::abs(q) <= 0.1 * rootTol) break;
            const double dq = sigmaValue * U.g_prime(s);
            if (dq == 0.0) break;
            const double step = q / dq;
            s -= step;
            if (!(s > 0.0)) break;
            if (std::abs(step) <= 1e-16 * std::abs(s)) break;
        }
        if (!(s > 0.0)) continue;
        if (std::abs(sigmaValue * U.g_of(s) + 1.0) > rootTol) continue;
        roots.push_back(s / s2);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-8 * (std::abs(a) + std::abs(b)); }),
                roots.end());
    return roots;
}

SolitaryWave build_wave(double omega, double rootR, double phase, const SolitaryProfile& profile,
                        double sigmaValue, const PolynomialPotential& U) {
    if (profile.omega != omega)
        throw std::invalid_argument("build_wave: profile was sampled at a different omega");
    if (!(rootR > 0.0)) throw std::invalid_argument("build_wave: rootR must be positive");
    const double defect = std::abs(sigmaValue * U.g_of(rootR * sigmaValue * sigmaValue) + 1.0);
    if (defect > 1e-8)
        throw std::invalid_argument("build_wave: (omega, rootR, sigma) violate the amplitude condition");

    SolitaryWave wave;
    wave.omega = omega;
    wave.C = std::sqrt(rootR) * std::exp(cplx{0.0, phase});
    wave.profileHat = profile.sigmaHat;
    for (auto& z : wave.profileHat.data) z *= wave.C;
    wave.charge = norm_sq(wave.profileHat);
    return wave;
}

double residual(const SolitaryWave& wave, const CouplingProfile& rho,
                const PolynomialPotential& U) {
    const double nrm2 = norm_sq(wave.profileHat);
    if (nrm2 == 0.0) throw std::invalid_argument("residual: zero wave has no relative residual");

    const FourierGrid& grid = wave.profileHat.grid;
    const SpinorField rhoHat = sample_rho_hat(rho, grid);
    const cplx y = inner_product(rhoHat, wave.profileHat);
    const cplx Fy = U.F(y);

    const double m = rho.m();
    const int N = grid.N;
    const auto xiA = grid.xiAxis();
    const cplx* phi = wave.profileHat.data.data();
    const cplx* rv = rhoHat.data.data();
    std::vector<double> blocks;
    std::size_t mode = 0;
    for (int ix = 0; ix < N; ++ix) {
        for (int iy = 0; iy < N; ++iy) {
            double acc = 0.0;
            for (int iz = 0; iz < N; ++iz, ++mode) {
                const double xi[3] = {xiA[ix], xiA[iy], xiA[iz]};
                const cplx* ph = phi + mode * 4;
                const cplx* rh = rv + mode * 4;
                cplx dphi[4];
                apply_symbol(xi, m, ph, dphi);
                for (int c = 0; c < 4; ++c)
                    acc += std::norm(dphi[c] - wave.omega * ph[c] + Fy * rh[c]);
            }
            blocks.push_back(acc);
        }
    }
    const double num2 =
        pairwise_sum(blocks) * grid.dualCellVolume() / std::pow(2.0 * kPi, 3);
    return std::sqrt(num2 / nrm2);
}

ManifoldAtlas build_atlas(const CouplingProfile& rho, const PolynomialPotential& U,
                          const std::vector<double>& omegaGrid, const FourierGrid& grid,
                          double sigmaTol, double rootTol) {
    const double m = rho.m();
    for (double w : omegaGrid)
        if (std::abs(w) >= m)
            throw std::invalid_argument(
                "atlas: no nonzero solitary waves for |omega| >= m; grid must stay inside the gap");
    for (std::size_t i = 1; i < omegaGrid.size(); ++i)
        if (!(omegaGrid[i] > omegaGrid[i - 1]))
            throw std::invalid_argument("atlas: omega grid must be strictly increasing");

    ManifoldAtlas atlas;
    atlas.m = m;
    atlas.grid = grid;
    for (double w : omegaGrid) {
        AtlasPoint pt;
        pt.omega = w;
        try {
            const SigmaResult s = sigma(rho, w, sigmaTol);
            pt.sigma = s.value;
            pt.sigmaErr = s.err;
        } catch (const QuadratureError& e) {
            pt.quadFailed = true;
            pt.sigma = e.best;
            pt.sigmaErr = e.err;
            atlas.points.push_back(pt);
            continue;
        }
        if (std::abs(pt.sigma) < 1e-6) {
            pt.nearSingular = true;
            atlas.points.push_back(pt);
            continue;
        }
        const std::vector<double> roots = amplitude_roots(U, pt.sigma, rootTol);
        if (!roots.empty()) {
            const SolitaryProfile prof = profile_sigma_hat(rho, w, grid);
            const double unitCharge = norm_sq(prof.sigmaHat);
            for (double r : roots) {
                AtlasBranch br;
                br.rootR = r;
                br.charge = r * unitCharge;
                const SolitaryWave wave = build_wave(w, r, 0.0, prof, pt.sigma, U);
                br.residual = residual(wave, rho, U);
                pt.branches.push_back(br);
            }
        }
        atlas.points.push_back(pt);
    }
    return atlas;
}

SolitaryWave atlas_wave(const ManifoldAtlas& atlas, const CouplingProfile& rho,
                        const PolynomialPotential& U, std::size_t pointIndex,
                        std::size_t branchIndex, double phase) {
    if (pointIndex >= atlas.points.size())
        throw std::invalid_argument("atlas_wave: point index out of range");
    const AtlasPoint& pt = atlas.points[pointIndex];
    if (branchIndex >= pt.branches.size())
        throw std::invalid_argument("atlas_wave: branch index out of range");
    const SolitaryProfile prof = profile_sigma_hat(rho, pt.omega, atlas.grid);
    return build_wave(pt.omega, pt.branches[branchIndex].rootR, phase, prof, pt.sigma, U);
}

AssumptionReport check_assumptions(const CouplingProfile& rho, const PolynomialPotential& U,
                                   const std::vector<double>& lambdaProbes,
                                   const std::vector<double>& omegaGrid, double sigmaTol) {
    AssumptionReport rep;
    rep.potentialAdmissible = !U.is_zero();

    rep.item1Tested = !lambdaProbes.empty();
    rep.item1Pass = rep.item1Tested;
    for (double r : lambdaProbes) {
        const SphereMass sm = sphere_mass(rho, r);
        rep.probeRadii.push_back(r);
        rep.sphereMasses.push_back(sm);
        const double floor = 1e-12 * (sm.plus + sm.minus);
        if (!(sm.plus > floor) || !(sm.minus > floor)) rep.item1Pass = false;
    }

    rep.curve = sigma_curve(rho, omegaGrid, sigmaTol);
    rep.item2Pass = rep.curve.zeros.size() <= 1;
    return rep;
}

} // namespace mfd
