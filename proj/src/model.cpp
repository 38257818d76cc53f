#include "mfdirac/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mfdirac/quadrature.hpp"

namespace mfd {

SigmaResult sigma(const CouplingProfile& rho, double omega, double tol) {
    const double m = rho.m();
    if (std::abs(omega) > m)
        throw std::invalid_argument("sigma: omega outside the spectral gap [-m, m]");
    const double pref = 1.0 / (2.0 * kPi * kPi);
    auto integrand = [&](double r) {
        const double num = omega * rho.rho_hat_abs_sq(r) + m * rho.rho_hat_beta_form(r);
        return pref * r * r * num / (omega * omega - r * r - m * m);
    };
    const QuadResult q = integrate_radial(integrand, tol);
    return {q.value, q.err};
}

SigmaCurve sigma_curve(const CouplingProfile& rho, const std::vector<double>& omegaGrid,
                       double tol) {
    const double m = rho.m();
    SigmaCurve curve;
    curve.omega = omegaGrid;
    for (std::size_t i = 1; i < omegaGrid.size(); ++i)
        if (!(omegaGrid[i] > omegaGrid[i - 1]))
            throw std::invalid_argument("sigma_curve: omega grid must be strictly increasing");
    for (double w : omegaGrid) {
        const SigmaResult s = sigma(rho, w, tol);
        curve.sigma.push_back(s.value);
        curve.quadError.push_back(s.err);
    }

    // Zero detection: a grid value is "zero" when it is below the quadrature
    // noise floor; otherwise sign changes between neighbors are bisected.
    auto is_zero = [&](std::size_t i) {
        return std::abs(curve.sigma[i]) <= std::max(10.0 * curve.quadError[i], 1e-9);
    };
    for (std::size_t i = 0; i < curve.sigma.size(); ++i) {
        if (is_zero(i)) {
            curve.zeros.push_back(curve.omega[i]);
            continue;
        }
        if (i + 1 < curve.sigma.size() && !is_zero(i + 1) &&
            std::signbit(curve.sigma[i]) != std::signbit(curve.sigma[i + 1])) {
            double lo = curve.omega[i], hi = curve.omega[i + 1];
            double slo = curve.sigma[i];
            for (int it = 0; it < 60 && hi - lo > 1e-12 * m; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double smid = sigma(rho, mid, tol).value;
                if (std::signbit(smid) == std::signbit(slo)) {
                    lo = mid;
                    slo = smid;
                } else {
                    hi = mid;
                }
            }
            curve.zeros.push_back(0.5 * (lo + hi));
        }
    }
    if (curve.zeros.size() == 1) curve.omegaSigmaZero = curve.zeros.front();
    return curve;
}

SphereMass sphere_mass(const RhoHatFn& rhoHat, double m, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere_mass: radius must be positive");
    const DiracAlgebra alg = build_algebra(m);
    auto mass = [&](int sign) {
        return sphere_integral([&](const std::array<double, 3>& dir) {
            const Momentum xi{radius * dir[0], radius * dir[1], radius * dir[2]};
            const auto v = rhoHat(xi);
            Spinor4 s;
            for (int c = 0; c < 4; ++c) s[c] = v[c];
            const Projectors p = projectors(symbol(alg, xi));
            const Spinor4 proj = (sign > 0 ? p.plus : p.minus) * s;
            return proj.squaredNorm();
        });
    };
    return {mass(+1), mass(-1)};
}

SphereMass sphere_mass(const CouplingProfile& rho, double radius) {
    return sphere_mass([&](const Momentum& xi) { return rho.rho_hat(xi); }, rho.m(), radius);
}

SolitaryProfile profile_sigma_hat(const CouplingProfile& rho, double omega,
                                  const FourierGrid& grid) {
    const double m = rho.m();
    if (std::abs(omega) > m)
        throw std::invalid_argument(
            "profile: no square-integrable solitary profile outside the spectral gap");
    if (std::abs(omega) == m) {
        double at0 = rho.rho_hat_abs_sq(0.0);
        throw std::invalid_argument(
            at0 > 0.0 ? "profile: not square-integrable at the gap edge (rho_hat(0) != 0)"
                      : "profile: gap-edge profiles (rho_hat(0) = 0) not implemented");
    }

    SolitaryProfile prof;
    prof.omega = omega;
    prof.grid = grid;
    prof.sigmaHat = zero_field(grid, Space::momentum);

    const ShellTable shells = make_shells(grid, m);
    // radial values of rho_hat per shell, and 1/(omega^2 - lambda^2)
    std::vector<std::array<cplx, 4>> v(shells.maxKey + 1);
    std::vector<double> invDen(shells.maxKey + 1);
    for (int k = 0; k <= shells.maxKey; ++k) {
        v[k] = rho.rho_hat_radial(shells.radius[k]);
        invDen[k] = 1.0 / (omega * omega - shells.lambda[k] * shells.lambda[k]);
    }

    const int N = grid.N;
    const auto xiA = grid.xiAxis();
    std::size_t mode = 0;
    for (int ix = 0; ix < N; ++ix) {
        for (int iy = 0; iy < N; ++iy) {
            for (int iz = 0; iz < N; ++iz, ++mode) {
                const int key = shells.key[mode];
                const double xi[3] = {xiA[ix], xiA[iy], xiA[iz]};
                const auto& rv = v[key];
                cplx dv[4];
                apply_symbol(xi, m, rv.data(), dv);
                cplx* out = prof.sigmaHat.at(mode);
                const double q = invDen[key];
                for (int c = 0; c < 4; ++c) out[c] = q * (omega * rv[c] + dv[c]);
            }
        }
    }
    return prof;
}

SpinorField sample_rho_hat(const CouplingProfile& rho, const FourierGrid& grid) {
    SpinorField f = zero_field(grid, Space::momentum);
    const ShellTable shells = make_shells(grid, rho.m());
    std::vector<std::array<cplx, 4>> v(shells.maxKey + 1);
    for (int k = 0; k <= shells.maxKey; ++k) v[k] = rho.rho_hat_radial(shells.radius[k]);
    const std::size_t n = grid.modes();
    for (std::size_t mode = 0; mode < n; ++mode) {
        const auto& rv = v[shells.key[mode]];
        cplx* out = f.at(mode);
        for (int c = 0; c < 4; ++c) out[c] = rv[c];
    }
    return f;
}

SpinorField sample_rho(const CouplingProfile& rho, const FourierGrid& grid) {
    SpinorField f = zero_field(grid, Space::position);
    const int N = grid.N;
    const auto xA = grid.coordAxis();
    std::size_t mode = 0;
    for (int ix = 0; ix < N; ++ix) {
        for (int iy = 0; iy < N; ++iy) {
            for (int iz = 0; iz < N; ++iz, ++mode) {
                const auto v = rho.rho({xA[ix], xA[iy], xA[iz]});
                cplx* out = f.at(mode);
                for (int c = 0; c < 4; ++c) out[c] = v[c];
            }
        }
    }
    return f;
}

} // namespace mfd
