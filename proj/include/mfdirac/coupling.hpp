#pragma once

#include <array>
#include <vector>

#include "mfdirac/dirac.hpp"
#include "mfdirac/util.hpp"

namespace mfd {

// One coupling term: complex amplitude a, Gaussian radial factor
// exp(-|x|^2 / (2 w^2)) centered at the origin, constant unit spinor
// direction. Fourier side (convention: forward transform without 2pi,
// inverse carries (2pi)^{-3}):
//   rho_hat_term(xi) = a (2pi)^{3/2} w^3 exp(-w^2 |xi|^2 / 2) dir.
struct GaussTerm {
    cplx a{0.0, 0.0};
    double w = 1.0;
    std::array<cplx, 4> dir{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}};
};

// Finite sum of Gauss terms sharing the mass m. rho_hat(xi) depends on xi
// only through |xi| (each term is radial times a constant spinor), which the
// spectral-function quadrature exploits.
class CouplingProfile {
public:
    CouplingProfile(std::vector<GaussTerm> terms, double m);

    const std::vector<GaussTerm>& terms() const { return terms_; }
    double m() const { return m_; }

    std::array<cplx, 4> rho(const std::array<double, 3>& x) const;
    std::array<cplx, 4> rho_hat(const Momentum& xi) const;

    // rho_hat on the sphere |xi| = r (any direction; the value is radial)
    std::array<cplx, 4> rho_hat_radial(double r) const;

    // The three radial scalars the quadratures consume, all real:
    //   absSq   = |rho_hat|^2(r)
    //   betaForm = rho_hat^dagger beta rho_hat (r)
    // 'dirForm' would be rho_hat^dagger (alpha.xi_hat) rho_hat; it integrates
    // to zero over every sphere for this family and is not exposed.
    double rho_hat_abs_sq(double r) const;
    double rho_hat_beta_form(double r) const;

    // ||rho||_{L2}^2 by exact Gaussian integrals (continuum, not grid)
    double norm_sq() const;

private:
    std::vector<GaussTerm> terms_;
    double m_;
};

// Convenience: the normalized single-Gaussian profile a = pi^{-3/4}, w = 1,
// direction e1 (a beta(+1) eigenvector), giving ||rho||_{L2} = 1.
CouplingProfile normalized_gaussian(double m);

} // namespace mfd
