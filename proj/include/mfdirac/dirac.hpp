#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "mfdirac/util.hpp"

namespace mfd {

using Mat4 = Eigen::Matrix4cd;
using Spinor4 = Eigen::Vector4cd;
using Momentum = std::array<double, 3>;

// Standard Dirac representation: beta = diag(1,1,-1,-1), alpha_j carries the
// Pauli matrix sigma_j in the off-diagonal 2x2 blocks. The mass m sets all
// units (lengths 1/m, times 1/m) and is carried as data, not normalized away.
struct DiracAlgebra {
    std::array<Mat4, 3> alpha;
    Mat4 beta;
    double m = 1.0;
};

// Throws std::invalid_argument for m <= 0.
DiracAlgebra build_algebra(double m);

// D(xi) = alpha . xi + beta m together with the dispersion value
// lambda = sqrt(|xi|^2 + m^2); D^2 = lambda^2 I, eigenvalues +-lambda each
// twice.
struct SymbolMatrix {
    Mat4 d;
    double lambda = 0.0;
};

SymbolMatrix symbol(const DiracAlgebra& alg, const Momentum& xi);

// Spectral projectors Pi_pm = (I +- D/lambda)/2 onto the +-lambda eigenspaces.
struct Projectors {
    Mat4 plus;
    Mat4 minus;
};

Projectors projectors(const SymbolMatrix& sym);

// exp(-i D t) in closed form: cos(lambda t) I - i sin(lambda t)/lambda D.
Mat4 propagator(const SymbolMatrix& sym, double t);

// Largest entrywise violation over all defining identities:
// {alpha_j, alpha_k} = 2 delta_jk I, {alpha_j, beta} = 0, beta^2 = I, and
// Hermiticity of every matrix. Takes the matrices (not a DiracAlgebra) so a
// deliberately corrupted set can be fed in by the selftest hook.
double algebra_violation(const std::array<Mat4, 3>& alpha, const Mat4& beta);

// Hot-path forms on raw 4-vectors; no matrix assembly. Used per grid mode by
// the spectral stepper and the profile builders.

inline double dispersion(const double xi[3], double m) {
    return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + m * m);
}

// out = D(xi) in
inline void apply_symbol(const double xi[3], double m, const cplx in[4], cplx out[4]) {
    const cplx xm{xi[0], -xi[1]};  // xi1 - i xi2
    const cplx xp{xi[0], xi[1]};   // xi1 + i xi2
    out[0] = m * in[0] + xi[2] * in[2] + xm * in[3];
    out[1] = m * in[1] + xp * in[2] - xi[2] * in[3];
    out[2] = -m * in[2] + xi[2] * in[0] + xm * in[1];
    out[3] = -m * in[3] + xp * in[0] - xi[2] * in[1];
}

// v <- (c I - i s D(xi)) v. Callers pass c = cos(lambda t) and
// s = sin(lambda t)/lambda, typically cached per dispersion shell.
inline void apply_propagator_cs(const double xi[3], double m, double c, double s, cplx v[4]) {
    cplx dv[4];
    apply_symbol(xi, m, v, dv);
    const cplx is{0.0, s};
    for (int k = 0; k < 4; ++k) v[k] = c * v[k] - is * dv[k];
}

// v <- exp(-i D(xi) t) v
inline void apply_propagator(const double xi[3], double m, double t, cplx v[4]) {
    const double lam = dispersion(xi, m);
    const double arg = lam * t;
    const double s = (lam > 0.0) ? std::sin(arg) / lam : t;
    apply_propagator_cs(xi, m, std::cos(arg), s, v);
}

} // namespace mfd
