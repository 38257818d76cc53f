#include "mfdirac/dirac.hpp"

#include <stdexcept>

namespace mfd {

namespace {

Mat4 pauli_block(int j) {
    // alpha_j = [[0, sigma_j], [sigma_j, 0]]
    const cplx i{0.0, 1.0};
    Eigen::Matrix2cd sigma;
    switch (j) {
        case 0: sigma << 0, 1, 1, 0; break;
        case 1: sigma << 0, -i, i, 0; break;
        default: sigma << 1, 0, 0, -1; break;
    }
    Mat4 a = Mat4::Zero();
    a.block<2, 2>(0, 2) = sigma;
    a.block<2, 2>(2, 0) = sigma;
    return a;
}

} // namespace

DiracAlgebra build_algebra(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("build_algebra: mass must be positive");
    DiracAlgebra alg;
    alg.alpha = {pauli_block(0), pauli_block(1), pauli_block(2)};
    alg.beta = Mat4::Zero();
    alg.beta.diagonal() << 1, 1, -1, -1;
    alg.m = m;
    return alg;
}

SymbolMatrix symbol(const DiracAlgebra& alg, const Momentum& xi) {
    SymbolMatrix sym;
    sym.d = xi[0] * alg.alpha[0] + xi[1] * alg.alpha[1] + xi[2] * alg.alpha[2] + alg.m * alg.beta;
    sym.lambda = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + alg.m * alg.m);
    return sym;
}

Projectors projectors(const SymbolMatrix& sym) {
    const Mat4 half_d = sym.d / (2.0 * sym.lambda);
    Projectors p;
    p.plus = 0.5 * Mat4::Identity() + half_d;
    p.minus = 0.5 * Mat4::Identity() - half_d;
    return p;
}

Mat4 propagator(const SymbolMatrix& sym, double t) {
    const double arg = sym.lambda * t;
    const double s = (sym.lambda > 0.0) ? std::sin(arg) / sym.lambda : t;
    return std::cos(arg) * Mat4::Identity() - cplx{0.0, 1.0} * s * sym.d;
}

double algebra_violation(const std::array<Mat4, 3>& alpha, const Mat4& beta) {
    auto max_abs = [](const Mat4& a) { return a.cwiseAbs().maxCoeff(); };
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            const Mat4 anti = alpha[j] * alpha[k] + alpha[k] * alpha[j];
            const Mat4 want = (j == k) ? Mat4(2.0 * Mat4::Identity()) : Mat4(Mat4::Zero());
            worst = std::max(worst, max_abs(anti - want));
        }
        worst = std::max(worst, max_abs(alpha[j] * beta + beta * alpha[j]));
        worst = std::max(worst, max_abs(Mat4(alpha[j] - alpha[j].adjoint())));
    }
    worst = std::max(worst, max_abs(beta * beta - Mat4::Identity()));
    worst = std::max(worst, max_abs(Mat4(beta - beta.adjoint())));
    return worst;
}

} // namespace mfd
