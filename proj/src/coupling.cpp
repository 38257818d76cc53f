#include "mfdirac/coupling.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace mfd {

CouplingProfile::CouplingProfile(std::vector<GaussTerm> terms, double m)
    : terms_(std::move(terms)), m_(m) {
    if (!(m_ > 0.0)) throw std::invalid_argument("coupling: mass must be positive");
    if (terms_.empty()) throw std::invalid_argument("coupling: at least one term required");
    for (auto& t : terms_) {
        if (!(t.w > 0.0)) throw std::invalid_argument("coupling: Gaussian width must be positive");
        double n2 = 0.0;
        for (const auto& c : t.dir) n2 += std::norm(c);
        if (n2 == 0.0) throw std::invalid_argument("coupling: zero spinor direction");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& c : t.dir) c *= inv;
    }

    // rho == 0 exactly iff the terms of each shared width cancel as vectors
    // (Gaussians of distinct widths are linearly independent).
    std::map<double, std::array<cplx, 4>> groups;
    double scale = 0.0;
    for (const auto& t : terms_) {
        auto& acc = groups[t.w];
        const double w3 = t.w * t.w * t.w;
        for (int c = 0; c < 4; ++c) acc[c] += t.a * w3 * t.dir[c];
        scale += std::abs(t.a) * w3;
    }
    double worst = 0.0;
    for (const auto& [w, acc] : groups) {
        (void)w;
        for (const auto& c : acc) worst = std::max(worst, std::abs(c));
    }
    if (worst <= 1e-15 * scale)
        throw std::invalid_argument("coupling: terms cancel identically (rho == 0)");
}

std::array<cplx, 4> CouplingProfile::rho(const std::array<double, 3>& x) const {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    std::array<cplx, 4> out{};
    for (const auto& t : terms_) {
        const cplx f = t.a * std::exp(-r2 / (2.0 * t.w * t.w));
        for (int c = 0; c < 4; ++c) out[c] += f * t.dir[c];
    }
    return out;
}

std::array<cplx, 4> CouplingProfile::rho_hat_radial(double r) const {
    constexpr double two_pi_32 = 15.749609945722419;  // (2 pi)^{3/2}
    std::array<cplx, 4> out{};
    for (const auto& t : terms_) {
        const double w2 = t.w * t.w;
        const cplx f = t.a * two_pi_32 * t.w * w2 * std::exp(-0.5 * w2 * r * r);
        for (int c = 0; c < 4; ++c) out[c] += f * t.dir[c];
    }
    return out;
}

std::array<cplx, 4> CouplingProfile::rho_hat(const Momentum& xi) const {
    return rho_hat_radial(std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]));
}

double CouplingProfile::rho_hat_abs_sq(double r) const {
    const auto v = rho_hat_radial(r);
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]) + std::norm(v[3]);
}

double CouplingProfile::rho_hat_beta_form(double r) const {
    const auto v = rho_hat_radial(r);
    return std::norm(v[0]) + std::norm(v[1]) - std::norm(v[2]) - std::norm(v[3]);
}

double CouplingProfile::norm_sq() const {
    cplx acc{0.0, 0.0};
    for (const auto& ti : terms_) {
        for (const auto& tj : terms_) {
            cplx overlap{0.0, 0.0};
            for (int c = 0; c < 4; ++c) overlap += std::conj(ti.dir[c]) * tj.dir[c];
            const double wi2 = ti.w * ti.w, wj2 = tj.w * tj.w;
            const double vol = std::pow(2.0 * kPi * wi2 * wj2 / (wi2 + wj2), 1.5);
            acc += std::conj(ti.a) * tj.a * overlap * vol;
        }
    }
    return acc.real();
}

CouplingProfile normalized_gaussian(double m) {
    GaussTerm t;
    t.a = std::pow(kPi, -0.75);
    t.w = 1.0;
    t.dir = {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}};
    return CouplingProfile({t}, m);
}

} // namespace mfd
