#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfdirac/solitary.hpp"

using namespace mfd;

namespace {

PolynomialPotential quartic() { return PolynomialPotential({0.0, 1.0}); }

constexpr double kSigma0 = -0.48425568771737579;

} // namespace

TEST_CASE("amplitude roots: quartic closed form") {
    CHECK(amplitude_roots(quartic(), 0.0).empty());
    CHECK(amplitude_roots(PolynomialPotential({}), -0.5).empty());

    const auto roots = amplitude_roots(quartic(), kSigma0);
    REQUIRE(roots.size() == 1);
    const double want = -1.0 / (4.0 * kSigma0 * kSigma0 * kSigma0);
    CHECK(roots[0] == doctest::Approx(want).epsilon(1e-12));
    CHECK(roots[0] == doctest::Approx(2.2014854408956225).epsilon(1e-10));
    CHECK(std::abs(kSigma0 * quartic().g_of(roots[0] * kSigma0 * kSigma0) + 1.0) <= 1e-12);

    // positive sigma admits no root for the pure quartic (g >= 0)
    CHECK(amplitude_roots(quartic(), 0.5).empty());
}

TEST_CASE("amplitude roots: linear-in-s case") {
    const PolynomialPotential u({2.0, 1.0});
    const auto roots = amplitude_roots(u, -0.1);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("amplitude roots: two-branch sextic") {
    // g(s) = 2 - 4 s + 1.8 s^2 dips below 1 and recovers: two roots at sigma = -1
    const PolynomialPotential u({1.0, -1.0, 0.3});
    const auto roots = amplitude_roots(u, -1.0);
    REQUIRE(roots.size() == 2);
    const double disc = std::sqrt(16.0 - 4.0 * 1.8 * 1.0);
    CHECK(roots[0] == doctest::Approx((4.0 - disc) / 3.6).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx((4.0 + disc) / 3.6).epsilon(1e-12));
    for (double r : roots) CHECK(std::abs(-1.0 * u.g_of(r) + 1.0) <= 1e-12);
}

TEST_CASE("wave construction and the amplitude value") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    const FourierGrid g = make_grid(32, 16.0, 1.0);

    const double sig = sigma(rho, 0.0).value;
    const auto roots = amplitude_roots(U, sig);
    REQUIRE(roots.size() == 1);
    const SolitaryProfile prof = profile_sigma_hat(rho, 0.0, g);

    const SolitaryWave w = build_wave(0.0, roots[0], 0.0, prof, sig, U);
    CHECK(std::abs(w.C) == doctest::Approx(1.4837403549461147).epsilon(1e-10));

    // self-consistency C = F(C sigma)
    const cplx fc = U.F(w.C * sig);
    CHECK(std::abs(fc - w.C) <= 1e-12 * std::abs(w.C));

    // U(1) orbit: phases differ by an exact factor
    const SolitaryWave wth = build_wave(0.0, roots[0], 0.9, prof, sig, U);
    const cplx rot = std::exp(cplx{0.0, 0.9});
    double worst = 0.0;
    for (std::size_t i = 0; i < w.profileHat.data.size(); ++i)
        worst = std::max(worst, std::abs(wth.profileHat.data[i] - rot * w.profileHat.data[i]));
    CHECK(worst <= 1e-13);
    CHECK(wth.charge == doctest::Approx(w.charge).epsilon(1e-12));

    // inconsistent triples are rejected
    CHECK_THROWS_AS(build_wave(0.0, 1.5 * roots[0], 0.0, prof, sig, U), std::invalid_argument);
    CHECK_THROWS_AS(build_wave(0.0, -1.0, 0.0, prof, sig, U), std::invalid_argument);
}

TEST_CASE("stationary residual: small on the wave, large off it, phase-invariant") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    const FourierGrid g = make_grid(64, 32.0, 1.0);

    const double sig = sigma(rho, 0.0).value;
    const auto roots = amplitude_roots(U, sig);
    const SolitaryProfile prof = profile_sigma_hat(rho, 0.0, g);
    const SolitaryWave w = build_wave(0.0, roots[0], 0.0, prof, sig, U);

    const double res = residual(w, rho, U);
    CHECK(res <= 1e-3);

    const SolitaryWave wph = build_wave(0.0, roots[0], 2.1, prof, sig, U);
    CHECK(residual(wph, rho, U) == doctest::Approx(res).epsilon(1e-12));

    SolitaryWave off = w;
    off.C *= 1.5;
    for (auto& z : off.profileHat.data) z *= 1.5;
    CHECK(residual(off, rho, U) > 0.05);

    SolitaryWave zero = w;
    for (auto& z : zero.profileHat.data) z = 0.0;
    CHECK_THROWS_AS(residual(zero, rho, U), std::invalid_argument);
}

TEST_CASE("residual is small on a mirror-frequency branch too") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    const FourierGrid g = make_grid(32, 16.0, 1.0);
    for (double omega : {0.3, -0.3}) {
        const double sig = sigma(rho, omega).value;
        const auto roots = amplitude_roots(U, sig);
        REQUIRE(roots.size() == 1);
        const SolitaryProfile prof = profile_sigma_hat(rho, omega, g);
        const SolitaryWave w = build_wave(omega, roots[0], 0.0, prof, sig, U);
        CHECK(residual(w, rho, U) <= 5e-3);
    }
}

TEST_CASE("atlas construction over a frequency grid") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    const FourierGrid g = make_grid(32, 16.0, 1.0);

    std::vector<double> omegaGrid;
    for (int i = 0; i <= 20; ++i) omegaGrid.push_back(-0.6 + 1.2 * i / 20.0);
    const ManifoldAtlas atlas = build_atlas(rho, U, omegaGrid, g);
    REQUIRE(atlas.points.size() == omegaGrid.size());
    for (const auto& pt : atlas.points) {
        REQUIRE(!pt.quadFailed);
        REQUIRE(!pt.nearSingular);
        REQUIRE(pt.branches.size() == 1);
        const auto& br = pt.branches[0];
        CHECK(std::abs(pt.sigma * U.g_of(br.rootR * pt.sigma * pt.sigma) + 1.0) <= 1e-12);
        CHECK(br.charge > 0.0);
        CHECK(br.residual <= 5e-3);
    }
    // smooth charge curve along the branch: bounded curvature of log Q
    for (std::size_t i = 1; i + 1 < atlas.points.size(); ++i) {
        const double a = std::log(atlas.points[i - 1].branches[0].charge);
        const double b = std::log(atlas.points[i].branches[0].charge);
        const double c = std::log(atlas.points[i + 1].branches[0].charge);
        CHECK(std::abs(a - 2.0 * b + c) <= 0.2);
    }

    // materialized wave agrees with the stored branch data
    const SolitaryWave w = atlas_wave(atlas, rho, U, 10, 0, 0.0);
    CHECK(w.charge == doctest::Approx(atlas.points[10].branches[0].charge).epsilon(1e-10));
    CHECK_THROWS_AS(atlas_wave(atlas, rho, U, 99, 0, 0.0), std::invalid_argument);

    CHECK(build_atlas(rho, U, {}, g).points.empty());
}

TEST_CASE("atlas rejects frequencies outside the open gap") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    const FourierGrid g = make_grid(32, 16.0, 1.0);
    CHECK_THROWS_AS(build_atlas(rho, U, {0.0, 1.0}, g), std::invalid_argument);
    CHECK_THROWS_AS(build_atlas(rho, U, {-1.0}, g), std::invalid_argument);
    CHECK_THROWS_AS(build_atlas(rho, U, {1.2}, g), std::invalid_argument);
}

TEST_CASE("assumption checker") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U = quartic();
    std::vector<double> omegaGrid;
    for (int i = 0; i <= 40; ++i) omegaGrid.push_back(-1.0 + 2.0 * i / 40.0);

    const AssumptionReport rep = check_assumptions(rho, U, {0.5, 1.0, 2.0}, omegaGrid);
    CHECK(rep.potentialAdmissible);
    CHECK(rep.item1Tested);
    CHECK(rep.item1Pass);
    REQUIRE(rep.sphereMasses.size() == 3);
    CHECK(rep.item2Pass);
    REQUIRE(rep.curve.omegaSigmaZero.has_value());
    CHECK(*rep.curve.omegaSigmaZero == doctest::Approx(-1.0).epsilon(1e-9));

    const AssumptionReport noProbes = check_assumptions(rho, U, {}, omegaGrid);
    CHECK(!noProbes.item1Tested);

    const AssumptionReport zeroU = check_assumptions(rho, PolynomialPotential({}), {1.0}, omegaGrid);
    CHECK(!zeroU.potentialAdmissible);
}
