#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfdirac/dynamics.hpp"

using namespace mfd;

namespace {

constexpr double kSigma05 = -0.84873624816336687;  // sigma at omega = 0.5, normalized gaussian

SolitaryWave make_wave(const CouplingProfile& rho, const PolynomialPotential& U, double omega,
                       double sigmaValue, const FourierGrid& grid, double phase = 0.0) {
    const auto profile = profile_sigma_hat(rho, omega, grid);
    const auto roots = amplitude_roots(U, sigmaValue);
    REQUIRE(roots.size() == 1);
    return build_wave(omega, roots[0], phase, profile, sigmaValue, U);
}

double max_abs_diff(const SpinorField& a, const SpinorField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

SpinorField free_propagate(const SpinorField& psiHat, double m, double t) {
    SpinorField out = psiHat;
    const auto xiAxis = out.grid.xiAxis();
    std::size_t mi = 0;
    double xi[3];
    for (int ix = 0; ix < out.grid.N; ++ix) {
        xi[0] = xiAxis[ix];
        for (int iy = 0; iy < out.grid.N; ++iy) {
            xi[1] = xiAxis[iy];
            for (int iz = 0; iz < out.grid.N; ++iz, ++mi) {
                xi[2] = xiAxis[iz];
                apply_propagator(xi, m, t, out.at(mi));
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("gaussian packet sampling") {
    const FourierGrid g = make_grid(16, 8.0, 1.0);
    GaussianPacketParams p;
    p.amplitude = cplx{0.5, 0.0};
    p.width = 1.0;
    p.k0 = {0.5, 0.0, 0.0};
    const SpinorField f = gaussian_packet(g, p);
    CHECK(f.space == Space::position);
    // mode (0,0,0) sits at x = 0: value = amplitude * dir
    CHECK(std::abs(f.at(0)[0] - cplx{0.5, 0.0}) <= 1e-15);
    CHECK(std::abs(f.at(0)[1]) <= 1e-15);
    CHECK(norm_sq(f) > 0.0);

    GaussianPacketParams bad = p;
    bad.width = 0.0;
    CHECK_THROWS_AS(gaussian_packet(g, bad), std::invalid_argument);
    bad = p;
    bad.dir = {cplx{0, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}};
    CHECK_THROWS_AS(gaussian_packet(g, bad), std::invalid_argument);
}

TEST_CASE("superposition") {
    const FourierGrid g = make_grid(8, 4.0, 1.0);
    GaussianPacketParams p;
    const SpinorField a = gaussian_packet(g, p);
    const SpinorField diff = superpose(a, a, cplx{1.0, 0.0}, cplx{-1.0, 0.0});
    CHECK(norm_sq(diff) <= 1e-28);

    SpinorField b = a;
    b.space = Space::momentum;
    CHECK_THROWS_AS(superpose(a, b, cplx{1, 0}, cplx{1, 0}), std::invalid_argument);
}

TEST_CASE("b_flow matches the exact circular solution") {
    const PolynomialPotential U({0.0, 1.0});  // g(s) = 4 s
    const double g0 = 0.8;
    const cplx y0{0.6, -0.3};
    const double dt = 0.01;
    const BFlowResult r = b_flow(U, g0, y0, dt, 4);

    const double s0 = std::norm(y0);
    const double Omega = g0 * U.g_of(s0);  // y(t) = y0 exp(i Omega t)
    const cplx yExact = y0 * std::exp(cplx{0.0, Omega * dt});
    CHECK(std::abs(r.yEnd - yExact) <= 1e-12);
    // J = -g(s0) y0 (e^{i Omega dt} - 1) / (i Omega)
    const cplx jExact = -U.g_of(s0) * y0 * (std::exp(cplx{0.0, Omega * dt}) - 1.0) /
                        cplx{0.0, Omega};
    CHECK(std::abs(r.J - jExact) <= 1e-12);
    CHECK(std::abs(std::abs(r.yEnd) - std::abs(y0)) <= 1e-13);

    const BFlowResult rz = b_flow(PolynomialPotential({}), g0, y0, dt, 4);
    CHECK(rz.J == cplx{0.0, 0.0});
    CHECK(rz.yEnd == y0);
    CHECK_THROWS_AS(b_flow(U, g0, y0, dt, 3), std::invalid_argument);
}

TEST_CASE("free evolution is exact per mode") {
    const double m = 1.0;
    const FourierGrid g = make_grid(16, 8.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.7, 0.2};
    p.k0 = {0.5, -0.3, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    StrangStepper st(psi0, rho, PolynomialPotential({}), 0.05);
    for (int i = 0; i < 100; ++i) st.step();
    CHECK(st.time() == doctest::Approx(5.0));

    const SpinorField exact = free_propagate(psi0, m, 5.0);
    CHECK(max_abs_diff(st.state(), exact) <= 1e-12);
    CHECK(std::abs(norm_sq(st.state()) - norm_sq(psi0)) <= 1e-13 * norm_sq(psi0));
}

TEST_CASE("stepper rejects bad setups") {
    const FourierGrid g = make_grid(8, 4.0, 1.0);
    const CouplingProfile rho = normalized_gaussian(1.0);
    const PolynomialPotential U({0.0, 1.0});
    SpinorField pos = gaussian_packet(g, GaussianPacketParams{});
    CHECK_THROWS_AS(StrangStepper(pos, rho, U, 0.01), std::invalid_argument);

    SpinorField mom = zero_field(g, Space::momentum);
    CHECK_THROWS_AS(StrangStepper(mom, rho, U, 0.01, 3), std::invalid_argument);
    CHECK_THROWS_AS(StrangStepper(mom, rho, U, 0.0), std::invalid_argument);
}

TEST_CASE("one interacting step decomposes as half-flow, kick, half-flow") {
    const double m = 1.0;
    const FourierGrid g = make_grid(16, 8.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.8, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    const double dt = 0.02;
    StrangStepper st(psi0, rho, U, dt);
    st.step();

    const SpinorField rhoHat = sample_rho_hat(rho, g);
    const double g0 = norm_sq(rhoHat);
    SpinorField expect = free_propagate(psi0, m, dt / 2.0);
    const cplx y0 = inner_product(rhoHat, expect);
    const BFlowResult b = b_flow(U, g0, y0, dt, 4);
    const cplx iJ{-b.J.imag(), b.J.real()};
    for (std::size_t i = 0; i < expect.data.size(); ++i) expect.data[i] -= iJ * rhoHat.data[i];
    expect = free_propagate(expect, m, dt / 2.0);

    CHECK(max_abs_diff(st.state(), expect) <= 1e-13);
    // the interaction moved the state, and only along rho_hat
    CHECK(std::abs(b.J) > 1e-6);
}

TEST_CASE("charge drift sits at the substep-quadrature floor") {
    const double m = 1.0;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    auto drift = [&](cplx amp, int substeps) {
        GaussianPacketParams p;
        p.amplitude = amp;
        p.k0 = {0.4, 0.0, 0.0};
        SpinorField psi0 = gaussian_packet(g, p);
        fft.to_momentum(psi0);
        StrangStepper st(psi0, rho, U, 0.02, substeps);
        const double q0 = norm_sq(st.state());
        for (int i = 0; i < 50; ++i) st.step();
        return std::abs(norm_sq(st.state()) - q0) / q0;
    };

    // weak coupling: drift is far below anything a physical run accumulates
    CHECK(drift(cplx{0.3, 0.0}, 4) <= 5e-9);

    // strong coupling: the residual drift is the O(h^4) substep-quadrature
    // error of the scalar flow, so doubling the substeps cuts it ~16x
    const double d4 = drift(cplx{0.8, 0.1}, 4);
    const double d8 = drift(cplx{0.8, 0.1}, 8);
    REQUIRE(d8 > 0.0);
    CHECK(d4 / d8 >= 8.0);
}

TEST_CASE("dt halving shows second order in the scalar history") {
    const double m = 1.0;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    // moderate amplitude keeps the splitting error dominant over the scalar
    // flow's internal O(h^4) quadrature, so the measured order is the method's
    GaussianPacketParams p;
    p.amplitude = cplx{0.35, 0.0};
    p.k0 = {0.3, 0.0, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    auto y_at_T = [&](double dt) {
        StrangStepper st(psi0, rho, U, dt);
        const int n = int(std::llround(1.0 / dt));
        for (int i = 0; i < n; ++i) st.step();
        return st.y();
    };
    const cplx yA = y_at_T(0.02);
    const cplx yB = y_at_T(0.01);
    const cplx yC = y_at_T(0.005);
    const double e1 = std::abs(yA - yB);
    const double e2 = std::abs(yB - yC);
    REQUIRE(e2 > 1e-13);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("time reversal returns to the initial state") {
    const double m = 1.0;
    const FourierGrid g = make_grid(16, 8.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.3, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    StrangStepper st(psi0, rho, U, 0.02);
    for (int i = 0; i < 30; ++i) st.step();
    st.set_dt(-0.02);
    for (int i = 0; i < 30; ++i) st.step();
    CHECK(std::abs(st.time()) <= 1e-12);
    CHECK(max_abs_diff(st.state(), psi0) <= 1e-8);
}

TEST_CASE("memory kernel values and symmetry") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const MemoryKernel K = kernel(rho, 1.0, 5.0);
    REQUIRE(K.K.size() == 6);
    CHECK(std::abs(K.K[0] - cplx{1.0, 0.0}) <= 1e-10);
    CHECK(std::abs(K.K[1] - cplx{0.034713010673860939, -0.64235865848917993}) <= 1e-9);
    CHECK(std::abs(K.K[5] - cplx{0.23899399045520847, -0.10938108290926245}) <= 1e-9);
    for (const cplx& k : K.K) CHECK(std::abs(k) <= 1.0 + 1e-10);
    CHECK(K.errEstimate <= 1e-8);

    // lattice cross-check: <rho, e^{-iD tau} rho> on a box, images negligible
    const FourierGrid g = make_grid(32, 16.0, 1.0);
    SpinorField rh = sample_rho_hat(rho, g);
    const SpinorField moved = free_propagate(rh, 1.0, 1.0);
    const cplx kLat = inner_product(rh, moved);
    CHECK(std::abs(kLat - K.K[1]) <= 1e-6);

    CHECK_THROWS_AS(kernel(rho, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(kernel(rho, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("free projection matches brute-force propagation") {
    const double m = 1.0;
    const FourierGrid g = make_grid(16, 8.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.6, 0.3};
    p.k0 = {0.0, 0.5, 0.0};
    p.center = {1.0, 0.0, -0.5};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);
    const SpinorField rhoHat = sample_rho_hat(rho, g);

    const std::vector<double> tGrid = {0.0, 0.3, 1.7};
    const std::vector<cplx> Y0 = free_projection(rho, psi0, tGrid, fft);
    REQUIRE(Y0.size() == 3);
    for (std::size_t i = 0; i < tGrid.size(); ++i) {
        const SpinorField moved = free_propagate(psi0, m, tGrid[i]);
        const cplx brute = inner_product(rhoHat, moved);
        CHECK(std::abs(Y0[i] - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
    }
    CHECK(std::abs(Y0[0] - inner_product(rhoHat, psi0)) <= 1e-13);
}

TEST_CASE("volterra with zero potential returns the free projection") {
    const CouplingProfile rho = normalized_gaussian(1.0);
    const MemoryKernel K = kernel(rho, 0.1, 1.0);
    std::vector<cplx> Y0(11);
    for (std::size_t i = 0; i < Y0.size(); ++i)
        Y0[i] = cplx{0.1 * double(i), -0.05 * double(i)};
    const std::vector<cplx> y = solve_volterra(K, Y0, PolynomialPotential({}), 0.1);
    REQUIRE(y.size() == Y0.size());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == Y0[i]);

    CHECK_THROWS_AS(solve_volterra(K, Y0, PolynomialPotential({}), 0.2), std::invalid_argument);
    std::vector<cplx> tooLong(12, cplx{0, 0});
    CHECK_THROWS_AS(solve_volterra(K, tooLong, PolynomialPotential({}), 0.1),
                    std::invalid_argument);
}

TEST_CASE("spectral and volterra engines agree on a scalar history") {
    const double m = 1.0;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.5, 0.0};
    p.k0 = {0.3, 0.0, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    const double dt = 0.01;
    const double T = 2.0;
    const int n = int(std::llround(T / dt));

    std::vector<double> tGrid(n + 1);
    for (int i = 0; i <= n; ++i) tGrid[i] = dt * double(i);
    const MemoryKernel K = kernel(rho, dt, T);
    const std::vector<cplx> Y0 = free_projection(rho, psi0, tGrid, fft);
    const std::vector<cplx> yV = solve_volterra(K, Y0, U, dt);

    StrangStepper st(psi0, rho, U, dt);
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        st.step();
        worst = std::max(worst, std::abs(st.y() - yV[std::size_t(i)]));
    }
    CHECK(std::abs(inner_product(sample_rho_hat(rho, g), psi0) - yV[0]) <= 1e-13);
    CHECK(worst <= 2e-3);
}

TEST_CASE("solitary wave stays on its orbit under the spectral engine") {
    const double m = 1.0;
    const double omega = 0.5;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});

    const SolitaryWave wave = make_wave(rho, U, omega, kSigma05, g);
    SpinorField psi0 = solitary_data(wave);

    const double dt = 0.01;
    StrangStepper st(psi0, rho, U, dt);
    const cplx y0 = st.y();
    for (int i = 0; i < 200; ++i) st.step();
    const cplx yT = st.y();
    // psi(t) = phi e^{-i omega t}, so y winds at rate -omega with constant modulus
    CHECK(std::abs(std::abs(yT) - std::abs(y0)) <= 1e-3 * std::abs(y0));
    CHECK(std::abs(yT - y0 * std::exp(cplx{0.0, -omega * 2.0})) <= 2e-2 * std::abs(y0));
    CHECK(std::abs(norm_sq(st.state()) - wave.charge) <= 1e-6 * wave.charge);
}

TEST_CASE("duhamel reconstruction matches the spectral state") {
    const double m = 1.0;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    GaussianPacketParams p;
    p.amplitude = cplx{0.5, 0.0};
    p.k0 = {0.3, 0.0, 0.0};
    SpinorField psi0 = gaussian_packet(g, p);
    fft.to_momentum(psi0);

    const double dt = 0.01;
    const int n = 100;  // T = 1
    std::vector<double> tGrid(n + 1);
    for (int i = 0; i <= n; ++i) tGrid[i] = dt * double(i);
    const MemoryKernel K = kernel(rho, dt, 1.0);
    const std::vector<cplx> Y0 = free_projection(rho, psi0, tGrid, fft);
    const std::vector<cplx> yV = solve_volterra(K, Y0, U, dt);

    // exactness at t = 0
    const SpinorField r0 = reconstruct_field(yV, psi0, 0, rho, U, dt);
    CHECK(max_abs_diff(r0, psi0) <= 1e-15);

    // free case: reconstruction is the exact propagator
    const std::vector<cplx> yFree = solve_volterra(K, Y0, PolynomialPotential({}), dt);
    const SpinorField rFree = reconstruct_field(yFree, psi0, n, rho, PolynomialPotential({}), dt);
    CHECK(max_abs_diff(rFree, free_propagate(psi0, m, 1.0)) <= 1e-12);

    // interacting case vs the stepper
    StrangStepper st(psi0, rho, U, dt);
    for (int i = 0; i < n; ++i) st.step();
    const SpinorField rT = reconstruct_field(yV, psi0, n, rho, U, dt);
    SpinorField diff = superpose(rT, st.state(), cplx{1, 0}, cplx{-1, 0});
    CHECK(std::sqrt(norm_sq(diff)) <= 3e-3 * std::sqrt(norm_sq(psi0)));

    CHECK_THROWS_AS(reconstruct_field(yV, psi0, n + 1, rho, U, dt), std::invalid_argument);
}

TEST_CASE("perturbed solitary data is seeded, sized, and band limited") {
    const double m = 1.0;
    const double omega = 0.5;
    const FourierGrid g = make_grid(32, 16.0, m);
    const CouplingProfile rho = normalized_gaussian(m);
    const PolynomialPotential U({0.0, 1.0});
    FftEngine fft;

    const SolitaryWave wave = make_wave(rho, U, omega, kSigma05, g);
    const double delta = 0.2;
    const SpinorField a = perturbed_solitary(wave, delta, 7, m, fft);
    const SpinorField b = perturbed_solitary(wave, delta, 7, m, fft);
    const SpinorField c = perturbed_solitary(wave, delta, 8, m, fft);
    CHECK(max_abs_diff(a, b) == 0.0);
    CHECK(max_abs_diff(a, c) > 1e-6);

    // noise part has relative size delta
    const SpinorField noise =
        superpose(a, wave.profileHat, cplx{1, 0}, cplx{-(1.0 + delta), 0.0});
    CHECK(std::sqrt(norm_sq(noise)) ==
          doctest::Approx(delta * std::sqrt(wave.charge)).epsilon(1e-10));

    // outside |xi| <= 4m the data is exactly (1 + delta) phi_hat
    const ShellTable shells = make_shells(g, m);
    double worstOutside = 0.0;
    for (std::size_t mi = 0; mi < g.modes(); ++mi) {
        if (shells.radius[shells.key[mi]] <= 4.0 * m) continue;
        for (int comp = 0; comp < 4; ++comp)
            worstOutside = std::max(
                worstOutside,
                std::abs(a.at(mi)[comp] - (1.0 + delta) * wave.profileHat.at(mi)[comp]));
    }
    CHECK(worstOutside == 0.0);

    CHECK_THROWS_AS(perturbed_solitary(wave, -0.1, 7, m, fft), std::invalid_argument);
}
