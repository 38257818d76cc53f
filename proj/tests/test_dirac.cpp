#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfdirac/dirac.hpp"

using namespace mfd;

namespace {

Momentum random_momentum(GaussianSource& rng, double scale = 2.0) {
    return {scale * rng.normal(), scale * rng.normal(), scale * rng.normal()};
}

double max_abs(const Mat4& a) { return a.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("standard representation satisfies the algebra exactly") {
    const DiracAlgebra alg = build_algebra(1.0);
    CHECK(max_abs(alg.beta * alg.beta - Mat4::Identity()) <= 1e-13);
    CHECK(max_abs(alg.alpha[0] * alg.alpha[1] + alg.alpha[1] * alg.alpha[0]) <= 1e-13);
    CHECK(max_abs(alg.alpha[2] * alg.beta + alg.beta * alg.alpha[2]) <= 1e-13);
    CHECK(algebra_violation(alg.alpha, alg.beta) <= 1e-13);
}

TEST_CASE("mass validation") {
    CHECK_THROWS_AS(build_algebra(0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_algebra(-1.0), std::invalid_argument);
}

TEST_CASE("algebra_violation flags a corrupted beta") {
    DiracAlgebra alg = build_algebra(1.0);
    alg.beta(0, 0) = 1.01;
    CHECK(algebra_violation(alg.alpha, alg.beta) >= 0.01);
}

TEST_CASE("symbol values and dispersion") {
    const DiracAlgebra alg1 = build_algebra(1.0);
    const SymbolMatrix s0 = symbol(alg1, {0.0, 0.0, 0.0});
    CHECK(max_abs(s0.d - alg1.beta) <= 1e-13);
    CHECK(s0.lambda == doctest::Approx(1.0).epsilon(1e-14));

    const DiracAlgebra alg4 = build_algebra(4.0);
    CHECK(symbol(alg4, {3.0, 0.0, 0.0}).lambda == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("symbol squares to lambda^2 on random momenta") {
    const DiracAlgebra alg = build_algebra(1.0);
    GaussianSource rng(7001);
    for (int i = 0; i < 200; ++i) {
        const SymbolMatrix s = symbol(alg, random_momentum(rng));
        CHECK(max_abs(s.d * s.d - s.lambda * s.lambda * Mat4::Identity()) <= 1e-13 * s.lambda * s.lambda);
    }
}

TEST_CASE("projectors at zero momentum and at random momenta") {
    const DiracAlgebra alg = build_algebra(1.0);
    const Projectors p0 = projectors(symbol(alg, {0.0, 0.0, 0.0}));
    Mat4 want = Mat4::Zero();
    want.diagonal() << 1, 1, 0, 0;
    CHECK(max_abs(p0.plus - want) <= 1e-13);

    GaussianSource rng(7002);
    for (int i = 0; i < 200; ++i) {
        const Projectors p = projectors(symbol(alg, random_momentum(rng)));
        CHECK(max_abs(p.plus * p.plus - p.plus) <= 1e-13);
        CHECK(max_abs(p.minus * p.minus - p.minus) <= 1e-13);
        CHECK(max_abs(p.plus + p.minus - Mat4::Identity()) <= 1e-13);
        CHECK(max_abs(p.plus * p.minus) <= 1e-13);
        CHECK(std::abs(p.plus.trace().real() - 2.0) <= 1e-13);
        CHECK(std::abs(p.plus.trace().imag()) <= 1e-13);
    }
}

TEST_CASE("propagator special values") {
    const DiracAlgebra alg = build_algebra(1.0);
    const SymbolMatrix s0 = symbol(alg, {0.0, 0.0, 0.0});
    CHECK(max_abs(propagator(s0, 0.0) - Mat4::Identity()) <= 1e-13);
    CHECK(max_abs(propagator(s0, kPi) + Mat4::Identity()) <= 1e-13);
}

TEST_CASE("propagator is unitary and a one-parameter group") {
    const DiracAlgebra alg = build_algebra(1.0);
    GaussianSource rng(7003);
    for (int i = 0; i < 200; ++i) {
        const SymbolMatrix s = symbol(alg, random_momentum(rng));
        const double t1 = 3.0 * rng.normal(), t2 = 3.0 * rng.normal();
        const Mat4 u1 = propagator(s, t1);
        CHECK(max_abs(u1.adjoint() * u1 - Mat4::Identity()) <= 1e-12);
        CHECK(max_abs(u1 * propagator(s, t2) - propagator(s, t1 + t2)) <= 1e-12);
    }
}

TEST_CASE("propagator multiplies eigenvectors by the eigenphase") {
    const DiracAlgebra alg = build_algebra(1.0);
    GaussianSource rng(7004);
    for (int i = 0; i < 50; ++i) {
        const SymbolMatrix s = symbol(alg, random_momentum(rng));
        const Projectors p = projectors(s);
        Spinor4 v = p.plus * Spinor4(1.0, 0.3, -0.2, 0.1);
        REQUIRE(v.norm() > 1e-3);
        v.normalize();
        const double t = 2.0 * rng.normal();
        const Spinor4 diff = propagator(s, t) * v - std::exp(cplx{0.0, -s.lambda * t}) * v;
        CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("raw-vector symbol and propagator match the matrix forms") {
    const double m = 1.3;
    const DiracAlgebra alg = build_algebra(m);
    GaussianSource rng(7005);
    for (int i = 0; i < 200; ++i) {
        const Momentum xi = random_momentum(rng);
        const double xiRaw[3] = {xi[0], xi[1], xi[2]};
        cplx v[4], dv[4];
        Spinor4 ve;
        for (int c = 0; c < 4; ++c) {
            v[c] = rng.complex_normal();
            ve[c] = v[c];
        }
        const SymbolMatrix s = symbol(alg, xi);

        apply_symbol(xiRaw, m, v, dv);
        const Spinor4 dve = s.d * ve;
        for (int c = 0; c < 4; ++c) CHECK(std::abs(dv[c] - dve[c]) <= 1e-13 * (1.0 + s.lambda));

        const double t = rng.normal();
        apply_propagator(xiRaw, m, t, v);
        const Spinor4 uve = propagator(s, t) * ve;
        for (int c = 0; c < 4; ++c) CHECK(std::abs(v[c] - uve[c]) <= 1e-12);
    }
}

TEST_CASE("seeded gaussian source is reproducible") {
    GaussianSource a(42), b(42), c(43);
    bool allEqual = true, anyDiffer = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.normal();
        allEqual = allEqual && (x == b.normal());
        anyDiffer = anyDiffer || (x != c.normal());
    }
    CHECK(allEqual);
    CHECK(anyDiffer);
}

TEST_CASE("pairwise block sums match plain accumulation") {
    GaussianSource rng(99);
    std::vector<double> v(10000);
    double plain = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        plain += x;
    }
    const double blocked = block_sum<double>(v.size(), [&](std::size_t i) { return v[i]; });
    CHECK(std::abs(blocked - plain) <= 1e-10);
    // bitwise stability
    CHECK(blocked == block_sum<double>(v.size(), [&](std::size_t i) { return v[i]; }));
}
