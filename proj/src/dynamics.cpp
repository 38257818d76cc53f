#include "mfdirac/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mfdirac/quadrature.hpp"

namespace mfd {

namespace {

std::array<cplx, 4> normalized_dir(const std::array<cplx, 4>& dir) {
    double n2 = 0.0;
    for (const auto& c : dir) n2 += std::norm(c);
    if (!(n2 > 0.0)) throw std::invalid_argument("initial data: spinor direction must be nonzero");
    const double inv = 1.0 / std::sqrt(n2);
    std::array<cplx, 4> out = dir;
    for (auto& c : out) c *= inv;
    return out;
}

// Realized shell keys (those hit by at least one mode) in increasing order,
// so per-shell time sums have a fixed, grid-independent ordering.
std::vector<int> realized_keys(const ShellTable& shells) {
    std::vector<char> seen(shells.maxKey + 1, 0);
    for (int k : shells.key) seen[k] = 1;
    std::vector<int> keys;
    for (int k = 0; k <= shells.maxKey; ++k)
        if (seen[k]) keys.push_back(k);
    return keys;
}

} // namespace

SpinorField gaussian_packet(const FourierGrid& grid, const GaussianPacketParams& p) {
    if (!(p.width > 0.0)) throw std::invalid_argument("initial data: packet width must be positive");
    const auto dir = normalized_dir(p.dir);
    SpinorField f = zero_field(grid, Space::position);
    const auto axis = grid.coordAxis();
    const double iw2 = 1.0 / (2.0 * p.width * p.width);
    std::size_t mi = 0;
    for (int ix = 0; ix < grid.N; ++ix) {
        const double dx = axis[ix] - p.center[0];
        for (int iy = 0; iy < grid.N; ++iy) {
            const double dy = axis[iy] - p.center[1];
            for (int iz = 0; iz < grid.N; ++iz, ++mi) {
                const double dz = axis[iz] - p.center[2];
                const double r2 = dx * dx + dy * dy + dz * dz;
                const double phase =
                    p.k0[0] * axis[ix] + p.k0[1] * axis[iy] + p.k0[2] * axis[iz];
                const cplx val = p.amplitude * std::exp(-r2 * iw2) *
                                 cplx{std::cos(phase), std::sin(phase)};
                cplx* out = f.at(mi);
                for (int c = 0; c < 4; ++c) out[c] = val * dir[c];
            }
        }
    }
    return f;
}

SpinorField solitary_data(const SolitaryWave& wave) { return wave.profileHat; }

SpinorField perturbed_solitary(const SolitaryWave& wave, double delta, std::uint64_t seed,
                               double m, FftEngine& fft) {
    if (!(delta >= 0.0)) throw std::invalid_argument("initial data: delta must be >= 0");
    if (!(m > 0.0)) throw std::invalid_argument("initial data: mass must be positive");
    const FourierGrid& grid = wave.profileHat.grid;

    constexpr int kBumps = 48;
    const double bumpWidth = 0.75 / m;
    const double spread = 4.0 / m;
    GaussianSource src(seed);
    struct Bump {
        std::array<double, 3> c;
        cplx a;
        std::array<cplx, 4> dir;
    };
    std::vector<Bump> bumps(kBumps);
    for (auto& b : bumps) {
        for (int j = 0; j < 3; ++j) b.c[j] = spread * src.normal();
        b.a = src.complex_normal();
        std::array<cplx, 4> d;
        for (int j = 0; j < 4; ++j) d[j] = src.complex_normal();
        b.dir = normalized_dir(d);
    }

    // Separable per-axis Gaussian factors, nearest periodic image per axis.
    SpinorField noise = zero_field(grid, Space::position);
    const auto axis = grid.coordAxis();
    const int N = grid.N;
    const double iw2 = 1.0 / (2.0 * bumpWidth * bumpWidth);
    std::vector<double> fx(N), fy(N), fz(N);
    for (const auto& b : bumps) {
        for (int i = 0; i < N; ++i) {
            const double dx = std::remainder(axis[i] - b.c[0], grid.L);
            const double dy = std::remainder(axis[i] - b.c[1], grid.L);
            const double dz = std::remainder(axis[i] - b.c[2], grid.L);
            fx[i] = std::exp(-dx * dx * iw2);
            fy[i] = std::exp(-dy * dy * iw2);
            fz[i] = std::exp(-dz * dz * iw2);
        }
        std::size_t mi = 0;
        for (int ix = 0; ix < N; ++ix)
            for (int iy = 0; iy < N; ++iy) {
                const double fxy = fx[ix] * fy[iy];
                for (int iz = 0; iz < N; ++iz, ++mi) {
                    const cplx val = b.a * (fxy * fz[iz]);
                    cplx* out = noise.at(mi);
                    for (int c = 0; c < 4; ++c) out[c] += val * b.dir[c];
                }
            }
    }

    // Band limit |xi| <= 4m so the perturbation is grid-independent, then fix
    // its relative size.
    fft.to_momentum(noise);
    const auto shells = make_shells(grid, m);
    const double cut2 = 16.0 * m * m;
    for (std::size_t mi = 0; mi < grid.modes(); ++mi) {
        const double r = shells.radius[shells.key[mi]];
        if (r * r > cut2) {
            cplx* out = noise.at(mi);
            for (int c = 0; c < 4; ++c) out[c] = cplx{0.0, 0.0};
        }
    }
    const double target = delta * std::sqrt(norm_sq(wave.profileHat));
    const double have = std::sqrt(norm_sq(noise));
    if (!(have > 1e-14 * std::max(1.0, target)))
        throw NumericalError("initial data: perturbation field vanished after band limiting");
    const double scale = target / have;

    SpinorField out = wave.profileHat;
    const cplx amp{1.0 + delta, 0.0};
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = amp * out.data[i] + scale * noise.data[i];
    return out;
}

SpinorField superpose(const SpinorField& a, const SpinorField& b, cplx ca, cplx cb) {
    if (a.grid.N != b.grid.N || a.grid.L != b.grid.L || a.space != b.space)
        throw std::invalid_argument("initial data: superposition needs matching grids and spaces");
    SpinorField out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = ca * a.data[i] + cb * b.data[i];
    return out;
}

// ---------------------------------------------------------------------------

StrangStepper::StrangStepper(SpinorField psi0, const CouplingProfile& rho,
                             const PolynomialPotential& U, double dt, int substeps)
    : psi_(std::move(psi0)),
      rhoHat_(sample_rho_hat(rho, psi_.grid)),
      U_(U),
      shells_(make_shells(psi_.grid, rho.m())),
      xiAxis_(psi_.grid.xiAxis()),
      substeps_(substeps) {
    if (psi_.space != Space::momentum)
        throw std::invalid_argument("stepper: state must be handed over in momentum space");
    if (substeps_ < 2 || substeps_ % 2 != 0)
        throw std::invalid_argument("stepper: substep count must be even and >= 2");
    mass_ = rho.m();
    g0_ = norm_sq(rhoHat_);
    set_dt(dt);
}

void StrangStepper::set_dt(double dt) {
    if (dt == 0.0) throw std::invalid_argument("stepper: dt must be nonzero");
    dt_ = dt;
    const std::size_t nk = shells_.lambda.size();
    cosTab_.resize(nk);
    sincTab_.resize(nk);
    const double half = 0.5 * dt_;
    for (std::size_t k = 0; k < nk; ++k) {
        const double lam = shells_.lambda[k];
        cosTab_[k] = std::cos(lam * half);
        sincTab_[k] = std::sin(lam * half) / lam;
    }
}

cplx StrangStepper::y() const { return inner_product(rhoHat_, psi_); }

void StrangStepper::half_free_flow() {
    const int N = psi_.grid.N;
    std::size_t mi = 0;
    double xi[3];
    for (int ix = 0; ix < N; ++ix) {
        xi[0] = xiAxis_[ix];
        for (int iy = 0; iy < N; ++iy) {
            xi[1] = xiAxis_[iy];
            for (int iz = 0; iz < N; ++iz, ++mi) {
                xi[2] = xiAxis_[iz];
                const int key = shells_.key[mi];
                apply_propagator_cs(xi, mass_, cosTab_[key], sincTab_[key], psi_.at(mi));
            }
        }
    }
}

BFlowResult b_flow(const PolynomialPotential& U, double g0, cplx y0, double dt, int substeps) {
    if (substeps < 2 || substeps % 2 != 0)
        throw std::invalid_argument("b_flow: substep count must be even and >= 2");
    BFlowResult out;
    out.yEnd = y0;
    if (U.is_zero()) return out;
    const int n = substeps;
    const double h = dt / n;
    const cplx mig{0.0, -g0};
    auto rhs = [&](cplx Y) { return mig * U.F(Y); };
    std::vector<cplx> Fv(n + 1);
    cplx Y = y0;
    Fv[0] = U.F(Y);
    for (int i = 0; i < n; ++i) {
        const cplx k1 = rhs(Y);
        const cplx k2 = rhs(Y + 0.5 * h * k1);
        const cplx k3 = rhs(Y + 0.5 * h * k2);
        const cplx k4 = rhs(Y + h * k3);
        Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        Fv[i + 1] = U.F(Y);
    }
    cplx J = Fv[0] + Fv[n];
    for (int i = 1; i < n; i += 2) J += 4.0 * Fv[i];
    for (int i = 2; i < n; i += 2) J += 2.0 * Fv[i];
    out.J = (h / 3.0) * J;
    out.yEnd = Y;
    return out;
}

void StrangStepper::step() {
    half_free_flow();
    if (!U_.is_zero()) {
        const BFlowResult b = b_flow(U_, g0_, y(), dt_, substeps_);
        const cplx iJ{-b.J.imag(), b.J.real()};
        for (std::size_t i = 0; i < psi_.data.size(); ++i) psi_.data[i] -= iJ * rhoHat_.data[i];
    }
    half_free_flow();
    t_ += dt_;
}

// ---------------------------------------------------------------------------

MemoryKernel kernel(const CouplingProfile& rho, double dt, double T, double tol) {
    if (!(dt > 0.0)) throw std::invalid_argument("kernel: dt must be positive");
    if (!(T >= 0.0)) throw std::invalid_argument("kernel: horizon must be >= 0");
    const std::size_t n = std::size_t(std::llround(T / dt));
    const double m = rho.m();
    const double pref = 1.0 / (2.0 * kPi * kPi);

    // Finite cutoff instead of the infinite-interval transform: at large tau the
    // oscillatory integrand breaks the transform's error control, while on
    // [0, R] adaptive bisection resolves the oscillations directly. Beyond
    // w_min R = 42 every Gaussian factor is below e^{-1764}.
    double wMin = rho.terms().front().w;
    for (const auto& term : rho.terms()) wMin = std::min(wMin, term.w);
    const double R = 42.0 / wMin;

    MemoryKernel out;
    out.dt = dt;
    out.K.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double tau = dt * double(j);
        auto re = [&](double r) {
            const double lam = std::sqrt(r * r + m * m);
            return r * r * std::cos(lam * tau) * rho.rho_hat_abs_sq(r);
        };
        auto im = [&](double r) {
            const double lam = std::sqrt(r * r + m * m);
            return r * r * (std::sin(lam * tau) / lam) * m * rho.rho_hat_beta_form(r);
        };
        const QuadResult qr = integrate_interval(re, 0.0, R, tol);
        const QuadResult qi = integrate_interval(im, 0.0, R, tol);
        out.K[j] = pref * cplx{qr.value, -qi.value};
        out.errEstimate = std::max(out.errEstimate, pref * (qr.err + qi.err));
    }
    return out;
}

std::vector<cplx> free_projection(const CouplingProfile& rho, const SpinorField& psi0,
                                  const std::vector<double>& tGrid, FftEngine& fft) {
    SpinorField psi = psi0;
    if (psi.space == Space::position) fft.to_momentum(psi);
    const FourierGrid& grid = psi.grid;
    const double m = rho.m();
    const SpinorField rhoHat = sample_rho_hat(rho, grid);
    const ShellTable shells = make_shells(grid, m);

    // <rho, e^{-iDt} psi> = sum_shells cos(lam t) A_k - i sin(lam t) B_k with
    // A_k = sum_shell rho_hat^dag psi_hat, B_k = sum_shell rho_hat^dag D psi_hat / lam.
    std::vector<cplx> A(shells.maxKey + 1, cplx{0.0, 0.0});
    std::vector<cplx> B(shells.maxKey + 1, cplx{0.0, 0.0});
    const auto xiAxis = grid.xiAxis();
    std::size_t mi = 0;
    double xi[3];
    for (int ix = 0; ix < grid.N; ++ix) {
        xi[0] = xiAxis[ix];
        for (int iy = 0; iy < grid.N; ++iy) {
            xi[1] = xiAxis[iy];
            for (int iz = 0; iz < grid.N; ++iz, ++mi) {
                xi[2] = xiAxis[iz];
                const cplx* p = psi.at(mi);
                const cplx* r = rhoHat.at(mi);
                cplx dp[4];
                apply_symbol(xi, m, p, dp);
                cplx a{0.0, 0.0}, b{0.0, 0.0};
                for (int c = 0; c < 4; ++c) {
                    a += std::conj(r[c]) * p[c];
                    b += std::conj(r[c]) * dp[c];
                }
                const int key = shells.key[mi];
                A[key] += a;
                B[key] += b;
            }
        }
    }
    const auto keys = realized_keys(shells);
    for (int k : keys) B[k] /= shells.lambda[k];
    const double w = grid.dualCellVolume() / std::pow(2.0 * kPi, 3);

    std::vector<cplx> Y0(tGrid.size());
    std::vector<cplx> terms(keys.size());
    for (std::size_t it = 0; it < tGrid.size(); ++it) {
        const double t = tGrid[it];
        for (std::size_t q = 0; q < keys.size(); ++q) {
            const int k = keys[q];
            const double lt = shells.lambda[k] * t;
            terms[q] = std::cos(lt) * A[k] - cplx{0.0, std::sin(lt)} * B[k];
        }
        Y0[it] = w * pairwise_sum(terms);
    }
    return Y0;
}

std::vector<cplx> solve_volterra(const MemoryKernel& K, const std::vector<cplx>& Y0,
                                 const PolynomialPotential& U, double dt) {
    if (Y0.empty()) return {};
    if (!(dt > 0.0)) throw std::invalid_argument("volterra: dt must be positive");
    if (std::abs(K.dt - dt) > 1e-12 * std::max(1.0, dt))
        throw std::invalid_argument("volterra: kernel sampled at a different dt");
    const std::size_t n = Y0.size() - 1;
    if (K.K.size() < Y0.size())
        throw std::invalid_argument("volterra: kernel horizon shorter than the run");
    if (n > 20000)
        throw NumericalError("volterra: horizon exceeds the quadratic memory-sum budget", n);

    std::vector<cplx> y(n + 1);
    y[0] = Y0[0];
    if (U.is_zero()) {
        y = Y0;
        return y;
    }
    std::vector<cplx> Fv(n + 1);
    Fv[0] = U.F(y[0]);

    const cplx head = cplx{0.0, -1.0} * dt * 0.5 * K.K[0];  // coefficient of F(y_i)
    for (std::size_t i = 1; i <= n; ++i) {
        cplx mem = 0.5 * K.K[i] * Fv[0];
        for (std::size_t j = 1; j < i; ++j) mem += K.K[i - j] * Fv[j];
        const cplx base = Y0[i] + cplx{0.0, -1.0} * dt * mem;
        // Solve Y = base + head F(Y): damped fixed point, Newton fallback.
        cplx Y = y[i - 1];
        bool done = false;
        for (int it = 0; it < 200; ++it) {
            const cplx next = base + head * U.F(Y);
            const cplx Ynew = 0.3 * Y + 0.7 * next;
            const double dY = std::abs(Ynew - Y);
            Y = Ynew;
            if (dY <= 1e-12 * std::max(1.0, std::abs(Y))) {
                done = true;
                break;
            }
        }
        if (!done) {
            for (int it = 0; it < 100 && !done; ++it) {
                const double a = Y.real(), b = Y.imag();
                const double s = a * a + b * b;
                const double g = U.g_of(s), gp = U.g_prime(s);
                // dF/d(a,b) for F = -g(s)(a + ib)
                const double faa = -g - 2.0 * a * a * gp;
                const double fab = -2.0 * a * b * gp;
                const double fbb = -g - 2.0 * b * b * gp;
                const double hr = head.real(), hi = head.imag();
                // J = I - head * JF (complex multiplication as 2x2 rotation-scale)
                const double J11 = 1.0 - (hr * faa - hi * fab);
                const double J12 = -(hr * fab - hi * fbb);
                const double J21 = -(hi * faa + hr * fab);
                const double J22 = 1.0 - (hi * fab + hr * fbb);
                const cplx H = Y - base - head * U.F(Y);
                const double det = J11 * J22 - J12 * J21;
                if (det == 0.0) break;
                const double da = (H.real() * J22 - H.imag() * J12) / det;
                const double db = (H.imag() * J11 - H.real() * J21) / det;
                Y = cplx{a - da, b - db};
                if (std::abs(cplx{da, db}) <= 1e-12 * std::max(1.0, std::abs(Y))) done = true;
            }
        }
        if (!done)
            throw NumericalError("volterra: implicit step failed to converge", i);
        y[i] = Y;
        Fv[i] = U.F(Y);
    }
    return y;
}

SpinorField reconstruct_field(const std::vector<cplx>& ySeries, const SpinorField& psi0,
                              std::size_t index, const CouplingProfile& rho,
                              const PolynomialPotential& U, double dt) {
    if (psi0.space != Space::momentum)
        throw std::invalid_argument("reconstruct: initial state must be in momentum space");
    if (index >= ySeries.size())
        throw std::invalid_argument("reconstruct: index beyond the solved horizon");
    const FourierGrid& grid = psi0.grid;
    const double m = rho.m();
    const ShellTable shells = make_shells(grid, m);
    const SpinorField rhoHat = sample_rho_hat(rho, grid);
    const double t = dt * double(index);

    // Per shell: Gc = int_0^t cos(lam (t-s)) F(y(s)) ds, Gs the sine version,
    // same product-trapezoid weights as the scalar solve.
    const auto keys = realized_keys(shells);
    std::vector<cplx> Gc(shells.maxKey + 1, cplx{0.0, 0.0});
    std::vector<cplx> Gs(shells.maxKey + 1, cplx{0.0, 0.0});
    if (index > 0 && !U.is_zero()) {
        std::vector<cplx> Fv(index + 1);
        for (std::size_t j = 0; j <= index; ++j) Fv[j] = U.F(ySeries[j]);
        for (int k : keys) {
            const double lam = shells.lambda[k];
            cplx sc{0.0, 0.0}, ss{0.0, 0.0};
            for (std::size_t j = 0; j <= index; ++j) {
                const double w = (j == 0 || j == index) ? 0.5 : 1.0;
                const double arg = lam * (t - dt * double(j));
                sc += w * std::cos(arg) * Fv[j];
                ss += w * std::sin(arg) * Fv[j];
            }
            Gc[k] = dt * sc;
            Gs[k] = dt * ss;
        }
    }

    SpinorField out = zero_field(grid, Space::momentum);
    const auto xiAxis = grid.xiAxis();
    std::size_t mi = 0;
    double xi[3];
    for (int ix = 0; ix < grid.N; ++ix) {
        xi[0] = xiAxis[ix];
        for (int iy = 0; iy < grid.N; ++iy) {
            xi[1] = xiAxis[iy];
            for (int iz = 0; iz < grid.N; ++iz, ++mi) {
                xi[2] = xiAxis[iz];
                const int key = shells.key[mi];
                const double lam = shells.lambda[key];
                cplx v[4] = {psi0.at(mi)[0], psi0.at(mi)[1], psi0.at(mi)[2], psi0.at(mi)[3]};
                const double arg = lam * t;
                apply_propagator_cs(xi, m, std::cos(arg), std::sin(arg) / lam, v);
                const cplx* r = rhoHat.at(mi);
                cplx dr[4];
                apply_symbol(xi, m, r, dr);
                const cplx gc = cplx{0.0, 1.0} * Gc[key];  // -i Gc rho_hat
                const double sl = 1.0 / lam;
                cplx* o = out.at(mi);
                for (int c = 0; c < 4; ++c)
                    o[c] = v[c] - gc * r[c] - (Gs[key] * sl) * dr[c];
            }
        }
    }
    return out;
}

} // namespace mfd
