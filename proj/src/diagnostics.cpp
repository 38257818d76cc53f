#include "mfdirac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfdirac/quadrature.hpp"

namespace mfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// quintic smoothstep cutoff: 1 on [0, 1], 0 beyond 2, C^2 in between
double cutoff(double u) {
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    const double x = u - 1.0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

std::vector<int> realized_keys(const ShellTable& shells) {
    std::vector<char> seen(shells.maxKey + 1, 0);
    for (int k : shells.key) seen[k] = 1;
    std::vector<int> keys;
    for (int k = 0; k <= shells.maxKey; ++k)
        if (seen[k]) keys.push_back(k);
    return keys;
}

} // namespace

double charge(const SpinorField& psi) { return norm_sq(psi); }

double kinetic_energy(const SpinorField& psiHat, double m) {
    if (psiHat.space != Space::momentum)
        throw std::invalid_argument("energy: field must be in momentum space");
    const FourierGrid& g = psiHat.grid;
    const auto xiAxis = g.xiAxis();
    const int N = g.N;
    const double sum = block_sum<double>(g.modes(), [&](std::size_t mi) {
        const int iz = int(mi % N);
        const int iy = int((mi / N) % N);
        const int ix = int(mi / (std::size_t(N) * N));
        const double xi[3] = {xiAxis[ix], xiAxis[iy], xiAxis[iz]};
        const cplx* v = psiHat.at(mi);
        cplx dv[4];
        apply_symbol(xi, m, v, dv);
        double acc = 0.0;
        for (int c = 0; c < 4; ++c) acc += (std::conj(v[c]) * dv[c]).real();
        return acc;
    });
    const double w = g.dualCellVolume() / std::pow(2.0 * kPi, 3);
    return 0.5 * w * sum;
}

double energy(const SpinorField& psiHat, const SpinorField& rhoHatGrid,
              const PolynomialPotential& U, double m) {
    const cplx y = inner_product(rhoHatGrid, psiHat);
    return kinetic_energy(psiHat, m) - U.U_value(y);
}

double energy(const SpinorField& psiHat, const CouplingProfile& rho,
              const PolynomialPotential& U) {
    return energy(psiHat, sample_rho_hat(rho, psiHat.grid), U, rho.m());
}

// ---------------------------------------------------------------------------

YMetric::YMetric(const FourierGrid& grid, double m, YMetricSpec spec) : grid_(grid), m_(m) {
    if (!(m > 0.0)) throw std::invalid_argument("ymetric: mass must be positive");
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("ymetric: epsilon must be positive");
    eps_ = spec.epsilon;
    const int rAuto = int(std::floor(grid.L / 4.0));
    rmax_ = spec.Rmax > 0 ? spec.Rmax : rAuto;
    if (rmax_ < 1 || 2.0 * rmax_ > grid.L / 2.0)
        throw std::invalid_argument("ymetric: cutoff scales must satisfy 1 <= R <= L/4");

    const auto axis = grid.coordAxis();
    const int N = grid.N;
    masks_.resize(rmax_);
    for (int R = 1; R <= rmax_; ++R) {
        auto& mask = masks_[R - 1];
        mask.resize(grid.modes());
        std::size_t mi = 0;
        for (int ix = 0; ix < N; ++ix) {
            const double x2 = axis[ix] * axis[ix];
            for (int iy = 0; iy < N; ++iy) {
                const double xy2 = x2 + axis[iy] * axis[iy];
                for (int iz = 0; iz < N; ++iz, ++mi)
                    mask[mi] = cutoff(std::sqrt(xy2 + axis[iz] * axis[iz]) / double(R));
            }
        }
    }

    mult_.resize(grid.modes());
    const auto xiAxis = grid.xiAxis();
    std::size_t mi = 0;
    for (int ix = 0; ix < N; ++ix) {
        const double k2x = xiAxis[ix] * xiAxis[ix];
        for (int iy = 0; iy < N; ++iy) {
            const double k2xy = k2x + xiAxis[iy] * xiAxis[iy];
            for (int iz = 0; iz < N; ++iz, ++mi)
                mult_[mi] = std::pow(m_ * m_ + k2xy + xiAxis[iz] * xiAxis[iz], -eps_);
        }
    }
}

std::vector<double> YMetric::localized_norms(const SpinorField& psi, FftEngine& fft) const {
    if (psi.grid.N != grid_.N || psi.grid.L != grid_.L)
        throw std::invalid_argument("ymetric: field lives on a different grid");
    SpinorField pos = psi;
    if (pos.space == Space::momentum) fft.to_position(pos);

    const double w = grid_.dualCellVolume() / std::pow(2.0 * kPi, 3);
    std::vector<double> out(rmax_);
    for (int R = 1; R <= rmax_; ++R) {
        const auto& mask = masks_[R - 1];
        SpinorField masked = pos;
        for (std::size_t mi = 0; mi < grid_.modes(); ++mi) {
            cplx* v = masked.at(mi);
            for (int c = 0; c < 4; ++c) v[c] *= mask[mi];
        }
        fft.to_momentum(masked);
        out[R - 1] = w * block_sum<double>(grid_.modes(), [&](std::size_t mi) {
            const cplx* v = masked.at(mi);
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += std::norm(v[c]);
            return mult_[mi] * acc;
        });
    }
    return out;
}

double YMetric::ynorm(const SpinorField& psi, FftEngine& fft) const {
    const auto aR = localized_norms(psi, fft);
    double acc = 0.0;
    for (int R = rmax_; R >= 1; --R) acc += weight(R) * std::sqrt(std::max(0.0, aR[R - 1]));
    return acc;
}

double YMetric::tail_bound(const SpinorField& psi) const {
    return weight(rmax_) * std::pow(m_, -eps_) * std::sqrt(norm_sq(psi));
}

// ---------------------------------------------------------------------------

DistanceCalculator::DistanceCalculator(const ManifoldAtlas& atlas, const CouplingProfile& rho,
                                       const PolynomialPotential& U, const YMetric& metric,
                                       FftEngine& fft, double sigmaTol)
    : atlas_(&atlas),
      rho_(&rho),
      U_(U),
      metric_(&metric),
      sigmaTol_(sigmaTol),
      shells_(make_shells(atlas.grid, rho.m())),
      rhoHat_(sample_rho_hat(rho, atlas.grid)) {
    if (atlas.grid.N != metric.grid().N || atlas.grid.L != metric.grid().L)
        throw std::invalid_argument("distance: atlas and metric grids differ");
    if (std::abs(atlas.m - rho.m()) > 1e-12 * std::max(1.0, rho.m()))
        throw std::invalid_argument("distance: atlas and coupling masses differ");

    keys_ = realized_keys(shells_);

    const FourierGrid& g = atlas.grid;
    dRhoHat_.resize(g.modes() * 4);
    const auto xiAxis = g.xiAxis();
    std::size_t mi = 0;
    double xi[3];
    for (int ix = 0; ix < g.N; ++ix) {
        xi[0] = xiAxis[ix];
        for (int iy = 0; iy < g.N; ++iy) {
            xi[1] = xiAxis[iy];
            for (int iz = 0; iz < g.N; ++iz, ++mi) {
                xi[2] = xiAxis[iz];
                apply_symbol(xi, rho.m(), rhoHat_.at(mi), dRhoHat_.data() + mi * 4);
            }
        }
    }

    for (std::size_t pi = 0; pi < atlas.points.size(); ++pi) {
        const AtlasPoint& pt = atlas.points[pi];
        if (pt.nearSingular || pt.quadFailed || pt.branches.empty()) continue;
        Node node;
        node.pointIndex = pi;
        node.omega = pt.omega;
        node.sigma = pt.sigma;
        for (const auto& br : pt.branches) node.roots.push_back(br.rootR);
        const SolitaryProfile profile = profile_sigma_hat(rho, pt.omega, g);
        node.profileNorms = metric.localized_norms(profile.sigmaHat, fft);
        nodes_.push_back(std::move(node));
    }
}

double DistanceCalculator::node_distance(const std::vector<double>& aR,
                                         const std::vector<std::vector<cplx>>& P,
                                         const std::vector<std::vector<cplx>>& Q, double omega,
                                         double rootR, const std::vector<double>& profileNorms,
                                         double* phaseOut) const {
    const int rmax = metric_->Rmax();
    std::vector<cplx> cR(rmax);
    for (int R = 1; R <= rmax; ++R) {
        cplx acc{0.0, 0.0};
        const auto& PR = P[R - 1];
        const auto& QR = Q[R - 1];
        for (int k : keys_) {
            const double lam = shells_.lambda[k];
            acc += (omega * PR[k] + QR[k]) / (omega * omega - lam * lam);
        }
        cR[R - 1] = acc;
    }
    cplx agg{0.0, 0.0};
    for (int R = 1; R <= rmax; ++R) agg += metric_->weight(R) * cR[R - 1];
    const double theta = (agg == cplx{0.0, 0.0}) ? 0.0 : -std::arg(agg);
    const cplx rot{std::cos(theta), std::sin(theta)};
    const double sr = std::sqrt(rootR);
    double d = 0.0;
    for (int R = 1; R <= rmax; ++R) {
        const double term = aR[R - 1] + rootR * profileNorms[R - 1] -
                            2.0 * sr * (rot * cR[R - 1]).real();
        d += metric_->weight(R) * std::sqrt(std::max(0.0, term));
    }
    if (phaseOut) *phaseOut = theta;
    return d;
}

DistResult DistanceCalculator::evaluate(const SpinorField& psi, FftEngine& fft) const {
    const FourierGrid& g = atlas_->grid;
    if (psi.grid.N != g.N || psi.grid.L != g.L)
        throw std::invalid_argument("distance: field lives on a different grid");

    SpinorField pos = psi;
    if (pos.space == Space::momentum) fft.to_position(pos);

    const int rmax = metric_->Rmax();
    const double w = g.dualCellVolume() / std::pow(2.0 * kPi, 3);
    const auto& mult = metric_->multiplier();

    std::vector<double> aR(rmax);
    std::vector<std::vector<cplx>> P(rmax), Q(rmax);
    for (int R = 1; R <= rmax; ++R) {
        const auto& mask = metric_->mask(R);

        SpinorField masked = pos;
        for (std::size_t mi = 0; mi < g.modes(); ++mi) {
            cplx* v = masked.at(mi);
            for (int c = 0; c < 4; ++c) v[c] *= mask[mi];
        }
        fft.to_momentum(masked);
        aR[R - 1] = w * block_sum<double>(g.modes(), [&](std::size_t mi) {
            const cplx* v = masked.at(mi);
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += std::norm(v[c]);
            return mult[mi] * acc;
        });

        // W_R = chi_R K_eps(chi_R psi); its momentum samples against rho_hat
        // and D rho_hat shell-bin the candidate cross terms.
        for (std::size_t mi = 0; mi < g.modes(); ++mi) {
            cplx* v = masked.at(mi);
            for (int c = 0; c < 4; ++c) v[c] *= mult[mi];
        }
        fft.to_position(masked);
        for (std::size_t mi = 0; mi < g.modes(); ++mi) {
            cplx* v = masked.at(mi);
            for (int c = 0; c < 4; ++c) v[c] *= mask[mi];
        }
        fft.to_momentum(masked);

        P[R - 1].assign(shells_.maxKey + 1, cplx{0.0, 0.0});
        Q[R - 1].assign(shells_.maxKey + 1, cplx{0.0, 0.0});
        for (std::size_t mi = 0; mi < g.modes(); ++mi) {
            const cplx* W = masked.at(mi);
            const cplx* r = rhoHat_.at(mi);
            const cplx* dr = dRhoHat_.data() + mi * 4;
            cplx pc{0.0, 0.0}, qc{0.0, 0.0};
            for (int c = 0; c < 4; ++c) {
                pc += std::conj(W[c]) * r[c];
                qc += std::conj(W[c]) * dr[c];
            }
            const int key = shells_.key[mi];
            P[R - 1][key] += pc;
            Q[R - 1][key] += qc;
        }
        for (int k : keys_) {
            P[R - 1][k] *= w;
            Q[R - 1][k] *= w;
        }
    }

    DistResult res;
    for (int R = 1; R <= rmax; ++R)
        res.distZero += metric_->weight(R) * std::sqrt(std::max(0.0, aR[R - 1]));

    double bestD = kInf;
    std::size_t bestNode = 0, bestBranch = 0;
    double bestPhase = 0.0;
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
        const Node& node = nodes_[ni];
        for (std::size_t bi = 0; bi < node.roots.size(); ++bi) {
            double phase = 0.0;
            const double d = node_distance(aR, P, Q, node.omega, node.roots[bi],
                                           node.profileNorms, &phase);
            if (d < bestD) {
                bestD = d;
                bestNode = ni;
                bestBranch = bi;
                bestPhase = phase;
            }
        }
    }

    if (std::isfinite(bestD)) {
        const Node& node = nodes_[bestNode];
        res.dist = bestD;
        res.omega = node.omega;
        res.rootR = node.roots[bestBranch];
        res.phase = bestPhase;
        res.pointIndex = node.pointIndex;
        res.branchIndex = bestBranch;

        // Golden-section refinement between the neighboring atlas nodes,
        // interpolating the profile norms and re-deriving the amplitude from
        // the exact sigma at each iterate.
        const std::size_t lo = bestNode > 0 ? bestNode - 1 : bestNode;
        const std::size_t hi = bestNode + 1 < nodes_.size() ? bestNode + 1 : bestNode;
        if (hi > lo) {
            auto interpNorms = [&](double omega) {
                std::vector<double> out(rmax);
                const std::size_t i1 = bestNode;
                const std::size_t i0 = lo, i2 = hi;
                if (i0 == i1 || i2 == i1) {
                    // linear between the two distinct nodes
                    const Node& aN = nodes_[i0];
                    const Node& bN = nodes_[i2];
                    const double t = (omega - aN.omega) / (bN.omega - aN.omega);
                    for (int R = 0; R < rmax; ++R)
                        out[R] = (1.0 - t) * aN.profileNorms[R] + t * bN.profileNorms[R];
                    return out;
                }
                const double x0 = nodes_[i0].omega, x1 = nodes_[i1].omega, x2 = nodes_[i2].omega;
                const double l0 = (omega - x1) * (omega - x2) / ((x0 - x1) * (x0 - x2));
                const double l1 = (omega - x0) * (omega - x2) / ((x1 - x0) * (x1 - x2));
                const double l2 = (omega - x0) * (omega - x1) / ((x2 - x0) * (x2 - x1));
                for (int R = 0; R < rmax; ++R)
                    out[R] = l0 * nodes_[i0].profileNorms[R] + l1 * nodes_[i1].profileNorms[R] +
                             l2 * nodes_[i2].profileNorms[R];
                return out;
            };
            auto dOf = [&](double omega, double* rOut, double* phOut) {
                double sigmaValue;
                try {
                    sigmaValue = sigma(*rho_, omega, sigmaTol_).value;
                } catch (const QuadratureError&) {
                    return kInf;
                }
                if (std::abs(sigmaValue) < 1e-6) return kInf;
                const auto roots = amplitude_roots(U_, sigmaValue);
                if (bestBranch >= roots.size()) return kInf;
                const double r = roots[bestBranch];
                if (rOut) *rOut = r;
                return node_distance(aR, P, Q, omega, r, interpNorms(omega), phOut);
            };

            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = nodes_[lo].omega, b = nodes_[hi].omega;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = dOf(x1, nullptr, nullptr), f2 = dOf(x2, nullptr, nullptr);
            for (int it = 0; it < 30; ++it) {
                if (f1 <= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = dOf(x1, nullptr, nullptr);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = dOf(x2, nullptr, nullptr);
                }
            }
            const double omegaRef = 0.5 * (a + b);
            double rRef = 0.0, phRef = 0.0;
            const double dInterp = dOf(omegaRef, &rRef, &phRef);
            if (std::isfinite(dInterp) && rRef > 0.0) {
                // honest final value: exact profile norms at the refined omega
                const SolitaryProfile profile = profile_sigma_hat(*rho_, omegaRef, g);
                const auto exactNorms = metric_->localized_norms(profile.sigmaHat, fft);
                double phExact = 0.0;
                const double dExact =
                    node_distance(aR, P, Q, omegaRef, rRef, exactNorms, &phExact);
                if (dExact < res.dist) {
                    res.dist = dExact;
                    res.omega = omegaRef;
                    res.rootR = rRef;
                    res.phase = phExact;
                }
            }
        }
    }

    if (!std::isfinite(bestD) || res.distZero < res.dist) {
        res.dist = std::min(res.distZero, std::isfinite(bestD) ? res.dist : kInf);
        res.zeroBest = true;
        res.omega = 0.0;
        res.rootR = 0.0;
        res.phase = 0.0;
    }
    return res;
}

// ---------------------------------------------------------------------------

SpectrumResult time_spectrum(const std::vector<cplx>& y, double dt, double t0, double t1,
                             double m, SpectrumSpec spec) {
    if (!(dt > 0.0)) throw std::invalid_argument("spectrum: dt must be positive");
    if (!(m > 0.0)) throw std::invalid_argument("spectrum: mass must be positive");
    if (spec.count < 8) throw std::invalid_argument("spectrum: need at least 8 frequency samples");
    const std::size_t j0 = std::size_t(std::llround(t0 / dt));
    const std::size_t j1 = std::size_t(std::llround(t1 / dt));
    if (j1 <= j0 || j1 >= y.size())
        throw std::invalid_argument("spectrum: window outside the recorded series");
    if (j1 - j0 + 1 < 256)
        throw std::invalid_argument("spectrum: window holds fewer than 256 samples");

    const double omegaMax = spec.omegaMax > 0.0 ? spec.omegaMax : 5.0 * m;
    const double gapDelta = spec.gapDelta > 0.0 ? spec.gapDelta : 0.1 * m;
    const std::size_t n = j1 - j0;

    std::vector<double> win(n + 1);
    double W = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        win[j] = 0.5 * (1.0 - std::cos(2.0 * kPi * double(j) / double(n)));
        W += win[j];
    }

    SpectrumResult out;
    out.omega.resize(spec.count);
    out.density.resize(spec.count);
    const double dOmega = 2.0 * omegaMax / double(spec.count - 1);
    for (int k = 0; k < spec.count; ++k) {
        const double omega = -omegaMax + dOmega * double(k);
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j <= n; ++j) {
            const double t = dt * double(j0 + j);
            acc += win[j] * y[j0 + j] * cplx{std::cos(omega * t), std::sin(omega * t)};
        }
        out.omega[k] = omega;
        out.density[k] = std::norm(acc / W);
    }

    for (int k = 0; k + 1 < spec.count; ++k) {
        const double mid = 0.5 * (out.omega[k] + out.omega[k + 1]);
        const double cell = 0.5 * (out.density[k] + out.density[k + 1]) * dOmega;
        if (std::abs(mid) <= m + gapDelta)
            out.massInside += cell;
        else
            out.massOutside += cell;
    }

    int kBest = 0;
    for (int k = 1; k < spec.count; ++k)
        if (out.density[k] > out.density[kBest]) kBest = k;
    out.peakOmega = out.omega[kBest];
    out.peakDensity = out.density[kBest];
    if (kBest > 0 && kBest + 1 < spec.count) {
        const double dm = out.density[kBest - 1], d0 = out.density[kBest],
                     dp = out.density[kBest + 1];
        const double denom = dm - 2.0 * d0 + dp;
        if (denom < 0.0) out.peakOmega += 0.5 * dOmega * (dm - dp) / denom;
    }
    return out;
}

ToneFit fit_tone(const std::vector<cplx>& y, double dt, double t0, double t1,
                 double omegaGuess) {
    if (!(dt > 0.0)) throw std::invalid_argument("spectrum: dt must be positive");
    const std::size_t j0 = std::size_t(std::llround(t0 / dt));
    const std::size_t j1 = std::size_t(std::llround(t1 / dt));
    if (j1 <= j0 || j1 >= y.size())
        throw std::invalid_argument("spectrum: window outside the recorded series");
    if (j1 - j0 + 1 < 256)
        throw std::invalid_argument("spectrum: window holds fewer than 256 samples");
    const std::size_t n = j1 - j0;

    std::vector<double> win(n + 1);
    double W = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        win[j] = 0.5 * (1.0 - std::cos(2.0 * kPi * double(j) / double(n)));
        W += win[j];
    }
    const auto project = [&](double omega) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j <= n; ++j) {
            const double t = dt * double(j0 + j);
            acc += win[j] * y[j0 + j] * cplx{std::cos(omega * t), std::sin(omega * t)};
        }
        return acc / W;
    };

    // golden-section maximization of |c|^2; the carrier peak is unimodal
    // within one bin of the guess
    const double bin = 2.0 * kPi / (dt * double(n));
    double a = omegaGuess - bin, b = omegaGuess + bin;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::norm(project(x1)), f2 = std::norm(project(x2));
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(omegaGuess)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = std::norm(project(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = std::norm(project(x1));
        }
    }
    ToneFit fit;
    fit.omega = 0.5 * (a + b);
    fit.amp = project(fit.omega);
    fit.density = std::norm(fit.amp);
    return fit;
}

std::vector<cplx> subtract_tone(const std::vector<cplx>& y, double dt, const ToneFit& tone) {
    std::vector<cplx> out(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double t = dt * double(j);
        out[j] = y[j] - tone.amp * cplx{std::cos(tone.omega * t), -std::sin(tone.omega * t)};
    }
    return out;
}

CarrierSpectra carrier_spectra(const std::vector<cplx>& y, double dt, double t0, double t1,
                               double m, SpectrumSpec spec) {
    CarrierSpectra out;
    out.raw = time_spectrum(y, dt, t0, t1, m, spec);
    const double gapDelta = spec.gapDelta > 0.0 ? spec.gapDelta : 0.1 * m;
    if (std::abs(out.raw.peakOmega) <= m + gapDelta) {
        out.carrier = fit_tone(y, dt, t0, t1, out.raw.peakOmega);
        out.residual = time_spectrum(subtract_tone(y, dt, out.carrier), dt, t0, t1, m, spec);
        out.subtracted = true;
    } else {
        out.residual = out.raw;
    }
    return out;
}

} // namespace mfd
