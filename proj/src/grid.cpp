#include "mfdirac/grid.hpp"

#include <cstring>
#include <stdexcept>

#include <fftw3.h>

namespace mfd {

std::vector<double> FourierGrid::coordAxis() const {
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = coord(i);
    return v;
}

std::vector<double> FourierGrid::xiAxis() const {
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = xi(i);
    return v;
}

FourierGrid make_grid(int N, double L, double m) {
    if (N < 8 || N % 2 != 0)
        throw std::invalid_argument("grid: N must be even, at least 8");
    if (!(L > 0.0)) throw std::invalid_argument("grid: box length must be positive");
    if (!(m > 0.0)) throw std::invalid_argument("grid: mass must be positive");
    const double corner = std::sqrt(3.0) * kPi * N / L;
    if (corner < 8.0 * m)
        throw std::invalid_argument(
            "grid: largest resolved frequency sqrt(3) pi N / L must be >= 8 m");
    FourierGrid g;
    g.N = N;
    g.L = L;
    return g;
}

SpinorField zero_field(const FourierGrid& grid, Space space) {
    SpinorField f;
    f.grid = grid;
    f.space = space;
    f.data.assign(grid.modes() * 4, cplx{0.0, 0.0});
    return f;
}

struct FftEngine::Plans {
    fftw_complex* scratch = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t count = 0;  // complex entries (modes * 4)

    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (scratch) fftw_free(scratch);
    }
};

FftEngine::~FftEngine() {
    for (auto& [n, p] : plans_) delete p;
}

FftEngine::Plans& FftEngine::plans_for(int N) {
    auto it = plans_.find(N);
    if (it != plans_.end()) return *it->second;
    auto* p = new Plans;
    p->count = std::size_t(N) * N * N * 4;
    p->scratch = fftw_alloc_complex(p->count);
    const int n[3] = {N, N, N};
    // 4 interleaved transforms: component c lives at offset c with stride 4
    p->fwd = fftw_plan_many_dft(3, n, 4, p->scratch, nullptr, 4, 1, p->scratch, nullptr, 4, 1,
                                FFTW_FORWARD, FFTW_ESTIMATE);
    p->bwd = fftw_plan_many_dft(3, n, 4, p->scratch, nullptr, 4, 1, p->scratch, nullptr, 4, 1,
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!p->fwd || !p->bwd) {
        delete p;
        throw std::runtime_error("grid: FFTW plan creation failed");
    }
    plans_[N] = p;
    return *p;
}

void FftEngine::to_momentum(SpinorField& f) {
    if (f.space != Space::position)
        throw std::logic_error("grid: to_momentum expects a position-space field");
    auto& p = plans_for(f.grid.N);
    std::memcpy(p.scratch, f.data.data(), p.count * sizeof(cplx));
    fftw_execute(p.fwd);
    const double scale = f.grid.cellVolume();
    const cplx* s = reinterpret_cast<const cplx*>(p.scratch);
    for (std::size_t i = 0; i < p.count; ++i) f.data[i] = scale * s[i];
    f.space = Space::momentum;
}

void FftEngine::to_position(SpinorField& f) {
    if (f.space != Space::momentum)
        throw std::logic_error("grid: to_position expects a momentum-space field");
    auto& p = plans_for(f.grid.N);
    std::memcpy(p.scratch, f.data.data(), p.count * sizeof(cplx));
    fftw_execute(p.bwd);
    const double scale = 1.0 / (f.grid.L * f.grid.L * f.grid.L);
    const cplx* s = reinterpret_cast<const cplx*>(p.scratch);
    for (std::size_t i = 0; i < p.count; ++i) f.data[i] = scale * s[i];
    f.space = Space::position;
}

ShellTable make_shells(const FourierGrid& grid, double m) {
    ShellTable t;
    const int N = grid.N;
    t.maxKey = 3 * (N / 2) * (N / 2);
    t.key.resize(grid.modes());
    std::size_t idx = 0;
    for (int ix = 0; ix < N; ++ix) {
        const int sx = grid.signedIndex(ix);
        for (int iy = 0; iy < N; ++iy) {
            const int sy = grid.signedIndex(iy);
            const int base = sx * sx + sy * sy;
            for (int iz = 0; iz < N; ++iz) {
                const int sz = grid.signedIndex(iz);
                t.key[idx++] = base + sz * sz;
            }
        }
    }
    t.radius.resize(t.maxKey + 1);
    t.lambda.resize(t.maxKey + 1);
    const double d = grid.dualStep();
    for (int k = 0; k <= t.maxKey; ++k) {
        const double r = d * std::sqrt(double(k));
        t.radius[k] = r;
        t.lambda[k] = std::sqrt(r * r + m * m);
    }
    return t;
}

cplx inner_product(const SpinorField& f, const SpinorField& g) {
    if (f.space != g.space || f.grid.N != g.grid.N || f.grid.L != g.grid.L)
        throw std::invalid_argument("grid: inner product needs matching grids and spaces");
    const std::size_t n = f.data.size();
    const cplx* a = f.data.data();
    const cplx* b = g.data.data();
    const cplx s = block_sum<cplx>(n, [&](std::size_t i) { return std::conj(a[i]) * b[i]; });
    const double w = (f.space == Space::position)
                         ? f.grid.cellVolume()
                         : f.grid.dualCellVolume() / std::pow(2.0 * kPi, 3);
    return w * s;
}

double norm_sq(const SpinorField& f) {
    const std::size_t n = f.data.size();
    const cplx* a = f.data.data();
    const double s = block_sum<double>(n, [&](std::size_t i) { return std::norm(a[i]); });
    const double w = (f.space == Space::position)
                         ? f.grid.cellVolume()
                         : f.grid.dualCellVolume() / std::pow(2.0 * kPi, 3);
    return w * s;
}

} // namespace mfd
