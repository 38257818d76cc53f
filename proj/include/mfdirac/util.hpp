#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace mfd {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Deterministic reductions. All grid-sized sums in this project go through
// block_sum: fixed 4096-element blocks accumulated left to right, block
// totals combined pairwise. Same binary, same input, same bits out, and the
// pairwise stage keeps rounding error O(log n) instead of O(n).
namespace detail {

template <class T>
T pairwise(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

} // namespace detail

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    if (v.empty()) return T{};
    return detail::pairwise(v, 0, v.size());
}

// Sums f(0) + f(1) + ... + f(n-1), f returning double or cplx.
template <class T, class F>
T block_sum(std::size_t n, F&& f) {
    constexpr std::size_t kBlock = 4096;
    std::vector<T> partial;
    partial.reserve(n / kBlock + 1);
    for (std::size_t base = 0; base < n; base += kBlock) {
        std::size_t end = std::min(base + kBlock, n);
        T acc{};
        for (std::size_t i = base; i < end; ++i) acc += f(i);
        partial.push_back(acc);
    }
    return pairwise_sum(partial);
}

// Seeded normal deviates. mt19937_64 is pinned down by the standard, so the
// bit stream is portable; std::normal_distribution is not, hence the manual
// (x >> 11) * 2^-53 mapping and Box-Muller.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    cplx complex_normal() {
        double re = normal();
        double im = normal();
        return {re, im};
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mfd
