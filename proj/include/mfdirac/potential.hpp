#pragma once

#include <stdexcept>
#include <vector>

#include "mfdirac/util.hpp"

namespace mfd {

// U(z) = sum_{k=1}^{p} u_k |z|^{2k}, acting through F(z) = -g(|z|^2) z with
// g(s) = sum_k 2k u_k s^{k-1} = 2 a'(s) for a(s) = sum_k u_k s^k. Admissible
// potentials need p >= 2 and u_p > 0; the all-zero coefficient vector is also
// accepted as a validation mode (F identically zero, free evolution) and
// flagged by is_zero().
class PolynomialPotential {
public:
    explicit PolynomialPotential(std::vector<double> u) : u_(std::move(u)) {
        while (!u_.empty() && u_.back() == 0.0) u_.pop_back();
        if (u_.empty()) return;  // validation mode
        if (u_.size() < 2) throw std::invalid_argument("potential: degree parameter p must be >= 2");
        if (!(u_.back() > 0.0)) throw std::invalid_argument("potential: leading coefficient u_p must be positive");
    }

    bool is_zero() const { return u_.empty(); }
    int p() const { return int(u_.size()); }
    const std::vector<double>& coefficients() const { return u_; }

    // a(s) = sum u_k s^k, so U(z) = a(|z|^2)
    double a_of(double s) const {
        double acc = 0.0;
        for (std::size_t k = u_.size(); k > 0; --k) acc = (acc + u_[k - 1]) * s;
        return acc;
    }

    double U_value(cplx z) const { return a_of(std::norm(z)); }

    // g(s) = sum 2k u_k s^{k-1}
    double g_of(double s) const {
        double acc = 0.0;
        for (std::size_t k = u_.size(); k > 0; --k) acc = acc * s + 2.0 * double(k) * u_[k - 1];
        return acc;
    }

    // g'(s), for Newton steps on the amplitude equation and implicit solves
    double g_prime(double s) const {
        double acc = 0.0;
        for (std::size_t k = u_.size(); k > 1; --k)
            acc = acc * s + 2.0 * double(k) * double(k - 1) * u_[k - 1];
        return acc;
    }

    cplx F(cplx z) const { return -g_of(std::norm(z)) * z; }

private:
    std::vector<double> u_;
};

} // namespace mfd
