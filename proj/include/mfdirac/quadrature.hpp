#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

namespace mfd {

// Raised when an adaptive quadrature cannot reach the requested tolerance
// within its subdivision budget; carries the best estimate so callers can
// decide whether to proceed anyway (the atlas builder annotates and
// continues, the sigma oracle aborts).
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double best_, double err_)
        : std::runtime_error(what), best(best_), err(err_) {}
    double best;
    double err;
};

struct QuadResult {
    double value = 0.0;
    double err = 0.0;
};

// Adaptive Gauss-Kronrod on [0, inf). err is the absolute error estimate;
// throws QuadratureError when err > tol * max(1, |value|).
QuadResult integrate_radial(const std::function<double(double)>& f, double tol);

// Same rule on a finite interval [a, b].
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double tol);

// Integral over the unit sphere, product rule: 32-point Gauss-Legendre in
// cos(theta) times uniform trapezoid in phi (exact for spherical harmonics up
// to high degree; the integrands here are entire in the direction vector).
double sphere_integral(const std::function<double(const std::array<double, 3>&)>& f,
                       int nPhi = 64);

} // namespace mfd
