#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cskor {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a,b].
/// Known interior kinks/jumps can be passed as breakpoints; each panel
/// between consecutive breakpoints is refined independently.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     std::span<const double> breakpoints = {});

/// Single (G7,K15) panel; returns the K15 value and sets err to the
/// scaled |G7-K15| error estimate.
double gk15_panel(const std::function<double(double)>& f, double a, double b, double& err);

/// Cauchy principal value of f over [a,b] around a simple pole. The
/// symmetric window [pole-w, pole+w] is integrated as the pair sum
/// f(pole+t)+f(pole-t), which cancels the odd singularity; the rest is
/// ordinary adaptive quadrature.
double pv_integrate(const std::function<double(double)>& f, double a, double b, double pole,
                    double abs_tol = 1e-11, double rel_tol = 1e-11);

} // namespace cskor
