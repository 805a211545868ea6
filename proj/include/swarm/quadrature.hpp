#pragma once

#include <functional>

namespace swarm {

// Adaptive Gauss-Kronrod (7/15) integration on [a, b]. Splits the worst
// interval until the summed error estimate drops below
// max(abs_tol, rel_tol * |value|). Throws std::runtime_error if the budget
// of subdivisions is exhausted first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 0.0,
                 int max_intervals = 20000);

// Integral over [a, inf) via the substitution r = a + t/(1-t).
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-12, double abs_tol = 0.0,
                        int max_intervals = 20000);

}  // namespace swarm
