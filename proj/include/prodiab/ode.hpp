#pragma once

#include <complex>
#include <functional>
#include <span>

namespace prodiab {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.1;  // units of 1/kappa
    double first_step = 0.0;  // 0 picks one automatically
    long max_steps = 50'000'000;
    // > 0 switches off error control and takes equal steps of this size
    // (grid points and breakpoints still cut steps). Used by the order test.
    double fixed_step = 0.0;

    void validate() const;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
    // Sum over accepted steps of the max-norm embedded error estimate; a
    // conservative bound on the accumulated global error.
    double error_estimate = 0.0;
};

using OdeRhs = std::function<void(double t, const std::complex<double>* y, std::complex<double>* dy)>;
using OdeObserver = std::function<void(std::size_t index, double t, const std::complex<double>* y)>;

// Dormand-Prince 5(4). On entry y holds the state at grid[0]; observer is called
// at every grid point (including grid[0]) and y holds the state at grid.back()
// on return. Breakpoints inside the interval are hit exactly; the right-hand side
// is evaluated at one-sided limits there so that jumps in the forcing are not
// smeared across a step.
OdeStats integrate(const OdeRhs& rhs, std::size_t n, std::complex<double>* y, std::span<const double> grid,
                   std::span<const double> breakpoints, const IntegratorConfig& cfg, const OdeObserver& observer);

}  // namespace prodiab
