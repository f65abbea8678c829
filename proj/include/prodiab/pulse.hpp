#pragma once

#include <complex>
#include <span>
#include <vector>

namespace prodiab {

// Drive envelope f(t) in rate units, times in 1/kappa.
struct PulseEnvelope {
    enum class Kind { constant, boxcar, gaussian };

    Kind kind = Kind::constant;
    double amp = 0.0;
    double center = 0.0;
    double halfwidth = 0.0;  // boxcar
    double width = 0.0;      // gaussian standard deviation

    static PulseEnvelope constant(double amp);
    static PulseEnvelope boxcar(double center, double halfwidth, double amp);
    static PulseEnvelope gaussian(double amp, double center, double width);

    void validate() const;
    // Boxcar edges (t >= 0 only); empty for the smooth kinds.
    std::vector<double> breakpoints() const;
};

// Pointwise value; boxcar is inclusive at both edges. A constant envelope is on
// for all times; boxcar and Gaussian are evaluated as written for any t.
double envelope_eval(const PulseEnvelope& env, double t);

// Closed-form F(t) = int_0^t exp(-(kappa/(2 t_c)) (t-s)) f(s) ds with f = 0 for
// s < 0 (constant envelopes: the stationary value 2 t_c f / kappa).
// Gaussian pulses need a real filter rate (t_c real).
std::complex<double> filtered_closed_form(const PulseEnvelope& env, std::complex<double> t_c, double kappa, double t);

// Same quantity obtained by integrating dF/dt = f - (kappa/(2 t_c)) F from F(0) = 0.
std::vector<std::complex<double>> filtered_drive(const PulseEnvelope& env, std::complex<double> t_c, double kappa,
                                                 std::span<const double> grid);

// exp(x^2) erfc(x) for real x >= 0
double erfcx(double x);

}  // namespace prodiab
