#include <doctest.h>

#include <cmath>

#include "prodiab/error.hpp"
#include "prodiab/pulse.hpp"

using namespace prodiab;
using cd = std::complex<double>;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

// Composite Simpson on int_0^t exp(-k (t-s)) f(s) ds
cd quadrature(const PulseEnvelope& env, cd k, double t, int n = 20000) {
    const double h = t / n;
    cd sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::exp(-k * (t - s)) * envelope_eval(env, s);
    }
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("envelope values") {
    const auto fV = PulseEnvelope::boxcar(55.0, 10.0, 1.0);
    CHECK(envelope_eval(fV, 55.0) == 1.0);
    CHECK(envelope_eval(fV, 70.0) == 0.0);
    CHECK(envelope_eval(fV, 45.0) == 1.0);
    CHECK(envelope_eval(fV, 65.0) == 1.0);
    CHECK(envelope_eval(fV, 44.999) == 0.0);

    const auto gH = PulseEnvelope::gaussian(0.75, 42.0, 12.0);
    CHECK(envelope_eval(gH, 42.0) == 0.75);
    CHECK(envelope_eval(gH, 54.0) == doctest::Approx(0.75 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(envelope_eval(PulseEnvelope::constant(0.3), -5.0) == 0.3);

    CHECK(fV.breakpoints() == std::vector<double>{45.0, 65.0});
    CHECK(gH.breakpoints().empty());
    CHECK_THROWS_AS(PulseEnvelope::boxcar(1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(PulseEnvelope::gaussian(-1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("erfcx") {
    for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0}) CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-13));
    // asymptotic 1/(x sqrt(pi)) (1 - 1/(2x^2))
    const double x = 1e4;
    CHECK(erfcx(x) == doctest::Approx(1.0 / (x * std::sqrt(M_PI)) * (1.0 - 0.5 / (x * x))).epsilon(1e-12));
}

TEST_CASE("constant drive gives the stationary value") {
    const cd tc = 1.0 / cd(1.0, 0.1);
    const double f = 0.37;
    const auto env = PulseEnvelope::constant(f);
    const auto grid = linspace(0.0, 50.0, 11);
    const auto F = filtered_drive(env, tc, 1.0, grid);
    for (const auto& v : F) CHECK(std::abs(v - 2.0 * tc * f) < 1e-12);
    CHECK(std::abs(filtered_closed_form(env, tc, 1.0, 3.0) - 2.0 * tc * f) < 1e-15);

    const auto zero = filtered_drive(PulseEnvelope::constant(0.0), 1.0, 1.0, grid);
    for (const auto& v : zero) CHECK(v == cd(0.0));
}

TEST_CASE("boxcar response is the closed-form exponential") {
    const auto env = PulseEnvelope::boxcar(45.0, 10.0, 1.0);
    const auto grid = linspace(0.0, 100.0, 1001);
    const auto F = filtered_drive(env, 1.0, 1.0, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        double expect = 0.0;
        if (t >= 35.0 && t <= 55.0) expect = 2.0 * (1.0 - std::exp(-(t - 35.0) / 2.0));
        if (t > 55.0) expect = 2.0 * (1.0 - std::exp(-10.0)) * std::exp(-(t - 55.0) / 2.0);
        worst = std::max(worst, std::abs(F[i] - expect));
        CHECK(std::abs(filtered_closed_form(env, 1.0, 1.0, t) - expect) < 1e-13);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("complex susceptibility filters agree") {
    const cd tc = 1.0 / cd(1.0, 0.4);
    const auto env = PulseEnvelope::boxcar(10.0, 3.0, 0.5);
    const auto grid = linspace(0.0, 25.0, 251);
    const auto F = filtered_drive(env, tc, 2.0, grid);
    const cd k = 2.0 / (2.0 * tc);
    for (std::size_t i = 0; i < grid.size(); i += 25) {
        CHECK(std::abs(F[i] - filtered_closed_form(env, tc, 2.0, grid[i])) < 1e-9);
    }
    CHECK(std::abs(filtered_closed_form(env, tc, 2.0, 12.0) - quadrature(env, k, 12.0)) < 1e-6);
}

TEST_CASE("gaussian closed form matches the filter equation and quadrature") {
    const auto env = PulseEnvelope::gaussian(0.75, 42.0, 12.0);
    const auto grid = linspace(0.0, 100.0, 201);
    const auto F = filtered_drive(env, 1.0, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(F[i] - filtered_closed_form(env, 1.0, 1.0, grid[i])) < 1e-9);
    for (double t : {20.0, 42.0, 60.0, 90.0}) CHECK(std::abs(filtered_closed_form(env, 1.0, 1.0, t) - quadrature(env, 0.5, t)) < 1e-9);

    const auto narrow = PulseEnvelope::gaussian(0.75, 47.5, 4.0);
    for (double t : {40.0, 47.5, 52.0}) CHECK(std::abs(filtered_closed_form(narrow, 1.0, 1.0, t) - quadrature(narrow, 0.5, t)) < 1e-9);

    CHECK_THROWS_AS(filtered_closed_form(env, cd(1.0, 0.1), 1.0, 3.0), DomainError);
}

TEST_CASE("long pulses approach 2f/kappa in the interior") {
    const auto env = PulseEnvelope::boxcar(50.0, 30.0, 0.8);
    for (double t : {25.0, 30.0, 50.0, 79.0}) {
        const double edge = std::min(t - 20.0, 80.0 - t);
        const double dev = std::abs(filtered_closed_form(env, 1.0, 1.0, t).real() - 2.0 * 0.8);
        CHECK(dev <= 2.0 * 0.8 * std::exp(-edge / 2.0) * (1.0 + 1e-12));
    }
}
