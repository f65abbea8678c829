#include "prodiab/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "prodiab/error.hpp"
#include "prodiab/ode.hpp"

namespace prodiab {

using cd = std::complex<double>;

PulseEnvelope PulseEnvelope::constant(double amp) {
    PulseEnvelope e;
    e.kind = Kind::constant;
    e.amp = amp;
    return e;
}

PulseEnvelope PulseEnvelope::boxcar(double center, double halfwidth, double amp) {
    PulseEnvelope e;
    e.kind = Kind::boxcar;
    e.center = center;
    e.halfwidth = halfwidth;
    e.amp = amp;
    e.validate();
    return e;
}

PulseEnvelope PulseEnvelope::gaussian(double amp, double center, double width) {
    PulseEnvelope e;
    e.kind = Kind::gaussian;
    e.amp = amp;
    e.center = center;
    e.width = width;
    e.validate();
    return e;
}

void PulseEnvelope::validate() const {
    if (!(amp >= 0.0)) throw DomainError("PulseEnvelope: amplitude must be nonnegative");
    if (kind == Kind::boxcar && !(halfwidth > 0.0)) throw DomainError("PulseEnvelope: boxcar halfwidth must be positive");
    if (kind == Kind::gaussian && !(width > 0.0)) throw DomainError("PulseEnvelope: gaussian width must be positive");
}

std::vector<double> PulseEnvelope::breakpoints() const {
    std::vector<double> b;
    if (kind == Kind::boxcar) {
        for (double t : {center - halfwidth, center + halfwidth})
            if (t >= 0.0) b.push_back(t);
    }
    return b;
}

double envelope_eval(const PulseEnvelope& env, double t) {
    switch (env.kind) {
        case PulseEnvelope::Kind::constant:
            return env.amp;
        case PulseEnvelope::Kind::boxcar:
            return std::abs(env.center - t) <= env.halfwidth ? env.amp : 0.0;
        case PulseEnvelope::Kind::gaussian: {
            const double u = (t - env.center) / env.width;
            return env.amp * std::exp(-0.5 * u * u);
        }
    }
    return 0.0;
}

double erfcx(double x) {
    if (x < 0.0) throw DomainError("erfcx: negative argument");
    if (x < 26.0) return std::exp(x * x) * std::erfc(x);
    const double r = 1.0 / (x * x);
    const double series = 1.0 - 0.5 * r + 0.75 * r * r - 1.875 * r * r * r + 6.5625 * r * r * r * r;
    return series / (x * std::sqrt(std::numbers::pi));
}

namespace {

// int_{-inf}^t exp(-a (t-s)) c exp(-(s-mu)^2 / (2 s^2)) ds for real a > 0
double gaussian_response(double a, double c, double mu, double s, double t) {
    const double u = t - mu;
    const double z = (a * s * s - u) / (s * std::sqrt(2.0));
    const double pref = c * s * std::sqrt(std::numbers::pi / 2.0);
    if (z >= 0.0) return pref * erfcx(z) * std::exp(-u * u / (2.0 * s * s));
    return pref * std::exp(0.5 * a * a * s * s - a * u) * std::erfc(z);
}

}  // namespace

cd filtered_closed_form(const PulseEnvelope& env, cd t_c, double kappa, double t) {
    if (!(kappa > 0.0)) throw DomainError("filtered drive: kappa must be positive");
    const cd a = kappa / (2.0 * t_c);
    switch (env.kind) {
        case PulseEnvelope::Kind::constant:
            return env.amp / a;
        case PulseEnvelope::Kind::boxcar: {
            const double on = std::max(env.center - env.halfwidth, 0.0);
            const double off = env.center + env.halfwidth;
            if (t < on || off < 0.0) return 0.0;
            if (t <= off) return (env.amp / a) * (1.0 - std::exp(-a * (t - on)));
            return (env.amp / a) * (1.0 - std::exp(-a * (off - on))) * std::exp(-a * (t - off));
        }
        case PulseEnvelope::Kind::gaussian: {
            if (std::abs(a.imag()) > 1e-14 * std::abs(a))
                throw DomainError("filtered drive: gaussian envelopes need a real filter rate");
            if (t <= 0.0) return 0.0;
            const double ar = a.real();
            const double G = gaussian_response(ar, env.amp, env.center, env.width, t);
            const double G0 = gaussian_response(ar, env.amp, env.center, env.width, 0.0);
            return G - std::exp(-ar * t) * G0;
        }
    }
    return 0.0;
}

std::vector<cd> filtered_drive(const PulseEnvelope& env, cd t_c, double kappa, std::span<const double> grid) {
    if (!(kappa > 0.0)) throw DomainError("filtered drive: kappa must be positive");
    env.validate();
    const cd a = kappa / (2.0 * t_c);
    std::vector<cd> out(grid.size(), cd(0.0));
    if (grid.empty()) return out;

    const bool constant = env.kind == PulseEnvelope::Kind::constant;
    const cd F0 = constant ? env.amp / a : cd(0.0);

    // integrate on [0, grid end]; points at t <= 0 keep the initial value
    std::vector<double> g{0.0};
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0.0) {
            out[i] = F0;
            continue;
        }
        if (!(grid[i] > g.back())) throw DomainError("filtered drive: grid must be strictly increasing");
        g.push_back(grid[i]);
        map.push_back(i);
    }
    if (g.size() == 1) return out;

    IntegratorConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-15;
    cfg.max_step = std::min(0.1, 0.5 / std::abs(a));
    cd y = F0;
    auto rhs = [&](double t, const cd* yy, cd* dy) { dy[0] = envelope_eval(env, t) - a * yy[0]; };
    auto obs = [&](std::size_t k, double, const cd* yy) {
        if (k > 0) out[map[k - 1]] = yy[0];
    };
    const auto bps = env.breakpoints();
    integrate(rhs, 1, &y, g, bps, cfg, obs);
    return out;
}

}  // namespace prodiab
