#include "prodiab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "prodiab/error.hpp"
#include "prodiab/simd/kernels.hpp"

namespace prodiab {

using cd = std::complex<double>;

void IntegratorConfig::validate() const {
    if (!(rel_tol >= 1e-13)) throw DomainError("IntegratorConfig: rel_tol must be >= 1e-13");
    if (!(abs_tol > 0.0)) throw DomainError("IntegratorConfig: abs_tol must be positive");
    if (!(max_step > 0.0)) throw DomainError("IntegratorConfig: max_step must be positive");
    if (first_step < 0.0 || fixed_step < 0.0) throw DomainError("IntegratorConfig: negative step size");
    if (max_steps <= 0) throw DomainError("IntegratorConfig: max_steps must be positive");
}

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Work {
    std::size_t n;
    std::vector<cd> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    explicit Work(std::size_t n_)
        : n(n_), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n) {}
};

// out = y + h * sum(c_i k_i)
void combine(std::size_t n, const cd* y, double h, std::initializer_list<std::pair<double, const cd*>> terms,
             cd* out) {
    std::copy(y, y + n, out);
    for (const auto& [c, k] : terms)
        if (c != 0.0) simd::axpy(n, cd(h * c), k, out);
}

double error_norm(const Work& w, const cd* y, const IntegratorConfig& cfg, double* max_abs) {
    double acc = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) {
        const double e = std::abs(w.err[i]);
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(w.ynew[i]));
        acc += (e / sc) * (e / sc);
        mx = std::max(mx, e);
    }
    *max_abs = mx;
    return w.n ? std::sqrt(acc / double(w.n)) : 0.0;
}

}  // namespace

OdeStats integrate(const OdeRhs& rhs, std::size_t n, cd* y, std::span<const double> grid,
                   std::span<const double> breakpoints, const IntegratorConfig& cfg, const OdeObserver& observer) {
    cfg.validate();
    if (grid.empty()) throw DomainError("integrate: empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("integrate: grid must be strictly increasing");

    const double t_end = grid.back();
    std::vector<double> bps;
    for (double b : breakpoints)
        if (b > grid.front() && b < t_end) bps.push_back(b);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    OdeStats st;
    Work w(n);
    double t = grid.front();
    if (observer) observer(0, t, y);
    if (grid.size() == 1) return st;

    const double inf = std::numeric_limits<double>::infinity();
    auto eval = [&](double tt, const cd* yy, cd* dy) {
        rhs(tt, yy, dy);
        ++st.rhs_evals;
    };

    std::size_t next_grid = 1, next_bp = 0;
    bool at_bp = false;  // t sits on a breakpoint: evaluate from the right
    eval(t, y, w.k1.data());

    double h;
    if (cfg.fixed_step > 0.0) {
        h = cfg.fixed_step;
    } else if (cfg.first_step > 0.0) {
        h = cfg.first_step;
    } else {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            ny = std::max(ny, std::abs(y[i]) / sc);
            nf = std::max(nf, std::abs(w.k1[i]) / sc);
        }
        h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
        h = std::min(h, 1e-2);
    }
    h = std::min(h, cfg.max_step);

    while (next_grid < grid.size()) {
        if (st.steps + st.rejected >= cfg.max_steps)
            throw NumericalFailure("integrate: step budget exhausted at t = " + std::to_string(t), t);

        double target = grid[next_grid];
        bool hits_bp = false;
        if (next_bp < bps.size() && bps[next_bp] <= target) {
            target = bps[next_bp];
            hits_bp = true;
        }
        bool hits_target = false;
        double hh = std::min(h, cfg.max_step);
        if (t + hh >= target * (1.0 - 1e-15) || t + hh >= target - 1e-14 * std::max(1.0, std::abs(target))) {
            hh = target - t;
            hits_target = true;
        }
        if (hh < 1e-14 * std::max(1.0, std::abs(t)))
            throw NumericalFailure("integrate: step size underflow at t = " + std::to_string(t), t);

        const double t_new = hits_target ? target : t + hh;
        // stage times at the step end: left limit when landing on a breakpoint
        const double t_end_stage = (hits_target && hits_bp) ? std::nextafter(t_new, -inf) : t_new;

        const cd* Y = y;
        combine(n, Y, hh, {{a21, w.k1.data()}}, w.ytmp.data());
        eval(t + c2 * hh, w.ytmp.data(), w.k2.data());
        combine(n, Y, hh, {{a31, w.k1.data()}, {a32, w.k2.data()}}, w.ytmp.data());
        eval(t + c3 * hh, w.ytmp.data(), w.k3.data());
        combine(n, Y, hh, {{a41, w.k1.data()}, {a42, w.k2.data()}, {a43, w.k3.data()}}, w.ytmp.data());
        eval(t + c4 * hh, w.ytmp.data(), w.k4.data());
        combine(n, Y, hh, {{a51, w.k1.data()}, {a52, w.k2.data()}, {a53, w.k3.data()}, {a54, w.k4.data()}},
                w.ytmp.data());
        eval(t + c5 * hh, w.ytmp.data(), w.k5.data());
        combine(n, Y, hh,
                {{a61, w.k1.data()}, {a62, w.k2.data()}, {a63, w.k3.data()}, {a64, w.k4.data()}, {a65, w.k5.data()}},
                w.ytmp.data());
        eval(t_end_stage, w.ytmp.data(), w.k6.data());
        combine(n, Y, hh,
                {{b1, w.k1.data()}, {b3, w.k3.data()}, {b4, w.k4.data()}, {b5, w.k5.data()}, {b6, w.k6.data()}},
                w.ynew.data());
        eval(t_end_stage, w.ynew.data(), w.k7.data());

        std::fill(w.err.begin(), w.err.end(), cd(0.0));
        for (auto [c, k] : {std::pair{e1, &w.k1}, {e3, &w.k3}, {e4, &w.k4}, {e5, &w.k5}, {e6, &w.k6}, {e7, &w.k7}})
            simd::axpy(n, cd(hh * c), k->data(), w.err.data());
        double err_abs = 0.0;
        const double err = error_norm(w, Y, cfg, &err_abs);

        const bool fixed = cfg.fixed_step > 0.0;
        if (!fixed && !(err <= 1.0)) {
            ++st.rejected;
            if (!std::isfinite(err)) {
                h = 0.1 * hh;
            } else {
                h = hh * std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
            continue;
        }

        ++st.steps;
        st.error_estimate += err_abs;
        std::copy(w.ynew.begin(), w.ynew.end(), y);
        t = t_new;
        at_bp = false;
        if (hits_target) {
            t = target;
            if (hits_bp) {
                ++next_bp;
                at_bp = true;
            }
            if (next_grid < grid.size() && t == grid[next_grid]) {
                if (observer) observer(next_grid, t, y);
                ++next_grid;
            }
        }
        if (at_bp) {
            // FSAL value was taken from the left; restart from the right
            eval(std::nextafter(t, inf), y, w.k1.data());
        } else {
            std::swap(w.k1, w.k7);
        }
        if (fixed) {
            h = cfg.fixed_step;
        } else if (!hits_target || hh >= h * 0.999) {
            const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = hh * std::clamp(fac, 0.2, 5.0);
        }
    }
    return st;
}

}  // namespace prodiab
