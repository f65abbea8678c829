#include "prodiab/dynamics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "prodiab/error.hpp"
#include "prodiab/simd/kernels.hpp"

namespace prodiab {

bool JumpChannel::time_dependent() const {
    if (rate_profile) return true;
    return std::any_of(components.begin(), components.end(), [](const auto& c) { return bool(c.coeff); });
}

OperatorMatrix JumpChannel::op_at(double t) const {
    if (components.empty()) throw DomainError("JumpChannel: no components");
    OperatorMatrix A = OperatorMatrix::zero(components.front().op.space());
    for (const auto& c : components) A += (c.coeff ? c.coeff(t) : cd(1.0)) * c.op;
    return A;
}

LindbladModel& LindbladModel::add_hamiltonian(OperatorMatrix op, RealFn coeff) {
    if (!(op.space() == space_)) throw DomainError("add_hamiltonian: space mismatch");
    terms_.push_back({std::move(op), std::move(coeff)});
    return *this;
}

LindbladModel& LindbladModel::add_jump(OperatorMatrix op, double rate) {
    JumpChannel ch;
    ch.components.push_back({std::move(op), {}});
    ch.rate = rate;
    return add_jump(std::move(ch));
}

LindbladModel& LindbladModel::add_jump(JumpChannel ch) {
    if (ch.components.empty()) throw DomainError("add_jump: channel without operators");
    if (!(ch.rate >= 0.0)) throw DomainError("add_jump: negative rate");
    for (const auto& c : ch.components)
        if (!(c.op.space() == space_)) throw DomainError("add_jump: space mismatch");
    channels_.push_back(std::move(ch));
    return *this;
}

LindbladModel& LindbladModel::add_breakpoint(double t) {
    breakpoints_.push_back(t);
    return *this;
}

bool LindbladModel::time_dependent() const {
    if (std::any_of(terms_.begin(), terms_.end(), [](const auto& h) { return bool(h.coeff); })) return true;
    return std::any_of(channels_.begin(), channels_.end(), [](const auto& c) { return c.time_dependent(); });
}

OperatorMatrix LindbladModel::hamiltonian(double t) const {
    OperatorMatrix H = OperatorMatrix::zero(space_);
    for (const auto& h : terms_) H += (h.coeff ? h.coeff(t) : 1.0) * h.op;
    return H;
}

std::vector<Jump> LindbladModel::jumps(double t) const {
    std::vector<Jump> out;
    for (const auto& c : channels_) out.push_back({c.op_at(t), c.rate_at(t)});
    return out;
}

Superoperator LindbladModel::liouvillian(double t) const {
    const auto js = jumps(t);
    return prodiab::liouvillian(hamiltonian(t), js);
}

void LindbladModel::validate(std::span<const double> samples) const {
    for (double t : samples) {
        const double dev = hamiltonian(t).hermiticity_deviation();
        if (dev > 1e-10) throw DomainError("LindbladModel: H(t) not Hermitian at t = " + std::to_string(t));
        for (const auto& c : channels_)
            if (!(c.rate_at(t) >= 0.0))
                throw DomainError("LindbladModel: negative rate at t = " + std::to_string(t));
    }
}

LindbladGenerator::LindbladGenerator(const LindbladModel& model, GeneratorForm form)
    : model_(model), form_(form), d_(model.space().dim()) {
    if (form_ == GeneratorForm::automatic)
        form_ = d_ <= kSuperoperatorMaxDim ? GeneratorForm::superoperator : GeneratorForm::operator_product;
    const auto& space = model_.space();

    if (form_ == GeneratorForm::superoperator) {
        Superoperator L0 = Superoperator::zero(space);
        for (const auto& h : model_.hamiltonian_terms()) {
            Superoperator part = hamiltonian_part(h.op);
            if (!h.coeff) {
                L0 += part;
            } else {
                auto fn = h.coeff;
                pieces_.push_back({part.mat(), [fn](double t) { return cd(fn(t)); }});
            }
        }
        for (std::size_t ci = 0; ci < model_.channels().size(); ++ci) {
            const JumpChannel& ch = model_.channels()[ci];
            if (!ch.time_dependent()) {
                L0 += ch.rate * dissipator(ch.op_at(0.0));
                continue;
            }
            const auto& comps = ch.components;
            for (std::size_t m = 0; m < comps.size(); ++m)
                for (std::size_t n = 0; n < comps.size(); ++n) {
                    Mat D = cross_dissipator(comps[m].op, comps[n].op).mat();
                    const std::size_t idx = ci;
                    const LindbladModel* mp = &model_;
                    pieces_.push_back({std::move(D), [mp, idx, m, n](double t) {
                                           const JumpChannel& c = mp->channels()[idx];
                                           const cd cm = c.components[m].coeff ? c.components[m].coeff(t) : cd(1.0);
                                           const cd cn = c.components[n].coeff ? c.components[n].coeff(t) : cd(1.0);
                                           return c.rate_at(t) * cm * std::conj(cn);
                                       }});
                }
        }
        L0_ = L0.mat();
        tmp_.resize(Eigen::Index(d_) * d_);
        return;
    }

    Heff0_ = Mat::Zero(d_, d_);
    for (const auto& h : model_.hamiltonian_terms()) {
        if (!h.coeff)
            Heff0_ += h.op.mat();
        else
            hterms_.push_back({h.op.mat(), h.coeff});
    }
    for (std::size_t ci = 0; ci < model_.channels().size(); ++ci) {
        const JumpChannel& ch = model_.channels()[ci];
        OpChannel oc{ci, Mat(), Mat(), ch.time_dependent()};
        if (!oc.dynamic) {
            oc.A = ch.op_at(0.0).mat();
            oc.AdA = oc.A.adjoint() * oc.A;
            Heff0_ += (-0.5 * I_unit * ch.rate) * oc.AdA;
        }
        opch_.push_back(std::move(oc));
    }
    heff_.resize(d_, d_);
    heff_adj_.resize(d_, d_);
    t1_.resize(d_, d_);
    t2_.resize(d_, d_);
    t3_.resize(d_, d_);
    acc_.resize(d_, d_);
}

void LindbladGenerator::apply(double t, const cd* x, cd* dx) const {
    const std::size_t n2 = std::size_t(d_) * d_;
    if (form_ == GeneratorForm::superoperator) {
        simd::gemv(n2, n2, L0_.data(), x, dx);
        for (const auto& p : pieces_) {
            const cd w = p.weight(t);
            if (w == cd(0.0)) continue;
            simd::gemv(n2, n2, p.L.data(), x, tmp_.data());
            simd::axpy(n2, w, tmp_.data(), dx);
        }
        return;
    }

    const std::size_t d = d_;
    heff_ = Heff0_;
    for (const auto& [H, fn] : hterms_) {
        const double c = fn(t);
        if (c != 0.0) heff_ += c * H;
    }
    // dynamic channels: A(t) built here
    std::vector<std::pair<Mat, double>> dyn;
    for (const auto& oc : opch_) {
        if (!oc.dynamic) continue;
        const JumpChannel& ch = model_.channels()[oc.ch];
        const double r = ch.rate_at(t);
        Mat A = ch.op_at(t).mat();
        heff_ += (-0.5 * I_unit * r) * (A.adjoint() * A);
        dyn.emplace_back(std::move(A), r);
    }
    heff_adj_ = heff_.adjoint();

    // dX = -i Heff X + i X Heff^dagger + sum r A X A^dagger
    simd::gemm(d, d, d, heff_.data(), x, t1_.data());
    simd::gemm(d, d, d, x, heff_adj_.data(), t2_.data());
    Eigen::Map<Mat> out(dx, d_, d_);
    out = -I_unit * t1_ + I_unit * t2_;
    auto add_jump_term = [&](const Mat& A, double r) {
        if (r == 0.0) return;
        simd::gemm(d, d, d, A.data(), x, t3_.data());
        acc_ = A.adjoint();
        simd::gemm(d, d, d, t3_.data(), acc_.data(), t1_.data());
        simd::axpy(n2, cd(r), t1_.data(), dx);
    };
    for (const auto& oc : opch_)
        if (!oc.dynamic) add_jump_term(oc.A, model_.channels()[oc.ch].rate);
    for (const auto& [A, r] : dyn) add_jump_term(A, r);
}

const std::vector<cd>& Trajectory::series(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    throw DomainError("Trajectory: no observable named " + name);
}

std::vector<double> Trajectory::real_series(const std::string& name) const {
    const auto& s = series(name);
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
    return out;
}

Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> grid,
                  const IntegratorConfig& cfg, const std::vector<NamedOperator>& observables,
                  const EvolveOptions& opts) {
    if (!(rho0.space() == model.space())) throw DomainError("evolve: initial state on a different space");
    for (const auto& o : observables)
        if (!(o.op.space() == model.space())) throw DomainError("evolve: observable " + o.name + " on wrong space");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("evolve: grid must be strictly increasing");

    const int d = model.space().dim();
    LindbladGenerator gen(model, opts.form);
    Trajectory tr;
    tr.times.assign(grid.begin(), grid.end());
    for (const auto& o : observables) {
        tr.names.push_back(o.name);
        tr.values.emplace_back(grid.size());
    }

    Vec y = vec(rho0.mat());
    auto observer = [&](std::size_t k, double t, const cd* yy) {
        Eigen::Map<const Mat> rho(yy, d, d);
        for (std::size_t i = 0; i < observables.size(); ++i) tr.values[i][k] = expectation(observables[i].op, Mat(rho));
        if (opts.check_invariants) {
            const auto rep = density_invariants(rho);
            tr.worst.merge_worst(rep);
            if (!rep.within(10.0))
                throw NumericalFailure("evolve: density-matrix invariants violated at t = " + std::to_string(t), t);
        }
        if (opts.keep_snapshots) tr.snapshots.emplace_back(rho);
    };
    auto rhs = [&](double t, const cd* yy, cd* dy) { gen.apply(t, yy, dy); };
    tr.stats = integrate(rhs, y.size(), y.data(), grid, model.breakpoints(), cfg, observer);
    return tr;
}

DensityMatrix steady_state(const Superoperator& L) {
    const int d = L.space().dim();
    const Eigen::Index n = Eigen::Index(d) * d;
    if (L.trace_residual() > 1e-10 * std::max(1.0, L.mat().cwiseAbs().maxCoeff()))
        throw DomainError("steady_state: generator is not trace preserving");

    Eigen::BDCSVD<Mat> svd(L.mat());
    const auto& s = svd.singularValues();
    if (n >= 2 && std::abs(s(n - 2) - s(n - 1)) < 1e-8)
        throw DegenerateSteadyState("steady_state: null space is not one-dimensional (singular values " +
                                    std::to_string(s(n - 2)) + ", " + std::to_string(s(n - 1)) + ")");

    Mat M = Mat::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = L.mat();
    const Vec vi = vec(Mat::Identity(d, d));
    M.block(0, n, n, 1) = vi / double(d);
    M.block(n, 0, 1, n) = vi.adjoint();
    Vec rhs = Vec::Zero(n + 1);
    rhs(n) = 1.0;
    const Vec x = M.partialPivLu().solve(rhs);
    Mat rho = unvec(x.head(n), d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();
    const auto rep = density_invariants(rho);
    if (!rep.within()) throw NumericalFailure("steady_state: solution is not a valid density matrix", 0.0);
    return DensityMatrix(L.space(), rho);
}

IntegratorConfig correlator_config() {
    IntegratorConfig c;
    c.rel_tol = 1e-10;
    c.abs_tol = 1e-15;
    c.max_step = 0.1;
    return c;
}

std::vector<cd> two_time_correlator(const LindbladModel& model, const Mat& rho, const OperatorMatrix& left,
                                    const OperatorMatrix& mid, const OperatorMatrix& right,
                                    std::span<const double> grid, const IntegratorConfig& cfg, GeneratorForm form) {
    if (model.time_dependent()) throw DomainError("two_time_correlator: model must be time independent");
    const int d = model.space().dim();
    if (rho.rows() != d || rho.cols() != d) throw DomainError("two_time_correlator: state has wrong shape");
    if (!(left.space() == model.space()) || !(mid.space() == model.space()) || !(right.space() == model.space()))
        throw DomainError("two_time_correlator: operator on wrong space");
    for (double t : grid)
        if (t < 0.0) throw DomainError("two_time_correlator: negative lag");

    std::vector<cd> out(grid.size(), cd(0.0));
    if (grid.empty()) return out;
    const Mat X0 = right.mat() * rho * left.mat();
    const double scale = X0.cwiseAbs().maxCoeff();
    if (scale == 0.0) return out;

    std::vector<double> g(grid.begin(), grid.end());
    const bool prepend = g.front() > 0.0;
    if (prepend) g.insert(g.begin(), 0.0);

    LindbladGenerator gen(model, form);
    Vec y = vec(X0) / scale;
    auto observer = [&](std::size_t k, double, const cd* yy) {
        if (prepend && k == 0) return;
        Eigen::Map<const Mat> X(yy, d, d);
        out[prepend ? k - 1 : k] = scale * expectation(mid, Mat(X));
    };
    auto rhs = [&](double t, const cd* yy, cd* dy) { gen.apply(t, yy, dy); };
    integrate(rhs, y.size(), y.data(), g, {}, cfg, observer);
    return out;
}

std::vector<double> g2_curve(const LindbladModel& model, const OperatorMatrix& a, std::span<const double> grid,
                             const IntegratorConfig& cfg) {
    const DensityMatrix rho = steady_state(model.liouvillian(0.0));
    const OperatorMatrix ad = a.adjoint();
    const double n = expectation(ad * a, rho).real();
    if (!(n >= 1e-14)) throw UndefinedCorrelation("g2_curve: steady-state photon number below 1e-14");
    const auto num = two_time_correlator(model, rho.mat(), ad, ad * a, a, grid, cfg);
    std::vector<double> g2(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) g2[i] = num[i].real() / (n * n);
    return g2;
}

}  // namespace prodiab
