#include "prodiab/stirap.hpp"

#include <algorithm>
#include <cmath>

#include "prodiab/error.hpp"

namespace prodiab {

namespace {

const HilbertSpace& three_level() {
    static const HilbertSpace s({3});
    return s;
}

enum Idx { S11, S22, S12, S21, S13, S31, S23, S32 };

}  // namespace

void LambdaParams::validate() const {
    if (!(kappa > 0.0)) throw DomainError("LambdaParams: kappa must be positive");
    if (!(gamma >= 0.0) || !(g >= 0.0)) throw DomainError("LambdaParams: gamma and g must be nonnegative");
    env_H.validate();
    env_V.validate();
}

double LambdaParams::purcell() const {
    if (!(gamma > 0.0)) throw ModelInapplicable("stirap: Purcell factor infinite for gamma = 0");
    return 4.0 * g * g / (gamma * kappa);
}

std::vector<double> LambdaParams::breakpoints() const {
    auto b = env_H.breakpoints();
    const auto v = env_V.breakpoints();
    b.insert(b.end(), v.begin(), v.end());
    std::sort(b.begin(), b.end());
    return b;
}

double LambdaParams::F_H(double t) const { return filtered_closed_form(env_H, 1.0, kappa, t).real(); }
double LambdaParams::F_V(double t) const { return filtered_closed_form(env_V, 1.0, kappa, t).real(); }

EpsilonReport epsilon_report(const LambdaParams& p) {
    p.validate();
    EpsilonReport r;
    r.eps_sq_candidates = {{"gamma/kappa", p.gamma / p.kappa}};
    r.eps_candidates = {{"g/kappa", p.g / p.kappa},
                        {"max f_H/kappa", p.env_H.amp / p.kappa},
                        {"max f_V/kappa", p.env_V.amp / p.kappa}};
    for (const auto& [_, v] : r.eps_sq_candidates) r.worst_eps = std::max(r.worst_eps, std::sqrt(v));
    for (const auto& [_, v] : r.eps_candidates) r.worst_eps = std::max(r.worst_eps, v);
    r.warning = r.worst_eps > EpsilonReport::kWarnThreshold;
    return r;
}

OperatorMatrix lambda_transition(int i, int j) { return build_transition(3, i - 1, j - 1); }

std::pair<std::vector<double>, std::vector<double>> filtered_envelopes(const LambdaParams& p,
                                                                       std::span<const double> grid) {
    p.validate();
    const auto h = filtered_drive(p.env_H, 1.0, p.kappa, grid);
    const auto v = filtered_drive(p.env_V, 1.0, p.kappa, grid);
    std::vector<double> H(grid.size()), V(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        H[i] = h[i].real();
        V[i] = v[i].real();
    }
    return {H, V};
}

DarkStateRecord dark_state(cd F_H, cd F_V) {
    const double scale = std::max(std::abs(F_H), std::abs(F_V));
    if (scale == 0.0) throw DomainError("dark_state: both drives vanish, mixing angle undefined");
    if (std::abs(F_H.imag()) > 1e-12 * scale || std::abs(F_V.imag()) > 1e-12 * scale)
        throw DomainError("dark_state: complex drives are not supported");
    DarkStateRecord r;
    r.theta = std::atan2(F_H.real(), F_V.real());
    r.amp1 = std::cos(r.theta);
    r.amp2 = -std::sin(r.theta);
    return r;
}

std::vector<std::optional<double>> adiabaticity_metric(std::span<const double> F_H, std::span<const double> F_V,
                                                       std::span<const double> grid) {
    const std::size_t n = grid.size();
    if (F_H.size() != n || F_V.size() != n) throw DomainError("adiabaticity_metric: curves not on a common grid");
    std::vector<std::optional<double>> out(n);
    if (n < 2) return out;
    std::vector<std::optional<double>> theta(n);
    for (std::size_t i = 0; i < n; ++i)
        if (F_H[i] != 0.0 || F_V[i] != 0.0) theta[i] = std::atan2(F_H[i], F_V[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        if (!theta[lo] || !theta[hi] || !theta[i]) continue;
        const double rate = (*theta[hi] - *theta[lo]) / (grid[hi] - grid[lo]);
        out[i] = std::abs(rate) / std::hypot(F_H[i], F_V[i]);
    }
    return out;
}

DensityMatrix StirapExactModel::initial_state(int level) const {
    if (level < 1 || level > 3) throw DomainError("initial_state: level must be 1, 2 or 3");
    // cavities in the (displaced) vacuum: basis index = atom level
    return DensityMatrix::basis_state(model.space(), level - 1);
}

std::vector<NamedOperator> StirapExactModel::observables() const {
    return {{"P1", populations[0]}, {"P2", populations[1]}, {"P3", populations[2]}, {"top_H", top_H}, {"top_V", top_V}};
}

StirapExactModel stirap_full_model(const LambdaParams& p, int n_max, Frame frame) {
    p.validate();
    if (n_max < 1) throw DomainError("stirap_full_model: n_max must be at least 1");
    const HilbertSpace space({n_max + 1, n_max + 1, 3});
    const OperatorMatrix a = build_annihilation(n_max);
    const OperatorMatrix aH = embed(a, 0, space), aV = embed(a, 1, space);
    const OperatorMatrix s13 = embed(lambda_transition(1, 3), 2, space);
    const OperatorMatrix s23 = embed(lambda_transition(2, 3), 2, space);

    StirapExactModel ex;
    ex.n_max = n_max;
    ex.frame = frame;
    LindbladModel m(space);
    m.add_hamiltonian(p.g * (aV.adjoint() * s23 + aH.adjoint() * s13 + s23.adjoint() * aV + s13.adjoint() * aH));
    if (frame == Frame::lab) {
        const PulseEnvelope eH = p.env_H, eV = p.env_V;
        m.add_hamiltonian(-1.0 * (aH + aH.adjoint()), [eH](double t) { return envelope_eval(eH, t); });
        m.add_hamiltonian(-1.0 * (aV + aV.adjoint()), [eV](double t) { return envelope_eval(eV, t); });
    } else {
        // g (alpha^* sigma_13 + alpha sigma_31) with alpha = i F
        const LambdaParams q = p;
        m.add_hamiltonian((-I_unit * p.g) * (s13 - s13.adjoint()), [q](double t) { return q.F_H(t); });
        m.add_hamiltonian((-I_unit * p.g) * (s23 - s23.adjoint()), [q](double t) { return q.F_V(t); });
    }
    m.add_jump(aH, p.kappa);
    m.add_jump(aV, p.kappa);
    if (p.gamma > 0.0) {
        m.add_jump(s13, p.gamma);
        m.add_jump(s23, p.gamma);
    }
    for (double b : p.breakpoints()) m.add_breakpoint(b);
    ex.model = std::move(m);
    for (int k = 0; k < 3; ++k) ex.populations[k] = embed(lambda_transition(k + 1, k + 1), 2, space);
    Mat top = Mat::Zero(n_max + 1, n_max + 1);
    top(n_max, n_max) = 1.0;
    const OperatorMatrix topm(HilbertSpace({n_max + 1}), top);
    ex.top_H = embed(topm, 0, space);
    ex.top_V = embed(topm, 1, space);
    return ex;
}

StirapMomentGenerator::StirapMomentGenerator(double kappa, double gamma, double gamma_Fp, double g,
                                             EliminationOrder order, RealFn F_H, RealFn F_V)
    : kappa_(kappa), gamma_(gamma), gamma_Fp_(gamma_Fp), g_(g), order_(order), F_H_(std::move(F_H)),
      F_V_(std::move(F_V)) {
    if (!(kappa > 0.0) || !(gamma >= 0.0) || !(gamma_Fp >= 0.0) || !(g >= 0.0))
        throw DomainError("StirapMomentGenerator: invalid rates");
}

void StirapMomentGenerator::evaluate(double t, MomentMatrix& A, MomentVector& b) const {
    const bool pdb = order_ == EliminationOrder::prodiabatic;
    const double r = pdb ? gamma_Fp_ / kappa_ : 0.0;  // (gamma/kappa) F_p
    const double Gs = (gamma_ + gamma_Fp_) * (1.0 + 2.0 * r);
    const double k1 = 1.0 + r, k2 = 1.0 + 2.0 * r, k3 = 1.0 - r;
    const double c4 = pdb ? 4.0 * g_ * g_ * g_ / (kappa_ * kappa_) : 0.0;
    const double g = g_;
    const double fh = F_H_(t), fv = F_V_(t);

    A.setZero();
    b.setZero();
    // s33 = 1 - s11 - s22: a coefficient c on s33 adds c to b and -c to the s11, s22 columns
    auto with_s33 = [&](int row, double c) {
        b(row) += c;
        A(row, S11) -= c;
        A(row, S22) -= c;
    };
    with_s33(S11, Gs);
    A(S11, S13) = A(S11, S31) = -g * fh * k1;
    A(S11, S23) = A(S11, S32) = -c4 * fv;

    with_s33(S22, Gs);
    A(S22, S13) = A(S22, S31) = -c4 * fh;
    A(S22, S23) = A(S22, S32) = -g * fv * k1;

    A(S12, S13) = -g * fv;
    A(S12, S32) = -g * fh;
    A(S21, S31) = -g * fv;
    A(S21, S23) = -g * fh;

    A(S13, S13) = -Gs;
    A(S13, S11) += g * fh * k2;
    A(S13, S12) += g * fv * k2;
    with_s33(S13, -g * fh * k3);

    A(S31, S31) = -Gs;
    A(S31, S11) += g * fh * k2;
    A(S31, S21) += g * fv * k2;
    with_s33(S31, -g * fh * k3);

    A(S23, S23) = -Gs;
    A(S23, S22) += g * fv * k2;
    A(S23, S21) += g * fh * k2;
    with_s33(S23, -g * fv * k3);

    A(S32, S32) = -Gs;
    A(S32, S22) += g * fv * k2;
    A(S32, S12) += g * fh * k2;
    with_s33(S32, -g * fv * k3);
}

void StirapMomentGenerator::rhs(double t, const cd* y, cd* dy) const {
    MomentMatrix A;
    MomentVector b;
    evaluate(t, A, b);
    Eigen::Map<const MomentVector> yy(y);
    Eigen::Map<MomentVector> out(dy);
    out = A * yy + b;
}

StirapMomentGenerator stirap_pdb_generator(const LambdaParams& p) {
    p.validate();
    const double Fp = p.purcell();
    const LambdaParams q = p;
    StirapMomentGenerator gen(p.kappa, p.gamma, p.gamma * Fp, p.g, EliminationOrder::prodiabatic,
                              [q](double t) { return q.F_H(t); }, [q](double t) { return q.F_V(t); });
    gen.breakpoints = p.breakpoints();
    return gen;
}

StirapMomentGenerator stirap_adb_generator(const LambdaParams& p) {
    p.validate();
    const double Fp = p.purcell();
    const PulseEnvelope eH = p.env_H, eV = p.env_V;
    const double k = p.kappa;
    StirapMomentGenerator gen(p.kappa, p.gamma, p.gamma * Fp, p.g, EliminationOrder::adiabatic,
                              [eH, k](double t) { return 2.0 * envelope_eval(eH, t) / k; },
                              [eV, k](double t) { return 2.0 * envelope_eval(eV, t) / k; });
    gen.breakpoints = p.breakpoints();
    return gen;
}

MomentVector moments_from_density(const Mat& rho) {
    if (rho.rows() != 3 || rho.cols() != 3) throw DomainError("moments_from_density: 3x3 matrix expected");
    // <sigma_ij> = Tr(|i><j| rho) = rho(j, i)
    MomentVector y;
    y << rho(0, 0), rho(1, 1), rho(1, 0), rho(0, 1), rho(2, 0), rho(0, 2), rho(2, 1), rho(1, 2);
    return y;
}

Mat density_from_moments(const MomentVector& y) {
    Mat rho(3, 3);
    rho(0, 0) = y(S11);
    rho(1, 1) = y(S22);
    rho(2, 2) = 1.0 - y(S11) - y(S22);
    rho(1, 0) = y(S12);
    rho(0, 1) = y(S21);
    rho(2, 0) = y(S13);
    rho(0, 2) = y(S31);
    rho(2, 1) = y(S23);
    rho(1, 2) = y(S32);
    return rho;
}

std::array<std::vector<double>, 3> MomentTrajectory::populations() const {
    std::array<std::vector<double>, 3> P;
    for (const auto& v : y) {
        P[0].push_back(v(S11).real());
        P[1].push_back(v(S22).real());
        P[2].push_back(1.0 - v(S11).real() - v(S22).real());
    }
    return P;
}

MomentTrajectory evolve_moments(const StirapMomentGenerator& gen, const MomentVector& y0,
                                std::span<const double> grid, const IntegratorConfig& cfg) {
    MomentTrajectory tr;
    tr.times.assign(grid.begin(), grid.end());
    tr.y.resize(grid.size());
    MomentVector y = y0;
    auto rhs = [&](double t, const cd* yy, cd* dy) { gen.rhs(t, yy, dy); };
    auto obs = [&](std::size_t k, double, const cd* yy) { tr.y[k] = Eigen::Map<const MomentVector>(yy); };
    tr.stats = integrate(rhs, 8, y.data(), grid, gen.breakpoints, cfg, obs);
    return tr;
}

void induced_stirap_moments(const OperatorMatrix& H, std::span<const Jump> jumps, MomentMatrix& A, MomentVector& b) {
    if (H.dim() != 3) throw DomainError("induced_stirap_moments: three-level operators expected");
    static const std::array<std::pair<int, int>, 8> basis{
        {{0, 0}, {1, 1}, {0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};
    A.setZero();
    b.setZero();
    for (int row = 0; row < 8; ++row) {
        Mat X = Mat::Zero(3, 3);
        X(basis[row].first, basis[row].second) = 1.0;
        const Mat Y = heisenberg_action(H.mat(), jumps, X);
        // <Y> = sum_kl Y_kl <sigma_kl>, with <sigma_33> eliminated
        for (int col = 0; col < 8; ++col) A(row, col) = Y(basis[col].first, basis[col].second);
        A(row, S11) -= Y(2, 2);
        A(row, S22) -= Y(2, 2);
        b(row) = Y(2, 2);
    }
}

StirapEffectiveModel stirap_pdb_lindblad(const LambdaParams& p) {
    p.validate();
    const double Fp = p.purcell();
    const double r = (p.gamma / p.kappa) * Fp;
    const double q = p.g * Fp / (p.kappa * (1.0 + Fp));
    const auto s = [](int i, int j) { return lambda_transition(i, j); };
    const LambdaParams pp = p;
    const RealFn FH = [pp](double t) { return pp.F_H(t); };
    const RealFn FV = [pp](double t) { return pp.F_V(t); };

    LindbladModel m(three_level());
    m.add_hamiltonian((-I_unit * p.g * (1.0 + r)) * (s(1, 3) - s(3, 1)), FH);
    m.add_hamiltonian((-I_unit * p.g * (1.0 + r)) * (s(2, 3) - s(3, 2)), FV);
    const double r_bare = p.gamma * (1.0 + Fp) * 2.0 * r;
    if (r_bare > 0.0) {
        m.add_jump(s(1, 3), r_bare);
        m.add_jump(s(2, 3), r_bare);
    }
    const ComplexFn cH = [pp, q](double t) { return cd(-q * pp.F_H(t)); };
    const ComplexFn cV = [pp, q](double t) { return cd(-q * pp.F_V(t)); };
    JumpChannel j1;
    j1.rate = p.gamma * (1.0 + Fp);
    j1.components = {{s(1, 3), {}}, {s(1, 1) - s(3, 3), cH}, {s(1, 2), cV}};
    JumpChannel j2;
    j2.rate = p.gamma * (1.0 + Fp);
    j2.components = {{s(2, 3), {}}, {s(2, 1), cH}, {s(2, 2) - s(3, 3), cV}};
    m.add_jump(std::move(j1));
    m.add_jump(std::move(j2));
    for (double b : p.breakpoints()) m.add_breakpoint(b);
    return {std::move(m), EliminationOrder::prodiabatic};
}

std::vector<std::optional<double>> dark_state_overlap(std::span<const Mat> rho3, std::span<const double> F_H,
                                                      std::span<const double> F_V) {
    if (rho3.size() != F_H.size() || rho3.size() != F_V.size())
        throw DomainError("dark_state_overlap: inputs on different grids");
    std::vector<std::optional<double>> out(rho3.size());
    for (std::size_t i = 0; i < rho3.size(); ++i) {
        if (F_H[i] == 0.0 && F_V[i] == 0.0) continue;
        const auto ds = dark_state(F_H[i], F_V[i]);
        Vec psi(3);
        psi << ds.amp1, ds.amp2, 0.0;
        out[i] = (psi.adjoint() * rho3[i] * psi)(0, 0).real();
    }
    return out;
}

}  // namespace prodiab
