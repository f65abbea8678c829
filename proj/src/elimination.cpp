#include "prodiab/elimination.hpp"

#include <algorithm>
#include <cmath>

#include "prodiab/error.hpp"

namespace prodiab {

namespace {

const HilbertSpace& qubit() {
    static const HilbertSpace s({2});
    return s;
}

double sq(double x) { return x * x; }

}  // namespace

void JCParams::validate() const {
    if (!(kappa > 0.0)) throw DomainError("JCParams: kappa must be positive");
    if (!(gamma >= 0.0) || !(g >= 0.0)) throw DomainError("JCParams: gamma and g must be nonnegative");
    if (!std::isfinite(delta) || !std::isfinite(omega) || !std::isfinite(f))
        throw DomainError("JCParams: non-finite detuning or drive");
}

cd cavity_susceptibility(const JCParams& p) {
    p.validate();
    return 1.0 / (1.0 + 2.0 * I_unit * p.delta / p.kappa);
}

Susceptibilities susceptibilities(const JCParams& p) {
    p.validate();
    if (p.gamma == 0.0) {
        if (p.omega != 0.0) throw ModelInapplicable("susceptibilities: atom susceptibility undefined for gamma = 0");
        throw ModelInapplicable("susceptibilities: Purcell factor infinite for gamma = 0");
    }
    Susceptibilities s;
    s.t_c = cavity_susceptibility(p);
    s.t_q = 1.0 / (1.0 + 2.0 * I_unit * p.omega / p.gamma);
    s.F_p = 4.0 * p.g * p.g / (p.gamma * p.kappa);
    s.Gamma = (p.gamma / s.t_q) * (1.0 + s.t_c * s.t_q * s.F_p) * (1.0 + (p.gamma * s.t_c * s.t_c / p.kappa) * s.F_p);
    return s;
}

EpsilonReport epsilon_report(const JCParams& p) {
    p.validate();
    EpsilonReport r;
    r.eps_sq_candidates = {{"gamma/kappa", p.gamma / p.kappa}, {"|Omega|/kappa", std::abs(p.omega) / p.kappa}};
    r.eps_candidates = {{"g/kappa", p.g / p.kappa}, {"|f|/kappa", std::abs(p.f) / p.kappa}};
    for (const auto& [_, v] : r.eps_sq_candidates) r.worst_eps = std::max(r.worst_eps, std::sqrt(v));
    for (const auto& [_, v] : r.eps_candidates) r.worst_eps = std::max(r.worst_eps, v);
    r.warning = r.worst_eps > EpsilonReport::kWarnThreshold;
    return r;
}

AtomOperatorSet AtomOperatorSet::make(OperatorMatrix b, OperatorMatrix v) {
    if (!(b.space() == v.space())) throw DomainError("AtomOperatorSet: b and v on different spaces");
    OperatorMatrix r = b * b.adjoint() - b.adjoint() * b;
    return {std::move(b), std::move(r), std::move(v)};
}

OperatorMatrix jc_sigma() { return build_transition(2, 0, 1); }
OperatorMatrix jc_sigma_z() {
    const auto s = jc_sigma();
    return s.adjoint() * s - s * s.adjoint();
}
OperatorMatrix jc_sigma_x() {
    const auto s = jc_sigma();
    return s + s.adjoint();
}
OperatorMatrix jc_sigma_y() {
    const auto s = jc_sigma();
    return I_unit * (s - s.adjoint());
}

AtomOperatorSet AtomOperatorSet::jaynes_cummings() { return make(jc_sigma(), jc_sigma()); }

cd jc_constant_F(const JCParams& p) { return 2.0 * cavity_susceptibility(p) * p.f / p.kappa; }

OperatorMatrix a_adb(const JCParams& p, const AtomOperatorSet& ops, cd F_now) {
    const cd tc = cavity_susceptibility(p);
    const auto Id = OperatorMatrix::identity(ops.b.space());
    return (-2.0 * I_unit * tc * p.g / p.kappa) * ops.b + (I_unit * F_now) * Id;
}

OperatorMatrix a_pdb_general(const JCParams& p, const AtomOperatorSet& ops, cd F_now) {
    const cd tc = cavity_susceptibility(p);
    const double k = p.kappa, g = p.g;
    const auto Id = OperatorMatrix::identity(ops.b.space());
    const OperatorMatrix lead = (-2.0 * I_unit * g * tc / k) * ops.b + (I_unit * F_now) * Id;
    const OperatorMatrix dress = Id + (4.0 * g * g * tc * tc / (k * k)) * ops.r;
    return dress * lead + (-2.0 * I_unit * p.gamma * g * tc * tc / (k * k)) * (ops.r * ops.b) +
           (4.0 * p.omega * g * tc * tc / (k * k)) * ops.v;
}

OperatorMatrix noise_operator_B(const JCParams& p, const AtomOperatorSet& ops, cd F_now) {
    const cd tc = cavity_susceptibility(p);
    const double k = p.kappa, g = p.g;
    if (g == 0.0) return OperatorMatrix::zero(ops.b.space());
    const double F_p = p.gamma > 0.0 ? 4.0 * g * g / (p.gamma * k) : 0.0;
    const double a2 = std::norm(tc);
    const cd pref = 4.0 * a2 * tc * (2.0 * a2 - tc * tc) * g * g / (k * k * k);
    const OperatorMatrix br = commutator(ops.b, ops.r);
    const OperatorMatrix inner = (I_unit * p.omega) * commutator(ops.v, ops.b) + (F_now * g) * br +
                                 (-0.5 * p.gamma * (1.0 + F_p * tc)) * (br * ops.b);
    return pref * inner;
}

OperatorMatrix jc_a_pdb(const JCParams& p) {
    const auto s = susceptibilities(p);
    if (p.g == 0.0) return a_adb(p, AtomOperatorSet::jaynes_cummings(), jc_constant_F(p));
    const double k = p.kappa, g = p.g;
    const cd tc = s.t_c;
    const auto Id = OperatorMatrix::identity(qubit());
    const cd cs = 1.0 + (p.gamma / k) * (tc / s.t_q) + 4.0 * g * g * tc * tc / (k * k);
    const cd cz = 4.0 * g * p.f * tc * tc / (k * k);
    const OperatorMatrix inner = cs * jc_sigma() + cz * jc_sigma_z() + cd(-p.f / g) * Id;
    return (-2.0 * I_unit * g * tc / k) * inner;
}

double MomentGenerator::residual(const MomentGenerator& o) const {
    return std::max((A - o.A).cwiseAbs().maxCoeff(), (b - o.b).cwiseAbs().maxCoeff());
}

MomentGenerator jc_moment_generator(const JCParams& p, EliminationOrder order) {
    const auto s = susceptibilities(p);
    const double w = order == EliminationOrder::prodiabatic ? 1.0 : 0.0;
    const double k = p.kappa, g = p.g, f = p.f;
    const cd tc = s.t_c;
    const cd corr = (p.gamma * tc * tc / k) * s.F_p;  // gamma t_c^2 F_p / kappa
    const cd Gamma = (p.gamma / s.t_q) * (1.0 + tc * s.t_q * s.F_p) * (1.0 + w * corr);

    MomentGenerator m;
    m.A(0, 0) = -0.5 * Gamma;
    m.A(0, 2) = -2.0 * g * f * tc / k;
    m.b(0) = (2.0 * g * f * tc / k) * (w * corr);
    m.A(1, 1) = std::conj(m.A(0, 0));
    m.A(1, 2) = std::conj(m.A(0, 2));
    m.b(1) = std::conj(m.b(0));
    const cd c = tc * (w * corr + 1.0);
    m.A(2, 2) = -Gamma.real();
    m.b(2) = -Gamma.real();
    m.A(2, 0) = (4.0 * g * f / k) * std::conj(c);
    m.A(2, 1) = (4.0 * g * f / k) * c;
    return m;
}

Mat heisenberg_action(const Mat& H, std::span<const Jump> jumps, const Mat& X) {
    Mat out = I_unit * (H * X - X * H);
    for (const auto& j : jumps) {
        const Mat& A = j.op.mat();
        const Mat Ad = A.adjoint();
        const Mat AdA = Ad * A;
        out += j.rate * (Ad * X * A - 0.5 * (AdA * X + X * AdA));
    }
    return out;
}

MomentGenerator induced_moments(const OperatorMatrix& H, std::span<const Jump> jumps) {
    if (H.dim() != 2) throw DomainError("induced_moments: two-level operators expected");
    const Mat basis[3] = {jc_sigma().mat(), jc_sigma().adjoint().mat(), jc_sigma_z().mat()};
    MomentGenerator m;
    for (int row = 0; row < 3; ++row) {
        const Mat Y = heisenberg_action(H.mat(), jumps, basis[row]);
        // Y = y_s sigma + y_sd sigma^dagger + y_z sigma_z + c I
        m.A(row, 0) = Y(0, 1);
        m.A(row, 1) = Y(1, 0);
        m.A(row, 2) = 0.5 * (Y(1, 1) - Y(0, 0));
        m.b(row) = 0.5 * (Y(0, 0) + Y(1, 1));
    }
    return m;
}

MomentGenerator induced_moments(const LindbladModel& model, double t) {
    const auto js = model.jumps(t);
    return induced_moments(model.hamiltonian(t), js);
}

JCLindbladCoefficients jc_lindblad_coefficients(const JCParams& p, EliminationOrder order, JCBranch branch) {
    const auto s = susceptibilities(p);
    const double w = order == EliminationOrder::prodiabatic ? 1.0 : 0.0;
    const double k = p.kappa, g = p.g, f = p.f, gam = p.gamma, Fp = s.F_p;
    if (branch == JCBranch::automatic) branch = p.resonant() ? JCBranch::resonant : JCBranch::detuned;
    if (branch == JCBranch::resonant && !p.resonant())
        throw ModelInapplicable("jc_lindblad_coefficients: resonant branch requested with nonzero detuning");

    JCLindbladCoefficients c;
    if (branch == JCBranch::resonant) {
        c.c_y = -(2.0 * g * f / k) * (w * gam * Fp / (2.0 * k) + 1.0);
        c.Gamma0 = gam * (1.0 + Fp);
        c.Gamma1 = w * gam * (1.0 + Fp) * (gam / k) * Fp;
        c.xi = w * (2.0 * f * g / (k * k)) * Fp / (Fp + 1.0);
        return c;
    }

    const cd tc = s.t_c;
    const double a2 = std::norm(tc);
    const double rt2 = (tc * tc).real();
    const double Dl = p.delta, Om = p.omega;
    const double gk = gam / k;
    c.c_z = Om / 2.0 + (gam / (2.0 * k)) * Fp * (w * Om * rt2 - Dl * a2) -
            w * Dl * a2 * a2 * gk * gk * Fp * (Fp * (2.0 * a2 - 0.5) + 1.0);
    c.c_x = (2.0 * f * g * Dl / (k * k)) * a2 * (w * gk * Fp * (rt2 + 2.0 * a2 * a2) + 2.0);
    c.c_y = -(2.0 * g * f / k) * a2 * (w * gk * Fp * (1.5 * rt2 - a2 * a2) + 1.0);
    c.Gamma0 = gam * (1.0 + Fp * a2);
    c.Gamma1 = w * ((8.0 * Dl * Om / k) * gk * Fp * a2 * a2 +
                    gam * gk * Fp * a2 * (2.0 * a2 * (Fp * (2.0 * a2 - 1.5) + 1.0) - 1.0));
    c.xi = w * (2.0 * f * g * tc * tc * tc / (k * k)) * Fp / (1.0 + Fp * a2);
    if (c.Gamma1 < 0.0)
        throw ModelInapplicable("jc_pdb_lindblad: Gamma_1 < 0, detuning outside the validity region");
    return c;
}

namespace {

EffectiveModel build_effective(const JCParams& p, EliminationOrder order, JCBranch branch) {
    EffectiveModel em;
    em.order = order;
    em.params = p;
    em.coefficients = jc_lindblad_coefficients(p, order, branch);
    const auto& c = em.coefficients;

    LindbladModel m(qubit());
    const OperatorMatrix H = c.c_z * jc_sigma_z() + c.c_x * jc_sigma_x() + c.c_y * jc_sigma_y();
    m.add_hamiltonian(H);
    if (c.Gamma1 > 0.0) m.add_jump(jc_sigma(), c.Gamma1);
    m.add_jump(jc_sigma() + c.xi * jc_sigma_z(), c.Gamma0);
    em.model = std::move(m);

    const auto ops = AtomOperatorSet::jaynes_cummings();
    const cd F = jc_constant_F(p);
    if (order == EliminationOrder::prodiabatic) {
        em.photon = jc_a_pdb(p);
        em.noise_B = noise_operator_B(p, ops, F);
    } else {
        em.photon = a_adb(p, ops, F);
        em.noise_B = OperatorMatrix::zero(qubit());
    }
    return em;
}

}  // namespace

EffectiveModel jc_pdb_lindblad(const JCParams& p, JCBranch branch) {
    return build_effective(p, EliminationOrder::prodiabatic, branch);
}

EffectiveModel jc_adb_lindblad(const JCParams& p) {
    return build_effective(p, EliminationOrder::adiabatic, JCBranch::detuned);
}

std::vector<double> g2_pdb_analytic(const JCParams& p, std::span<const double> grid, bool include_noise) {
    if (!p.resonant()) throw DomainError("g2_pdb_analytic: formula holds on resonance only (use pdb_correlator)");
    const auto s = susceptibilities(p);
    const double k = p.kappa, gk = p.gamma / p.kappa, Fp = s.F_p;
    const double Gamma = p.gamma * (1.0 + Fp) * (1.0 + gk * Fp);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) {
        const double e = std::exp(-Gamma * t / 2.0);
        double v = sq(1.0 - Fp * Fp * (1.0 - gk * gk * sq(Fp + 1.0)) * e);
        if (include_noise) v += 2.0 * std::exp(-k * t / 2.0) * gk * Fp * Fp * (1.0 + Fp) * (1.0 - Fp * Fp * e);
        out.push_back(v);
    }
    return out;
}

DensityMatrix JCExactModel::ground_state() const {
    const int n = n_max + 1;
    Vec cav = Vec::Zero(n);
    if (frame == Frame::displaced) {
        cav(0) = 1.0;
    } else {
        // truncated coherent state
        cd amp = 1.0;
        for (int k = 0; k < n; ++k) {
            cav(k) = amp;
            amp *= alpha / std::sqrt(double(k + 1));
        }
    }
    Vec atom = Vec::Zero(2);
    atom(0) = 1.0;
    Vec psi(2 * n);
    for (int k = 0; k < n; ++k) psi.segment(2 * k, 2) = cav(k) * atom;
    return DensityMatrix::pure(model.space(), psi);
}

JCExactModel jc_exact_model(const JCParams& p, int n_max, Frame frame) {
    p.validate();
    const HilbertSpace space({n_max + 1, 2});
    const OperatorMatrix c = embed(build_annihilation(n_max), 0, space);
    const OperatorMatrix s = embed(jc_sigma(), 1, space);
    const OperatorMatrix sz = embed(jc_sigma_z(), 1, space);
    const auto Id = OperatorMatrix::identity(space);

    JCExactModel ex;
    ex.n_max = n_max;
    ex.frame = frame;
    ex.alpha = I_unit * jc_constant_F(p);

    OperatorMatrix H = p.delta * (c.adjoint() * c) + (0.5 * p.omega) * sz + p.g * (c.adjoint() * s + s.adjoint() * c);
    if (frame == Frame::lab) {
        H -= p.f * (c + c.adjoint());
        ex.photon = c;
    } else {
        // drive cancels against the coherent amplitude; the atom sees g alpha
        H += p.g * (std::conj(ex.alpha) * s + ex.alpha * s.adjoint());
        ex.photon = ex.alpha * Id + c;
    }
    LindbladModel m(space);
    m.add_hamiltonian(H);
    m.add_jump(c, p.kappa);
    if (p.gamma > 0.0) m.add_jump(s, p.gamma);
    ex.model = std::move(m);
    ex.sigma_z = sz;
    Mat top = Mat::Zero(n_max + 1, n_max + 1);
    top(n_max, n_max) = 1.0;
    ex.top_projector = embed(OperatorMatrix(HilbertSpace({n_max + 1}), top), 0, space);
    return ex;
}

}  // namespace prodiab
