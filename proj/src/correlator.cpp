#include "prodiab/correlator.hpp"

#include <cmath>

#include "prodiab/error.hpp"

namespace prodiab {

CorrelatorSpec CorrelatorSpec::g1() { return {{Slot::origin}, {Slot::lag}, {}}; }
CorrelatorSpec CorrelatorSpec::g2() { return {{Slot::origin, Slot::lag}, {Slot::lag, Slot::origin}, {}}; }

namespace {

struct Split {
    OperatorMatrix left0;  // product of creation operators at the origin
    OperatorMatrix right0;
    OperatorMatrix at_lag;  // creation-at-lag * mid * annihilation-at-lag
};

Split split_operators(const std::vector<OperatorMatrix>& cre, const std::vector<Slot>& cslots,
                      const OperatorMatrix& mid, const std::vector<OperatorMatrix>& ann,
                      const std::vector<Slot>& aslots) {
    const auto Id = OperatorMatrix::identity(mid.space());
    Split s{Id, Id, Id};
    OperatorMatrix lag_left = Id, lag_right = Id;
    for (std::size_t i = 0; i < cre.size(); ++i) {
        if (cslots[i] == Slot::origin)
            s.left0 = s.left0 * cre[i];
        else
            lag_left = lag_left * cre[i];
    }
    for (std::size_t i = 0; i < ann.size(); ++i) {
        if (aslots[i] == Slot::origin)
            s.right0 = s.right0 * ann[i];
        else
            lag_right = lag_right * ann[i];
    }
    s.at_lag = lag_left * mid * lag_right;
    return s;
}

double slot_time(Slot s, double t) { return s == Slot::lag ? t : 0.0; }

}  // namespace

std::vector<cd> pdb_correlator(const JCParams& p, const CorrelatorSpec& spec, ModelChoice model, bool include_noise,
                               std::span<const double> grid, const CorrelatorOptions& opts) {
    const std::size_t M = spec.creation.size(), N = spec.annihilation.size();
    if (M > 2 || N > 2) throw UnsupportedOrder("pdb_correlator: at most two photon operators on each side");
    for (std::size_t i = 1; i < M; ++i)
        if (spec.creation[i] == Slot::origin && spec.creation[i - 1] == Slot::lag)
            throw DomainError("pdb_correlator: creation operators must be time ordered");
    for (std::size_t i = 1; i < N; ++i)
        if (spec.annihilation[i] == Slot::lag && spec.annihilation[i - 1] == Slot::origin)
            throw DomainError("pdb_correlator: annihilation operators must be time ordered");
    for (double t : grid)
        if (t < 0.0) throw DomainError("pdb_correlator: negative lag");

    const EffectiveModel em = model == ModelChoice::pdb ? jc_pdb_lindblad(p, opts.branch) : jc_adb_lindblad(p);
    const OperatorMatrix mid = spec.mid.dim() ? spec.mid : OperatorMatrix::identity(em.photon.space());
    if (!(mid.space() == em.photon.space())) throw DomainError("pdb_correlator: mid operator must act on the atom");
    const DensityMatrix rho = steady_state(em.model.liouvillian(0.0));

    const OperatorMatrix a = em.photon, ad = em.photon.adjoint();
    const std::vector<OperatorMatrix> cre(M, ad), ann(N, a);

    // Slot combinations differ per lag only through which operators sit at the
    // lag, so each term is one QRT propagation.
    auto qrt = [&](const std::vector<OperatorMatrix>& c, const std::vector<Slot>& cs, const std::vector<OperatorMatrix>& n,
                   const std::vector<Slot>& ns) {
        const Split sp = split_operators(c, cs, mid, n, ns);
        return two_time_correlator(em.model, rho.mat(), sp.left0, sp.at_lag, sp.right0, grid, opts.cfg);
    };

    std::vector<cd> out = qrt(cre, spec.creation, ann, spec.annihilation);
    if (!include_noise) return out;

    const cd tc = cavity_susceptibility(p);
    const OperatorMatrix& B = em.noise_B;
    if (N == 2) {
        // a(n_1) a(n_2) with n_1 later -> weight exp(-kappa (t_1 - t_2) / (2 t_c)) B(n_2)
        const Slot early = spec.annihilation[1], late = spec.annihilation[0];
        const auto term = qrt(cre, spec.creation, {B}, {early});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dt = slot_time(late, grid[i]) - slot_time(early, grid[i]);
            out[i] += std::exp(-p.kappa * dt / (2.0 * tc)) * term[i];
        }
    }
    if (M == 2) {
        const Slot early = spec.creation[0], late = spec.creation[1];
        const auto term = qrt({B.adjoint()}, {early}, ann, spec.annihilation);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dt = slot_time(late, grid[i]) - slot_time(early, grid[i]);
            out[i] += std::exp(-p.kappa * dt / (2.0 * std::conj(tc))) * term[i];
        }
    }
    return out;
}

std::vector<double> effective_g2(const JCParams& p, ModelChoice model, bool include_noise,
                                 std::span<const double> grid, const CorrelatorOptions& opts) {
    const EffectiveModel em = model == ModelChoice::pdb ? jc_pdb_lindblad(p, opts.branch) : jc_adb_lindblad(p);
    const DensityMatrix rho = steady_state(em.model.liouvillian(0.0));
    const double n = expectation(em.photon.adjoint() * em.photon, rho).real();
    if (!(n >= 1e-14)) throw UndefinedCorrelation("effective_g2: photon number below 1e-14");
    const auto num = pdb_correlator(p, CorrelatorSpec::g2(), model, include_noise, grid, opts);
    std::vector<double> out(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) out[i] = num[i].real() / (n * n);
    return out;
}

}  // namespace prodiab
