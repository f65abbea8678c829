#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prodiab/dynamics.hpp"
#include "prodiab/operators.hpp"
#include "prodiab/pulse.hpp"

namespace prodiab {

// Rates in units of your choice (the harness uses kappa = 1).
struct JCParams {
    double kappa = 1.0;
    double gamma = 0.0;
    double g = 0.0;
    double delta = 0.0;  // cavity detuning
    double omega = 0.0;  // atom detuning
    double f = 0.0;      // coherent drive

    void validate() const;
    bool resonant() const { return delta == 0.0 && omega == 0.0; }
};

struct Susceptibilities {
    cd t_c;
    cd t_q;
    double F_p = 0.0;
    cd Gamma;
};

cd cavity_susceptibility(const JCParams& p);
Susceptibilities susceptibilities(const JCParams& p);

struct EpsilonReport {
    std::vector<std::pair<std::string, double>> eps_sq_candidates;  // gamma/kappa, |Omega|/kappa
    std::vector<std::pair<std::string, double>> eps_candidates;     // g/kappa, |f|/kappa
    double worst_eps = 0.0;
    bool warning = false;  // worst_eps > 0.3

    static constexpr double kWarnThreshold = 0.3;
};

EpsilonReport epsilon_report(const JCParams& p);

// Atom operators entering the general elimination formulas.
struct AtomOperatorSet {
    OperatorMatrix b;
    OperatorMatrix r;  // [b, b^dagger]
    OperatorMatrix v;

    static AtomOperatorSet make(OperatorMatrix b, OperatorMatrix v);
    static AtomOperatorSet jaynes_cummings();
};

// Two-level conventions: |0> ground, sigma = |0><1|, sigma_z = [sigma^dagger, sigma] = diag(-1, 1).
OperatorMatrix jc_sigma();
OperatorMatrix jc_sigma_z();
OperatorMatrix jc_sigma_x();
OperatorMatrix jc_sigma_y();

OperatorMatrix a_adb(const JCParams& p, const AtomOperatorSet& ops, cd F_now);
OperatorMatrix a_pdb_general(const JCParams& p, const AtomOperatorSet& ops, cd F_now);
OperatorMatrix noise_operator_B(const JCParams& p, const AtomOperatorSet& ops, cd F_now);
OperatorMatrix jc_a_pdb(const JCParams& p);

// Stationary filtered drive 2 t_c f / kappa for a constant drive.
cd jc_constant_F(const JCParams& p);

enum class EliminationOrder { adiabatic, prodiabatic };

// d m/dt = A m + b on m = (<sigma>, <sigma^dagger>, <sigma_z>)
struct MomentGenerator {
    Eigen::Matrix3cd A = Eigen::Matrix3cd::Zero();
    Eigen::Vector3cd b = Eigen::Vector3cd::Zero();

    double residual(const MomentGenerator& o) const;
};

MomentGenerator jc_moment_generator(const JCParams& p, EliminationOrder order = EliminationOrder::prodiabatic);

// Moments induced by a two-level master equation (Heisenberg picture).
MomentGenerator induced_moments(const OperatorMatrix& H, std::span<const Jump> jumps);
MomentGenerator induced_moments(const LindbladModel& m, double t = 0.0);

// L^dagger(X) = i[H, X] + sum r (A^dagger X A - 1/2 {A^dagger A, X})
Mat heisenberg_action(const Mat& H, std::span<const Jump> jumps, const Mat& X);

enum class JCBranch { automatic, resonant, detuned };

// Coefficients of H = c_z sigma_z + c_x sigma_x + c_y sigma_y with jumps
// sigma at Gamma_1 and (sigma + xi sigma_z) at Gamma_0.
struct JCLindbladCoefficients {
    double c_z = 0.0, c_x = 0.0, c_y = 0.0;
    double Gamma0 = 0.0, Gamma1 = 0.0;
    cd xi;
};

JCLindbladCoefficients jc_lindblad_coefficients(const JCParams& p, EliminationOrder order,
                                                JCBranch branch = JCBranch::automatic);

struct EffectiveModel {
    LindbladModel model;
    EliminationOrder order = EliminationOrder::prodiabatic;
    JCParams params;
    OperatorMatrix photon;   // atom-space representation of the cavity field
    OperatorMatrix noise_B;  // zero for the adiabatic model
    JCLindbladCoefficients coefficients;
};

EffectiveModel jc_pdb_lindblad(const JCParams& p, JCBranch branch = JCBranch::automatic);
EffectiveModel jc_adb_lindblad(const JCParams& p);

std::vector<double> g2_pdb_analytic(const JCParams& p, std::span<const double> grid, bool include_noise = true);

// Full cavity + atom model used as the exact reference. dims = [n_max+1, 2].
enum class Frame { lab, displaced };

struct JCExactModel {
    LindbladModel model;
    OperatorMatrix photon;         // a (lab) or alpha + c (displaced)
    OperatorMatrix sigma_z;
    OperatorMatrix top_projector;  // population of the highest Fock level
    cd alpha;
    int n_max = 0;
    Frame frame = Frame::displaced;

    // atom ground state with the cavity in the coherent state alpha
    DensityMatrix ground_state() const;
};

JCExactModel jc_exact_model(const JCParams& p, int n_max, Frame frame = Frame::displaced);

}  // namespace prodiab
