#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "prodiab/dynamics.hpp"
#include "prodiab/elimination.hpp"
#include "prodiab/pulse.hpp"

namespace prodiab {

// Lambda system: levels 1, 2 (ground) and 3 (excited) stored at indices 0, 1, 2.
// H mode couples 1-3, V mode couples 2-3. Delta = Omega = 0.
struct LambdaParams {
    double kappa = 1.0;
    double gamma = 0.0;
    double g = 0.0;
    PulseEnvelope env_H;
    PulseEnvelope env_V;

    void validate() const;
    double purcell() const;  // 4 g^2 / (gamma kappa)
    std::vector<double> breakpoints() const;
    // Closed-form filtered drives (t_c = 1).
    double F_H(double t) const;
    double F_V(double t) const;
};

EpsilonReport epsilon_report(const LambdaParams& p);

// sigma_ij = |i><j| with 1-based level labels
OperatorMatrix lambda_transition(int i, int j);

std::pair<std::vector<double>, std::vector<double>> filtered_envelopes(const LambdaParams& p,
                                                                       std::span<const double> grid);

struct DarkStateRecord {
    double theta = 0.0;
    cd amp1, amp2;
    double adiabaticity_ratio = std::numeric_limits<double>::quiet_NaN();
};

DarkStateRecord dark_state(cd F_H, cd F_V);

// |theta'| / sqrt(F_H^2 + F_V^2); empty where both drives vanish.
std::vector<std::optional<double>> adiabaticity_metric(std::span<const double> F_H, std::span<const double> F_V,
                                                       std::span<const double> grid);

struct StirapExactModel {
    LindbladModel model;
    std::array<OperatorMatrix, 3> populations;
    OperatorMatrix top_H, top_V;  // highest Fock level of each mode
    int n_max = 0;
    Frame frame = Frame::displaced;

    DensityMatrix initial_state(int level) const;  // level in 1..3, cavities empty
    std::vector<NamedOperator> observables() const;  // P1, P2, P3, top_H, top_V
};

// dims = [n_max+1, n_max+1, 3]. In the displaced frame a_i = i F_i(t) + c_i and
// the drive terms drop out; in the lab frame the drives act on the modes.
StirapExactModel stirap_full_model(const LambdaParams& p, int n_max, Frame frame = Frame::displaced);

using MomentVector = Eigen::Matrix<cd, 8, 1>;
using MomentMatrix = Eigen::Matrix<cd, 8, 8>;

// Moment basis (s11, s22, s12, s21, s13, s31, s23, s32), s_ij = <sigma_ij>, s33 = 1 - s11 - s22.
class StirapMomentGenerator {
public:
    // Built from rates so that gamma = 0 with finite gamma F_p = 4 g^2 / kappa is representable.
    StirapMomentGenerator(double kappa, double gamma, double gamma_Fp, double g, EliminationOrder order, RealFn F_H,
                          RealFn F_V);

    EliminationOrder order() const { return order_; }
    void evaluate(double t, MomentMatrix& A, MomentVector& b) const;
    void rhs(double t, const cd* y, cd* dy) const;
    std::vector<double> breakpoints;

private:
    double kappa_, gamma_, gamma_Fp_, g_;
    EliminationOrder order_;
    RealFn F_H_, F_V_;
};

StirapMomentGenerator stirap_pdb_generator(const LambdaParams& p);
StirapMomentGenerator stirap_adb_generator(const LambdaParams& p);

MomentVector moments_from_density(const Mat& rho3);
Mat density_from_moments(const MomentVector& y);

struct MomentTrajectory {
    std::vector<double> times;
    std::vector<MomentVector> y;
    OdeStats stats;

    std::array<std::vector<double>, 3> populations() const;
};

MomentTrajectory evolve_moments(const StirapMomentGenerator& gen, const MomentVector& y0,
                                std::span<const double> grid, const IntegratorConfig& cfg);

// Moment equations induced by a three-level master equation at time t.
void induced_stirap_moments(const OperatorMatrix& H, std::span<const Jump> jumps, MomentMatrix& A, MomentVector& b);

struct StirapEffectiveModel {
    LindbladModel model;
    EliminationOrder order = EliminationOrder::prodiabatic;
};

StirapEffectiveModel stirap_pdb_lindblad(const LambdaParams& p);

std::vector<std::optional<double>> dark_state_overlap(std::span<const Mat> rho3, std::span<const double> F_H,
                                                      std::span<const double> F_V);

}  // namespace prodiab
