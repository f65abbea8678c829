#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prodiab/ode.hpp"
#include "prodiab/operators.hpp"

namespace prodiab {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cd(double)>;

// Hermitian operator times a real coefficient; an empty coeff means 1.
struct HamiltonianTerm {
    OperatorMatrix op;
    RealFn coeff;
};

struct JumpComponent {
    OperatorMatrix op;
    ComplexFn coeff;  // empty means 1
};

// Jump operator A(t) = sum_m c_m(t) A_m with rate * rate_profile(t).
struct JumpChannel {
    std::vector<JumpComponent> components;
    double rate = 0.0;
    RealFn rate_profile;

    bool time_dependent() const;
    OperatorMatrix op_at(double t) const;
    double rate_at(double t) const { return rate_profile ? rate * rate_profile(t) : rate; }
};

class LindbladModel {
public:
    LindbladModel() = default;
    explicit LindbladModel(HilbertSpace space) : space_(std::move(space)) {}

    LindbladModel& add_hamiltonian(OperatorMatrix op, RealFn coeff = {});
    LindbladModel& add_jump(OperatorMatrix op, double rate);
    LindbladModel& add_jump(JumpChannel ch);
    LindbladModel& add_breakpoint(double t);

    const HilbertSpace& space() const { return space_; }
    const std::vector<HamiltonianTerm>& hamiltonian_terms() const { return terms_; }
    const std::vector<JumpChannel>& channels() const { return channels_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    bool time_dependent() const;

    OperatorMatrix hamiltonian(double t) const;
    std::vector<Jump> jumps(double t) const;
    Superoperator liouvillian(double t) const;

    // Hermiticity of H(t) (1e-10) and nonnegative rates at the sample times.
    void validate(std::span<const double> samples) const;

private:
    HilbertSpace space_;
    std::vector<HamiltonianTerm> terms_;
    std::vector<JumpChannel> channels_;
    std::vector<double> breakpoints_;
};

enum class GeneratorForm { automatic, superoperator, operator_product };

// Evaluates d vec(X)/dt for a LindbladModel. The superoperator form does one
// d^2 x d^2 matvec per time-dependent piece; the operator-product form uses
// H_eff = H - (i/2) sum r A^dagger A and costs O(d^3) per evaluation.
// Holds scratch buffers: one instance per concurrent evolution.
class LindbladGenerator {
public:
    static constexpr int kSuperoperatorMaxDim = 16;

    explicit LindbladGenerator(const LindbladModel& model, GeneratorForm form = GeneratorForm::automatic);
    LindbladGenerator(const LindbladGenerator&) = delete;
    LindbladGenerator& operator=(const LindbladGenerator&) = delete;
    GeneratorForm form() const { return form_; }
    int dim() const { return d_; }
    void apply(double t, const cd* x, cd* dx) const;

private:
    struct Piece {
        Mat L;
        std::function<cd(double)> weight;
    };
    struct OpChannel {
        std::size_t ch;
        Mat A, AdA;  // cached when time independent
        bool dynamic;
    };

    LindbladModel model_;
    GeneratorForm form_;
    int d_;
    // superoperator form
    Mat L0_;
    std::vector<Piece> pieces_;
    // operator-product form
    Mat Heff0_;
    std::vector<std::pair<Mat, RealFn>> hterms_;
    std::vector<OpChannel> opch_;
    mutable Mat heff_, heff_adj_, t1_, t2_, t3_, acc_;
    mutable Vec tmp_;
};

struct NamedOperator {
    std::string name;
    OperatorMatrix op;
};

struct EvolveOptions {
    bool keep_snapshots = false;
    bool check_invariants = true;
    GeneratorForm form = GeneratorForm::automatic;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<cd>> values;  // values[observable][time]
    std::vector<Mat> snapshots;
    InvariantReport worst;
    OdeStats stats;

    const std::vector<cd>& series(const std::string& name) const;
    std::vector<double> real_series(const std::string& name) const;
};

Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> grid,
                  const IntegratorConfig& cfg, const std::vector<NamedOperator>& observables,
                  const EvolveOptions& opts = {});

DensityMatrix steady_state(const Superoperator& L);

// Tighter settings used for conditioned-matrix propagation.
IntegratorConfig correlator_config();

// <left(0) mid(t) right(0)> = Tr[mid e^{Lt}(right rho left)] for t in grid (t >= 0).
std::vector<cd> two_time_correlator(const LindbladModel& model, const Mat& rho, const OperatorMatrix& left,
                                    const OperatorMatrix& mid, const OperatorMatrix& right,
                                    std::span<const double> grid, const IntegratorConfig& cfg = correlator_config(),
                                    GeneratorForm form = GeneratorForm::automatic);

std::vector<double> g2_curve(const LindbladModel& model, const OperatorMatrix& a, std::span<const double> grid,
                             const IntegratorConfig& cfg = correlator_config());

}  // namespace prodiab
