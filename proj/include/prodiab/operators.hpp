#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace prodiab {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cd I_unit{0.0, 1.0};

class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int dim() const { return total_; }
    std::size_t factors() const { return dims_.size(); }
    bool operator==(const HilbertSpace& o) const { return dims_ == o.dims_; }

private:
    std::vector<int> dims_;
    int total_ = 0;
};

class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(HilbertSpace space, Mat m);

    static OperatorMatrix identity(const HilbertSpace& s);
    static OperatorMatrix zero(const HilbertSpace& s);

    const HilbertSpace& space() const { return space_; }
    const Mat& mat() const { return m_; }
    int dim() const { return space_.dim(); }
    cd operator()(int i, int j) const { return m_(i, j); }

    OperatorMatrix adjoint() const { return {space_, m_.adjoint()}; }
    double hermiticity_deviation() const;

    OperatorMatrix& operator+=(const OperatorMatrix& o);
    OperatorMatrix& operator-=(const OperatorMatrix& o);
    OperatorMatrix& operator*=(cd s);

private:
    HilbertSpace space_;
    Mat m_;
};

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(cd s, OperatorMatrix a);
OperatorMatrix operator*(double s, OperatorMatrix a);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

struct InvariantReport {
    double hermiticity = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;  // |Tr rho - 1|
    double min_eigenvalue = 1.0;

    static constexpr double kHermTol = 1e-10;
    static constexpr double kTraceTol = 1e-8;
    static constexpr double kEigTol = 1e-8;

    // scale = 1 is the DensityMatrix contract; evolve aborts at scale = 10.
    bool within(double scale = 1.0) const {
        return hermiticity <= scale * kHermTol && trace_error <= scale * kTraceTol && min_eigenvalue >= -scale * kEigTol;
    }
    void merge_worst(const InvariantReport& o);
};

InvariantReport density_invariants(const Mat& rho);

class DensityMatrix {
public:
    DensityMatrix() = default;
    // Throws DomainError if the invariants do not hold.
    explicit DensityMatrix(OperatorMatrix op);
    DensityMatrix(HilbertSpace s, Mat m) : DensityMatrix(OperatorMatrix(std::move(s), std::move(m))) {}

    static DensityMatrix basis_state(const HilbertSpace& s, int index);
    static DensityMatrix pure(const HilbertSpace& s, const Vec& psi);

    const OperatorMatrix& op() const { return op_; }
    const Mat& mat() const { return op_.mat(); }
    const HilbertSpace& space() const { return op_.space(); }
    int dim() const { return op_.dim(); }
    InvariantReport invariants() const { return density_invariants(op_.mat()); }

private:
    OperatorMatrix op_;
};

class Superoperator {
public:
    Superoperator() = default;
    Superoperator(HilbertSpace space, Mat m);
    static Superoperator zero(const HilbertSpace& s);

    const HilbertSpace& space() const { return space_; }
    const Mat& mat() const { return m_; }
    Mat apply(const Mat& X) const;
    // max |vec(I)^dagger L|
    double trace_residual() const;

    Superoperator& operator+=(const Superoperator& o);

private:
    HilbertSpace space_;
    Mat m_;
};

Superoperator operator*(double s, Superoperator a);
Superoperator operator*(cd s, Superoperator a);
Superoperator operator+(Superoperator a, const Superoperator& b);

// Column-stacking vectorization.
Vec vec(const Mat& X);
Mat unvec(const Vec& v, int d);

OperatorMatrix build_annihilation(int n_max);
OperatorMatrix build_transition(int d, int i, int j);
OperatorMatrix embed(const OperatorMatrix& op, int slot, const HilbertSpace& space);

// X -> A X B as a superoperator
Superoperator sandwich(const OperatorMatrix& A, const OperatorMatrix& B);
Superoperator hamiltonian_part(const OperatorMatrix& H);  // -i[H, .]
Superoperator dissipator(const OperatorMatrix& A);
// X -> A_m X A_n^dagger - 1/2 {A_n^dagger A_m, X}
Superoperator cross_dissipator(const OperatorMatrix& Am, const OperatorMatrix& An);

struct Jump {
    OperatorMatrix op;
    double rate = 0.0;
};

Superoperator liouvillian(const OperatorMatrix& H, std::span<const Jump> jumps);

cd expectation(const OperatorMatrix& op, const DensityMatrix& rho);
cd expectation(const OperatorMatrix& op, const Mat& rho);

}  // namespace prodiab
