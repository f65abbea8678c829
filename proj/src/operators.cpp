#include "prodiab/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "prodiab/error.hpp"

namespace prodiab {

namespace {

Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

void require_same(const HilbertSpace& a, const HilbertSpace& b, const char* where) {
    if (!(a == b)) throw DomainError(std::string(where) + ": operators live on different spaces");
}

}  // namespace

HilbertSpace::HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DomainError("HilbertSpace: empty dimension list");
    total_ = 1;
    for (int d : dims_) {
        if (d <= 0) throw DomainError("HilbertSpace: non-positive subsystem dimension");
        total_ *= d;
    }
}

OperatorMatrix::OperatorMatrix(HilbertSpace space, Mat m) : space_(std::move(space)), m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() != space_.dim())
        throw DomainError("OperatorMatrix: matrix shape does not match space dimension");
}

OperatorMatrix OperatorMatrix::identity(const HilbertSpace& s) { return {s, Mat::Identity(s.dim(), s.dim())}; }
OperatorMatrix OperatorMatrix::zero(const HilbertSpace& s) { return {s, Mat::Zero(s.dim(), s.dim())}; }

double OperatorMatrix::hermiticity_deviation() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& o) {
    require_same(space_, o.space_, "operator+");
    m_ += o.m_;
    return *this;
}
OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& o) {
    require_same(space_, o.space_, "operator-");
    m_ -= o.m_;
    return *this;
}
OperatorMatrix& OperatorMatrix::operator*=(cd s) {
    m_ *= s;
    return *this;
}

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same(a.space(), b.space(), "operator*");
    return {a.space(), a.mat() * b.mat()};
}
OperatorMatrix operator*(cd s, OperatorMatrix a) { return a *= s; }
OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= cd(s); }
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

void InvariantReport::merge_worst(const InvariantReport& o) {
    hermiticity = std::max(hermiticity, o.hermiticity);
    trace_error = std::max(trace_error, o.trace_error);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
}

InvariantReport density_invariants(const Mat& rho) {
    InvariantReport r;
    r.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    r.trace_error = std::abs(rho.trace() - 1.0);
    const Mat h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
}

DensityMatrix::DensityMatrix(OperatorMatrix op) : op_(std::move(op)) {
    const auto rep = invariants();
    if (!rep.within())
        throw DomainError("DensityMatrix: invariants violated (herm " + std::to_string(rep.hermiticity) + ", trace " +
                          std::to_string(rep.trace_error) + ", min eig " + std::to_string(rep.min_eigenvalue) + ")");
}

DensityMatrix DensityMatrix::basis_state(const HilbertSpace& s, int index) {
    if (index < 0 || index >= s.dim()) throw DomainError("basis_state: index out of range");
    Mat m = Mat::Zero(s.dim(), s.dim());
    m(index, index) = 1.0;
    return DensityMatrix(s, std::move(m));
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& s, const Vec& psi) {
    if (psi.size() != s.dim()) throw DomainError("pure: state vector has wrong length");
    const Vec n = psi / psi.norm();
    return DensityMatrix(s, n * n.adjoint());
}

Superoperator::Superoperator(HilbertSpace space, Mat m) : space_(std::move(space)), m_(std::move(m)) {
    const Eigen::Index d2 = Eigen::Index(space_.dim()) * space_.dim();
    if (m_.rows() != d2 || m_.cols() != d2) throw DomainError("Superoperator: shape does not match d^2");
}

Superoperator Superoperator::zero(const HilbertSpace& s) {
    const Eigen::Index d2 = Eigen::Index(s.dim()) * s.dim();
    return {s, Mat::Zero(d2, d2)};
}

Mat Superoperator::apply(const Mat& X) const { return unvec(m_ * vec(X), space_.dim()); }

double Superoperator::trace_residual() const {
    const Vec vi = vec(Mat::Identity(space_.dim(), space_.dim()));
    return (vi.adjoint() * m_).cwiseAbs().maxCoeff();
}

Superoperator& Superoperator::operator+=(const Superoperator& o) {
    require_same(space_, o.space_, "superoperator+");
    m_ += o.m_;
    return *this;
}

Superoperator operator*(double s, Superoperator a) { return {a.space(), s * a.mat()}; }
Superoperator operator*(cd s, Superoperator a) { return {a.space(), s * a.mat()}; }
Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }

Vec vec(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

Mat unvec(const Vec& v, int d) {
    if (v.size() != Eigen::Index(d) * d) throw DomainError("unvec: length is not d^2");
    return Eigen::Map<const Mat>(v.data(), d, d);
}

OperatorMatrix build_annihilation(int n_max) {
    if (n_max < 1) throw DomainError("build_annihilation: n_max must be at least 1");
    const int n = n_max + 1;
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k <= n_max; ++k) a(k - 1, k) = std::sqrt(double(k));
    return {HilbertSpace({n}), a};
}

OperatorMatrix build_transition(int d, int i, int j) {
    if (d <= 0 || i < 0 || j < 0 || i >= d || j >= d) throw DomainError("build_transition: index out of range");
    Mat m = Mat::Zero(d, d);
    m(i, j) = 1.0;
    return {HilbertSpace({d}), m};
}

OperatorMatrix embed(const OperatorMatrix& op, int slot, const HilbertSpace& space) {
    if (slot < 0 || std::size_t(slot) >= space.factors()) throw DomainError("embed: slot out of range");
    if (op.dim() != space.dims()[slot]) throw DomainError("embed: operator dimension does not match slot");
    Mat m = Mat::Identity(1, 1);
    for (std::size_t k = 0; k < space.factors(); ++k) {
        const int dk = space.dims()[k];
        m = kron(m, int(k) == slot ? op.mat() : Mat(Mat::Identity(dk, dk)));
    }
    return {space, m};
}

Superoperator sandwich(const OperatorMatrix& A, const OperatorMatrix& B) {
    require_same(A.space(), B.space(), "sandwich");
    // vec(A X B) = (B^T kron A) vec(X)
    return {A.space(), kron(B.mat().transpose(), A.mat())};
}

Superoperator hamiltonian_part(const OperatorMatrix& H) {
    const auto Id = OperatorMatrix::identity(H.space());
    Mat m = -I_unit * (sandwich(H, Id).mat() - sandwich(Id, H).mat());
    return {H.space(), std::move(m)};
}

Superoperator cross_dissipator(const OperatorMatrix& Am, const OperatorMatrix& An) {
    require_same(Am.space(), An.space(), "cross_dissipator");
    const auto Id = OperatorMatrix::identity(Am.space());
    const OperatorMatrix nm = An.adjoint() * Am;
    Mat m = sandwich(Am, An.adjoint()).mat() - 0.5 * sandwich(nm, Id).mat() - 0.5 * sandwich(Id, nm).mat();
    return {Am.space(), std::move(m)};
}

Superoperator dissipator(const OperatorMatrix& A) { return cross_dissipator(A, A); }

Superoperator liouvillian(const OperatorMatrix& H, std::span<const Jump> jumps) {
    Superoperator L = hamiltonian_part(H);
    for (const auto& j : jumps) {
        if (!(j.rate >= 0.0)) throw DomainError("liouvillian: negative or NaN rate");
        require_same(H.space(), j.op.space(), "liouvillian");
        if (j.rate > 0.0) L += j.rate * dissipator(j.op);
    }
    return L;
}

cd expectation(const OperatorMatrix& op, const Mat& rho) {
    if (rho.rows() != op.dim() || rho.cols() != op.dim()) throw DomainError("expectation: shape mismatch");
    // Tr(op rho) without forming the product
    return (op.mat().transpose().cwiseProduct(rho)).sum();
}

cd expectation(const OperatorMatrix& op, const DensityMatrix& rho) {
    require_same(op.space(), rho.space(), "expectation");
    return expectation(op, rho.mat());
}

}  // namespace prodiab
