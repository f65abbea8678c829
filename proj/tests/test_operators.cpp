#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "prodiab/elimination.hpp"
#include "prodiab/error.hpp"
#include "prodiab/operators.hpp"

using namespace prodiab;

namespace {

Mat random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = {n(rng), n(rng)};
    return 0.5 * (m + m.adjoint());
}

Mat random_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = {n(rng), n(rng)};
    return m;
}

double maxabs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("annihilation operator") {
    const auto a1 = build_annihilation(1);
    CHECK(a1.dim() == 2);
    CHECK(a1(0, 1) == cd(1.0));
    CHECK(maxabs(a1.mat()) == 1.0);

    const auto a2 = build_annihilation(2);
    CHECK(a2(0, 1) == cd(1.0));
    CHECK(std::abs(a2(1, 2) - std::sqrt(2.0)) < 1e-15);
    const Mat c = commutator(a2, a2.adjoint()).mat();
    Mat expect = Mat::Zero(3, 3);
    expect.diagonal() << 1.0, 1.0, -2.0;
    CHECK(maxabs(c - expect) < 1e-14);

    CHECK_THROWS_AS(build_annihilation(0), DomainError);
}

TEST_CASE("transition operators") {
    const auto s = build_transition(2, 0, 1);
    CHECK(s(0, 1) == cd(1.0));
    CHECK(maxabs(s.mat()) == 1.0);
    const auto s23 = build_transition(3, 1, 2);
    CHECK(s23(1, 2) == cd(1.0));
    const auto s13 = build_transition(3, 0, 2);
    CHECK(maxabs((s13.adjoint() * s13).mat() - build_transition(3, 2, 2).mat()) == 0.0);
    CHECK_THROWS_AS(build_transition(3, 3, 0), DomainError);
    CHECK_THROWS_AS(build_transition(3, 0, -1), DomainError);
}

TEST_CASE("embed") {
    const HilbertSpace s({3, 2});
    CHECK(s.dim() == 6);
    const auto id = embed(OperatorMatrix::identity(HilbertSpace({2})), 1, s);
    CHECK(maxabs(id.mat() - Mat::Identity(6, 6)) == 0.0);

    const auto sm = build_transition(2, 0, 1);
    const auto e = embed(sm, 1, s);
    Mat expect = Mat::Zero(6, 6);
    for (int k = 0; k < 3; ++k) expect(2 * k, 2 * k + 1) = 1.0;
    CHECK(maxabs(e.mat() - expect) == 0.0);

    const auto a = embed(build_annihilation(2), 0, s);
    CHECK(maxabs(commutator(a, e).mat()) == 0.0);

    CHECK_THROWS_AS(embed(sm, 0, s), DomainError);
    CHECK_THROWS_AS(embed(sm, 2, s), DomainError);
}

TEST_CASE("embed is a homomorphism") {
    std::mt19937_64 rng(11);
    const HilbertSpace s({2, 3});
    for (int trial = 0; trial < 20; ++trial) {
        for (int slot = 0; slot < 2; ++slot) {
            const int d = s.dims()[slot];
            const HilbertSpace f({d});
            const OperatorMatrix A(f, random_matrix(d, rng)), B(f, random_matrix(d, rng));
            const Mat lhs = embed(A * B, slot, s).mat();
            const Mat rhs = (embed(A, slot, s) * embed(B, slot, s)).mat();
            CHECK(maxabs(lhs - rhs) < 1e-13);
        }
    }
}

TEST_CASE("vectorization is column stacking") {
    Mat X(2, 2);
    X << 1.0, 2.0, 3.0, 4.0;
    const Vec v = vec(X);
    CHECK(v(1) == cd(3.0));
    CHECK(v(2) == cd(2.0));
    CHECK(maxabs(unvec(v, 2) - X) == 0.0);

    std::mt19937_64 rng(5);
    const HilbertSpace s({3});
    const OperatorMatrix A(s, random_matrix(3, rng)), B(s, random_matrix(3, rng));
    const Mat Y = random_matrix(3, rng);
    CHECK(maxabs(sandwich(A, B).apply(Y) - A.mat() * Y * B.mat()) < 1e-13);
}

TEST_CASE("dissipator") {
    const HilbertSpace q({2});
    CHECK(maxabs(dissipator(OperatorMatrix::identity(q)).mat()) < 1e-15);

    const auto sm = build_transition(2, 0, 1);
    Mat rho = Mat::Zero(2, 2);
    rho(1, 1) = 1.0;
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1.0;
    expect(1, 1) = -1.0;
    CHECK(maxabs(dissipator(sm).apply(rho) - expect) < 1e-15);

    std::mt19937_64 rng(2);
    const HilbertSpace s({3});
    for (int k = 0; k < 100; ++k) {
        const OperatorMatrix A(s, random_matrix(3, rng));
        const Mat X = k < 50 ? random_hermitian(3, rng) : random_matrix(3, rng);
        const Mat out = dissipator(A).apply(X);
        const Mat direct =
            A.mat() * X * A.mat().adjoint() - 0.5 * (A.mat().adjoint() * A.mat() * X + X * A.mat().adjoint() * A.mat());
        CHECK(std::abs(out.trace()) < 1e-12 * (1.0 + maxabs(X)) * (1.0 + maxabs(A.mat()) * maxabs(A.mat())));
        CHECK(maxabs(out - direct) < 1e-12 * (1.0 + maxabs(direct)));
    }
}

TEST_CASE("cross dissipator reduces to the dissipator on the diagonal") {
    std::mt19937_64 rng(9);
    const HilbertSpace s({3});
    const OperatorMatrix A(s, random_matrix(3, rng));
    CHECK(maxabs(cross_dissipator(A, A).mat() - dissipator(A).mat()) < 1e-13);
}

TEST_CASE("liouvillian") {
    const HilbertSpace q({2});
    CHECK(maxabs(liouvillian(OperatorMatrix::zero(q), {}).mat()) == 0.0);

    const double gamma = 0.37;
    const std::vector<Jump> jumps{{build_transition(2, 0, 1), gamma}};
    const auto L = liouvillian(OperatorMatrix::zero(q), jumps);
    Eigen::ComplexEigenSolver<Mat> es(L.mat());
    std::vector<double> ev;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-13);
        ev.push_back(es.eigenvalues()(i).real());
    }
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-gamma).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(-gamma / 2).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(-gamma / 2).epsilon(1e-12));
    CHECK(std::abs(ev[3]) < 1e-13);

    const std::vector<Jump> bad{{build_transition(2, 0, 1), -1.0}};
    CHECK_THROWS_AS(liouvillian(OperatorMatrix::zero(q), bad), DomainError);
}

TEST_CASE("liouvillians preserve trace and hermiticity") {
    JCParams p;
    p.g = 0.15;
    p.gamma = 5e-3;
    p.omega = 5e-4;
    p.delta = 0.05;
    p.f = 0.01;
    for (Frame fr : {Frame::lab, Frame::displaced}) {
        const auto ex = jc_exact_model(p, 4, fr);
        const auto L = ex.model.liouvillian(0.0);
        CHECK(L.trace_residual() < 1e-10);
        std::mt19937_64 rng(4);
        const Mat X = random_hermitian(ex.model.space().dim(), rng);
        const Mat Y = L.apply(X);
        CHECK(maxabs(Y - Y.adjoint()) < 1e-12);
    }
}

TEST_CASE("expectation") {
    const HilbertSpace q({2});
    const auto g = DensityMatrix::basis_state(q, 0);
    CHECK(std::abs(expectation(OperatorMatrix::identity(q), g) - 1.0) < 1e-15);
    CHECK(std::abs(expectation(jc_sigma_z(), g) + 1.0) < 1e-15);

    const int n = 8;
    const HilbertSpace f({n + 1});
    Vec psi(n + 1);
    double norm = 0.0;
    for (int k = 0; k <= n; ++k) {
        psi(k) = std::exp(-0.5 * (k - 3.0) * (k - 3.0) / 2.0) * std::polar(1.0, 0.3 * k);
        norm += std::norm(psi(k));
    }
    psi /= std::sqrt(norm);
    const auto rho = DensityMatrix::pure(f, psi);
    const auto a = build_annihilation(n);
    double direct = 0.0;
    for (int k = 0; k <= n; ++k) direct += k * std::norm(psi(k));
    CHECK(std::abs(expectation(a.adjoint() * a, rho) - direct) < 1e-13);
}

TEST_CASE("density matrix validation") {
    const HilbertSpace q({2});
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    CHECK_NOTHROW(DensityMatrix(q, m));
    m(0, 0) = 1.1;
    CHECK_THROWS_AS(DensityMatrix(q, m), DomainError);
    m(0, 0) = 1.0;
    m(0, 1) = 1e-6;
    CHECK_THROWS_AS(DensityMatrix(q, m), DomainError);
    Mat neg = Mat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(q, neg), DomainError);
    CHECK_THROWS_AS(DensityMatrix(q, Mat::Identity(3, 3) / 3.0), DomainError);
}

TEST_CASE("operator spaces must match") {
    const OperatorMatrix a(HilbertSpace({2}), Mat::Identity(2, 2));
    const OperatorMatrix b(HilbertSpace({3}), Mat::Identity(3, 3));
    CHECK_THROWS_AS(a + b, DomainError);
    CHECK_THROWS_AS(a * b, DomainError);
    CHECK_THROWS_AS(OperatorMatrix(HilbertSpace({2}), Mat::Identity(3, 3)), DomainError);
    CHECK_THROWS_AS(HilbertSpace(std::vector<int>{}), DomainError);
    CHECK_THROWS_AS(HilbertSpace({2, 0}), DomainError);
}
