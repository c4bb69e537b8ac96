#include <random>

#include "carnot/algebra.hpp"
#include "carnot/surface.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

// Brute-force Koszul formula on a left-invariant metric: for constant-norm
// frames 2<nabla_X_i X_j, X_r> = <[X_i,X_j],X_r> - <[X_j,X_r],X_i> + <[X_r,X_i],X_j>.
double koszul(const CarnotGroup& g, int i, int j, int r) {
    return 0.5 * (g.structure(i, j, r) - g.structure(j, r, i) + g.structure(r, i, j));
}

Tensor3 heisenberg_tensor(int n) {
    Tensor3 c(2 * n + 1, 2 * n + 1, 2 * n + 1);
    for (int i = 0; i < n; ++i) {
        c(2 * i, 2 * i + 1, 2 * n) = 1.0;
        c(2 * i + 1, 2 * i, 2 * n) = -1.0;
    }
    return c;
}

// step-3 filiform-like algebra on strata (2,1,1): [X1,X2]=X3, [X1,X3]=X4.
CarnotGroup step3_group() {
    Tensor3 c(4, 4, 4);
    c(0, 1, 2) = 1.0;
    c(1, 0, 2) = -1.0;
    c(0, 2, 3) = 1.0;
    c(2, 0, 3) = -1.0;
    return CarnotGroup({2, 1, 1}, std::move(c));
}

bool has_issue(const ValidationReport& rep, ValidationIssue::Kind kind) {
    for (const auto& it : rep.issues)
        if (it.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("heisenberg structure validates") {
    auto rep = CarnotGroup::validate({2, 1}, heisenberg_tensor(1));
    CHECK(rep.ok());

    // exact rational path
    std::vector<std::vector<std::vector<Rational>>> cr(
        3, std::vector<std::vector<Rational>>(3, std::vector<Rational>(3, Rational{0, 1})));
    cr[0][1][2] = {1, 1};
    cr[1][0][2] = {-1, 1};
    CHECK(CarnotGroup::validate_exact({2, 1}, cr).ok());
}

TEST_CASE("skew symmetry violation is reported at the offending triple") {
    Tensor3 c = heisenberg_tensor(1);
    c(1, 0, 2) = 1.0;  // should be -1
    auto rep = CarnotGroup::validate({2, 1}, c);
    REQUIRE(!rep.ok());
    CHECK(has_issue(rep, ValidationIssue::Kind::SkewSymmetry));
    bool found = false;
    for (const auto& it : rep.issues)
        if (it.kind == ValidationIssue::Kind::SkewSymmetry && it.index[0] == 1 && it.index[1] == 2 &&
            it.index[2] == 3)
            found = true;
    CHECK(found);
}

TEST_CASE("bracket landing in a lower stratum is a grading violation") {
    Tensor3 c = heisenberg_tensor(1);
    c(0, 2, 1) = 1.0;  // [stratum1, stratum2] landing in stratum 1
    c(2, 0, 1) = -1.0;
    auto rep = CarnotGroup::validate({2, 1}, c);
    CHECK(has_issue(rep, ValidationIssue::Kind::Grading));
}

TEST_CASE("jacobi violation on a step-3 tensor") {
    // strata (3,1,1): [X1,X2]=X4, [X1,X4]=X5, [X3,X4]=X5.  The cyclic sum for
    // (1,2,3) picks up [[X1,X2],X3] = [X4,X3] = -X5 and nothing cancels it.
    Tensor3 c(5, 5, 5);
    auto setb = [&](int i, int j, int r) {
        c(i, j, r) = 1.0;
        c(j, i, r) = -1.0;
    };
    setb(0, 1, 3);
    setb(0, 3, 4);
    setb(2, 3, 4);
    auto rep = CarnotGroup::validate({3, 1, 1}, c);
    CHECK(has_issue(rep, ValidationIssue::Kind::Jacobi));
    CHECK_THROWS_AS(CarnotGroup({3, 1, 1}, c), GroupValidationError);
}

TEST_CASE("generation failure when the second stratum is not spanned") {
    Tensor3 c(4, 4, 4);
    c(0, 1, 2) = 1.0;
    c(1, 0, 2) = -1.0;
    auto rep = CarnotGroup::validate({2, 2}, c);
    CHECK(has_issue(rep, ValidationIssue::Kind::Generation));
}

TEST_CASE("builtin heisenberg dimensions and homogeneous dimension") {
    CarnotGroup h1 = CarnotGroup::heisenberg(1);
    CHECK(h1.dim() == 3);
    CHECK(h1.homogeneous_dimension() == 4);

    CarnotGroup h2 = CarnotGroup::heisenberg(2);
    CHECK(h2.dim() == 5);
    CHECK(h2.homogeneous_dimension() == 6);

    Mat c3 = h1.c_h_alpha(2);
    CHECK(c3(0, 1) == doctest::Approx(1.0));
    CHECK(c3(1, 0) == doctest::Approx(-1.0));
    CHECK(c3(0, 0) == 0.0);
    CHECK(h1.is_heisenberg());
    CHECK(!step3_group().is_heisenberg());
}

TEST_CASE("dilation scales coordinates by stratum weight") {
    CarnotGroup h1 = CarnotGroup::heisenberg(1);
    Vec x(3);
    x << 1, 1, 1;
    Vec y = h1.dilate(2.0, x);
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == doctest::Approx(2.0));
    CHECK(y[2] == doctest::Approx(4.0));

    CHECK((h1.dilate(1.0, x) - x).norm() == doctest::Approx(0.0));

    Vec z(3);
    z << 0, 0, 1;
    CHECK(h1.dilate(3.0, z)[2] == doctest::Approx(9.0));

    CHECK_THROWS_AS(h1.dilate(0.0, x), NonPositiveScale);
    CHECK_THROWS_AS(h1.dilate(-1.0, x), NonPositiveScale);
}

TEST_CASE("left-invariant frame in H^1 matches the classical fields") {
    CarnotGroup h1 = CarnotGroup::heisenberg(1);
    Vec p(3);
    p << 0.7, -1.3, 0.4;
    Frame fr = h1.frame(p);
    // X_1 = d_x - (y/2) d_t
    CHECK(fr.A(0, 0) == doctest::Approx(1.0));
    CHECK(fr.A(1, 0) == doctest::Approx(0.0));
    CHECK(fr.A(2, 0) == doctest::Approx(-p[1] / 2));
    // X_2 = d_y + (x/2) d_t
    CHECK(fr.A(2, 1) == doctest::Approx(p[0] / 2));
    // T = d_t
    CHECK(fr.A(2, 2) == doctest::Approx(1.0));

    Frame at0 = h1.frame(Vec::Zero(3));
    CHECK((at0.A - Mat::Identity(3, 3)).norm() == doctest::Approx(0.0));
    CHECK(fr.A.determinant() == doctest::Approx(1.0));
}

TEST_CASE("generic 2-step frame columns follow the horizontal position formula") {
    CarnotGroup h2 = CarnotGroup::heisenberg(2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Vec x(5);
    for (int i = 0; i < 5; ++i) x[i] = u(rng);
    Frame fr = h2.frame(x);
    int h = h2.hdim();
    for (int i = 0; i < h; ++i) {
        Vec expect = Vec::Zero(5);
        expect[i] = 1.0;
        // e_i + (1/2) sum_alpha <C_H^alpha e_i, x_H> e_alpha
        for (int alpha = h; alpha < 5; ++alpha) {
            double s = 0.0;
            for (int j = 0; j < h; ++j) s += h2.structure(j, i, alpha) * x[j];
            expect[alpha] = 0.5 * s;
        }
        CHECK((fr.A.col(i) - expect).norm() == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("frame fields satisfy the bracket relations through dA") {
    // [X_i, X_j] = sum_r C^r_ij X_r as first-order operators:
    // sum_b (A(b,i) dA(b,a,j) - A(b,j) dA(b,a,i)) = sum_r C(i,j,r) A(a,r)
    for (const CarnotGroup& g : {CarnotGroup::heisenberg(1), CarnotGroup::heisenberg(2), step3_group()}) {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        int n = g.dim();
        for (int rep = 0; rep < 5; ++rep) {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = u(rng);
            Frame fr = g.frame(x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int a = 0; a < n; ++a) {
                        double lhs = 0.0;
                        for (int b = 0; b < n; ++b)
                            lhs += fr.A(b, i) * fr.dA(b, a, j) - fr.A(b, j) * fr.dA(b, a, i);
                        double rhs = 0.0;
                        for (int r = 0; r < n; ++r) rhs += g.structure(i, j, r) * fr.A(a, r);
                        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
                    }
        }
    }
}

TEST_CASE("frame derivative tensors agree with finite differences of A") {
    CarnotGroup g = step3_group();
    int n = g.dim();
    Vec x(n);
    x << 0.4, -0.9, 1.2, 0.3;
    Frame fr = g.frame(x);
    double h = 1e-5;
    for (int p = 0; p < n; ++p) {
        Vec xp = x, xm = x;
        xp[p] += h;
        xm[p] -= h;
        Mat fd = (g.frame(xp, 0).A - g.frame(xm, 0).A) / (2 * h);
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < n; ++i)
                CHECK(fr.dA(p, a, i) == doctest::Approx(fd(a, i)).epsilon(1e-7));
        for (int q = 0; q < n; ++q) {
            Vec yp = x, ym = x;
            yp[q] += h;
            ym[q] -= h;
            Frame fp = g.frame(yp, 1), fm = g.frame(ym, 1);
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < n; ++i) {
                    double fd2 = (fp.dA(p, a, i) - fm.dA(p, a, i)) / (2 * h);
                    CHECK(fr.ddA(q, p, a, i) == doctest::Approx(fd2).epsilon(1e-6));
                }
        }
    }
}

TEST_CASE("connection coefficients match the Koszul oracle") {
    CarnotGroup h1 = CarnotGroup::heisenberg(1);
    CHECK(h1.gamma(0, 1, 2) == doctest::Approx(0.5));   // nabla_{X_1} X_2 = T/2
    CHECK(h1.gamma(2, 0, 1) == doctest::Approx(-0.5));  // nabla_T X_1 = -X_2/2

    for (const CarnotGroup& g : {CarnotGroup::heisenberg(2), step3_group()}) {
        int n = g.dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int r = 0; r < n; ++r) {
                    CHECK(g.gamma(i, j, r) == doctest::Approx(koszul(g, i, j, r)));
                    // metric compatibility and torsion-freeness
                    CHECK(g.gamma(i, j, r) + g.gamma(i, r, j) == doctest::Approx(0.0));
                    CHECK(g.gamma(i, j, r) - g.gamma(j, i, r) ==
                          doctest::Approx(g.structure(i, j, r)));
                }
    }

    CarnotGroup ab = CarnotGroup::abelian(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int r = 0; r < 3; ++r) CHECK(ab.gamma(i, j, r) == 0.0);
}

TEST_CASE("riemann curvature values") {
    CarnotGroup ab = CarnotGroup::abelian(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(ab.riemann(i, j, i, j) == 0.0);

    CarnotGroup h1 = CarnotGroup::heisenberg(1);
    CHECK(h1.riemann(0, 1, 0, 1) == doctest::Approx(-0.75).epsilon(1e-12));

    // all-horizontal values in 2-step groups against the classical closed
    // form (in this paper's sign convention):
    //   <R(X_i,X_j)X_h,X_k> = -1/2 c_ij c_hk - 1/4 c_ih c_jk + 1/4 c_ik c_jh
    // summed over the vertical bracket components c^a_pq = C(p,q,a).
    CarnotGroup h2 = CarnotGroup::heisenberg(2);
    int h = h2.hdim();
    auto c = [&](int p, int q) { return h2.structure(p, q, 4); };
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            for (int a = 0; a < h; ++a)
                for (int b = 0; b < h; ++b) {
                    double expect = -0.5 * c(i, j) * c(a, b) - 0.25 * c(i, a) * c(j, b) +
                                    0.25 * c(i, b) * c(j, a);
                    CHECK(h2.riemann(i, j, a, b) == doctest::Approx(expect).epsilon(1e-12));
                }

    // the Ricci-type contraction collapses to a -(3/4) bracket sum
    for (int i = 0; i < h; ++i)
        for (int a = 0; a < h; ++a) {
            double lhs = 0.0, rhs = 0.0;
            for (int j = 0; j < h; ++j) {
                lhs += h2.riemann(i, j, a, j);
                rhs += -0.75 * c(j, i) * c(j, a);
            }
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }

    // three horizontal + one vertical vanishes on 2-step groups
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            for (int a = 0; a < h; ++a) CHECK(h2.riemann(4, i, j, a) == doctest::Approx(0.0));
}

TEST_CASE("restricted bracket-matrix norm in H^n") {
    // |C_H^{2n+1} restricted to the complement of a unit horizontal vector|^2
    // equals 2(n-1), for any unit vector.
    std::mt19937_64 rng(71);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int n : {1, 2, 3}) {
        CarnotGroup g = CarnotGroup::heisenberg(n);
        const Mat& c = g.c_h_alpha(2 * n);
        for (int rep = 0; rep < 10; ++rep) {
            Vec nu(2 * n);
            for (int i = 0; i < 2 * n; ++i) nu[i] = gauss(rng);
            nu /= nu.norm();
            Mat basis = adapted_hs_basis(nu);
            CHECK(hs_restrict_form(c, basis).squaredNorm() ==
                  doctest::Approx(2.0 * (n - 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("first Bianchi identity") {
    for (const CarnotGroup& g : {CarnotGroup::heisenberg(1), CarnotGroup::heisenberg(2), step3_group()}) {
        int n = g.dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < n; ++a)
                    for (int k = 0; k < n; ++k) {
                        double cyc = g.riemann(i, j, a, k) + g.riemann(j, a, i, k) + g.riemann(a, i, j, k);
                        CHECK(std::abs(cyc) < 1e-12);
                    }
    }
}
