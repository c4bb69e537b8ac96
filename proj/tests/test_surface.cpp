#include <cmath>
#include <random>

#include "carnot/examples.hpp"
#include "carnot/surface.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

std::shared_ptr<const CarnotGroup> heis(int n) {
    return std::make_shared<CarnotGroup>(CarnotGroup::heisenberg(n));
}

Vec point3(double x, double y, double t) {
    Vec p(3);
    p << x, y, t;
    return p;
}

}  // namespace

TEST_CASE("vertical hyperplane frame in H^1") {
    auto g = heis(1);
    Vec d(2);
    d << 1, 0;
    ExampleSurface vp = vertical_hyperplane(g, d);
    SurfaceFrame sf = surface_frame(*g, vp.f, point3(0.0, 1.0, 1.0));
    CHECK(sf.nu[0] == doctest::Approx(1.0));
    CHECK(sf.nu[1] == doctest::Approx(0.0));
    CHECK(sf.nu[2] == doctest::Approx(0.0));
    CHECK(sf.p_h_norm == doctest::Approx(1.0));
    CHECK(sf.varpi.norm() == doctest::Approx(0.0));
    CHECK(!sf.characteristic);
}

TEST_CASE("paraboloid varpi at (1,1,0) in H^1") {
    ExampleSurface hp = hyperbolic_paraboloid(1);
    SurfaceFrame sf = surface_frame(*hp.group, hp.f, point3(1.0, 1.0, 0.0));
    CHECK(sf.varpi[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(!sf.characteristic);
}

TEST_CASE("non-vertical hyperplane is characteristic on the vertical axis only") {
    auto g = heis(1);
    ExampleSurface nv = nonvertical_hyperplane(g, 2);
    SurfaceFrame at0 = surface_frame(*g, nv.f, point3(0.0, 0.0, 0.0));
    CHECK(at0.characteristic);
    CHECK(!at0.nu_h.has_value());

    SurfaceFrame away = surface_frame(*g, nv.f, point3(2.0, 0.0, 0.0));
    CHECK(!away.characteristic);
    CHECK(away.varpi[0] == doctest::Approx(1.0));  // 2/|C x| with |Cx| = 2
}

TEST_CASE("vanishing gradient is rejected") {
    auto g = heis(1);
    ScalarField konst = ScalarField::analytic(3, [](const Vec&) { return Jet3::constant(3, 1.0); });
    CHECK_THROWS_AS(surface_frame(*g, konst, point3(0, 0, 0)), DegenerateDefiningFunction);
}

TEST_CASE("adapted basis drops the dominant axis deterministically") {
    Vec nu1(2);
    nu1 << 1, 0;
    Mat b1 = adapted_hs_basis(nu1);
    CHECK(b1.rows() == 2);
    CHECK(b1.cols() == 1);
    CHECK(b1(0, 0) == doctest::Approx(0.0));
    CHECK(b1(1, 0) == doctest::Approx(1.0));

    Vec nu2(2);
    nu2 << 0, 1;
    Mat b2 = adapted_hs_basis(nu2);
    CHECK(b2(0, 0) == doctest::Approx(1.0));  // sign fixed positive
    CHECK(b2(1, 0) == doctest::Approx(0.0));

    Vec nu4 = Vec::Constant(4, 0.5);
    Mat b4 = adapted_hs_basis(nu4);
    CHECK(b4.cols() == 3);
    CHECK((b4.transpose() * b4 - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((b4.transpose() * nu4).norm() < 1e-12);
}

TEST_CASE("varpi matrices") {
    // H^n: C_H(varpi_2) = varpi * C_H^{2n+1}
    ExampleSurface hp = hyperbolic_paraboloid(1);
    Vec p = point3(1.0, 1.0, 0.0);
    SurfacePoint sp = SurfacePoint::at(*hp.group, hp.f, p);
    VarpiMatrices vm = sp.varpi_matrices();
    double w = std::sqrt(2.0) / 2.0;
    Mat expect = w * hp.group->c_h_alpha(2);
    CHECK((vm.c_h_of_varpi2 - expect).norm() < 1e-12);
    CHECK((vm.c_of_varpi + vm.c_of_varpi.transpose()).norm() < 1e-14);
    CHECK((vm.c_hs_of_varpi2 + vm.c_hs_of_varpi2.transpose()).norm() < 1e-14);

    // vertical hyperplane: varpi = 0 so everything vanishes
    auto g = heis(2);
    Vec d = Vec::Zero(4);
    d[0] = d[1] = 1.0;
    ExampleSurface vp = vertical_hyperplane(g, d);
    Vec q(5);
    q << 0.0, 0.0, 0.3, -0.2, 0.7;  // on <d, x_H> = 0
    SurfacePoint spv = SurfacePoint::at(*g, vp.f, q);
    CHECK(spv.p_h_norm() == doctest::Approx(1.0));
    CHECK(spv.varpi_matrices().c_of_varpi.norm() == doctest::Approx(0.0));
}

TEST_CASE("normal decomposition, varpi scaling and tau_ts orthogonality") {
    ExampleSurface hp = hyperbolic_paraboloid(2);
    const CarnotGroup& g = *hp.group;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    int n = g.dim(), h = g.hdim();
    int tested = 0;
    while (tested < 40) {
        Vec z(n);
        for (int i = 0; i < n; ++i) z[i] = u(rng);
        // put the point on the surface (graph over z)
        double q = 0.0;
        for (int i = 0; i < 2; ++i)
            q += 0.25 * (z[2 * i] * z[2 * i] - z[2 * i + 1] * z[2 * i + 1]);
        z[n - 1] = q;
        if (hp.characteristic_locus(z)) continue;
        SurfacePoint sp = SurfacePoint::at(g, hp.f, z);
        if (sp.characteristic()) continue;
        ++tested;
        const SurfaceFrame& sf = sp.data();

        CHECK(sf.nu.norm() == doctest::Approx(1.0).epsilon(1e-12));
        Vec recon = Vec::Zero(n);
        recon.head(h) = sf.p_h_norm * (*sf.nu_h);
        for (int a = 0; a < n - h; ++a) recon[h + a] = sf.varpi[a] * sf.p_h_norm;
        CHECK((recon - sf.nu).lpNorm<Eigen::Infinity>() < 1e-10);

        // varpi_alpha |P_H nu| = nu_alpha
        for (int a = 0; a < n - h; ++a)
            CHECK(sf.varpi[a] * sf.p_h_norm == doctest::Approx(sf.nu[h + a]).epsilon(1e-12));

        // {nu_h, tau_2..tau_h} orthonormal
        Mat full(h, h);
        full.col(0) = *sf.nu_h;
        full.rightCols(h - 1) = sf.hs_basis;
        CHECK((full.transpose() * full - Mat::Identity(h, h)).norm() < 1e-12);

        // tau_ts columns orthogonal to nu and to HS
        for (int a = 0; a < n - h; ++a) {
            CHECK(std::abs(sf.tau_ts.col(a).dot(sf.nu)) < 1e-10);
            for (int c = 0; c < h - 1; ++c) {
                Vec hs = Vec::Zero(n);
                hs.head(h) = sf.hs_basis.col(c);
                CHECK(std::abs(sf.tau_ts.col(a).dot(hs)) < 1e-10);
            }
        }
    }
}

TEST_CASE("surface frames are invariant under positive rescaling of f") {
    ExampleSurface hp = hyperbolic_paraboloid(1);
    const CarnotGroup& g = *hp.group;
    ScalarField f5 = ScalarField::analytic(3, [f = hp.f](const Vec& x) { return 5.0 * f.jet(x); });
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        Vec p = point3(u(rng), u(rng), 0.0);
        p[2] = 0.25 * (p[0] * p[0] - p[1] * p[1]);
        SurfaceFrame a = surface_frame(g, hp.f, p);
        SurfaceFrame b = surface_frame(g, f5, p);
        CHECK((a.nu - b.nu).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(a.p_h_norm == doctest::Approx(b.p_h_norm).epsilon(1e-12));
        CHECK((a.varpi - b.varpi).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("ndf normalization") {
    ExampleSurface hp = hyperbolic_paraboloid(1);
    const CarnotGroup& g = *hp.group;

    // analytic NDF of the paraboloid: sqrt(2) (t - q(z)) / ||x+y||
    ScalarField ndf_exact = ScalarField::analytic(3, [](const Vec& p) {
        Jet3 x = Jet3::variable(3, 0, p[0]);
        Jet3 y = Jet3::variable(3, 1, p[1]);
        Jet3 t = Jet3::variable(3, 2, p[2]);
        Jet3 f = t - 0.25 * (x * x - y * y);
        return std::sqrt(2.0) * f / sqrt((x + y) * (x + y));
    });

    Vec p = point3(1.0, 0.5, 0.25 * (1.0 - 0.25));
    // idempotence: normalizing an NDF changes nothing through order 2
    Jet3 renorm = ndf_normalize(g, ndf_exact, p);
    Jet3 ref = ndf_exact.jet(p, 2);
    CHECK(std::abs(renorm.v - ref.v) < 1e-10);
    CHECK((renorm.d1 - ref.d1).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((renorm.d2 - ref.d2).lpNorm<Eigen::Infinity>() < 1e-10);

    // f = 2 x_1: output gradient e_1
    ScalarField f2 = ScalarField::analytic(3, [](const Vec& q) {
        return 2.0 * Jet3::variable(3, 0, q[0]);
    });
    Jet3 nf = ndf_normalize(g, f2, point3(0.0, 0.4, 0.8));
    Frame fr = g.frame(point3(0.0, 0.4, 0.8));
    Vec grad_frame = fr.A.transpose() * nf.d1;
    CHECK(grad_frame[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(grad_frame[1]) < 1e-12);
    CHECK(std::abs(grad_frame[2]) < 1e-12);

    // full gradient of the NDF equals nu_h + varpi in frame components
    Vec q = point3(1.0, 1.0, 0.0);
    Jet3 nj = ndf_normalize(g, hp.f, q);
    Frame frq = g.frame(q);
    Vec grad = frq.A.transpose() * nj.d1;
    SurfaceFrame sf = surface_frame(g, hp.f, q);
    CHECK(grad[0] == doctest::Approx((*sf.nu_h)[0]).epsilon(1e-8));
    CHECK(grad[1] == doctest::Approx((*sf.nu_h)[1]).epsilon(1e-8));
    CHECK(grad[2] == doctest::Approx(sf.varpi[0]).epsilon(1e-8));
}

TEST_CASE("characteristic flag follows the eps_char threshold") {
    ExampleSurface hp = hyperbolic_paraboloid(1);
    Vec p = point3(0.5, -0.5 + 1e-10, 0.25 * (0.25 - std::pow(-0.5 + 1e-10, 2)));
    SurfaceFrame tight = surface_frame(*hp.group, hp.f, p, 1e-8);
    CHECK(tight.characteristic);
    SurfaceFrame loose = surface_frame(*hp.group, hp.f, p, 1e-12);
    CHECK(!loose.characteristic);
}
