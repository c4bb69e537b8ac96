#include "carnot/examples.hpp"

#include <cmath>

namespace carnot {

namespace {

// |C_H^alpha restricted to the orthogonal complement of nu_h|^2_Gr.
double c_hs_norm2(const Mat& c, const Vec& nu_h) {
    Mat basis = adapted_hs_basis(nu_h);
    return hs_restrict_form(c, basis).squaredNorm();
}

}  // namespace

ExampleSurface vertical_hyperplane(std::shared_ptr<const CarnotGroup> g, const Vec& direction) {
    const int n = g->dim(), h = g->hdim();
    if ((direction.size() != h && direction.size() != n) || direction.norm() == 0.0)
        throw NotHorizontalDirection("vertical_hyperplane: direction must be a nonzero stratum-1 covector");
    for (int i = h; i < int(direction.size()); ++i)
        if (direction[i] != 0.0)
            throw NotHorizontalDirection("vertical_hyperplane: direction has vertical support");
    Vec d = direction.head(h) / direction.head(h).norm();

    ExampleSurface s;
    s.id = "vplane";
    s.group = g;
    Eigen::Index axis = 0;
    d.cwiseAbs().maxCoeff(&axis);
    s.chart_axis = int(axis);
    s.f = ScalarField::analytic(n, [n, h, d](const Vec& x) {
        Jet3 acc = Jet3::constant(n, 0.0);
        for (int i = 0; i < h; ++i)
            if (d[i] != 0.0) acc = acc + d[i] * Jet3::variable(n, i, x[i]);
        return acc;
    });
    s.p_h_norm = [](const Vec&) { return 1.0; };
    s.varpi = [n, h](const Vec&) { return Vec::Zero(n - h); };
    s.h_cc = [](const Vec&) { return 0.0; };
    s.b2 = [](const Vec&) { return 0.0; };
    s.s2 = [](const Vec&) { return 0.0; };
    s.a2 = [](const Vec&) { return 0.0; };
    s.b_ts = [](const Vec&) { return 0.0; };
    double dg = std::abs(d[s.chart_axis]);
    s.sigma_h_density = [dg](const Vec&) { return 1.0 / dg; };
    s.characteristic_locus = [](const Vec&) { return false; };
    return s;
}

ExampleSurface nonvertical_hyperplane(std::shared_ptr<const CarnotGroup> g, int alpha) {
    const int n = g->dim(), h = g->hdim();
    if (g->step() != 2) throw InvalidVerticalIndex("nonvertical_hyperplane: group must be 2-step");
    if (alpha < h || alpha >= n)
        throw InvalidVerticalIndex("nonvertical_hyperplane: alpha' must index a vertical coordinate");
    Mat c = g->c_h_alpha(alpha);
    if (c.norm() == 0.0)
        throw InvalidVerticalIndex("nonvertical_hyperplane: C_H^alpha' vanishes");

    ExampleSurface s;
    s.id = "nvplane";
    s.group = g;
    s.chart_axis = alpha;
    s.f = ScalarField::analytic(n, [n, alpha](const Vec& x) { return Jet3::variable(n, alpha, x[alpha]); });

    auto cx = [c, h](const Vec& x) -> Vec { return c * x.head(h); };
    auto nu_h_of = [cx](const Vec& x) -> Vec {
        Vec v = cx(x);
        return -v / v.norm();
    };

    s.p_h_norm = [cx](const Vec& x) {
        double m = cx(x).norm() / 2.0;
        return m / std::sqrt(1.0 + m * m);
    };
    s.varpi = [cx, n, h, alpha](const Vec& x) {
        Vec w = Vec::Zero(n - h);
        w[alpha - h] = 2.0 / cx(x).norm();
        return w;
    };
    s.h_cc = [](const Vec&) { return 0.0; };
    s.s2 = [](const Vec&) { return 0.0; };
    auto a2 = [cx, nu_h_of, c](const Vec& x) {
        double w = 2.0 / cx(x).norm();
        return w * w * c_hs_norm2(c, nu_h_of(x)) / 4.0;
    };
    s.a2 = a2;
    s.b2 = a2;
    s.b_ts = a2;
    s.sigma_h_density = [cx](const Vec& x) { return cx(x).norm() / 2.0; };
    s.characteristic_locus = [cx](const Vec& x) { return cx(x).norm() < 1e-12; };
    return s;
}

ExampleSurface hyperbolic_paraboloid(int nh) {
    auto g = std::make_shared<CarnotGroup>(CarnotGroup::heisenberg(nh));
    const int n = g->dim();

    ExampleSurface s;
    s.id = "hparab";
    s.group = g;
    s.chart_axis = n - 1;
    s.f = ScalarField::analytic(n, [n, nh](const Vec& x) {
        Jet3 acc = Jet3::variable(n, n - 1, x[n - 1]);
        for (int i = 0; i < nh; ++i) {
            Jet3 xi = Jet3::variable(n, 2 * i, x[2 * i]);
            Jet3 yi = Jet3::variable(n, 2 * i + 1, x[2 * i + 1]);
            acc = acc - 0.25 * (xi * xi - yi * yi);
        }
        return acc;
    });

    // r = ||x + y||_{R^n} with coordinates interleaved (x_1,y_1,...,x_n,y_n,t)
    auto r_of = [nh](const Vec& p) {
        double r2 = 0.0;
        for (int i = 0; i < nh; ++i) {
            double u = p[2 * i] + p[2 * i + 1];
            r2 += u * u;
        }
        return std::sqrt(r2);
    };

    s.p_h_norm = [r_of](const Vec& p) {
        double r = r_of(p);
        double m = r / std::sqrt(2.0);
        return m / std::sqrt(1.0 + m * m);
    };
    s.varpi = [r_of](const Vec& p) {
        Vec w(1);
        w[0] = std::sqrt(2.0) / r_of(p);
        return w;
    };
    s.h_cc = [](const Vec&) { return 0.0; };
    s.b2 = [r_of, nh](const Vec& p) {
        double r = r_of(p);
        return 2.0 * (nh - 1) / (r * r);
    };
    s.s2 = [r_of, nh](const Vec& p) {
        double r = r_of(p);
        return (nh - 1) / (r * r);
    };
    s.a2 = s.s2;
    s.b_ts = [r_of, nh](const Vec& p) {
        double r = r_of(p);
        return 2.0 * (nh - 2) / (r * r);
    };
    s.sigma_h_density = [r_of](const Vec& p) { return r_of(p) / std::sqrt(2.0); };
    s.characteristic_locus = [r_of](const Vec& p) { return r_of(p) < 1e-12; };
    return s;
}

ExampleSurface builtin_example(const std::string& id, std::shared_ptr<const CarnotGroup> g) {
    if (id == "vplane") {
        Vec d = Vec::Zero(g->hdim());
        d[0] = 1.0;
        return vertical_hyperplane(g, d);
    }
    if (id == "nvplane") return nonvertical_hyperplane(g, g->hdim());
    if (id == "hparab") {
        if (!g->is_heisenberg()) throw NotHeisenberg("hparab requires a Heisenberg group");
        return hyperbolic_paraboloid(g->hdim() / 2);
    }
    throw ParseError("unknown builtin surface id: " + id);
}

}  // namespace carnot
