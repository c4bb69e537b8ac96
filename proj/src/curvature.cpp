#include "carnot/curvature.hpp"

#include <cmath>

namespace carnot {

Mat horizontal_jacobian_nu_h(const SurfacePoint& p) {
    p.require_noncharacteristic("horizontal_jacobian_nu_h");
    const int h = p.group().hdim();
    Mat j(h, h);
    for (int a = 0; a < h; ++a) {
        Vec row = frame_d1(p.nu_h_component(a), p.frame());  // X_b((nu_h)_a)
        for (int b = 0; b < h; ++b) j(a, b) = row[b];
    }
    return j;
}

double mean_curvature_h(const SurfacePoint& p) {
    p.require_noncharacteristic("mean_curvature_h");
    const int h = p.group().hdim();
    double div = 0.0;
    for (int i = 0; i < h; ++i) div += frame_d1(p.nu_h_component(i), p.frame())[i];
    return -div;
}

HorizontalShape second_fundamental_form(const SurfacePoint& p) {
    p.require_noncharacteristic("second_fundamental_form");
    const Mat j = horizontal_jacobian_nu_h(p);
    const Mat& t = p.data().hs_basis;
    HorizontalShape s;
    s.b_h = -(t.transpose() * j.transpose() * t);
    s.s_h = 0.5 * (s.b_h + s.b_h.transpose());
    s.a_h = 0.5 * (s.b_h - s.b_h.transpose());
    s.h_cc = s.s_h.trace();
    s.b2 = s.b_h.squaredNorm();
    s.s2 = s.s_h.squaredNorm();
    s.a2 = s.a_h.squaredNorm();
    return s;
}

double check_torsion_identity(const HorizontalShape& shape, const VarpiMatrices& vm) {
    return (shape.a_h - 0.5 * vm.c_hs_of_varpi2).norm();
}

Vec principal_horizontal_curvatures(const HorizontalShape& shape) {
    if (shape.s_h.rows() == 0) return Vec();
    Eigen::SelfAdjointEigenSolver<Mat> es(shape.s_h);
    return es.eigenvalues();
}

Vec grad_h(const SurfacePoint& p, const Jet2& phi) {
    return frame_d1(phi, p.frame()).head(p.group().hdim());
}

Vec grad_hs(const SurfacePoint& p, const Jet2& phi) {
    p.require_noncharacteristic("grad_hs");
    Vec g = grad_h(p, phi);
    const Vec& nu_h = p.nu_h();
    return g - g.dot(nu_h) * nu_h;
}

double div_hs(const SurfacePoint& p, const std::vector<Jet1>& X) {
    p.require_noncharacteristic("div_hs");
    const int h = p.group().hdim();
    const Mat& t = p.data().hs_basis;
    Mat jx(h, h);
    for (int a = 0; a < h; ++a) {
        if (X[a].order < 1) throw InsufficientOrder("div_hs: component jets need first derivatives");
        Vec row = frame_d1(X[a], p.frame());
        for (int b = 0; b < h; ++b) jx(a, b) = row[b];
    }
    double s = 0.0;
    for (int c = 0; c < t.cols(); ++c) s += t.col(c).dot(jx * t.col(c));
    return s;
}

double delta_h(const SurfacePoint& p, const Jet2& phi) {
    phi.require(2, "delta_h");
    const int h = p.group().hdim();
    Mat f2 = frame_d2(phi, p.frame());
    double s = 0.0;
    for (int i = 0; i < h; ++i) s += f2(i, i);
    return s;
}

double delta_hs(const SurfacePoint& p, const Jet2& phi) {
    // Delta_HS phi = Delta_H phi + H_cc d(phi)/d(nu_h) - <Hess_H phi nu_h, nu_h>
    p.require_noncharacteristic("delta_hs");
    phi.require(2, "delta_hs");
    const int h = p.group().hdim();
    const Vec& nu_h = p.nu_h();
    Mat f2 = frame_d2(phi, p.frame());
    double lap_h = 0.0, hess_nn = 0.0;
    for (int i = 0; i < h; ++i) {
        lap_h += f2(i, i);
        for (int j = 0; j < h; ++j) hess_nn += nu_h[i] * nu_h[j] * f2(i, j);
    }
    double dphi_dnu = grad_h(p, phi).dot(nu_h);
    double h_cc = second_fundamental_form(p).h_cc;
    return lap_h + h_cc * dphi_dnu - hess_nn;
}

double d_hs(const SurfacePoint& p, const std::vector<Jet1>& X) {
    p.require_noncharacteristic("d_hs");
    const int h = p.group().hdim();
    VarpiMatrices vm = p.varpi_matrices();
    Vec xv(h);
    for (int a = 0; a < h; ++a) xv[a] = X[a].v;
    return div_hs(p, X) + (vm.c_h_of_varpi2 * p.nu_h()).dot(xv);
}

double l_hs(const SurfacePoint& p, const Jet2& phi) {
    VarpiMatrices vm = p.varpi_matrices();
    return delta_hs(p, phi) + (vm.c_h_of_varpi2 * p.nu_h()).dot(grad_hs(p, phi));
}

namespace {

// grad_HS varpi_alpha embedded in R^n (horizontal components only).
Vec grad_hs_varpi_embedded(const SurfacePoint& p, int a) {
    const int n = p.group().dim();
    Vec g = grad_hs(p, p.varpi_component(a));
    Vec out = Vec::Zero(n);
    out.head(g.size()) = g;
    return out;
}

Vec nu_h_embedded(const SurfacePoint& p) {
    Vec out = Vec::Zero(p.group().dim());
    out.head(p.group().hdim()) = p.nu_h();
    return out;
}

}  // namespace

StabilityDensity stability_density(const SurfacePoint& p) {
    p.require_noncharacteristic("stability_density");
    if (p.order() < 2)
        throw InsufficientOrder("stability_density needs order-3 jets of the defining function");
    const CarnotGroup& g = p.group();
    const int n = g.dim(), h = g.hdim();

    HorizontalShape shape = second_fundamental_form(p);
    VarpiMatrices vm = p.varpi_matrices();
    Vec tau1 = nu_h_embedded(p);

    double coupling = 0.0;
    for (int a = 0; a < n - h; ++a) {
        Vec c_alpha_tau1 = g.c_alpha(h + a) * tau1;
        if (c_alpha_tau1.isZero(0.0) && p.varpi()[a] == 0.0) continue;
        Vec lhs = 2.0 * grad_hs_varpi_embedded(p, a) - vm.c_of_varpi * p.data().tau_ts.col(a);
        coupling += lhs.dot(c_alpha_tau1);
    }

    StabilityDensity out;
    out.s2 = shape.s2;
    out.a2 = shape.a2;
    out.coupling = coupling;
    out.b_ts = out.s2 + out.a2 + out.coupling;
    return out;
}

double heisenberg_bts(const SurfacePoint& p, double hmin_tol) {
    const CarnotGroup& g = p.group();
    if (!g.is_heisenberg()) throw NotHeisenberg("heisenberg_bts: group is not a Heisenberg group");
    p.require_noncharacteristic("heisenberg_bts");
    HorizontalShape shape = second_fundamental_form(p);
    if (std::abs(shape.h_cc) > hmin_tol)
        throw NotHMinimal("heisenberg_bts: surface is not H-minimal at this point (H_cc = " +
                          std::to_string(shape.h_cc) + ")");
    const int h = g.hdim();
    const int nn = h / 2;
    Vec nu_h_o = -(g.c_h_alpha(h) * p.nu_h());
    double varpi = p.varpi()[0];
    double dvarpi = grad_h(p, p.varpi_component(0)).dot(nu_h_o);
    return shape.s2 - (2.0 * dvarpi - 0.5 * (nn + 1) * varpi * varpi);
}

double mean_curvature_h(const CarnotGroup& g, const ScalarField& f, const Vec& x) {
    return mean_curvature_h(SurfacePoint::at(g, f, x));
}
HorizontalShape second_fundamental_form(const CarnotGroup& g, const ScalarField& f, const Vec& x) {
    return second_fundamental_form(SurfacePoint::at(g, f, x));
}
StabilityDensity stability_density(const CarnotGroup& g, const ScalarField& f, const Vec& x) {
    return stability_density(SurfacePoint::at(g, f, x));
}

// ------------------------------------------------------------- residuals

double residual_divergence_split(const SurfacePoint& p) {
    p.require_noncharacteristic("residual_divergence_split");
    const CarnotGroup& g = p.group();
    const int n = g.dim(), h = g.hdim();
    const Vec& nu = p.data().nu;

    // div_TS nu_h = div nu_h - <nabla_nu nu_h, nu>, everything differentiated directly
    double div_full = 0.0;
    for (int i = 0; i < h; ++i) div_full += frame_d1(p.nu_h_component(i), p.frame())[i];

    Vec cov = Vec::Zero(n);  // nabla_nu nu_h
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
            if (nu[a] == 0.0) continue;
            for (int j = 0; j < h; ++j) {
                double gamma = g.gamma(a, j, r);
                if (gamma != 0.0) s += nu[a] * p.nu_h()[j] * gamma;
            }
        }
        cov[r] = s;
    }
    for (int j = 0; j < h; ++j) {
        Vec d = frame_d1(p.nu_h_component(j), p.frame());
        double along_nu = 0.0;
        for (int a = 0; a < n; ++a) along_nu += nu[a] * d[a];
        cov[j] += along_nu;
    }
    double lhs = div_full - cov.dot(nu);

    Mat c_pv = Mat::Zero(n, n);
    for (int a = h; a < n; ++a)
        if (nu[a] != 0.0) c_pv += nu[a] * g.c_alpha(a);
    Vec nuh_emb = Vec::Zero(n);
    nuh_emb.head(h) = p.nu_h();
    double bracket = 0.0;
    Vec cn = c_pv * nuh_emb;
    for (int a = h; a < n; ++a) bracket += cn[a] * nu[a];

    double h_cc = second_fundamental_form(p).h_cc;
    return std::abs(lhs - (-h_cc - bracket));
}

double residual_trace_square(const SurfacePoint& p) {
    HorizontalShape s = second_fundamental_form(p);
    return std::abs((s.b_h * s.b_h).trace() - (s.s2 - s.a2));
}

double residual_dhs_sum(const SurfacePoint& p) {
    const CarnotGroup& g = p.group();
    const int n = g.dim(), h = g.hdim();
    VarpiMatrices vm = p.varpi_matrices();

    double lhs = 0.0;
    for (int a = 0; a < n - h; ++a) {
        if (g.stratum_of(h + a) != 2) continue;  // C_H^alpha nu_h vanishes beyond H_2
        const Mat& c = g.c_h_alpha(h + a);
        std::vector<Jet1> field(h);
        for (int r = 0; r < h; ++r) {
            Jet1 acc = Jet1::constant(n, 0.0);
            for (int b = 0; b < h; ++b)
                if (c(r, b) != 0.0) acc = acc + c(r, b) * p.nu_h_component(b).truncate1();
            field[r] = acc;
        }
        lhs += p.varpi()[a] * d_hs(p, field);
    }
    HorizontalShape s = second_fundamental_form(p);
    double rhs = 2.0 * s.a2 + (vm.c_h_of_varpi2 * p.nu_h()).squaredNorm();
    return std::abs(lhs - rhs);
}

double residual_heisenberg_norm(const SurfacePoint& p) {
    const CarnotGroup& g = p.group();
    if (!g.is_heisenberg()) throw NotHeisenberg("residual_heisenberg_norm: not a Heisenberg group");
    int nn = g.hdim() / 2;
    HorizontalShape s = second_fundamental_form(p);
    double varpi = p.varpi()[0];
    return std::abs(s.b2 - s.s2 - 0.5 * (nn - 1) * varpi * varpi);
}

double residual_laplacian_decomposition(const SurfacePoint& p, const Jet2& phi) {
    phi.require(2, "residual_laplacian_decomposition");
    const int h = p.group().hdim();
    const int n = p.group().dim();
    // route A: Hessian decomposition
    double route_a = delta_hs(p, phi);

    // route B: div_HS of the field grad_HS phi, assembled with first-order jets
    Jet1 dot = Jet1::constant(n, 0.0);
    std::vector<Jet1> gh(h);
    for (int i = 0; i < h; ++i) {
        gh[i] = frame_component_jet(phi, p.frame(), i);
        dot = dot + gh[i] * p.nu_h_component(i).truncate1();
    }
    std::vector<Jet1> field(h);
    for (int i = 0; i < h; ++i) field[i] = gh[i] - dot * p.nu_h_component(i).truncate1();
    double route_b = div_hs(p, field);
    return std::abs(route_a - route_b);
}

double residual_support_function(const SurfacePoint& p, const Vec& v_h) {
    const CarnotGroup& g = p.group();
    const int n = g.dim(), h = g.hdim();
    Jet2 f_h = Jet2::constant(n, 0.0);
    f_h.order = p.order();
    for (int i = 0; i < h; ++i) f_h = f_h + v_h[i] * p.nu_h_component(i);

    HorizontalShape shape = second_fundamental_form(p);
    VarpiMatrices vm = p.varpi_matrices();
    const Vec& nu_h = p.nu_h();
    Vec v_hs = v_h - v_h.dot(nu_h) * nu_h;

    Mat j = horizontal_jacobian_nu_h(p);
    Vec nabla_nu = j * nu_h;  // nabla^H_{nu_h} nu_h (flat H-connection)

    Vec c_vhs = vm.c_h_of_varpi2 * v_hs;
    c_vhs -= c_vhs.dot(nu_h) * nu_h;  // restriction of the operator to HS

    double rhs = f_h.v * shape.b2 + nabla_nu.dot(c_vhs);
    for (int a = 0; a < n - h; ++a) {
        if (g.stratum_of(h + a) != 2) continue;
        Vec gw = grad_hs(p, p.varpi_component(a));
        rhs += (g.c_h_alpha(h + a) * gw).dot(v_hs);
    }
    rhs += shape.h_cc * (vm.c_h_of_varpi2 * nu_h).dot(v_hs);

    return std::abs(l_hs(p, f_h) + rhs);
}

double residual_jacobi_varpi(const SurfacePoint& p) {
    const CarnotGroup& g = p.group();
    double b_ts = stability_density(p).b_ts;
    double worst = 0.0;
    for (int a = 0; a < g.vdim(); ++a) {
        double r = std::abs(l_hs(p, p.varpi_component(a)) + p.varpi()[a] * b_ts);
        worst = std::max(worst, r);
    }
    return worst;
}

double residual_jacobi_vertical(const SurfacePoint& p, const Vec& v_vertical) {
    const CarnotGroup& g = p.group();
    const int n = g.dim(), h = g.hdim();
    Jet2 f_v = Jet2::constant(n, 0.0);
    f_v.order = p.order();
    for (int a = 0; a < n - h; ++a) f_v = f_v + v_vertical[a] * p.varpi_component(a);
    double b_ts = stability_density(p).b_ts;
    return std::abs(l_hs(p, f_v) + f_v.v * b_ts);
}

double residual_ndf_connection(const SurfacePoint& p) {
    VarpiMatrices vm = p.varpi_matrices();
    Mat j = horizontal_jacobian_nu_h(p);
    Vec direct = j * p.nu_h();
    const Vec& nu_h = p.nu_h();
    Vec direct_hs = direct - direct.dot(nu_h) * nu_h;
    return (direct_hs + vm.c_h_of_varpi2 * nu_h).norm();
}

}  // namespace carnot
