#include "carnot/surface.hpp"

#include <algorithm>
#include <cmath>

namespace carnot {

Mat adapted_hs_basis(const Vec& nu_h) {
    int h = int(nu_h.size());
    int drop = 0;
    double best = -1.0;
    for (int i = 0; i < h; ++i)
        if (std::abs(nu_h[i]) > best + 1e-15) {  // strict improvement; ties keep smallest index
            best = std::abs(nu_h[i]);
            drop = i;
        }
    Mat basis(h, h - 1);
    int col = 0;
    for (int i = 0; i < h; ++i) {
        if (i == drop) continue;
        Vec v = Vec::Zero(h);
        v[i] = 1.0;
        v -= v.dot(nu_h) * nu_h;
        for (int c = 0; c < col; ++c) v -= v.dot(basis.col(c)) * basis.col(c);
        double nrm = v.norm();
        v /= nrm;
        // fix sign on the first non-negligible entry
        for (int a = 0; a < h; ++a)
            if (std::abs(v[a]) > 1e-9) {
                if (v[a] < 0) v = -v;
                break;
            }
        basis.col(col++) = v;
    }
    return basis;
}

Mat hs_restrict_form(const Mat& c, const Mat& basis) {
    // entry (j,k) = tau_k^T C tau_j
    return (basis.transpose() * c * basis).transpose();
}

void SurfacePoint::require_noncharacteristic(const char* who) const {
    if (data_.characteristic)
        throw CharacteristicPoint(std::string(who) + ": characteristic point (|P_H nu| = " +
                                  std::to_string(data_.p_h_norm) + ")");
}

const Jet2& SurfacePoint::nu_h_component(int i) const {
    require_noncharacteristic("nu_h_component");
    return nu_h_[i];
}

const Jet2& SurfacePoint::varpi_component(int a) const {
    require_noncharacteristic("varpi_component");
    return varpi_[a];
}

const Jet2& SurfacePoint::p_h_norm_jet() const {
    require_noncharacteristic("p_h_norm_jet");
    return p_h_norm_jet_;
}

const Vec& SurfacePoint::nu_h() const {
    require_noncharacteristic("nu_h");
    return *data_.nu_h;
}

SurfacePoint SurfacePoint::at(const CarnotGroup& g, const ScalarField& f, const Vec& x,
                              double eps_char) {
    SurfacePoint sp;
    sp.group_ = &g;
    const int n = g.dim();
    const int h = g.hdim();

    int forder = std::min(3, f.max_order());
    sp.fjet_ = f.jet(x, forder);
    sp.frame_ = g.frame(x, 2);
    sp.jet_order_ = std::min(2, forder - 1);

    // frame components of grad f as Jet2 fields
    std::vector<Jet2> gcomp;
    gcomp.reserve(n);
    for (int i = 0; i < n; ++i) gcomp.push_back(frame_component_jet(sp.fjet_, sp.frame_, i));

    Jet2 norm2 = Jet2::constant(n, 0.0);
    norm2.order = sp.jet_order_;
    for (int i = 0; i < n; ++i) norm2 = norm2 + gcomp[i] * gcomp[i];
    if (norm2.v < 1e-24)
        throw DegenerateDefiningFunction("grad f vanishes at the requested point");
    Jet2 gnorm = sqrt(norm2);

    sp.nu_.reserve(n);
    Jet2 inv = recip(gnorm);
    for (int i = 0; i < n; ++i) sp.nu_.push_back(gcomp[i] * inv);

    Jet2 ph2 = Jet2::constant(n, 0.0);
    ph2.order = sp.jet_order_;
    for (int i = 0; i < h; ++i) ph2 = ph2 + sp.nu_[i] * sp.nu_[i];

    SurfaceFrame& d = sp.data_;
    d.x = x;
    d.nu = Vec(n);
    for (int i = 0; i < n; ++i) d.nu[i] = sp.nu_[i].v;
    d.p_h_norm = std::sqrt(ph2.v);
    d.characteristic = d.p_h_norm < eps_char;
    d.varpi = Vec::Zero(n - h);

    if (!d.characteristic) {
        sp.p_h_norm_jet_ = sqrt(ph2);
        Jet2 invph = recip(sp.p_h_norm_jet_);
        sp.nu_h_.reserve(h);
        for (int i = 0; i < h; ++i) sp.nu_h_.push_back(sp.nu_[i] * invph);
        sp.varpi_.reserve(n - h);
        for (int a = h; a < n; ++a) sp.varpi_.push_back(sp.nu_[a] * invph);

        Vec nu_h(h);
        for (int i = 0; i < h; ++i) nu_h[i] = sp.nu_h_[i].v;
        d.nu_h = nu_h;
        for (int a = 0; a < n - h; ++a) d.varpi[a] = sp.varpi_[a].v;
        d.hs_basis = adapted_hs_basis(nu_h);
        d.tau_ts = Mat::Zero(n, n - h);
        for (int a = 0; a < n - h; ++a) {
            d.tau_ts(h + a, a) = 1.0;
            for (int i = 0; i < h; ++i) d.tau_ts(i, a) -= d.varpi[a] * nu_h[i];
        }
    }
    return sp;
}

VarpiMatrices SurfacePoint::varpi_matrices() const {
    require_noncharacteristic("varpi_matrices");
    const CarnotGroup& g = *group_;
    const int n = g.dim(), h = g.hdim();
    VarpiMatrices vm;
    vm.c_of_varpi = Mat::Zero(n, n);
    vm.c_h_of_varpi2 = Mat::Zero(h, h);
    for (int a = 0; a < n - h; ++a) {
        double w = data_.varpi[a];
        if (w == 0.0) continue;
        vm.c_of_varpi += w * g.c_alpha(h + a);
        if (g.stratum_of(h + a) == 2) vm.c_h_of_varpi2 += w * g.c_h_alpha(h + a);
    }
    vm.c_hs_of_varpi2 = hs_restrict_form(vm.c_h_of_varpi2, data_.hs_basis);
    return vm;
}

SurfaceFrame surface_frame(const CarnotGroup& g, const ScalarField& f, const Vec& x,
                           double eps_char) {
    return SurfacePoint::at(g, f, x, eps_char).data();
}

VarpiMatrices varpi_matrices(const CarnotGroup& g, const SurfaceFrame& sf) {
    if (sf.characteristic) throw CharacteristicPoint("varpi_matrices: characteristic point");
    const int n = g.dim(), h = g.hdim();
    VarpiMatrices vm;
    vm.c_of_varpi = Mat::Zero(n, n);
    vm.c_h_of_varpi2 = Mat::Zero(h, h);
    for (int a = 0; a < n - h; ++a) {
        double w = sf.varpi[a];
        if (w == 0.0) continue;
        vm.c_of_varpi += w * g.c_alpha(h + a);
        if (g.stratum_of(h + a) == 2) vm.c_h_of_varpi2 += w * g.c_h_alpha(h + a);
    }
    vm.c_hs_of_varpi2 = hs_restrict_form(vm.c_h_of_varpi2, sf.hs_basis);
    return vm;
}

Jet3 ndf_normalize(const CarnotGroup& g, const ScalarField& f, const Vec& x) {
    const int n = g.dim(), h = g.hdim();
    int forder = std::min(3, f.max_order());
    Jet3 fj = f.jet(x, forder);
    Frame fr = g.frame(x, 2);

    Jet2 gh2 = Jet2::constant(n, 0.0);
    gh2.order = std::min(2, forder - 1);
    for (int i = 0; i < h; ++i) {
        Jet2 gi = frame_component_jet(fj, fr, i);
        gh2 = gh2 + gi * gi;
    }
    Jet2 full = fj.truncate2();
    full.order = gh2.order;  // quotient loses one order of smoothness
    if (gh2.v < 1e-24) throw CharacteristicPoint("ndf_normalize: |grad_H f| vanishes");
    Jet2 out2 = full / sqrt(gh2);

    Jet3 out = Jet3::constant(n, out2.v);
    out.d1 = out2.d1;
    out.d2 = out2.d2;
    out.order = std::min(2, out2.order);
    return out;
}

ScalarField ndf_field(const CarnotGroup& g, const ScalarField& f) {
    int cap = std::min(2, f.max_order() - 1);
    return ScalarField::analytic_capped(
        g.dim(), [gc = g, f](const Vec& x, int) { return ndf_normalize(gc, f, x); }, cap);
}

}  // namespace carnot
