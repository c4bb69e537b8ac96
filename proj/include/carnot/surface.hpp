#ifndef CARNOT_SURFACE_HPP
#define CARNOT_SURFACE_HPP

#include <optional>

#include "carnot/jets.hpp"

namespace carnot {

// Pointwise normal apparatus of a level set {f = 0}.  All vector components
// are in the left-invariant frame.  The normal is oriented along +grad f;
// replacing f by -f flips the signs of nu, varpi and H_cc.
struct SurfaceFrame {
    Vec x;                      // base point
    Vec nu;                     // unit Riemannian normal, length n
    double p_h_norm = 0.0;      // |P_H nu|
    std::optional<Vec> nu_h;    // unit horizontal normal, length h
    Vec varpi;                  // (varpi_alpha)_{alpha in I_V}, length n-h (0 if characteristic)
    Mat hs_basis;               // h x (h-1), columns tau_2..tau_h
    Mat tau_ts;                 // n x (n-h), columns tau_alpha - varpi_alpha tau_1
    bool characteristic = false;
};

struct VarpiMatrices {
    Mat c_of_varpi;       // n x n,  C(varpi) = sum_alpha varpi_alpha C^alpha
    Mat c_h_of_varpi2;    // h x h,  C_H(varpi_{H_2})
    Mat c_hs_of_varpi2;   // (h-1) x (h-1), restriction to HS (form convention below)
};

// Deterministic adapted horizontal basis: project the canonical horizontal
// basis off nu_h, dropping the axis with the largest |<e_i, nu_h>| (ties go
// to the smallest index), Gram-Schmidt in index order, each vector's sign
// fixed positive on its first non-negligible entry.
Mat adapted_hs_basis(const Vec& nu_h);

// Matrix of the bilinear form (u, v) -> <C u, v> on the HS basis:
// entry (j,k) = <C tau_{j+2}, tau_{k+2}> = tau_k^T C tau_j.
Mat hs_restrict_form(const Mat& c, const Mat& hs_basis);

// Full pointwise evaluator: jets of f and of the derived fields nu, nu_h,
// varpi at one point.  Everything downstream (curvature, B_TS, quadrature
// densities) reads from here.
class SurfacePoint {
public:
    static SurfacePoint at(const CarnotGroup& g, const ScalarField& f, const Vec& x,
                           double eps_char = 1e-8);

    const CarnotGroup& group() const { return *group_; }
    const Frame& frame() const { return frame_; }
    const SurfaceFrame& data() const { return data_; }
    const Jet3& f_jet() const { return fjet_; }
    int order() const { return jet_order_; }  // order of the nu/varpi jets

    bool characteristic() const { return data_.characteristic; }
    void require_noncharacteristic(const char* who) const;

    // Jet2 coordinate jets of the derived scalar fields.
    const Jet2& nu_component(int i) const { return nu_[i]; }
    const Jet2& nu_h_component(int i) const;     // i in [0, h)
    const Jet2& varpi_component(int a) const;    // a in [0, n-h)
    const Jet2& p_h_norm_jet() const;

    const Vec& nu_h() const;                     // plain values, length h
    const Vec& varpi() const { return data_.varpi; }
    double p_h_norm() const { return data_.p_h_norm; }

    VarpiMatrices varpi_matrices() const;        // throws CharacteristicPoint

private:
    const CarnotGroup* group_ = nullptr;
    Frame frame_;
    Jet3 fjet_;
    SurfaceFrame data_;
    std::vector<Jet2> nu_;
    std::vector<Jet2> nu_h_;
    std::vector<Jet2> varpi_;
    Jet2 p_h_norm_jet_;
    int jet_order_ = 0;
};

SurfaceFrame surface_frame(const CarnotGroup& g, const ScalarField& f, const Vec& x,
                           double eps_char = 1e-8);

VarpiMatrices varpi_matrices(const CarnotGroup& g, const SurfaceFrame& sf);

// Jet of the normalized defining function f / |grad_H f| at x, one order
// less smooth than f.  Its full gradient on S equals nu_h + varpi.
Jet3 ndf_normalize(const CarnotGroup& g, const ScalarField& f, const Vec& x);

// Field wrapper around ndf_normalize (jets capped at order 2).
ScalarField ndf_field(const CarnotGroup& g, const ScalarField& f);

}  // namespace carnot

#endif
