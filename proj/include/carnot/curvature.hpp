#ifndef CARNOT_CURVATURE_HPP
#define CARNOT_CURVATURE_HPP

#include "carnot/surface.hpp"

namespace carnot {

// Horizontal second fundamental form in the adapted basis tau_2..tau_h.
// Matrix convention: b_h(j,k) = B_H(tau_j, tau_k) = <nabla^H_{tau_j} tau_k, nu_h>,
// so the skew part satisfies a_h(j,k) = (1/2) <C_H(varpi_{H_2}) tau_j, tau_k>.
struct HorizontalShape {
    Mat b_h, s_h, a_h;
    double h_cc = 0.0;              // Tr(S_H), units 1/length
    double b2 = 0.0, s2 = 0.0, a2 = 0.0;  // squared Gram norms
};

struct StabilityDensity {
    double b_ts = 0.0;
    double s2 = 0.0, a2 = 0.0;
    double coupling = 0.0;  // sum_alpha <2 grad_HS varpi_alpha - C(varpi) tau^TS_alpha, C^alpha nu_h>
};

// H_cc = -div_H nu_h, evaluated through the quotient-rule jets of P_H nu/|P_H nu|.
double mean_curvature_h(const SurfacePoint& p);

HorizontalShape second_fundamental_form(const SurfacePoint& p);

// || A_H - (1/2) C_HS(varpi_{H_2}) ||_Gr, zero in exact arithmetic
double check_torsion_identity(const HorizontalShape& shape, const VarpiMatrices& vm);

// Diagnostic: eigenvalues of S_H (no ordering guarantee).  Their sum is H_cc.
Vec principal_horizontal_curvatures(const HorizontalShape& shape);

// Horizontal Jacobian of nu_h: J(a,b) = X_b((nu_h)_a), a,b < h.
Mat horizontal_jacobian_nu_h(const SurfacePoint& p);

// Tangential-horizontal differential operators at p.  Ambient scalar
// arguments are Jet2 coordinate jets at p.x; HS vector fields are given by
// their h frame components with first-order coordinate jets.
Vec grad_h(const SurfacePoint& p, const Jet2& phi);     // (X_i phi)_{i<h}
Vec grad_hs(const SurfacePoint& p, const Jet2& phi);    // projected off nu_h
double div_hs(const SurfacePoint& p, const std::vector<Jet1>& X);
double delta_h(const SurfacePoint& p, const Jet2& phi);  // sum_i X_i X_i phi
double delta_hs(const SurfacePoint& p, const Jet2& phi);
double d_hs(const SurfacePoint& p, const std::vector<Jet1>& X);
double l_hs(const SurfacePoint& p, const Jet2& phi);

StabilityDensity stability_density(const SurfacePoint& p);

// Specialized Heisenberg form B_TS = |S|^2 - (2 d varpi/d nu_h^o - (n+1)/2 varpi^2).
double heisenberg_bts(const SurfacePoint& p, double hmin_tol = 1e-6);

// Convenience wrappers on (group, field, point).
double mean_curvature_h(const CarnotGroup& g, const ScalarField& f, const Vec& x);
HorizontalShape second_fundamental_form(const CarnotGroup& g, const ScalarField& f, const Vec& x);
StabilityDensity stability_density(const CarnotGroup& g, const ScalarField& f, const Vec& x);

// ---------------------------------------------------------------------------
// Pointwise residuals of the geometric identities tying the objects above
// together (each evaluates both sides through independent routes).  All
// require a non-characteristic point.

// div_TS nu_h + H_cc + <C(P_V nu) nu_h, P_V nu>
double residual_divergence_split(const SurfacePoint& p);
// Tr(B^2) - (|S|^2 - |A|^2)
double residual_trace_square(const SurfacePoint& p);
// sum_alpha varpi_alpha D_HS(C_H^alpha nu_h) - (2|A|^2 + |C_H(varpi) nu_h|^2)
double residual_dhs_sum(const SurfacePoint& p);
// |B|^2 - |S|^2 - ((n-1)/2) varpi^2   (Heisenberg groups only)
double residual_heisenberg_norm(const SurfacePoint& p);
// Delta_HS phi via the Hessian decomposition minus div_HS(grad_HS phi)
double residual_laplacian_decomposition(const SurfacePoint& p, const Jet2& phi);
// L_HS f_H + f_H |B|^2 + coupling terms, f_H = <V_H, nu_h>  (CMC surfaces)
double residual_support_function(const SurfacePoint& p, const Vec& v_h);
// max_alpha | L_HS varpi_alpha + varpi_alpha B_TS |   (CMC surfaces)
double residual_jacobi_varpi(const SurfacePoint& p);
// | L_HS <V, varpi> + <V, varpi> B_TS | for constant vertical V (CMC surfaces)
double residual_jacobi_vertical(const SurfacePoint& p, const Vec& v_vertical);
// nabla^H_{nu_h} nu_h + C_H(varpi_{H_2}) nu_h (exact for normalized defining functions)
double residual_ndf_connection(const SurfacePoint& p);

}  // namespace carnot

#endif
