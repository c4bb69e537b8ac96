#ifndef CARNOT_VARIATION_HPP
#define CARNOT_VARIATION_HPP

#include <random>

#include "carnot/curvature.hpp"

namespace carnot {

enum class QuadRule { Midpoint, GaussLegendre };

// A graph chart over a coordinate hyperplane: coordinate `graph_axis` is
// solved from f = 0, the remaining n-1 coordinates range over [lo, hi].
struct PatchSpec {
    int graph_axis = 0;
    Vec lo, hi;                    // length n-1, in coordinate order skipping graph_axis
    std::vector<int> resolution;   // nodes per chart axis
    QuadRule rule = QuadRule::Midpoint;
    double mask_radius = 1e-3;     // nodes with |P_H nu| below this are excluded
    double eps_char = 1e-8;
    double graph_guess = 0.0;      // initial value for the root solve
};

struct PatchNode {
    Vec u;             // chart coordinates, length n-1
    Vec x;             // point on the surface, length n
    double w = 0.0;    // quadrature weight (chart measure)
    double sigma_r = 0.0, sigma_h = 0.0;
    double p_h_norm = 0.0;
    bool masked = false;
    double h_cc = 0.0, s2 = 0.0, a2 = 0.0, b_ts = 0.0;  // NaN when masked
    Vec varpi;         // length n-h, NaN when masked
};

class QuadraturePatch {
public:
    // The group is copied in: a patch owns everything it needs.
    QuadraturePatch(const CarnotGroup& g, ScalarField f, PatchSpec spec);

    const std::vector<PatchNode>& nodes() const { return nodes_; }
    const PatchSpec& spec() const { return spec_; }
    const CarnotGroup& group() const { return group_; }
    const ScalarField& field() const { return field_; }

    double masked_fraction() const;
    double min_unmasked_p_h_norm() const;

    // H-perimeter and Riemannian area of the patch (unmasked nodes).
    double h_perimeter() const;
    double r_area() const;

    // Chart coordinates -> ambient point (root solve along graph_axis).
    Vec lift(const Vec& u) const;
    // Embed a chart vector / index mapping helpers.
    Vec embed_chart_point(const Vec& u, double xg) const;
    int graph_axis() const { return spec_.graph_axis; }

    // Re-evaluate the full surface jets at a node (nodes store summaries only).
    SurfacePoint surface_point(int node) const;

private:
    CarnotGroup group_;
    ScalarField field_;
    PatchSpec spec_;
    std::vector<PatchNode> nodes_;
};

// sigma_R and sigma_H quadrature densities of the graph chart at u
// (|det [V_coord | chart tangents]| with V = nu resp. nu_H).  The sigma_H
// slot throws CharacteristicPoint below eps_char.
std::pair<double, double> area_elements(const CarnotGroup& g, const ScalarField& f, int graph_axis,
                                        const Vec& u, double graph_guess = 0.0,
                                        double eps_char = 1e-8);

// Compactly supported test function on the chart: product of per-axis
// (1 - s^2)^p bumps (C^{p-1} across the support boundary, exact jets).
class TestFunction {
public:
    TestFunction(Vec center, Vec halfwidth, double amplitude, int exponent = 4);

    double value(const Vec& u) const;
    Jet2 jet(const Vec& u) const;  // chart-coordinate jets
    const Vec& center() const { return center_; }
    const Vec& halfwidth() const { return halfwidth_; }
    double amplitude() const { return amplitude_; }
    int exponent() const { return exponent_; }

    // Uniformly random bump supported strictly inside [lo, hi].
    static TestFunction random(const Vec& lo, const Vec& hi, std::mt19937_64& rng);

private:
    Vec center_, halfwidth_;
    double amplitude_;
    int exponent_;
};

// Ambient Jet2 of a chart function extended constantly along the graph axis.
Jet2 extend_along_graph_axis(const Jet2& chart_jet, int graph_axis, int n);

// First variation of the H-perimeter: -int H_cc w sigma_H.
double first_variation(const QuadraturePatch& patch, const TestFunction& w);

struct SecondVariation {
    double value = 0.0;
    double gradient_term = 0.0;    // int |grad_HS w|^2 sigma_H
    double potential_term = 0.0;   // int w^2 B_TS sigma_H
};

// Second variation for H-minimal patches: int (|grad_HS w|^2 - w^2 B_TS) sigma_H.
SecondVariation second_variation(const QuadraturePatch& patch, const TestFunction& w,
                                 double hmin_tol = 1e-6);

struct StabilityCertificate {
    enum class Kind { StableBySignDefiniteVarpi, StableByNonnegativePotential, Inconclusive };
    Kind kind = Kind::Inconclusive;
    int alpha = -1;             // vertical index (0-based, absolute) for the varpi variant
    double margin = 0.0;        // min |varpi_alpha| resp. -max B_TS over unmasked nodes
    int node_count = 0;
    double masked_fraction = 0.0;
    double min_p_h_norm = 0.0;
    std::string reason;
};

// Sampled stability certificate.  A patch containing
// masked or near-characteristic nodes is never certified.
StabilityCertificate stability_certificate(const QuadraturePatch& patch, double sign_tol = 1e-9,
                                           double hmin_tol = 1e-6);

struct RayleighEstimate {
    bool trivially_stable = false;  // denominator form has no positive direction
    double value = 0.0;             // min of int|grad_HS w|^2 / int w^2 B_TS over the span
};

RayleighEstimate rayleigh_estimate(const QuadraturePatch& patch,
                                   const std::vector<TestFunction>& basis, double hmin_tol = 1e-6);

// Gram-matrix core of the Rayleigh estimate (exposed for direct testing):
// minimize v^T K v / v^T M v over v with v^T M v > 0.
RayleighEstimate rayleigh_from_gram(const Mat& k, const Mat& m);

// ---------------------------------------------------------------- identities

struct IdentityRow {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct IdentityOptions {
    int samples = 100;
    unsigned long long seed = 7;
    double tol_analytic = 1e-7;
    double tol_fd = 1e-4;
    bool use_fd = false;          // re-evaluate f by finite differences
    double fd_step = 1e-4;
};

// Runs the pointwise identity suite at random unmasked patch nodes and the
// Green formula (-int phi L_HS phi = int |grad_HS phi|^2) on the patch.
std::vector<IdentityRow> verify_identities(const QuadraturePatch& patch, const IdentityOptions& opt);

}  // namespace carnot

#endif
