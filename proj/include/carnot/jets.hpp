#ifndef CARNOT_JETS_HPP
#define CARNOT_JETS_HPP

#include <functional>
#include <memory>

#include "carnot/algebra.hpp"
#include "carnot/types.hpp"

namespace carnot {

// Coordinate-partial jets of a scalar field at a point.  Partials commute,
// so d2 and d3 are stored (and kept) symmetric.  `order` marks which slots
// are filled; reading beyond it throws InsufficientOrder.
struct Jet1 {
    double v = 0.0;
    Vec d1;
    int order = 1;

    static Jet1 constant(int n, double c);
};

struct Jet2 {
    double v = 0.0;
    Vec d1;
    Mat d2;
    int order = 2;

    static Jet2 constant(int n, double c);
    Jet1 truncate1() const;
    void require(int o, const char* who) const;
};

struct Jet3 {
    double v = 0.0;
    Vec d1;
    Mat d2;
    Tensor3 d3;
    int order = 3;

    static Jet3 constant(int n, double c);
    static Jet3 variable(int n, int i, double xi);
    int dim() const { return int(d1.size()); }
    Jet2 truncate2() const;
    void require(int o, const char* who) const;
};

// Jet arithmetic (order-aware; result order = min of operand orders).
Jet1 operator+(const Jet1&, const Jet1&);
Jet1 operator-(const Jet1&, const Jet1&);
Jet1 operator*(const Jet1&, const Jet1&);
Jet1 operator*(double, const Jet1&);

Jet2 operator+(const Jet2&, const Jet2&);
Jet2 operator-(const Jet2&, const Jet2&);
Jet2 operator*(const Jet2&, const Jet2&);
Jet2 operator*(double, const Jet2&);
Jet2 operator/(const Jet2&, const Jet2&);
Jet2 recip(const Jet2&);
Jet2 sqrt(const Jet2&);

Jet3 operator+(const Jet3&, const Jet3&);
Jet3 operator-(const Jet3&, const Jet3&);
Jet3 operator-(const Jet3&);
Jet3 operator*(const Jet3&, const Jet3&);
Jet3 operator*(double, const Jet3&);
Jet3 operator+(const Jet3&, double);
Jet3 operator-(const Jet3&, double);
Jet3 operator/(const Jet3&, const Jet3&);
Jet3 operator/(const Jet3&, double);
Jet3 recip(const Jet3&);
Jet3 sqrt(const Jet3&);
Jet3 pow(const Jet3&, double);  // real exponent; integer exponents stay exact
Jet3 pow(const Jet3&, int);

// A scalar field on the group: evaluates coordinate-partial jets at a point.
// Analytic fields return exact jets; finite-difference fields sample central
// stencils whose step follows max(base, base*|x|_inf), with step^(3/4) for
// the third-order stencils.
class ScalarField {
public:
    using JetFn = std::function<Jet3(const Vec&, int order)>;
    using ValueFn = std::function<double(const Vec&)>;

    ScalarField() = default;

    static ScalarField analytic(int dim, std::function<Jet3(const Vec&)> eval);
    static ScalarField analytic_capped(int dim, JetFn eval, int max_order);
    static ScalarField finite_difference(int dim, ValueFn f, double base_step = 1e-4);

    Jet3 jet(const Vec& x, int order = 3) const;
    double value(const Vec& x) const;
    int dim() const { return dim_; }
    int max_order() const { return max_order_; }
    bool analytic_provenance() const { return analytic_; }
    double fd_step() const { return fd_step_; }

private:
    int dim_ = 0;
    int max_order_ = 3;
    bool analytic_ = true;
    double fd_step_ = 0.0;
    JetFn fn_;
};

// Raw central-stencil jet of a callable (the guts of the finite-difference
// provenance).  Throws NonFiniteSample if the callable returns a non-finite
// value anywhere on the stencil.
Jet3 jet_from_callable(const ScalarField::ValueFn& f, const Vec& x, int order, double base_step);

// Frame derivatives X_i phi, X_i X_j phi, X_i X_j X_l phi.  x2(i,j) applies
// X_j first, then X_i; likewise x3(l,i,j) = X_l X_i X_j phi.  These do not
// commute; the antisymmetric part is the bracket derivative.
struct FrameJet {
    Vec x1;
    Mat x2;
    Tensor3 x3;
    int order = 1;
};

FrameJet frame_derivatives(const Jet3& jet, const Frame& fr);

// Coordinate jet of the scalar field X_i phi (one order lower than phi).
Jet2 frame_component_jet(const Jet3& phi, const Frame& fr, int i);
Jet1 frame_component_jet(const Jet2& phi, const Frame& fr, int i);

// First frame derivatives of a Jet2/Jet1 field: (X_i phi)_i as plain values.
Vec frame_d1(const Jet2& phi, const Frame& fr);
Vec frame_d1(const Jet1& phi, const Frame& fr);
// Full matrix of second frame derivatives F(i,j) = X_i X_j phi.
Mat frame_d2(const Jet2& phi, const Frame& fr);

// Components (X_i phi) for i in the first stratum.
Vec horizontal_gradient(const Jet3& phi, const Frame& fr, int h);

}  // namespace carnot

#endif
