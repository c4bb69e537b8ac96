#include "carnot/jets.hpp"

#include <cmath>

namespace carnot {

namespace {
inline void check(bool ok, const char* msg) {
    if (!ok) throw InsufficientOrder(msg);
}
}  // namespace

// ---------------------------------------------------------------- Jet basics

Jet1 Jet1::constant(int n, double c) { return Jet1{c, Vec::Zero(n), 1}; }

Jet2 Jet2::constant(int n, double c) { return Jet2{c, Vec::Zero(n), Mat::Zero(n, n), 2}; }

Jet1 Jet2::truncate1() const { return Jet1{v, d1, 1}; }

void Jet2::require(int o, const char* who) const {
    if (order < o) throw InsufficientOrder(std::string(who) + ": jet order " + std::to_string(order) + " < " + std::to_string(o));
}

Jet3 Jet3::constant(int n, double c) {
    return Jet3{c, Vec::Zero(n), Mat::Zero(n, n), Tensor3(n, n, n), 3};
}

Jet3 Jet3::variable(int n, int i, double xi) {
    Jet3 j = constant(n, xi);
    j.d1[i] = 1.0;
    return j;
}

Jet2 Jet3::truncate2() const { return Jet2{v, d1, d2, order >= 2 ? 2 : order}; }

void Jet3::require(int o, const char* who) const {
    if (order < o) throw InsufficientOrder(std::string(who) + ": jet order " + std::to_string(order) + " < " + std::to_string(o));
}

// ----------------------------------------------------------- Jet1 arithmetic

Jet1 operator+(const Jet1& a, const Jet1& b) {
    return Jet1{a.v + b.v, a.d1 + b.d1, std::min(a.order, b.order)};
}
Jet1 operator-(const Jet1& a, const Jet1& b) {
    return Jet1{a.v - b.v, a.d1 - b.d1, std::min(a.order, b.order)};
}
Jet1 operator*(const Jet1& a, const Jet1& b) {
    return Jet1{a.v * b.v, a.v * b.d1 + b.v * a.d1, std::min(a.order, b.order)};
}
Jet1 operator*(double c, const Jet1& a) { return Jet1{c * a.v, c * a.d1, a.order}; }

// ----------------------------------------------------------- Jet2 arithmetic

Jet2 operator+(const Jet2& a, const Jet2& b) {
    return Jet2{a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, std::min(a.order, b.order)};
}
Jet2 operator-(const Jet2& a, const Jet2& b) {
    return Jet2{a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, std::min(a.order, b.order)};
}
Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.order = std::min(a.order, b.order);
    r.v = a.v * b.v;
    r.d1 = a.v * b.d1 + b.v * a.d1;
    r.d2 = a.v * b.d2 + b.v * a.d2 + a.d1 * b.d1.transpose() + b.d1 * a.d1.transpose();
    return r;
}
Jet2 operator*(double c, const Jet2& a) { return Jet2{c * a.v, c * a.d1, c * a.d2, a.order}; }

// composition with scalar h: F = h(u), F'' = h''(u) u' u'^T + h'(u) u''.
static Jet2 compose2(const Jet2& u, double h0, double h1, double h2) {
    return Jet2{h0, h1 * u.d1, h2 * (u.d1 * u.d1.transpose()) + h1 * u.d2, u.order};
}

Jet2 recip(const Jet2& u) {
    double s = u.v;
    return compose2(u, 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s));
}

Jet2 sqrt(const Jet2& u) {
    double s = std::sqrt(u.v);
    return compose2(u, s, 0.5 / s, -0.25 / (s * u.v));
}

Jet2 operator/(const Jet2& a, const Jet2& b) { return a * recip(b); }

// ----------------------------------------------------------- Jet3 arithmetic

Jet3 operator+(const Jet3& a, const Jet3& b) {
    Jet3 r = a;
    r.order = std::min(a.order, b.order);
    r.v += b.v;
    r.d1 += b.d1;
    r.d2 += b.d2;
    int n = r.dim();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s) r.d3(p, q, s) += b.d3(p, q, s);
    return r;
}

Jet3 operator-(const Jet3& a, const Jet3& b) { return a + (-1.0) * b; }
Jet3 operator-(const Jet3& a) { return (-1.0) * a; }
Jet3 operator+(const Jet3& a, double c) {
    Jet3 r = a;
    r.v += c;
    return r;
}
Jet3 operator-(const Jet3& a, double c) { return a + (-c); }

Jet3 operator*(double c, const Jet3& a) {
    Jet3 r = a;
    r.v *= c;
    r.d1 *= c;
    r.d2 *= c;
    int n = r.dim();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s) r.d3(p, q, s) *= c;
    return r;
}

Jet3 operator*(const Jet3& a, const Jet3& b) {
    int n = a.dim();
    Jet3 r = Jet3::constant(n, 0.0);
    r.order = std::min(a.order, b.order);
    r.v = a.v * b.v;
    r.d1 = a.v * b.d1 + b.v * a.d1;
    r.d2 = a.v * b.d2 + b.v * a.d2 + a.d1 * b.d1.transpose() + b.d1 * a.d1.transpose();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s)
                r.d3(p, q, s) = a.v * b.d3(p, q, s) + b.v * a.d3(p, q, s) +
                                a.d1[p] * b.d2(q, s) + a.d1[q] * b.d2(p, s) + a.d1[s] * b.d2(p, q) +
                                b.d1[p] * a.d2(q, s) + b.d1[q] * a.d2(p, s) + b.d1[s] * a.d2(p, q);
    return r;
}

// Faa di Bruno to order 3 for scalar h(u).
static Jet3 compose3(const Jet3& u, double h0, double h1, double h2, double h3) {
    int n = u.dim();
    Jet3 r = Jet3::constant(n, h0);
    r.order = u.order;
    r.d1 = h1 * u.d1;
    r.d2 = h2 * (u.d1 * u.d1.transpose()) + h1 * u.d2;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s)
                r.d3(p, q, s) = h3 * u.d1[p] * u.d1[q] * u.d1[s] +
                                h2 * (u.d2(p, q) * u.d1[s] + u.d2(p, s) * u.d1[q] + u.d2(q, s) * u.d1[p]) +
                                h1 * u.d3(p, q, s);
    return r;
}

Jet3 recip(const Jet3& u) {
    double s = u.v;
    return compose3(u, 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s), -6.0 / (s * s * s * s));
}

Jet3 sqrt(const Jet3& u) {
    double s = std::sqrt(u.v);
    return compose3(u, s, 0.5 / s, -0.25 / (s * u.v), 0.375 / (s * u.v * u.v));
}

Jet3 pow(const Jet3& u, double e) {
    double s = u.v;
    return compose3(u, std::pow(s, e), e * std::pow(s, e - 1.0), e * (e - 1.0) * std::pow(s, e - 2.0),
                    e * (e - 1.0) * (e - 2.0) * std::pow(s, e - 3.0));
}

Jet3 pow(const Jet3& u, int e) {
    if (e < 0) return recip(pow(u, -e));
    Jet3 r = Jet3::constant(u.dim(), 1.0);
    r.order = u.order;
    Jet3 base = u;
    int k = e;
    while (k > 0) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

Jet3 operator/(const Jet3& a, const Jet3& b) { return a * recip(b); }
Jet3 operator/(const Jet3& a, double c) { return (1.0 / c) * a; }

// --------------------------------------------------------------- ScalarField

ScalarField ScalarField::analytic(int dim, std::function<Jet3(const Vec&)> eval) {
    ScalarField f;
    f.dim_ = dim;
    f.analytic_ = true;
    f.max_order_ = 3;
    f.fn_ = [eval](const Vec& x, int) { return eval(x); };
    return f;
}

ScalarField ScalarField::analytic_capped(int dim, JetFn eval, int max_order) {
    ScalarField f;
    f.dim_ = dim;
    f.analytic_ = true;
    f.max_order_ = max_order;
    f.fn_ = std::move(eval);
    return f;
}

ScalarField ScalarField::finite_difference(int dim, ValueFn fv, double base_step) {
    ScalarField f;
    f.dim_ = dim;
    f.analytic_ = false;
    f.fd_step_ = base_step;
    f.fn_ = [fv, base_step](const Vec& x, int order) {
        return jet_from_callable(fv, x, order, base_step);
    };
    return f;
}

Jet3 ScalarField::jet(const Vec& x, int order) const {
    if (order > max_order_)
        throw InsufficientOrder("field provides jets up to order " + std::to_string(max_order_));
    Jet3 j = fn_(x, order);
    j.order = std::min(j.order, order);
    return j;
}

double ScalarField::value(const Vec& x) const { return fn_(x, 1).v; }

// -------------------------------------------------------------- FD stencils

Jet3 jet_from_callable(const ScalarField::ValueFn& f, const Vec& x, int order, double base_step) {
    if (order < 1 || order > 3) throw Error("jet_from_callable: order must be 1, 2 or 3");
    if (!(base_step > 0.0)) throw Error("jet_from_callable: step must be positive");
    int n = int(x.size());
    double h = std::max(base_step, base_step * x.lpNorm<Eigen::Infinity>());
    double h3 = std::pow(h, 0.75);  // third-order stencils trade truncation for rounding

    auto ev = [&](const Vec& y) {
        double v = f(y);
        if (!std::isfinite(v)) throw NonFiniteSample("non-finite sample in finite-difference stencil");
        return v;
    };
    auto at = [&](std::initializer_list<std::pair<int, double>> shifts) {
        Vec y = x;
        for (auto [i, s] : shifts) y[i] += s;
        return ev(y);
    };

    Jet3 j = Jet3::constant(n, ev(x));
    j.order = order;

    // 5-point first and second derivatives: O(h^4), exact through degree 5.
    for (int i = 0; i < n; ++i) {
        double fp = at({{i, h}}), fm = at({{i, -h}});
        double fp2 = at({{i, 2 * h}}), fm2 = at({{i, -2 * h}});
        j.d1[i] = (-fp2 + 8.0 * fp - 8.0 * fm + fm2) / (12.0 * h);
        if (order >= 2) j.d2(i, i) = (-fp2 + 16.0 * fp - 30.0 * j.v + 16.0 * fm - fm2) / (12.0 * h * h);
    }
    if (order >= 2) {
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k) {
                double v = (at({{i, h}, {k, h}}) - at({{i, h}, {k, -h}}) - at({{i, -h}, {k, h}}) +
                            at({{i, -h}, {k, -h}})) /
                           (4.0 * h * h);
                j.d2(i, k) = v;
                j.d2(k, i) = v;
            }
    }
    if (order >= 3) {
        double g = h3;
        auto set3 = [&](int p, int q, int s, double v) {
            j.d3(p, q, s) = v; j.d3(p, s, q) = v; j.d3(q, p, s) = v;
            j.d3(q, s, p) = v; j.d3(s, p, q) = v; j.d3(s, q, p) = v;
        };
        for (int i = 0; i < n; ++i) {
            double v = (at({{i, 2 * g}}) - 2.0 * at({{i, g}}) + 2.0 * at({{i, -g}}) - at({{i, -2 * g}})) /
                       (2.0 * g * g * g);
            set3(i, i, i, v);
        }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                if (k == i) continue;
                // d_k applied to the 3-point d_ii stencil
                double v = (at({{i, g}, {k, g}}) - 2.0 * at({{k, g}}) + at({{i, -g}, {k, g}}) -
                            at({{i, g}, {k, -g}}) + 2.0 * at({{k, -g}}) - at({{i, -g}, {k, -g}})) /
                           (2.0 * g * g * g);
                set3(i, i, k, v);
            }
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    double v = 0.0;
                    for (int si = -1; si <= 1; si += 2)
                        for (int sk = -1; sk <= 1; sk += 2)
                            for (int sl = -1; sl <= 1; sl += 2)
                                v += si * sk * sl * at({{i, si * g}, {k, sk * g}, {l, sl * g}});
                    set3(i, k, l, v / (8.0 * g * g * g));
                }
    }
    return j;
}

// ------------------------------------------------------- frame derivatives

Jet2 frame_component_jet(const Jet3& phi, const Frame& fr, int i) {
    phi.require(1, "frame_component_jet");
    int n = phi.dim();
    Jet2 g;
    g.order = std::min(2, phi.order - 1);
    g.v = 0.0;
    g.d1 = Vec::Zero(n);
    g.d2 = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a) g.v += fr.A(a, i) * phi.d1[a];
    if (g.order >= 1) {
        for (int p = 0; p < n; ++p)
            for (int a = 0; a < n; ++a)
                g.d1[p] += fr.dA(p, a, i) * phi.d1[a] + fr.A(a, i) * phi.d2(a, p);
    }
    if (g.order >= 2) {
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    s += fr.ddA(p, q, a, i) * phi.d1[a] + fr.dA(p, a, i) * phi.d2(a, q) +
                         fr.dA(q, a, i) * phi.d2(a, p) + fr.A(a, i) * phi.d3(a, p, q);
                g.d2(p, q) = s;
                g.d2(q, p) = s;
            }
    }
    return g;
}

Jet1 frame_component_jet(const Jet2& phi, const Frame& fr, int i) {
    phi.require(1, "frame_component_jet");
    int n = int(phi.d1.size());
    Jet1 g;
    g.v = 0.0;
    g.d1 = Vec::Zero(n);
    for (int a = 0; a < n; ++a) g.v += fr.A(a, i) * phi.d1[a];
    if (phi.order >= 2) {
        for (int p = 0; p < n; ++p)
            for (int a = 0; a < n; ++a)
                g.d1[p] += fr.dA(p, a, i) * phi.d1[a] + fr.A(a, i) * phi.d2(a, p);
    } else {
        g.order = 0;
    }
    return g;
}

Vec frame_d1(const Jet2& phi, const Frame& fr) {
    phi.require(1, "frame_d1");
    return fr.A.transpose() * phi.d1;
}

Vec frame_d1(const Jet1& phi, const Frame& fr) { return fr.A.transpose() * phi.d1; }

Mat frame_d2(const Jet2& phi, const Frame& fr) {
    phi.require(2, "frame_d2");
    int n = int(phi.d1.size());
    Mat out(n, n);
    for (int j = 0; j < n; ++j) {
        Jet1 gj = frame_component_jet(phi, fr, j);
        Vec xi = fr.A.transpose() * gj.d1;  // X_i(X_j phi)
        for (int i = 0; i < n; ++i) out(i, j) = xi[i];
    }
    return out;
}

FrameJet frame_derivatives(const Jet3& phi, const Frame& fr) {
    int n = phi.dim();
    FrameJet out;
    out.order = phi.order;
    out.x1 = fr.A.transpose() * phi.d1;
    if (phi.order >= 2) {
        out.x2 = Mat(n, n);
        std::vector<Jet2> comp;
        comp.reserve(n);
        for (int j = 0; j < n; ++j) comp.push_back(frame_component_jet(phi, fr, j));
        for (int j = 0; j < n; ++j) {
            Vec xi = fr.A.transpose() * comp[j].d1;
            for (int i = 0; i < n; ++i) out.x2(i, j) = xi[i];
        }
        if (phi.order >= 3) {
            out.x3 = Tensor3(n, n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    Jet1 gij = frame_component_jet(comp[j], fr, i);  // X_i X_j phi with d1
                    Vec xl = fr.A.transpose() * gij.d1;
                    for (int l = 0; l < n; ++l) out.x3(l, i, j) = xl[l];
                }
        }
    }
    return out;
}

Vec horizontal_gradient(const Jet3& phi, const Frame& fr, int h) {
    phi.require(1, "horizontal_gradient");
    return (fr.A.transpose() * phi.d1).head(h);
}

}  // namespace carnot
