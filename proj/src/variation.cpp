#include "carnot/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carnot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& xs, std::vector<double>& ws) {
    xs.assign(m, 0.0);
    ws.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        xs[i] = -x;
        xs[m - 1 - i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        ws[m - 1 - i] = ws[i];
    }
}

struct ChartMap {
    int n, axis;
    std::vector<int> coord_of_chart;  // chart index -> coordinate index
};

ChartMap chart_map(int n, int axis) {
    ChartMap m{n, axis, {}};
    for (int c = 0; c < n; ++c)
        if (c != axis) m.coord_of_chart.push_back(c);
    return m;
}

// Safeguarded Newton/bisection solve of f(embed(u, xg)) = 0 along the graph axis.
double solve_graph(const CarnotGroup&, const ScalarField& f, const ChartMap& cm, const Vec& u,
                   double guess) {
    auto embed = [&](double xg) {
        Vec x(cm.n);
        x[cm.axis] = xg;
        for (std::size_t c = 0; c < cm.coord_of_chart.size(); ++c) x[cm.coord_of_chart[c]] = u[c];
        return x;
    };
    auto fv = [&](double xg) { return f.value(embed(xg)); };

    double a = guess, b = guess;
    double fa = fv(a), fb = fa;
    double step = 0.5;
    bool bracketed = std::abs(fa) < 1e-14;
    for (int it = 0; it < 80 && !bracketed; ++it) {
        a = guess - step;
        b = guess + step;
        fa = fv(a);
        fb = fv(b);
        if (fa == 0.0 || fb == 0.0 || (fa < 0) != (fb < 0)) {
            bracketed = true;
            break;
        }
        step *= 2.0;
    }
    if (!bracketed && std::abs(fa) >= 1e-14)
        throw ChartSolveFailure("could not bracket the graph solve along the chart axis");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;

    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        Vec p = embed(x);
        Jet3 j = f.jet(p, 1);
        double val = j.v, der = j.d1[cm.axis];
        if (std::abs(val) < 1e-13 * std::max(1.0, std::abs(der) * std::abs(x))) return x;
        if ((val < 0) != (fa < 0)) { b = x; } else { a = x; fa = val; }
        double xn = (der != 0.0) ? x - val / der : 0.5 * (a + b);
        if (!(xn > std::min(a, b) && xn < std::max(a, b))) xn = 0.5 * (a + b);
        if (std::abs(xn - x) < 1e-14 * std::max(1.0, std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

std::pair<double, double> sigma_weights(const CarnotGroup& g, const SurfacePoint& sp,
                                        const ChartMap& cm) {
    const int n = g.dim(), h = g.hdim();
    const Jet3& fj = sp.f_jet();
    double fg = fj.d1[cm.axis];
    if (fg == 0.0) throw ChartSolveFailure("graph axis is tangent to the surface at a node");

    Mat m(n, n);
    for (std::size_t c = 0; c < cm.coord_of_chart.size(); ++c) {
        int cc = cm.coord_of_chart[c];
        Vec t = Vec::Zero(n);
        t[cc] = 1.0;
        t[cm.axis] = -fj.d1[cc] / fg;
        m.col(int(c) + 1) = t;
    }
    m.col(0) = sp.frame().A * sp.data().nu;
    double sigma_r = std::abs(m.determinant());

    Vec nu_h_emb = Vec::Zero(n);
    if (!sp.characteristic()) {
        nu_h_emb.head(h) = sp.nu_h();
        m.col(0) = sp.frame().A * nu_h_emb;
        return {sigma_r, std::abs(m.determinant())};
    }
    return {sigma_r, sp.p_h_norm() * sigma_r};
}

}  // namespace

QuadraturePatch::QuadraturePatch(const CarnotGroup& g, ScalarField f, PatchSpec spec)
    : group_(g), field_(std::move(f)), spec_(std::move(spec)) {
    const int n = g.dim();
    const int d = n - 1;
    if (int(spec_.lo.size()) != d || int(spec_.hi.size()) != d)
        throw Error("patch domain must have n-1 coordinates");
    if (int(spec_.resolution.size()) == 1 && d > 1)
        spec_.resolution.assign(d, spec_.resolution[0]);
    if (int(spec_.resolution.size()) != d) throw Error("patch resolution must cover n-1 axes");
    // unmasked nodes must be non-characteristic
    spec_.mask_radius = std::max(spec_.mask_radius, spec_.eps_char);

    ChartMap cm = chart_map(n, spec_.graph_axis);

    std::vector<std::vector<double>> axis_nodes(d), axis_weights(d);
    for (int c = 0; c < d; ++c) {
        int m = spec_.resolution[c];
        double lo = spec_.lo[c], hi = spec_.hi[c], len = hi - lo;
        if (spec_.rule == QuadRule::Midpoint) {
            double hstep = len / m;
            for (int i = 0; i < m; ++i) {
                axis_nodes[c].push_back(lo + (i + 0.5) * hstep);
                axis_weights[c].push_back(hstep);
            }
        } else {
            std::vector<double> xs, ws;
            gauss_legendre(m, xs, ws);
            for (int i = 0; i < m; ++i) {
                axis_nodes[c].push_back(lo + 0.5 * len * (xs[i] + 1.0));
                axis_weights[c].push_back(0.5 * len * ws[i]);
            }
        }
    }

    std::vector<int> idx(d, 0);
    const int vdim = n - g.hdim();
    bool more = true;
    while (more) {
        PatchNode node;
        node.u = Vec(d);
        node.w = 1.0;
        for (int c = 0; c < d; ++c) {
            node.u[c] = axis_nodes[c][idx[c]];
            node.w *= axis_weights[c][idx[c]];
        }
        double xg = solve_graph(g, field_, cm, node.u, spec_.graph_guess);
        node.x = embed_chart_point(node.u, xg);

        SurfacePoint sp = SurfacePoint::at(g, field_, node.x, spec_.eps_char);
        auto [sr, sh] = sigma_weights(g, sp, cm);
        node.sigma_r = sr;
        node.sigma_h = sh;
        node.p_h_norm = sp.p_h_norm();
        node.masked = node.p_h_norm < spec_.mask_radius;
        node.varpi = Vec::Constant(vdim, kNaN);
        node.h_cc = node.s2 = node.a2 = node.b_ts = kNaN;
        if (!sp.characteristic()) {
            HorizontalShape shape = second_fundamental_form(sp);
            node.h_cc = shape.h_cc;
            node.s2 = shape.s2;
            node.a2 = shape.a2;
            node.varpi = sp.varpi();
            try {
                node.b_ts = stability_density(sp).b_ts;
            } catch (const InsufficientOrder&) {
                node.b_ts = kNaN;
            }
        }
        nodes_.push_back(std::move(node));

        more = false;
        for (int c = d - 1; c >= 0; --c) {
            if (++idx[c] < int(axis_nodes[c].size())) {
                more = true;
                break;
            }
            idx[c] = 0;
        }
    }
}

Vec QuadraturePatch::embed_chart_point(const Vec& u, double xg) const {
    const int n = group_.dim();
    Vec x(n);
    x[spec_.graph_axis] = xg;
    int c = 0;
    for (int i = 0; i < n; ++i)
        if (i != spec_.graph_axis) x[i] = u[c++];
    return x;
}

Vec QuadraturePatch::lift(const Vec& u) const {
    ChartMap cm = chart_map(group_.dim(), spec_.graph_axis);
    double xg = solve_graph(group_, field_, cm, u, spec_.graph_guess);
    return embed_chart_point(u, xg);
}

SurfacePoint QuadraturePatch::surface_point(int node) const {
    return SurfacePoint::at(group_, field_, nodes_[node].x, spec_.eps_char);
}

double QuadraturePatch::masked_fraction() const {
    if (nodes_.empty()) return 0.0;
    double m = 0.0;
    for (const auto& nd : nodes_) m += nd.masked ? 1.0 : 0.0;
    return m / double(nodes_.size());
}

double QuadraturePatch::min_unmasked_p_h_norm() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& nd : nodes_)
        if (!nd.masked) v = std::min(v, nd.p_h_norm);
    return v;
}

double QuadraturePatch::h_perimeter() const {
    std::vector<double> terms;
    terms.reserve(nodes_.size());
    for (const auto& nd : nodes_)
        if (!nd.masked) terms.push_back(nd.w * nd.sigma_h);
    return pairwise_sum(terms);
}

double QuadraturePatch::r_area() const {
    std::vector<double> terms;
    terms.reserve(nodes_.size());
    for (const auto& nd : nodes_) terms.push_back(nd.w * nd.sigma_r);
    return pairwise_sum(terms);
}

std::pair<double, double> area_elements(const CarnotGroup& g, const ScalarField& f, int graph_axis,
                                        const Vec& u, double graph_guess, double eps_char) {
    ChartMap cm = chart_map(g.dim(), graph_axis);
    double xg = solve_graph(g, f, cm, u, graph_guess);
    Vec x(g.dim());
    x[graph_axis] = xg;
    int c = 0;
    for (int i = 0; i < g.dim(); ++i)
        if (i != graph_axis) x[i] = u[c++];
    SurfacePoint sp = SurfacePoint::at(g, f, x, eps_char);
    auto [sr, sh] = sigma_weights(g, sp, cm);
    if (sp.characteristic())
        throw CharacteristicNode("area_elements: characteristic node has no sigma_H weight");
    return {sr, sh};
}

// ---------------------------------------------------------------- TestFunction

TestFunction::TestFunction(Vec center, Vec halfwidth, double amplitude, int exponent)
    : center_(std::move(center)),
      halfwidth_(std::move(halfwidth)),
      amplitude_(amplitude),
      exponent_(exponent) {
    if (exponent_ < 2) throw Error("TestFunction: exponent must be >= 2 for C^1 support boundaries");
}

namespace {
// b(s) = (1-s^2)^p on |s|<1, with b', b''.
inline void bump1d(double s, int p, double& b, double& db, double& ddb) {
    double q = 1.0 - s * s;
    if (q <= 0.0) {
        b = db = ddb = 0.0;
        return;
    }
    double qpm2 = std::pow(q, p - 2);
    b = qpm2 * q * q;
    db = -2.0 * p * s * qpm2 * q;
    ddb = -2.0 * p * qpm2 * q + 4.0 * p * (p - 1) * s * s * qpm2;
}
}  // namespace

double TestFunction::value(const Vec& u) const {
    double v = amplitude_;
    for (int c = 0; c < u.size(); ++c) {
        double b, db, ddb;
        bump1d((u[c] - center_[c]) / halfwidth_[c], exponent_, b, db, ddb);
        v *= b;
        if (v == 0.0) return 0.0;
    }
    return v;
}

Jet2 TestFunction::jet(const Vec& u) const {
    const int d = int(u.size());
    std::vector<double> b(d), db(d), ddb(d);
    for (int c = 0; c < d; ++c) {
        bump1d((u[c] - center_[c]) / halfwidth_[c], exponent_, b[c], db[c], ddb[c]);
        db[c] /= halfwidth_[c];
        ddb[c] /= halfwidth_[c] * halfwidth_[c];
    }
    Jet2 j = Jet2::constant(d, amplitude_);
    for (int c = 0; c < d; ++c) j.v *= b[c];
    auto prod_except = [&](int skip1, int skip2) {
        double p = amplitude_;
        for (int c = 0; c < d; ++c)
            if (c != skip1 && c != skip2) p *= b[c];
        return p;
    };
    for (int c = 0; c < d; ++c) j.d1[c] = db[c] * prod_except(c, c);
    for (int c = 0; c < d; ++c) {
        j.d2(c, c) = ddb[c] * prod_except(c, c);
        for (int e = c + 1; e < d; ++e) {
            double v = db[c] * db[e] * prod_except(c, e);
            j.d2(c, e) = v;
            j.d2(e, c) = v;
        }
    }
    return j;
}

TestFunction TestFunction::random(const Vec& lo, const Vec& hi, std::mt19937_64& rng) {
    const int d = int(lo.size());
    Vec center(d), halfwidth(d);
    std::uniform_real_distribution<double> uh(0.15, 0.35), uc(0.0, 1.0), ua(0.5, 2.0);
    for (int c = 0; c < d; ++c) {
        double len = hi[c] - lo[c];
        halfwidth[c] = uh(rng) * len;
        double m0 = lo[c] + 1.001 * halfwidth[c], m1 = hi[c] - 1.001 * halfwidth[c];
        center[c] = m0 + uc(rng) * (m1 - m0);
    }
    return TestFunction(center, halfwidth, ua(rng));
}

Jet2 extend_along_graph_axis(const Jet2& chart_jet, int graph_axis, int n) {
    Jet2 out = Jet2::constant(n, chart_jet.v);
    out.order = chart_jet.order;
    int c = 0;
    std::vector<int> coord(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != graph_axis) coord[c++] = i;
    for (int a = 0; a < n - 1; ++a) {
        out.d1[coord[a]] = chart_jet.d1[a];
        for (int b = 0; b < n - 1; ++b) out.d2(coord[a], coord[b]) = chart_jet.d2(a, b);
    }
    return out;
}

// ------------------------------------------------------------------ variations

double first_variation(const QuadraturePatch& patch, const TestFunction& w) {
    std::vector<double> terms;
    terms.reserve(patch.nodes().size());
    for (std::size_t i = 0; i < patch.nodes().size(); ++i) {
        const PatchNode& nd = patch.nodes()[i];
        if (nd.masked) continue;
        double wv = w.value(nd.u);
        if (wv == 0.0) continue;
        terms.push_back(-nd.h_cc * wv * nd.sigma_h * nd.w);
    }
    return pairwise_sum(terms);
}

SecondVariation second_variation(const QuadraturePatch& patch, const TestFunction& w,
                                 double hmin_tol) {
    const CarnotGroup& g = patch.group();
    const int n = g.dim();
    for (const auto& nd : patch.nodes())
        if (!nd.masked && std::abs(nd.h_cc) > hmin_tol)
            throw NotHMinimalOnPatch("second_variation: |H_cc| = " + std::to_string(std::abs(nd.h_cc)) +
                                     " exceeds the H-minimality tolerance on the patch");

    std::vector<double> grad_terms, pot_terms;
    for (std::size_t i = 0; i < patch.nodes().size(); ++i) {
        const PatchNode& nd = patch.nodes()[i];
        if (nd.masked) continue;
        Jet2 wj = w.jet(nd.u);
        if (wj.v == 0.0 && wj.d1.isZero(0.0)) continue;
        SurfacePoint sp = patch.surface_point(int(i));
        Jet2 amb = extend_along_graph_axis(wj, patch.graph_axis(), n);
        Vec gw = grad_hs(sp, amb);
        grad_terms.push_back(gw.squaredNorm() * nd.sigma_h * nd.w);
        pot_terms.push_back(wj.v * wj.v * nd.b_ts * nd.sigma_h * nd.w);
    }
    SecondVariation out;
    out.gradient_term = pairwise_sum(grad_terms);
    out.potential_term = pairwise_sum(pot_terms);
    out.value = out.gradient_term - out.potential_term;
    return out;
}

StabilityCertificate stability_certificate(const QuadraturePatch& patch, double sign_tol,
                                           double hmin_tol) {
    const CarnotGroup& g = patch.group();
    StabilityCertificate cert;
    cert.masked_fraction = patch.masked_fraction();
    cert.min_p_h_norm = patch.min_unmasked_p_h_norm();
    for (const auto& nd : patch.nodes()) cert.node_count += nd.masked ? 0 : 1;

    for (const auto& nd : patch.nodes())
        if (!nd.masked && std::abs(nd.h_cc) > hmin_tol)
            throw NotHMinimalOnPatch("stability_certificate: patch is not H-minimal");

    // A sampled certificate needs clean geometry: no excluded nodes and no
    // near-characteristic ones.
    if (cert.masked_fraction > 0.0 || cert.min_p_h_norm < 10.0 * patch.spec().mask_radius) {
        cert.kind = StabilityCertificate::Kind::Inconclusive;
        cert.reason = cert.masked_fraction > 0.0
                          ? "patch contains masked (near-characteristic) nodes"
                          : "sampled |P_H nu| approaches the mask radius";
        return cert;
    }

    const int h = g.hdim(), n = g.dim();
    for (int a = 0; a < n - h; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& nd : patch.nodes()) {
            if (nd.masked) continue;
            lo = std::min(lo, nd.varpi[a]);
            hi = std::max(hi, nd.varpi[a]);
        }
        if (lo > sign_tol || hi < -sign_tol) {
            cert.kind = StabilityCertificate::Kind::StableBySignDefiniteVarpi;
            cert.alpha = h + a;
            cert.margin = std::min(std::abs(lo), std::abs(hi));
            cert.reason = "varpi_" + std::to_string(h + a + 1) + " is sign-definite on all nodes";
            return cert;
        }
    }

    double max_bts = -std::numeric_limits<double>::infinity();
    bool have_bts = false;
    for (const auto& nd : patch.nodes()) {
        if (nd.masked) continue;
        if (!std::isnan(nd.b_ts)) {
            have_bts = true;
            max_bts = std::max(max_bts, nd.b_ts);
        }
    }
    if (have_bts && max_bts <= sign_tol) {
        cert.kind = StabilityCertificate::Kind::StableByNonnegativePotential;
        cert.margin = -max_bts;
        cert.reason = "B_TS <= tolerance at every sampled node";
        return cert;
    }

    cert.kind = StabilityCertificate::Kind::Inconclusive;
    cert.reason = "no sign-definite varpi component and B_TS takes positive values";
    return cert;
}

RayleighEstimate rayleigh_from_gram(const Mat& k, const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es_k(k);
    double kmax = es_k.eigenvalues().maxCoeff();
    if (kmax <= 0.0 || es_k.eigenvalues().minCoeff() <= 1e-12 * kmax)
        throw DegenerateGram("rayleigh_estimate: gradient Gram matrix is singular");
    Mat k_inv_sqrt = es_k.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<Mat> es_m(k_inv_sqrt * m * k_inv_sqrt);
    double lmax = es_m.eigenvalues().maxCoeff();
    RayleighEstimate out;
    if (lmax <= 1e-14) {
        out.trivially_stable = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = 1.0 / lmax;
    return out;
}

RayleighEstimate rayleigh_estimate(const QuadraturePatch& patch,
                                   const std::vector<TestFunction>& basis, double hmin_tol) {
    const CarnotGroup& g = patch.group();
    const int n = g.dim();
    const int m = int(basis.size());
    for (const auto& nd : patch.nodes())
        if (!nd.masked && std::abs(nd.h_cc) > hmin_tol)
            throw NotHMinimalOnPatch("rayleigh_estimate: patch is not H-minimal");

    Mat gram_k = Mat::Zero(m, m), gram_m = Mat::Zero(m, m);
    for (std::size_t i = 0; i < patch.nodes().size(); ++i) {
        const PatchNode& nd = patch.nodes()[i];
        if (nd.masked) continue;
        SurfacePoint sp = patch.surface_point(int(i));
        std::vector<Vec> grads(m);
        std::vector<double> vals(m);
        for (int a = 0; a < m; ++a) {
            Jet2 wj = basis[a].jet(nd.u);
            vals[a] = wj.v;
            grads[a] = grad_hs(sp, extend_along_graph_axis(wj, patch.graph_axis(), n));
        }
        double scale = nd.sigma_h * nd.w;
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                gram_k(a, b) += grads[a].dot(grads[b]) * scale;
                gram_m(a, b) += vals[a] * vals[b] * nd.b_ts * scale;
            }
    }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < a; ++b) {
            gram_k(a, b) = gram_k(b, a);
            gram_m(a, b) = gram_m(b, a);
        }
    return rayleigh_from_gram(gram_k, gram_m);
}

// ------------------------------------------------------------------ identities

namespace {

Jet2 random_cubic_jet(int n, const Vec& x, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto lin = [&]() {
        Jet3 acc = Jet3::constant(n, u(rng));
        for (int i = 0; i < n; ++i) acc = acc + u(rng) * Jet3::variable(n, i, x[i]);
        return acc;
    };
    Jet3 phi = lin() * lin() * lin() + lin() * lin() + lin();
    return phi.truncate2();
}

void push_row(std::vector<IdentityRow>& rows, const std::string& name, double residual, double tol) {
    rows.push_back({name, residual, tol, residual <= tol});
}

}  // namespace

std::vector<IdentityRow> verify_identities(const QuadraturePatch& patch,
                                           const IdentityOptions& opt) {
    const CarnotGroup& g = patch.group();
    const int n = g.dim(), h = g.hdim();
    std::mt19937_64 rng(opt.seed);

    ScalarField field = patch.field();
    if (opt.use_fd) {
        ScalarField base = patch.field();
        field = ScalarField::finite_difference(
            n, [base](const Vec& x) { return base.value(x); }, opt.fd_step);
    }
    const double tol = opt.use_fd ? opt.tol_fd : opt.tol_analytic;

    std::vector<int> unmasked;
    for (std::size_t i = 0; i < patch.nodes().size(); ++i)
        if (!patch.nodes()[i].masked) unmasked.push_back(int(i));
    if (unmasked.empty()) throw Error("verify_identities: no unmasked nodes on the patch");

    std::uniform_int_distribution<std::size_t> pick(0, unmasked.size() - 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    double r31 = 0, r33 = 0, r34 = 0, r35 = 0, r111 = 0, r51 = 0, r53 = 0, r54 = 0, r55 = 0,
           rd10 = 0;
    const bool heis = g.is_heisenberg();
    const bool has_vertical = g.vdim() > 0;

    ScalarField ndf = has_vertical ? ndf_field(g, patch.field()) : patch.field();

    for (int s = 0; s < opt.samples; ++s) {
        const PatchNode& nd = patch.nodes()[unmasked[pick(rng)]];
        SurfacePoint sp = SurfacePoint::at(g, field, nd.x, patch.spec().eps_char);

        r31 = std::max(r31, residual_divergence_split(sp));
        HorizontalShape shape = second_fundamental_form(sp);
        if (has_vertical) {
            VarpiMatrices vm = sp.varpi_matrices();
            r33 = std::max(r33, check_torsion_identity(shape, vm));
            r35 = std::max(r35, residual_dhs_sum(sp));
        }
        r34 = std::max(r34, residual_trace_square(sp));
        if (heis) r111 = std::max(r111, residual_heisenberg_norm(sp));
        r51 = std::max(r51, residual_laplacian_decomposition(sp, random_cubic_jet(n, nd.x, rng)));

        Vec v_h(h);
        for (int i = 0; i < h; ++i) v_h[i] = u(rng);
        r53 = std::max(r53, residual_support_function(sp, v_h));

        if (has_vertical && sp.order() >= 2) {
            r54 = std::max(r54, residual_jacobi_varpi(sp));
            Vec v_v(g.vdim());
            for (int a = 0; a < g.vdim(); ++a) v_v[a] = u(rng);
            r55 = std::max(r55, residual_jacobi_vertical(sp, v_v));
        }
        if (has_vertical) {
            SurfacePoint sp_ndf = SurfacePoint::at(g, ndf, nd.x, patch.spec().eps_char);
            rd10 = std::max(rd10, residual_ndf_connection(sp_ndf));
        }
    }

    std::vector<IdentityRow> rows;
    push_row(rows, "tangential-divergence-split", r31, tol);
    push_row(rows, "torsion-skew-part", r33, tol);
    push_row(rows, "shape-trace-square", r34, tol);
    push_row(rows, "dhs-bracket-coupling", r35, tol);
    if (heis) push_row(rows, "heisenberg-norm-split", r111, tol);
    push_row(rows, "laplacian-decomposition", r51, tol);
    push_row(rows, "support-function-jacobi", r53, tol);
    push_row(rows, "varpi-jacobi-field", r54, tol);
    push_row(rows, "vertical-combination-jacobi", r55, tol);
    push_row(rows, "ndf-horizontal-connection", rd10, tol);

    // Green formula on the patch with a centered bump.  Full-domain support
    // keeps the C^3 support boundary on the panel edges, where both the
    // midpoint and Gauss-Legendre rules keep their full order.
    {
        Vec lo = patch.spec().lo, hi = patch.spec().hi;
        TestFunction phi(0.5 * (lo + hi), 0.5 * (hi - lo), 1.0);
        std::vector<double> lhs_terms, rhs_terms;
        for (std::size_t i = 0; i < patch.nodes().size(); ++i) {
            const PatchNode& nd = patch.nodes()[i];
            if (nd.masked) continue;
            Jet2 wj = phi.jet(nd.u);
            if (wj.v == 0.0 && wj.d1.isZero(0.0)) continue;
            SurfacePoint sp = SurfacePoint::at(g, field, nd.x, patch.spec().eps_char);
            Jet2 amb = extend_along_graph_axis(wj, patch.graph_axis(), n);
            lhs_terms.push_back(-wj.v * l_hs(sp, amb) * nd.sigma_h * nd.w);
            rhs_terms.push_back(grad_hs(sp, amb).squaredNorm() * nd.sigma_h * nd.w);
        }
        double lhs = pairwise_sum(lhs_terms), rhs = pairwise_sum(rhs_terms);
        double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
        push_row(rows, "green-formula", rel, opt.use_fd ? 1e-4 : 1e-5);
    }
    return rows;
}

}  // namespace carnot
