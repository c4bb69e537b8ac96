#include "carnot/algebra.hpp"

#include <boost/rational.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

namespace carnot {

double pairwise_sum(const std::vector<double>& v) {
    // recursive cascade; base case small enough that plain order is stable
    struct Rec {
        static double run(const double* a, std::size_t n) {
            if (n <= 8) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += a[i];
                return s;
            }
            std::size_t m = n / 2;
            return run(a, m) + run(a + m, n - m);
        }
    };
    return Rec::run(v.data(), v.size());
}

std::string ValidationReport::to_string() const {
    if (issues.empty()) return "valid";
    std::ostringstream os;
    for (const auto& it : issues) {
        switch (it.kind) {
            case ValidationIssue::Kind::Shape: os << "ShapeError"; break;
            case ValidationIssue::Kind::SkewSymmetry: os << "SkewSymmetryViolation"; break;
            case ValidationIssue::Kind::Jacobi: os << "JacobiViolation"; break;
            case ValidationIssue::Kind::Grading: os << "GradingViolation"; break;
            case ValidationIssue::Kind::Generation: os << "GenerationFailure"; break;
        }
        os << " at (";
        bool first = true;
        for (int v : it.index) {
            if (v == 0) break;
            if (!first) os << ",";
            os << v;
            first = false;
        }
        os << ")";
        if (!it.detail.empty()) os << ": " << it.detail;
        os << "\n";
    }
    return os.str();
}

namespace {

std::vector<int> stratum_table(const std::vector<int>& strata) {
    std::vector<int> t;
    for (std::size_t s = 0; s < strata.size(); ++s)
        for (int c = 0; c < strata[s]; ++c) t.push_back(int(s) + 1);
    return t;
}

// Shared validation skeleton; Scalar is double or boost::rational<long long>.
template <class Scalar, class At, class IsZero>
void validate_core(const std::vector<int>& strata, int n, At at, IsZero is_zero,
                   ValidationReport& rep) {
    std::vector<int> strat = stratum_table(strata);
    const int k = int(strata.size());

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                if (!is_zero(at(i, j, r) + at(j, i, r))) {
                    rep.issues.push_back({ValidationIssue::Kind::SkewSymmetry,
                                          {i + 1, j + 1, r + 1, 0},
                                          ""});
                }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r) {
                if (is_zero(at(i, j, r))) continue;
                if (strat[r] != strat[i] + strat[j])
                    rep.issues.push_back({ValidationIssue::Kind::Grading,
                                          {i + 1, j + 1, r + 1, 0},
                                          "bracket lands outside stratum " +
                                              std::to_string(strat[i] + strat[j])});
            }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l)
                for (int r = 0; r < n; ++r) {
                    Scalar s{};
                    for (int m = 0; m < n; ++m)
                        s += at(i, j, m) * at(m, l, r) + at(j, l, m) * at(m, i, r) +
                             at(l, i, m) * at(m, j, r);
                    if (!is_zero(s))
                        rep.issues.push_back({ValidationIssue::Kind::Jacobi,
                                              {i + 1, j + 1, l + 1, r + 1},
                                              ""});
                }

    // Generation: [H_1, H_{s-1}] must span H_s, checked by rank over doubles.
    // (The exact path re-checks rank with fraction-free elimination.)
    (void)k;
}

int rank_double(const Mat& m, double tol) {
    if (m.size() == 0) return 0;
    Eigen::ColPivHouseholderQR<Mat> qr(m);
    qr.setThreshold(tol);
    return int(qr.rank());
}

}  // namespace

ValidationReport CarnotGroup::validate(const std::vector<int>& strata, const Tensor3& c,
                                       double tol) {
    ValidationReport rep;
    int n = 0;
    for (int hs : strata) n += hs;
    if (n == 0 || c.dim1() != n || c.dim2() != n || c.dim3() != n) {
        rep.issues.push_back({ValidationIssue::Kind::Shape, {0, 0, 0, 0},
                              "structure tensor must be n^3 with n = sum of strata dims"});
        return rep;
    }
    validate_core<double>(strata, n, [&](int i, int j, int r) { return c(i, j, r); },
                          [&](double v) { return std::abs(v) <= tol; }, rep);

    // generation condition, stratum by stratum
    std::vector<int> strat = stratum_table(strata);
    int offset = strata[0];
    for (std::size_t s = 1; s < strata.size(); ++s) {
        int hs = strata[s];
        int prev_begin = offset - strata[s - 1];
        std::vector<Vec> cols;
        for (int a = 0; a < strata[0]; ++a)
            for (int b = prev_begin; b < offset; ++b) {
                Vec v(hs);
                for (int r = 0; r < hs; ++r) v[r] = c(a, b, offset + r);
                cols.push_back(v);
            }
        Mat m(hs, int(cols.size()));
        for (std::size_t ci = 0; ci < cols.size(); ++ci) m.col(int(ci)) = cols[ci];
        if (rank_double(m, tol) < hs)
            rep.issues.push_back({ValidationIssue::Kind::Generation,
                                  {int(s) + 1, 0, 0, 0},
                                  "[H_1, H_" + std::to_string(s) + "] does not span H_" +
                                      std::to_string(s + 1)});
        offset += hs;
    }
    return rep;
}

ValidationReport CarnotGroup::validate_exact(
    const std::vector<int>& strata, const std::vector<std::vector<std::vector<Rational>>>& c) {
    using Q = boost::rational<long long>;
    ValidationReport rep;
    int n = 0;
    for (int hs : strata) n += hs;
    if (n == 0 || int(c.size()) != n) {
        rep.issues.push_back({ValidationIssue::Kind::Shape, {0, 0, 0, 0},
                              "structure tensor must be n^3 with n = sum of strata dims"});
        return rep;
    }
    auto at = [&](int i, int j, int r) { return Q(c[i][j][r].num, c[i][j][r].den); };
    validate_core<Q>(strata, n, at, [](const Q& v) { return v == Q(0); }, rep);

    // exact rank via fraction-free Gaussian elimination
    std::vector<int> strat = stratum_table(strata);
    int offset = strata[0];
    for (std::size_t s = 1; s < strata.size(); ++s) {
        int hs = strata[s];
        int prev_begin = offset - strata[s - 1];
        std::vector<std::vector<Q>> rows(hs);
        for (int a = 0; a < strata[0]; ++a)
            for (int b = prev_begin; b < offset; ++b)
                for (int r = 0; r < hs; ++r) rows[r].push_back(at(a, b, offset + r));
        // eliminate
        int rank = 0;
        std::size_t ncols = rows.empty() ? 0 : rows[0].size();
        std::size_t col = 0;
        while (rank < hs && col < ncols) {
            int piv = -1;
            for (int r = rank; r < hs; ++r)
                if (rows[r][col] != Q(0)) { piv = r; break; }
            if (piv < 0) { ++col; continue; }
            std::swap(rows[rank], rows[piv]);
            for (int r = rank + 1; r < hs; ++r) {
                if (rows[r][col] == Q(0)) continue;
                Q f = rows[r][col] / rows[rank][col];
                for (std::size_t cc = col; cc < ncols; ++cc) rows[r][cc] -= f * rows[rank][cc];
            }
            ++rank;
            ++col;
        }
        if (rank < hs)
            rep.issues.push_back({ValidationIssue::Kind::Generation,
                                  {int(s) + 1, 0, 0, 0},
                                  "[H_1, H_" + std::to_string(s) + "] does not span H_" +
                                      std::to_string(s + 1)});
        offset += hs;
    }
    return rep;
}

CarnotGroup::CarnotGroup(std::vector<int> strata, Tensor3 c)
    : strata_(std::move(strata)), c_(std::move(c)) {
    ValidationReport rep = validate(strata_, c_);
    if (!rep.ok()) throw GroupValidationError(rep.to_string());
    finalize();
}

void CarnotGroup::finalize() {
    n_ = 0;
    for (int hs : strata_) n_ += hs;
    k_ = int(strata_.size());
    h_ = strata_[0];
    stratum_of_ = stratum_table(strata_);
    q_ = 0;
    for (int s = 0; s < k_; ++s) q_ += (s + 1) * strata_[s];

    gamma_ = Tensor3(n_, n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int r = 0; r < n_; ++r)
                gamma_(i, j, r) = 0.5 * (c_(i, j, r) - c_(j, r, i) + c_(r, i, j));

    c_alpha_.clear();
    c_h_alpha_.clear();
    for (int alpha = h_; alpha < n_; ++alpha) {
        Mat full = Mat::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) full(i, j) = c_(i, j, alpha);
        c_alpha_.push_back(full);
        c_h_alpha_.push_back(full.topLeftCorner(h_, h_));
    }

    ad_basis_.clear();
    for (int p = 0; p < n_; ++p) {
        Mat m = Mat::Zero(n_, n_);
        for (int r = 0; r < n_; ++r)
            for (int j = 0; j < n_; ++j) m(r, j) = c_(p, j, r);
        ad_basis_.push_back(m);
    }
}

CarnotGroup CarnotGroup::heisenberg(int n) {
    Tensor3 c(2 * n + 1, 2 * n + 1, 2 * n + 1);
    for (int i = 0; i < n; ++i) {
        c(2 * i, 2 * i + 1, 2 * n) = 1.0;
        c(2 * i + 1, 2 * i, 2 * n) = -1.0;
    }
    return CarnotGroup({2 * n, 1}, std::move(c));
}

CarnotGroup CarnotGroup::abelian(int n) {
    return CarnotGroup({n}, Tensor3(n, n, n));
}

bool CarnotGroup::is_heisenberg() const {
    if (k_ != 2 || h_ % 2 != 0 || strata_[1] != 1) return false;
    int n = h_ / 2;
    Tensor3 ref(n_, n_, n_);
    for (int i = 0; i < n; ++i) {
        ref(2 * i, 2 * i + 1, 2 * n) = 1.0;
        ref(2 * i + 1, 2 * i, 2 * n) = -1.0;
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int r = 0; r < n_; ++r)
                if (std::abs(c_(i, j, r) - ref(i, j, r)) > 1e-14) return false;
    return true;
}

double CarnotGroup::riemann(int i, int j, int h, int k) const {
    double s = 0.0;
    for (int r = 0; r < n_; ++r)
        s += gamma_(i, h, r) * gamma_(j, r, k) - gamma_(j, h, r) * gamma_(i, r, k);
    for (int m = 0; m < n_; ++m) s -= c_(j, i, m) * gamma_(m, h, k);
    return s;
}

Vec CarnotGroup::dilate(double t, const Vec& x) const {
    if (!(t > 0.0)) throw NonPositiveScale("dilation requires t > 0, got t = " + std::to_string(t));
    Vec y(n_);
    for (int i = 0; i < n_; ++i) y[i] = std::pow(t, stratum_of_[i]) * x[i];
    return y;
}

Mat CarnotGroup::ad(const Vec& x) const {
    Mat m = Mat::Zero(n_, n_);
    for (int p = 0; p < n_; ++p)
        if (x[p] != 0.0) m += x[p] * ad_basis_[p];
    return m;
}

Frame CarnotGroup::frame(const Vec& x, int deriv_order) const {
    // d/dt|_0 of the BCH product x * exp(t v) equals F(ad x) v with
    // F(z) = z / (1 - e^{-z}) = sum_m B_m z^m / m!  (B_1 = +1/2).  The series
    // terminates at step k for nilpotent algebras, so the frame is exact.
    static const double coef[9] = {1.0,          0.5,  1.0 / 12.0, 0.0, -1.0 / 720.0,
                                   0.0, 1.0 / 30240.0, 0.0,        -1.0 / 1209600.0};
    if (k_ > 8) throw Error("frame series implemented for step <= 8");

    std::vector<Mat> pw;  // (ad x)^m for m = 0..k-1
    pw.push_back(Mat::Identity(n_, n_));
    if (k_ >= 2) {
        Mat adx = ad(x);
        for (int m = 1; m < k_; ++m) pw.push_back(adx * pw.back());
    }

    Frame fr;
    fr.A = Mat::Zero(n_, n_);
    for (int m = 0; m < k_; ++m) fr.A += coef[m] * pw[m];

    if (deriv_order >= 1) {
        fr.dA = Tensor3(n_, n_, n_);
        for (int p = 0; p < n_; ++p) {
            Mat d = Mat::Zero(n_, n_);
            for (int m = 1; m < k_; ++m)
                for (int a = 0; a <= m - 1; ++a) d += coef[m] * (pw[a] * ad_basis_[p] * pw[m - 1 - a]);
            for (int a = 0; a < n_; ++a)
                for (int i = 0; i < n_; ++i) fr.dA(p, a, i) = d(a, i);
        }
    }
    if (deriv_order >= 2) {
        fr.ddA = Tensor4(n_, n_, n_, n_);
        for (int p = 0; p < n_; ++p)
            for (int q = p; q < n_; ++q) {
                Mat d = Mat::Zero(n_, n_);
                for (int m = 2; m < k_; ++m)
                    for (int a = 0; a + 2 <= m; ++a)
                        for (int b = 0; a + b + 2 <= m; ++b) {
                            int cc = m - 2 - a - b;
                            d += coef[m] * (pw[a] * ad_basis_[p] * pw[b] * ad_basis_[q] * pw[cc]);
                            d += coef[m] * (pw[a] * ad_basis_[q] * pw[b] * ad_basis_[p] * pw[cc]);
                        }
                for (int a = 0; a < n_; ++a)
                    for (int i = 0; i < n_; ++i) {
                        fr.ddA(p, q, a, i) = d(a, i);
                        fr.ddA(q, p, a, i) = d(a, i);
                    }
            }
    }
    return fr;
}

}  // namespace carnot
