#ifndef CARNOT_ALGEBRA_HPP
#define CARNOT_ALGEBRA_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "carnot/types.hpp"

namespace carnot {

// Exact rational coefficient for the exact-arithmetic validation path.
struct Rational {
    long long num = 0;
    long long den = 1;
};

struct ValidationIssue {
    enum class Kind { Shape, SkewSymmetry, Jacobi, Grading, Generation };
    Kind kind;
    std::array<int, 4> index{0, 0, 0, 0};  // 1-based in diagnostics
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Left-invariant frame data at a point, in exponential coordinates of the
// 1st kind.  Column i of A holds the coordinate components of X_i; dA and
// ddA hold the exact polynomial derivatives: dA(p,a,i) = d_p A(a,i),
// ddA(p,q,a,i) = d_p d_q A(a,i).
struct Frame {
    Mat A;
    Tensor3 dA;
    Tensor4 ddA;
};

// A k-step stratified (Carnot) group in exponential coordinates.
// Basis ordering is stratum-major and fixed at construction; indices are
// 0-based throughout the API, 1-based in printed diagnostics.
class CarnotGroup {
public:
    // Throws GroupValidationError when the structure tensor violates an axiom.
    CarnotGroup(std::vector<int> strata_dims, Tensor3 structure);

    static ValidationReport validate(const std::vector<int>& strata_dims, const Tensor3& structure,
                                     double tol = 1e-12);
    // Exact path for rational structural constants (spec decision D2).
    static ValidationReport validate_exact(const std::vector<int>& strata_dims,
                                           const std::vector<std::vector<std::vector<Rational>>>& structure);

    static CarnotGroup heisenberg(int n);
    static CarnotGroup abelian(int n);

    int dim() const { return n_; }
    int step() const { return k_; }
    int hdim() const { return h_; }
    int h2dim() const { return k_ >= 2 ? strata_[1] : 0; }
    int vdim() const { return n_ - h_; }
    int homogeneous_dimension() const { return q_; }
    const std::vector<int>& strata_dims() const { return strata_; }

    // Stratum of basis vector i (1-based stratum number).
    int stratum_of(int i) const { return stratum_of_[i]; }
    bool is_horizontal(int i) const { return i < h_; }

    double structure(int i, int j, int r) const { return c_(i, j, r); }
    const Tensor3& structure_tensor() const { return c_; }

    // n x n matrix C^alpha for a vertical index alpha (alpha in [h, n)).
    const Mat& c_alpha(int alpha) const { return c_alpha_[alpha - h_]; }
    // h x h horizontal block of C^alpha.
    const Mat& c_h_alpha(int alpha) const { return c_h_alpha_[alpha - h_]; }

    // Levi-Civita connection coefficient Gamma(i,j,r) = <nabla_{X_i} X_j, X_r>.
    double gamma(int i, int j, int r) const { return gamma_(i, j, r); }
    const Tensor3& connection_coefficients() const { return gamma_; }

    // <R(X_i,X_j)X_h, X_k> with R(X,Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z
    // - nabla_{[Y,X]} Z.  Constant over the group.
    double riemann(int i, int j, int h, int k) const;

    // Anisotropic dilation delta_t; coordinate in stratum s scales by t^s.
    Vec dilate(double t, const Vec& x) const;

    // Frame with exact derivatives up to deriv_order (0, 1 or 2).
    Frame frame(const Vec& x, int deriv_order = 2) const;

    // ad x as an n x n matrix: (ad x)(r,j) = <[x, X_j], X_r>.
    Mat ad(const Vec& x) const;

    bool is_heisenberg() const;

private:
    void finalize();

    int n_ = 0, k_ = 0, h_ = 0, q_ = 0;
    std::vector<int> strata_;
    std::vector<int> stratum_of_;
    Tensor3 c_;
    Tensor3 gamma_;
    std::vector<Mat> c_alpha_;
    std::vector<Mat> c_h_alpha_;
    std::vector<Mat> ad_basis_;  // M_p(r,j) = C(p,j,r)
};

}  // namespace carnot

#endif
