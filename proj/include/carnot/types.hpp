#ifndef CARNOT_TYPES_HPP
#define CARNOT_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 / rank-4 tensors with trivial flat storage.  Dimensions stay
// small (n <= ~10), so no attempt at symmetry compression.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int n1, int n2, int n3) : n1_(n1), n2_(n2), n3_(n3), a_(std::size_t(n1) * n2 * n3, 0.0) {}

    double& operator()(int i, int j, int k) { return a_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }

    int dim1() const { return n1_; }
    int dim2() const { return n2_; }
    int dim3() const { return n3_; }
    void setZero() { std::fill(a_.begin(), a_.end(), 0.0); }

private:
    std::size_t idx(int i, int j, int k) const { return (std::size_t(i) * n2_ + j) * n3_ + k; }
    int n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<double> a_;
};

class Tensor4 {
public:
    Tensor4() = default;
    Tensor4(int n1, int n2, int n3, int n4)
        : n1_(n1), n2_(n2), n3_(n3), n4_(n4), a_(std::size_t(n1) * n2 * n3 * n4, 0.0) {}

    double& operator()(int i, int j, int k, int l) { return a_[idx(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return a_[idx(i, j, k, l)]; }

    int dim1() const { return n1_; }
    void setZero() { std::fill(a_.begin(), a_.end(), 0.0); }

private:
    std::size_t idx(int i, int j, int k, int l) const {
        return ((std::size_t(i) * n2_ + j) * n3_ + k) * n4_ + l;
    }
    int n1_ = 0, n2_ = 0, n3_ = 0, n4_ = 0;
    std::vector<double> a_;
};

// Pairwise (cascade) summation: reproducible and accurate accumulation for
// quadrature sums regardless of node count.
double pairwise_sum(const std::vector<double>& v);

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GroupValidationError : Error { using Error::Error; };
struct NonPositiveScale : Error { using Error::Error; };
struct NonFiniteSample : Error { using Error::Error; };
struct InsufficientOrder : Error { using Error::Error; };
struct DegenerateDefiningFunction : Error { using Error::Error; };
struct CharacteristicPoint : Error { using Error::Error; };
struct CharacteristicNode : CharacteristicPoint { using CharacteristicPoint::CharacteristicPoint; };
struct NotHeisenberg : Error { using Error::Error; };
struct NotHMinimal : Error { using Error::Error; };
struct NotHMinimalOnPatch : Error { using Error::Error; };
struct DegenerateGram : Error { using Error::Error; };
struct NotHorizontalDirection : Error { using Error::Error; };
struct InvalidVerticalIndex : Error { using Error::Error; };
struct ChartSolveFailure : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace carnot

#endif
