#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "nhtp/kernels.hpp"

namespace nhtp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default upper bound on the number of stored dense entries (n^m).
inline constexpr std::size_t kDefaultDenseCap = 100'000'000;

/// n^m, or ResourceError when it exceeds `cap`.
std::size_t checked_entry_count(int order, int dim, std::size_t cap = kDefaultDenseCap);

/// base^exponent for a non-negative integer exponent; base^0 == 1 including 0^0.
double ipow(double base, int exponent);

/// Order-m, dimension-n tensor stored as the full row-major n^m array.
///
/// The flat position of (i1, ..., im) is i1*n^(m-1) + ... + im (zero-based).
/// Symmetry is not enforced on construction; use is_symmetric() to check it.
class DenseSymmetricTensor {
public:
    DenseSymmetricTensor(int order, int dim, std::vector<double> values);

    int order() const noexcept { return order_; }
    int dim() const noexcept { return dim_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double at(std::span<const int> index) const;

private:
    int order_;
    int dim_;
    std::vector<double> values_;
};

/// A = sum_k w_k (u_k)^m, factors stored as the columns of an n x r matrix.
class CpTensor {
public:
    CpTensor(int order, Matrix factors);
    CpTensor(int order, Matrix factors, Vector weights);

    int order() const noexcept { return order_; }
    int dim() const noexcept { return static_cast<int>(factors_.rows()); }
    int rank() const noexcept { return static_cast<int>(factors_.cols()); }
    const Matrix& factors() const noexcept { return factors_; }
    const Vector& weights() const noexcept { return weights_; }

private:
    int order_;
    Matrix factors_;
    Vector weights_;
};

/// Uniform access to a symmetric tensor in either representation.
class MultilinearOperator {
public:
    MultilinearOperator(DenseSymmetricTensor dense) : rep_(std::move(dense)) {}
    MultilinearOperator(CpTensor cp) : rep_(std::move(cp)) {}

    int order() const;
    int dim() const;

    bool is_cp() const noexcept { return std::holds_alternative<CpTensor>(rep_); }
    const CpTensor& cp() const { return std::get<CpTensor>(rep_); }
    const DenseSymmetricTensor& dense() const { return std::get<DenseSymmetricTensor>(rep_); }

private:
    std::variant<DenseSymmetricTensor, CpTensor> rep_;
};

/// A x^{m-1}.
Vector contract_to_vector(const MultilinearOperator& A, const Vector& x,
                          kernels::Policy policy = kernels::Policy::parallel);

/// A x^{m-2} as a symmetric n x n matrix; for m = 2 this is A itself.
Matrix contract_to_matrix(const MultilinearOperator& A, const Vector& x,
                          kernels::Policy policy = kernels::Policy::parallel);

/// W_ij = sum_k (A x^{m-3})_ijk r_k. Requires m >= 3.
Matrix contract_order3_with(const MultilinearOperator& A, const Vector& x, const Vector& r,
                            kernels::Policy policy = kernels::Policy::parallel);

/// Frobenius norm. CP operators go through cp_to_dense when n^m <= cap and
/// through the Gram identity otherwise.
double frobenius_norm(const MultilinearOperator& A, std::size_t cap = kDefaultDenseCap);

/// sqrt(sum_{k,l} w_k w_l (u_k . u_l)^m); exact for any size.
double frobenius_norm_gram(const CpTensor& cp);

DenseSymmetricTensor identity_tensor(int order, int dim);

DenseSymmetricTensor cp_to_dense(const CpTensor& cp, std::size_t cap = kDefaultDenseCap);

/// Broadcasts raw[sorted(i1..im)] to every permutation of (i1..im).
DenseSymmetricTensor symmetrize(std::span<const double> raw, int order, int dim);

/// max over index permutations of |a_p - a_q| <= tol.
bool is_symmetric(const DenseSymmetricTensor& A, double tol);

/// Flat row-major position of the nondecreasing rearrangement of the
/// multi-index stored at `flat`.
std::size_t sorted_flat_index(std::size_t flat, int order, int dim);

}  // namespace nhtp
