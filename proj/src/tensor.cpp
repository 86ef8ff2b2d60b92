#include "nhtp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhtp/errors.hpp"

namespace nhtp {

namespace {

void require_dim(const MultilinearOperator& A, const Vector& v, const char* what) {
    if (v.size() != A.dim())
        throw InputError(std::string(what) + ": vector length " + std::to_string(v.size()) +
                         " does not match tensor dimension " + std::to_string(A.dim()));
}

std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

Matrix square_from_flat(const std::vector<double>& flat, int n) {
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = flat[static_cast<std::size_t>(i) * n + j];
    return M;
}

// U diag(c) U^T, symmetrized to remove rounding asymmetry.
Matrix weighted_gram(const Matrix& U, const Vector& c) {
    Matrix M = U * c.asDiagonal() * U.transpose();
    return 0.5 * (M + M.transpose());
}

}  // namespace

std::size_t checked_entry_count(int order, int dim, std::size_t cap) {
    if (order < 2) throw InputError("tensor order must be >= 2");
    if (dim < 1) throw InputError("tensor dimension must be >= 1");
    std::size_t count = 1;
    for (int k = 0; k < order; ++k) {
        if (count > cap / static_cast<std::size_t>(dim))
            throw ResourceError("dense tensor with n=" + std::to_string(dim) +
                                ", m=" + std::to_string(order) + " exceeds the cap of " +
                                std::to_string(cap) + " entries");
        count *= static_cast<std::size_t>(dim);
    }
    return count;
}

double ipow(double base, int exponent) {
    double result = 1.0;
    for (int k = 0; k < exponent; ++k) result *= base;
    return result;
}

DenseSymmetricTensor::DenseSymmetricTensor(int order, int dim, std::vector<double> values)
    : order_(order), dim_(dim), values_(std::move(values)) {
    const std::size_t expected =
        checked_entry_count(order, dim, std::numeric_limits<std::size_t>::max());
    if (values_.size() != expected)
        throw InputError("dense tensor expects " + std::to_string(expected) +
                         " values, got " + std::to_string(values_.size()));
}

double DenseSymmetricTensor::at(std::span<const int> index) const {
    if (static_cast<int>(index.size()) != order_)
        throw InputError("multi-index length does not match tensor order");
    std::size_t flat = 0;
    for (int i : index) {
        if (i < 0 || i >= dim_) throw InputError("multi-index entry out of range");
        flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    }
    return values_[flat];
}

CpTensor::CpTensor(int order, Matrix factors)
    : CpTensor(order, std::move(factors), Vector()) {}

CpTensor::CpTensor(int order, Matrix factors, Vector weights)
    : order_(order), factors_(std::move(factors)), weights_(std::move(weights)) {
    if (order_ < 2) throw InputError("tensor order must be >= 2");
    if (factors_.rows() < 1) throw InputError("CP factors must have length >= 1");
    if (factors_.cols() < 1) throw InputError("CP tensor needs at least one factor");
    if (weights_.size() == 0) weights_ = Vector::Ones(factors_.cols());
    if (weights_.size() != factors_.cols())
        throw InputError("CP weights length does not match the number of factors");
}

int MultilinearOperator::order() const {
    return std::visit([](const auto& t) { return t.order(); }, rep_);
}

int MultilinearOperator::dim() const {
    return std::visit([](const auto& t) { return t.dim(); }, rep_);
}

Vector contract_to_vector(const MultilinearOperator& A, const Vector& x, kernels::Policy policy) {
    require_dim(A, x, "contract_to_vector");
    const int m = A.order();
    if (A.is_cp()) {
        const CpTensor& cp = A.cp();
        const Vector t = cp.factors().transpose() * x;
        Vector c(t.size());
        for (Eigen::Index k = 0; k < t.size(); ++k) c[k] = cp.weights()[k] * ipow(t[k], m - 1);
        return cp.factors() * c;
    }
    const auto flat = kernels::contract_repeated(A.dense().values(), as_span(x), m - 1, policy);
    return Eigen::Map<const Vector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

Matrix contract_to_matrix(const MultilinearOperator& A, const Vector& x, kernels::Policy policy) {
    require_dim(A, x, "contract_to_matrix");
    const int m = A.order();
    if (A.is_cp()) {
        const CpTensor& cp = A.cp();
        const Vector t = cp.factors().transpose() * x;
        Vector c(t.size());
        for (Eigen::Index k = 0; k < t.size(); ++k) c[k] = cp.weights()[k] * ipow(t[k], m - 2);
        return weighted_gram(cp.factors(), c);
    }
    return square_from_flat(kernels::contract_repeated(A.dense().values(), as_span(x), m - 2, policy),
                            A.dim());
}

Matrix contract_order3_with(const MultilinearOperator& A, const Vector& x, const Vector& r,
                            kernels::Policy policy) {
    require_dim(A, x, "contract_order3_with");
    require_dim(A, r, "contract_order3_with");
    const int m = A.order();
    if (m < 3)
        throw UnsupportedOrderError("contract_order3_with needs order >= 3, got " +
                                    std::to_string(m));
    if (A.is_cp()) {
        const CpTensor& cp = A.cp();
        const Vector t = cp.factors().transpose() * x;
        const Vector q = cp.factors().transpose() * r;
        Vector c(t.size());
        for (Eigen::Index k = 0; k < t.size(); ++k)
            c[k] = cp.weights()[k] * ipow(t[k], m - 3) * q[k];
        return weighted_gram(cp.factors(), c);
    }
    // Contract r into the last mode, then m-3 copies of x; symmetry makes the
    // mode order irrelevant.
    const auto& dense = A.dense();
    const std::size_t n = static_cast<std::size_t>(A.dim());
    std::vector<double> with_r(dense.size() / n);
    kernels::contract_last_mode(dense.values(), as_span(r), with_r, policy);
    return square_from_flat(kernels::contract_repeated(with_r, as_span(x), m - 3, policy), A.dim());
}

double frobenius_norm_gram(const CpTensor& cp) {
    const Matrix G = cp.factors().transpose() * cp.factors();
    const Vector& w = cp.weights();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < G.rows(); ++k)
        for (Eigen::Index l = 0; l < G.cols(); ++l) acc += w[k] * w[l] * ipow(G(k, l), cp.order());
    return std::sqrt(std::max(acc, 0.0));
}

double frobenius_norm(const MultilinearOperator& A, std::size_t cap) {
    if (A.is_cp()) {
        const CpTensor& cp = A.cp();
        bool fits = true;
        try {
            checked_entry_count(cp.order(), cp.dim(), cap);
        } catch (const ResourceError&) {
            fits = false;
        }
        if (!fits) return frobenius_norm_gram(cp);
        return std::sqrt(kernels::sum_of_squares(cp_to_dense(cp, cap).values(),
                                                 kernels::Policy::parallel));
    }
    return std::sqrt(kernels::sum_of_squares(A.dense().values(), kernels::Policy::parallel));
}

DenseSymmetricTensor identity_tensor(int order, int dim) {
    const std::size_t count = checked_entry_count(order, dim);
    std::vector<double> values(count, 0.0);
    // Stride between consecutive diagonal entries: 1 + n + ... + n^(m-1).
    std::size_t stride = 0;
    std::size_t power = 1;
    for (int k = 0; k < order; ++k) {
        stride += power;
        power *= static_cast<std::size_t>(dim);
    }
    for (int i = 0; i < dim; ++i) values[static_cast<std::size_t>(i) * stride] = 1.0;
    return {order, dim, std::move(values)};
}

DenseSymmetricTensor cp_to_dense(const CpTensor& cp, std::size_t cap) {
    const int m = cp.order();
    const int n = cp.dim();
    const std::size_t count = checked_entry_count(m, n, cap);
    std::vector<double> values(count, 0.0);
    std::vector<double> power;
    std::vector<double> next;
    for (int k = 0; k < cp.rank(); ++k) {
        const auto u = cp.factors().col(k);
        // Build u^{(x)m} by repeated Kronecker products in row-major order.
        power.assign(u.data(), u.data() + n);
        for (int level = 1; level < m; ++level) {
            next.resize(power.size() * static_cast<std::size_t>(n));
            for (std::size_t p = 0; p < power.size(); ++p)
                for (int j = 0; j < n; ++j)
                    next[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
                        power[p] * u[j];
            power.swap(next);
        }
        const double w = cp.weights()[k];
        for (std::size_t p = 0; p < count; ++p) values[p] += w * power[p];
    }
    // Products are rounded in index order; copy each sorted entry so that
    // permuted entries are bit-identical.
    for (std::size_t p = 0; p < count; ++p) values[p] = values[sorted_flat_index(p, m, n)];
    return {m, n, std::move(values)};
}

std::size_t sorted_flat_index(std::size_t flat, int order, int dim) {
    std::vector<int> digits(static_cast<std::size_t>(order));
    for (int k = order - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = static_cast<int>(flat % static_cast<std::size_t>(dim));
        flat /= static_cast<std::size_t>(dim);
    }
    std::sort(digits.begin(), digits.end());
    std::size_t out = 0;
    for (int d : digits) out = out * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d);
    return out;
}

DenseSymmetricTensor symmetrize(std::span<const double> raw, int order, int dim) {
    const std::size_t count = checked_entry_count(order, dim);
    if (raw.size() != count)
        throw InputError("symmetrize expects " + std::to_string(count) + " values, got " +
                         std::to_string(raw.size()));
    std::vector<double> values(count);
    for (std::size_t f = 0; f < count; ++f) values[f] = raw[sorted_flat_index(f, order, dim)];
    return {order, dim, std::move(values)};
}

bool is_symmetric(const DenseSymmetricTensor& A, double tol) {
    const std::size_t count = A.size();
    const auto values = A.values();
    std::vector<double> lo(count, std::numeric_limits<double>::infinity());
    std::vector<double> hi(count, -std::numeric_limits<double>::infinity());
    for (std::size_t f = 0; f < count; ++f) {
        const std::size_t rep = sorted_flat_index(f, A.order(), A.dim());
        lo[rep] = std::min(lo[rep], values[f]);
        hi[rep] = std::max(hi[rep], values[f]);
    }
    for (std::size_t f = 0; f < count; ++f)
        if (hi[f] >= lo[f] && !(hi[f] - lo[f] <= tol)) return false;
    return true;
}

}  // namespace nhtp
