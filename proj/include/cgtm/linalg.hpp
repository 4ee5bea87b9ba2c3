#pragma once

/**
 * @file linalg.hpp
 * @brief Dense component tensors over a fixed dimension, and small matrix helpers.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "cgtm/errors.hpp"
#include "cgtm/jet.hpp"

namespace cgtm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Components T[i0][i1]...[i(rank-1)], every index in [0, n). Row-major.
template <class S>
class Tensor {
public:
    Tensor() = default;
    Tensor(int n, int rank, const S& fill = S{}) : n_(n), rank_(rank) {
        std::size_t size = 1;
        for (int r = 0; r < rank; ++r) size *= static_cast<std::size_t>(n);
        data_.assign(size, fill);
    }

    int dim() const { return n_; }
    int rank() const { return rank_; }
    std::size_t size() const { return data_.size(); }

    template <class... I>
    S& operator()(I... idx) {
        return data_[offset(idx...)];
    }
    template <class... I>
    const S& operator()(I... idx) const {
        return data_[offset(idx...)];
    }

    const S& at(const std::vector<int>& idx) const {
        std::size_t k = 0;
        for (int i : idx) k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return data_[k];
    }

    S& at_flat(std::size_t k) { return data_[k]; }
    const S& at_flat(std::size_t k) const { return data_[k]; }

    /// Multi-index of flat position k.
    std::vector<int> unflatten(std::size_t k) const {
        std::vector<int> idx(rank_);
        for (int r = rank_ - 1; r >= 0; --r) {
            idx[r] = static_cast<int>(k % n_);
            k /= n_;
        }
        return idx;
    }

    std::vector<S>& data() { return data_; }
    const std::vector<S>& data() const { return data_; }

    template <class F>
    auto map(F&& f) const {
        using T = std::decay_t<decltype(f(data_[0]))>;
        Tensor<T> out;
        out.n_ = n_;
        out.rank_ = rank_;
        out.data_.reserve(data_.size());
        for (const auto& v : data_) out.data_.push_back(f(v));
        return out;
    }

private:
    template <class... I>
    std::size_t offset(I... idx) const {
        static_assert(sizeof...(I) > 0);
        std::size_t k = 0;
        ((k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
        return k;
    }

    int n_ = 0;
    int rank_ = 0;
    std::vector<S> data_;

    template <class>
    friend class Tensor;
};

inline double max_abs(const Tensor<double>& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

inline double frobenius(const Tensor<double>& t) {
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return std::sqrt(s);
}

inline double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.at_flat(k) - b.at_flat(k)));
    return m;
}

template <int N>
Tensor<double> values(const Tensor<Jet<N>>& t) {
    return t.map([](const Jet<N>& j) { return j.value(); });
}

/// Relative deviation with denominator max(1, |a|, |b|).
inline double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// LU inverse; throws SingularMetric when |det| < 1e-14.
inline Mat checked_inverse(const Mat& m, const char* what = "metric") {
    Eigen::PartialPivLU<Mat> lu(m);
    const double det = lu.determinant();
    if (!(std::abs(det) >= 1e-14))
        throw SingularMetric(std::string(what) + " determinant " + std::to_string(det) + " below 1e-14");
    return lu.inverse();
}

/**
 * Inverse of a jet-valued square matrix. Starting from the inverse of the
 * value part, each Newton step X <- X(2I - AX) doubles the vanishing order
 * of the residual, so ceil(log2(Order+1)) steps are exact.
 */
template <int N>
Tensor<Jet<N>> jet_inverse(const Tensor<Jet<N>>& a, const Mat& value_inverse) {
    const int n = a.dim();
    const int nv = a(0, 0).nvars();
    Tensor<Jet<N>> x(n, 2, Jet<N>(nv, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = Jet<N>(nv, value_inverse(i, j));
    for (int step = 1; step <= N; step *= 2) {
        Tensor<Jet<N>> ax(n, 2, Jet<N>(nv, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) ax(i, j) += a(i, k) * x(k, j);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) ax(i, j) = -ax(i, j);
            ax(i, i) += 2.0;
        }
        Tensor<Jet<N>> next(n, 2, Jet<N>(nv, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) next(i, j) += x(i, k) * ax(k, j);
        x = std::move(next);
    }
    return x;
}

inline Mat to_matrix(const Tensor<double>& t) {
    Mat m(t.dim(), t.dim());
    for (int i = 0; i < t.dim(); ++i)
        for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j);
    return m;
}

inline Tensor<double> to_tensor(const Mat& m) {
    Tensor<double> t(static_cast<int>(m.rows()), 2, 0.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
    return t;
}

}  // namespace cgtm
