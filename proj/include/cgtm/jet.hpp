#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor polynomials ("jets").
 *
 * A Jet<Order> over n variables stores every Taylor coefficient
 * d^a f / a! with |a| <= Order. Monomials are ordered by degree, then
 * lexicographically by their nondecreasing variable-index tuple:
 *
 *   1, x0, x1, ..., x0x0, x0x1, ..., x0x0x0, ...
 *
 * With divided (Taylor) coefficients, multiplication is a truncated
 * Cauchy product. Raw partial derivatives are available through
 * Jet::partial(). Smooth univariate functions are applied by composing
 * their Taylor series at the value with the nilpotent part of the jet,
 * which is exact through Order.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cgtm/errors.hpp"

namespace cgtm {

namespace detail {

inline double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Monomial bookkeeping shared by every jet with the same (nvars, order).
struct JetLayout {
    int nvars = 0;
    int order = 0;
    std::vector<std::vector<int>> exponents;  // per monomial, length nvars
    std::vector<int> degree;
    std::map<std::vector<int>, int> index_of;
    // (a, b, c): coeff[c] += lhs[a] * rhs[b]
    std::vector<std::array<int, 3>> products;
    // derivative[v]: (target index in order-1 layout, source index, factor)
    std::vector<std::vector<std::tuple<int, int, double>>> derivative;

    JetLayout(int n, int ord) : nvars(n), order(ord) {
        std::vector<int> tuple;
        for (int d = 0; d <= ord; ++d) enumerate(d, 0, tuple);
        degree.reserve(exponents.size());
        for (std::size_t i = 0; i < exponents.size(); ++i) {
            int s = 0;
            for (int e : exponents[i]) s += e;
            degree.push_back(s);
            index_of.emplace(exponents[i], static_cast<int>(i));
        }
        std::vector<int> e(n);
        for (std::size_t a = 0; a < exponents.size(); ++a) {
            for (std::size_t b = 0; b < exponents.size(); ++b) {
                if (degree[a] + degree[b] > ord) continue;
                for (int v = 0; v < n; ++v) e[v] = exponents[a][v] + exponents[b][v];
                products.push_back({static_cast<int>(a), static_cast<int>(b), index_of.at(e)});
            }
        }
    }

    int size() const { return static_cast<int>(exponents.size()); }

private:
    void enumerate(int remaining, int start, std::vector<int>& tuple) {
        if (remaining == 0) {
            std::vector<int> e(nvars, 0);
            for (int v : tuple) ++e[v];
            exponents.push_back(std::move(e));
            return;
        }
        for (int v = start; v < nvars; ++v) {
            tuple.push_back(v);
            enumerate(remaining - 1, v, tuple);
            tuple.pop_back();
        }
    }
};

inline std::shared_ptr<const JetLayout> jet_layout(int nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(nvars, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto layout = std::make_shared<const JetLayout>(nvars, order);
    cache.emplace(key, layout);
    return layout;
}

/// Derivative tables from an order-k layout into the order-(k-1) layout.
inline const std::vector<std::tuple<int, int, double>>& derivative_table(const JetLayout& from,
                                                                         const JetLayout& to, int var) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::vector<std::tuple<int, int, double>>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(from.nvars, from.order, var);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::tuple<int, int, double>> table;
    for (int src = 0; src < from.size(); ++src) {
        const auto& e = from.exponents[src];
        if (e[var] == 0) continue;
        std::vector<int> t = e;
        --t[var];
        auto found = to.index_of.find(t);
        if (found == to.index_of.end()) continue;
        table.emplace_back(found->second, src, static_cast<double>(e[var]));
    }
    return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace detail

template <int Order>
class Jet {
    static_assert(Order >= 0, "jet order must be non-negative");

public:
    static constexpr int order = Order;

    Jet() = default;

    /// Constant jet over `nvars` variables.
    explicit Jet(int nvars, double value = 0.0)
        : layout_(detail::jet_layout(nvars, Order)), coeffs_(layout_->size(), 0.0) {
        coeffs_[0] = value;
    }

    /// The coordinate function x_index evaluated at `value`.
    static Jet variable(int nvars, int index, double value) {
        if (index < 0 || index >= nvars) throw std::out_of_range("jet variable index out of range");
        Jet j(nvars, value);
        if constexpr (Order >= 1) j.coeffs_[1 + index] = 1.0;
        return j;
    }

    /// Seeds one jet per coordinate of `point`.
    static std::vector<Jet> variables(std::span<const double> point) {
        std::vector<Jet> out;
        const int n = static_cast<int>(point.size());
        out.reserve(point.size());
        for (int i = 0; i < n; ++i) out.push_back(variable(n, i, point[i]));
        return out;
    }

    bool empty() const { return !layout_; }
    int nvars() const { return layout_ ? layout_->nvars : 0; }
    int size() const { return static_cast<int>(coeffs_.size()); }
    double value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }

    std::span<const double> coefficients() const { return coeffs_; }
    double coefficient(int k) const { return coeffs_.at(k); }
    double& coefficient(int k) { return coeffs_.at(k); }
    const std::vector<int>& exponents(int k) const { return layout_->exponents.at(k); }
    int degree(int k) const { return layout_->degree.at(k); }

    /// Raw partial derivative d^|idx| f / dx_idx[0] dx_idx[1] ...
    double partial(std::initializer_list<int> idx) const {
        return partial(std::span<const int>(idx.begin(), idx.size()));
    }

    double partial(std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) > Order) throw std::out_of_range("partial order exceeds jet order");
        std::vector<int> e(nvars(), 0);
        for (int v : idx) {
            if (v < 0 || v >= nvars()) throw std::out_of_range("partial index out of range");
            ++e[v];
        }
        double scale = 1.0;
        for (int k : e) scale *= detail::factorial(k);
        return coeffs_[layout_->index_of.at(e)] * scale;
    }

    /// Exact derivative with respect to one variable, losing one order.
    Jet<(Order > 0 ? Order - 1 : 0)> derivative(int var) const
        requires(Order > 0)
    {
        Jet<Order - 1> out(nvars(), 0.0);
        const auto& to = *detail::jet_layout(nvars(), Order - 1);
        for (auto [t, s, f] : detail::derivative_table(*layout_, to, var)) out.coefficient(t) += f * coeffs_[s];
        return out;
    }

    /// Drop every coefficient above `Lower`.
    template <int Lower>
    Jet<Lower> truncate() const {
        static_assert(Lower <= Order);
        Jet<Lower> out(nvars(), 0.0);
        for (int k = 0; k < out.size(); ++k) out.coefficient(k) = coeffs_[k];
        return out;
    }

    /// Re-express over `new_nvars` variables; variable v becomes map[v].
    Jet embed(int new_nvars, std::span<const int> map) const {
        Jet out(new_nvars, 0.0);
        const auto& target = *out.layout_;
        std::vector<int> e(new_nvars);
        for (int k = 0; k < size(); ++k) {
            if (coeffs_[k] == 0.0) continue;
            std::fill(e.begin(), e.end(), 0);
            const auto& src = layout_->exponents[k];
            for (int v = 0; v < nvars(); ++v) e[map[v]] += src[v];
            out.coeffs_[target.index_of.at(e)] += coeffs_[k];
        }
        return out;
    }

    Jet& operator+=(const Jet& o) {
        check(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }
    Jet& operator+=(double s) {
        coeffs_[0] += s;
        return *this;
    }
    Jet& operator-=(double s) {
        coeffs_[0] -= s;
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }
    Jet& operator/=(double s) {
        for (double& c : coeffs_) c /= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a /= s; }
    friend Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }
    friend Jet operator-(Jet a) {
        for (double& c : a.coeffs_) c = -c;
        return a;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check(b);
        Jet out(a.nvars(), 0.0);
        for (auto [i, j, k] : a.layout_->products) out.coeffs_[k] += a.coeffs_[i] * b.coeffs_[j];
        return out;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

    friend Jet reciprocal(const Jet& a) {
        const double v = a.value();
        if (v == 0.0) throw DomainError("division by zero");
        // 1/x derivatives: (-1)^k k! / x^(k+1); Taylor coefficient (-1)^k / x^(k+1)
        std::array<double, Order + 1> series{};
        double p = 1.0 / v;
        for (int k = 0; k <= Order; ++k) {
            series[k] = (k % 2 == 0 ? p : -p);
            p /= v;
        }
        return compose(a, series);
    }

    /**
     * Apply a univariate function given its Taylor coefficients
     * series[k] = f^(k)(a0) / k! at the jet's value a0.
     */
    friend Jet compose(const Jet& a, const std::array<double, Order + 1>& series) {
        Jet h = a;
        h.coeffs_[0] = 0.0;
        Jet out(a.nvars(), series[0]);
        Jet power(a.nvars(), 1.0);
        for (int k = 1; k <= Order; ++k) {
            power = power * h;
            for (std::size_t c = 0; c < out.coeffs_.size(); ++c) out.coeffs_[c] += series[k] * power.coeffs_[c];
        }
        return out;
    }

    friend bool operator==(const Jet& a, const Jet& b) {
        return a.nvars() == b.nvars() && a.coeffs_ == b.coeffs_;
    }

private:
    void check(const Jet& o) const {
        if (layout_ != o.layout_) throw std::invalid_argument("jet variable counts differ");
    }

    std::shared_ptr<const detail::JetLayout> layout_;
    std::vector<double> coeffs_;

    template <int>
    friend class Jet;
};

using Jet3 = Jet<3>;

// ---------------------------------------------------------------------------
// Elementary functions. Each builds the Taylor series of f at the value.
// ---------------------------------------------------------------------------

template <int N>
Jet<N> exp(const Jet<N>& a) {
    std::array<double, N + 1> s{};
    const double e = std::exp(a.value());
    for (int k = 0; k <= N; ++k) s[k] = e / detail::factorial(k);
    return compose(a, s);
}

template <int N>
Jet<N> log(const Jet<N>& a) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("log of non-positive value");
    std::array<double, N + 1> s{};
    s[0] = std::log(v);
    double p = 1.0 / v;
    for (int k = 1; k <= N; ++k) {
        s[k] = (k % 2 == 1 ? p : -p) / k;
        p /= v;
    }
    return compose(a, s);
}

/// Real power via the binomial series; requires a positive base.
template <int N>
Jet<N> pow_real(const Jet<N>& a, double r) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("real power of non-positive value");
    std::array<double, N + 1> s{};
    double coef = 1.0;
    for (int k = 0; k <= N; ++k) {
        s[k] = coef * std::pow(v, r - k);
        coef *= (r - k) / (k + 1);
    }
    return compose(a, s);
}

/// Integer power by repeated squaring; negative exponents go through the reciprocal.
template <int N>
Jet<N> pow_int(const Jet<N>& a, long long e) {
    if (e < 0) return pow_int(reciprocal(a), -e);
    Jet<N> result(a.nvars(), 1.0);
    Jet<N> base = a;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

template <int N>
Jet<N> pow(const Jet<N>& a, double r) {
    if (std::nearbyint(r) == r && std::abs(r) < 1e9) return pow_int(a, static_cast<long long>(r));
    return pow_real(a, r);
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
    if (!(a.value() > 0.0)) throw DomainError("sqrt of non-positive value");
    return pow_real(a, 0.5);
}

namespace detail {

// Taylor coefficients of sin/cos at v: derivatives cycle with period 4.
template <int N>
std::array<double, N + 1> trig_series(double v, bool cosine) {
    const double sv = std::sin(v), cv = std::cos(v);
    const std::array<double, 4> sin_cycle{sv, cv, -sv, -cv};
    const std::array<double, 4> cos_cycle{cv, -sv, -cv, sv};
    std::array<double, N + 1> s{};
    for (int k = 0; k <= N; ++k) s[k] = (cosine ? cos_cycle : sin_cycle)[k % 4] / factorial(k);
    return s;
}

template <int N>
std::array<double, N + 1> hyp_series(double v, bool cosine) {
    const double sv = std::sinh(v), cv = std::cosh(v);
    std::array<double, N + 1> s{};
    for (int k = 0; k <= N; ++k) {
        const bool even = k % 2 == 0;
        s[k] = (even == cosine ? cv : sv) / factorial(k);
    }
    return s;
}

}  // namespace detail

template <int N>
Jet<N> sin(const Jet<N>& a) {
    return compose(a, detail::trig_series<N>(a.value(), false));
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
    return compose(a, detail::trig_series<N>(a.value(), true));
}

template <int N>
Jet<N> tan(const Jet<N>& a) {
    if (std::abs(std::cos(a.value())) < 1e-300) throw DomainError("tan at a pole");
    return sin(a) / cos(a);
}

template <int N>
Jet<N> sinh(const Jet<N>& a) {
    return compose(a, detail::hyp_series<N>(a.value(), false));
}

template <int N>
Jet<N> cosh(const Jet<N>& a) {
    return compose(a, detail::hyp_series<N>(a.value(), true));
}

template <int N>
Jet<N> tanh(const Jet<N>& a) {
    return sinh(a) / cosh(a);
}

template <int N>
Jet<N> abs(const Jet<N>& a) {
    const double v = a.value();
    if (v == 0.0 && N > 0) throw DomainError("abs is not differentiable at zero");
    return v < 0.0 ? -a : a;
}

}  // namespace cgtm
