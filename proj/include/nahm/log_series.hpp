#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "nahm/frame_algebra.hpp"

namespace nahm {

// Coefficient helpers so one template serves scalars and matrices.
inline double coeff_norm(double v) { return std::abs(v); }
inline double coeff_norm(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }
inline bool coeff_is_zero(double v) { return v == 0.0; }
inline bool coeff_is_zero(const Mat3& m) { return (m.array() == 0.0).all(); }

/// Truncated sum of c_{k,l} x^k (log x)^l, integer k in [kmin, order], l >= 0.
/// Terms above `order` are unknown, not zero: products and derivatives
/// shrink the order accordingly.
template <class T>
class LogSeries {
public:
    using Key = std::pair<int, int>;

    LogSeries(int kmin, int order, T zero) : kmin_(kmin), order_(order), zero_(std::move(zero)) {
        if (order < kmin) order_ = kmin - 1;  // empty: nothing known
    }

    static LogSeries constant(const T& v, int order, const T& zero) {
        LogSeries s(0, order, zero);
        s.set(0, 0, v);
        return s;
    }

    int kmin() const { return kmin_; }
    int order() const { return order_; }
    const T& zero() const { return zero_; }
    const std::map<Key, T>& terms() const { return c_; }

    T coeff(int k, int l = 0) const {
        auto it = c_.find({k, l});
        return it == c_.end() ? zero_ : it->second;
    }

    /// Stores a coefficient; out-of-range k above the order is dropped.
    void set(int k, int l, const T& v) {
        if (l < 0) throw ValidationError("log power must be non-negative");
        if (k < kmin_) throw ValidationError("exponent below k_min");
        if (k > order_) return;
        c_[{k, l}] = v;
    }

    void add(int k, int l, const T& v) {
        if (k > order_) return;
        if (k < kmin_) throw ValidationError("exponent below k_min");
        auto it = c_.find({k, l});
        if (it == c_.end())
            c_.emplace(Key{k, l}, v);
        else
            it->second = it->second + v;
    }

    /// Largest l with a stored coefficient at exponent k, or -1.
    int max_log(int k) const {
        int best = -1;
        for (auto it = c_.lower_bound({k, 0}); it != c_.end() && it->first.first == k; ++it)
            best = it->first.second;
        return best;
    }

    int max_log() const {
        int best = 0;
        for (const auto& [key, v] : c_) best = std::max(best, key.second);
        return best;
    }

    LogSeries truncated(int order) const {
        LogSeries out(kmin_, std::min(order, order_), zero_);
        for (const auto& [key, v] : c_)
            if (key.first <= out.order_) out.c_.emplace(key, v);
        return out;
    }

    /// Raises kmin to the first exponent carrying a nonzero coefficient.
    LogSeries tightened() const {
        int first = order_ + 1;
        for (const auto& [key, v] : c_)
            if (!coeff_is_zero(v)) {
                first = key.first;
                break;
            }
        first = std::max(first, kmin_);
        if (first > order_) first = kmin_;
        LogSeries out(first, order_, zero_);
        for (const auto& [key, v] : c_)
            if (key.first >= first && !coeff_is_zero(v)) out.c_.emplace(key, v);
        return out;
    }

    /// Every coefficient mapped through f; zero is mapped too.
    template <class F>
    auto map(F f) const -> LogSeries<decltype(f(std::declval<const T&>()))> {
        using R = decltype(f(std::declval<const T&>()));
        LogSeries<R> out(kmin_, order_, f(zero_));
        for (const auto& [key, v] : c_) out.set(key.first, key.second, f(v));
        return out;
    }

    LogSeries operator+(const LogSeries& b) const { return combine(b, 1.0); }
    LogSeries operator-(const LogSeries& b) const { return combine(b, -1.0); }
    LogSeries operator-() const { return scaled(-1.0); }

    LogSeries scaled(double s) const {
        LogSeries out(kmin_, order_, zero_);
        for (const auto& [key, v] : c_) out.c_.emplace(key, s * v);
        return out;
    }

    /// x^k (log x)^l -> k x^{k-1} (log x)^l + l x^{k-1} (log x)^{l-1}
    LogSeries d_dx() const {
        LogSeries out(kmin_ - 1, order_ - 1, zero_);
        for (const auto& [key, v] : c_) {
            const auto [k, l] = key;
            if (k != 0) out.add(k - 1, l, static_cast<double>(k) * v);
            if (l > 0) out.add(k - 1, l - 1, static_cast<double>(l) * v);
        }
        return out.tightened_keep(kmin_ - 1);
    }

    /// x d/dx, which keeps exponents.
    LogSeries x_d_dx() const {
        LogSeries out(kmin_, order_, zero_);
        for (const auto& [key, v] : c_) {
            const auto [k, l] = key;
            if (k != 0) out.add(k, l, static_cast<double>(k) * v);
            if (l > 0) out.add(k, l - 1, static_cast<double>(l) * v);
        }
        return out;
    }

    /// Substitution x -> lambda x.
    LogSeries rescale(double lambda) const {
        if (!(lambda > 0.0)) throw ValidationError("rescale factor must be positive");
        const double ll = std::log(lambda);
        LogSeries out(kmin_, order_, zero_);
        for (const auto& [key, v] : c_) {
            const auto [k, l] = key;
            const double pk = std::pow(lambda, k);
            double binom = 1.0;  // C(l, j), j counting down from l
            for (int j = l; j >= 0; --j) {
                out.add(k, j, (pk * binom * std::pow(ll, l - j)) * v);
                binom = binom * j / (l - j + 1);
            }
        }
        return out;
    }

    T evaluate(double x) const {
        if (!(x > 0.0)) throw ValidationError("series evaluated at non-positive x");
        const double lx = std::log(x);
        T acc = zero_;
        for (const auto& [key, v] : c_) acc = acc + (std::pow(x, key.first) * std::pow(lx, key.second)) * v;
        return acc;
    }

    double max_norm() const {
        double m = 0.0;
        for (const auto& [key, v] : c_) m = std::max(m, coeff_norm(v));
        return m;
    }

private:
    template <class U>
    friend class LogSeries;

    int kmin_;
    int order_;
    T zero_;
    std::map<Key, T> c_;

    LogSeries combine(const LogSeries& b, double sign) const {
        LogSeries out(std::min(kmin_, b.kmin_), std::min(order_, b.order_), zero_);
        for (const auto& [key, v] : c_) out.add(key.first, key.second, v);
        for (const auto& [key, v] : b.c_) out.add(key.first, key.second, sign * v);
        return out;
    }

    // Drops exact zeros and raises kmin only while the leading exponents are
    // empty; used after differentiation so constants do not lower kmin.
    LogSeries tightened_keep(int floor) const {
        LogSeries t = tightened();
        if (c_.empty()) t.kmin_ = std::max(floor + 1, t.kmin_);
        return t;
    }
};

/// Convolution product with a bilinear coefficient product.
template <class A, class B, class F>
auto mul(const LogSeries<A>& a, const LogSeries<B>& b, F prod)
    -> LogSeries<decltype(prod(std::declval<const A&>(), std::declval<const B&>()))> {
    using R = decltype(prod(std::declval<const A&>(), std::declval<const B&>()));
    const int order = std::min(a.order() + b.kmin(), b.order() + a.kmin());
    LogSeries<R> out(a.kmin() + b.kmin(), order, prod(a.zero(), b.zero()));
    for (const auto& [ka, va] : a.terms())
        for (const auto& [kb, vb] : b.terms()) {
            const int k = ka.first + kb.first;
            if (k > order) continue;
            out.add(k, ka.second + kb.second, prod(va, vb));
        }
    return out;
}

using ScalarSeries = LogSeries<double>;
using MatSeries = LogSeries<Mat3>;

inline ScalarSeries mul(const ScalarSeries& a, const ScalarSeries& b) {
    return mul(a, b, [](double u, double v) { return u * v; });
}
inline MatSeries mul(const MatSeries& a, const MatSeries& b) {
    return mul(a, b, [](const Mat3& u, const Mat3& v) -> Mat3 { return u * v; });
}
inline MatSeries mul(const ScalarSeries& a, const MatSeries& b) {
    return mul(a, b, [](double u, const Mat3& v) -> Mat3 { return u * v; });
}
inline MatSeries mul(const MatSeries& a, const ScalarSeries& b) {
    return mul(a, b, [](const Mat3& u, double v) -> Mat3 { return v * u; });
}

inline MatSeries transpose(const MatSeries& a) {
    return a.map([](const Mat3& m) -> Mat3 { return m.transpose(); });
}
inline ScalarSeries trace(const MatSeries& a) {
    return a.map([](const Mat3& m) { return m.trace(); });
}

inline double coeff_inverse(double v) { return 1.0 / v; }
inline Mat3 coeff_inverse(const Mat3& m) { return m.inverse(); }
inline double coeff_one(double) { return 1.0; }
inline Mat3 coeff_one(const Mat3&) { return Mat3::Identity(); }

/// Multiplicative inverse. The leading term must be a pure power x^kmin with
/// an invertible coefficient; the remainder is summed as a Neumann series.
template <class T>
LogSeries<T> invert(const LogSeries<T>& a) {
    const LogSeries<T> t = a.tightened();
    const int k0 = t.kmin();
    if (t.max_log(k0) != 0 || coeff_norm(t.coeff(k0, 0)) == 0.0)
        throw NumericError("series inverse needs a log-free invertible leading coefficient");
    const T lead = t.coeff(k0, 0);
    const T lead_inv = coeff_inverse(lead);
    const int rel_order = t.order() - k0;  // precision of the normalized series
    // u = lead^{-1} x^{-k0} a = 1 + r, r starting at x^1
    LogSeries<T> r(1, rel_order, t.zero());
    for (const auto& [key, v] : t.terms())
        if (key.first > k0) r.set(key.first - k0, key.second, lead_inv * v);
    LogSeries<T> acc = LogSeries<T>::constant(coeff_one(lead), rel_order, t.zero());
    LogSeries<T> power = acc;
    for (int n = 1; n <= rel_order; ++n) {
        power = mul(power, r, [](const T& u, const T& v) -> T { return u * v; }).truncated(rel_order);
        acc = (n % 2 == 1) ? acc - power : acc + power;
    }
    // a^{-1} = x^{-k0} (1+r)^{-1} lead^{-1}
    LogSeries<T> out(-k0, rel_order - 2 * k0, t.zero());
    for (const auto& [key, v] : acc.terms()) out.set(key.first - k0, key.second, v * lead_inv);
    return out;
}

/// Square root of a scalar series with leading coefficient exactly 1 at x^0,
/// by Newton iteration s <- (s + a/s)/2.
inline ScalarSeries sqrt_series(const ScalarSeries& a) {
    const ScalarSeries t = a.tightened();
    if (t.kmin() != 0 || std::abs(t.coeff(0, 0) - 1.0) > 1e-14 || t.max_log(0) != 0)
        throw NumericError("series square root needs leading term 1");
    ScalarSeries s = ScalarSeries::constant(1.0, t.order(), 0.0);
    // Precision doubles each sweep; one extra sweep is harmless.
    for (int known = 1; known <= 2 * (t.order() + 1); known *= 2) {
        s = (s + mul(t, invert(s))).scaled(0.5);
        s = s.truncated(t.order());
    }
    return s;
}

/// Determinant of a 3x3 matrix series, entrywise.
inline ScalarSeries det_series(const MatSeries& m) {
    auto entry = [&](int i, int j) { return m.map([i, j](const Mat3& v) { return v(i, j); }); };
    ScalarSeries out(0, 0, 0.0);
    bool first = true;
    for (int j = 0; j < 3; ++j) {
        const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        ScalarSeries minor = mul(entry(1, j1), entry(2, j2)) - mul(entry(1, j2), entry(2, j1));
        ScalarSeries term = mul(entry(0, j), minor);
        out = first ? term : out + term;
        first = false;
    }
    return out;
}

}  // namespace nahm
