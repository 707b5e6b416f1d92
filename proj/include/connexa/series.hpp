#pragma once

// Truncated power series: TSeries in t2, AffinePoly1 (affine in t1), ZTSeries in z over AffinePoly1.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "connexa/error.hpp"
#include "connexa/scalar.hpp"

namespace connexa {

inline void require_same_order(int a, int b, const char* what) {
    if (a != b)
        throw Error(ErrorKind::OrderMismatch,
                    std::string(what) + ": orders " + std::to_string(a) + " vs " + std::to_string(b));
}

class TSeries {
public:
    TSeries() = default;
    explicit TSeries(int order) : c_(static_cast<std::size_t>(std::max(order, 0))) {}
    TSeries(std::vector<Scalar> coeffs, int order) : c_(std::move(coeffs)) {
        c_.resize(static_cast<std::size_t>(std::max(order, 0)));
    }

    static TSeries zero(int n) { return TSeries(n); }
    static TSeries constant(const Scalar& a, int n) {
        TSeries s(n);
        if (n > 0) s.c_[0] = a;
        return s;
    }
    static TSeries one(int n) { return constant(Scalar(1), n); }
    static TSeries monomial(const Scalar& a, int k, int n) {
        TSeries s(n);
        if (k >= 0 && k < n) s.c_[static_cast<std::size_t>(k)] = a;
        return s;
    }
    static TSeries t(int n) { return monomial(Scalar(1), 1, n); }
    // polynomial with given low coefficients, zero-padded
    static TSeries poly(std::initializer_list<Scalar> cs, int n) {
        std::vector<Scalar> v(cs);
        if (static_cast<int>(v.size()) > n) v.resize(static_cast<std::size_t>(n));
        return TSeries(v, n);
    }

    int order() const { return static_cast<int>(c_.size()); }
    const Scalar& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    Scalar& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    Scalar coeff(int k) const { return (k >= 0 && k < order()) ? c_[static_cast<std::size_t>(k)] : Scalar(0); }
    const std::vector<Scalar>& coeffs() const { return c_; }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const Scalar& s) { return s.is_zero(); });
    }
    // least index with nonzero coefficient; nullopt stands for the infinite valuation
    std::optional<int> valuation() const {
        for (int k = 0; k < order(); ++k)
            if (!c_[static_cast<std::size_t>(k)].is_zero()) return k;
        return std::nullopt;
    }
    // highest nonzero index, -1 for zero
    int degree() const {
        for (int k = order() - 1; k >= 0; --k)
            if (!c_[static_cast<std::size_t>(k)].is_zero()) return k;
        return -1;
    }

    TSeries truncated(int n) const {
        if (n > order()) throw Error(ErrorKind::OrderMismatch, "truncate to a larger order");
        return TSeries(std::vector<Scalar>(c_.begin(), c_.begin() + n), n);
    }
    // zero-pad; only sound when the series is a polynomial known exactly
    TSeries padded(int n) const { return TSeries(c_, n); }
    TSeries resized(int n) const { return TSeries(c_, n); }

    TSeries& operator+=(const TSeries& o) {
        require_same_order(order(), o.order(), "TSeries add");
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    TSeries& operator-=(const TSeries& o) {
        require_same_order(order(), o.order(), "TSeries sub");
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    TSeries& operator*=(const Scalar& a) {
        if (a.is_one()) return *this;
        for (auto& x : c_)
            if (!x.is_zero()) x *= a;
        return *this;
    }
    TSeries operator-() const {
        TSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend TSeries operator+(TSeries a, const TSeries& b) { return a += b; }
    friend TSeries operator-(TSeries a, const TSeries& b) { return a -= b; }
    friend TSeries operator*(TSeries a, const Scalar& s) { return a *= s; }
    friend TSeries operator*(const Scalar& s, TSeries a) { return a *= s; }
    friend TSeries operator*(const TSeries& a, const TSeries& b) {
        require_same_order(a.order(), b.order(), "TSeries mul");
        int n = a.order();
        TSeries r(n);
        for (int i = 0; i < n; ++i) {
            if (a.c_[static_cast<std::size_t>(i)].is_zero()) continue;
            for (int j = 0; i + j < n; ++j) {
                if (b.c_[static_cast<std::size_t>(j)].is_zero()) continue;
                r.c_[static_cast<std::size_t>(i + j)].add_mul(a.c_[static_cast<std::size_t>(i)], b.c_[static_cast<std::size_t>(j)]);
            }
        }
        return r;
    }
    TSeries& operator*=(const TSeries& o) { return *this = *this * o; }
    friend bool operator==(const TSeries& a, const TSeries& b) { return a.c_ == b.c_; }
    friend bool operator!=(const TSeries& a, const TSeries& b) { return !(a == b); }

    // multiply by t^k, keeping the order
    TSeries shifted(int k) const {
        TSeries r(order());
        for (int i = 0; i + k < order(); ++i)
            if (i >= 0) r.c_[static_cast<std::size_t>(i + k)] = c_[static_cast<std::size_t>(i)];
        return r;
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (k) s += ", ";
            s += c_[k].str();
        }
        return s + "]";
    }

private:
    std::vector<Scalar> c_;
};

inline TSeries invert_unit(const TSeries& s) {
    int n = s.order();
    if (n == 0) return s;
    if (s[0].is_zero()) throw Error(ErrorKind::NotAUnit, "constant term is zero");
    TSeries r(n);
    Scalar i0 = s[0].inv();
    r[0] = i0;
    for (int k = 1; k < n; ++k) {
        Scalar acc;
        for (int j = 1; j <= k; ++j)
            if (!s[j].is_zero() && !r[k - j].is_zero()) acc += s[j] * r[k - j];
        r[k] = -acc * i0;
    }
    return r;
}

// formal d/dt; the order drops by one
inline TSeries derive(const TSeries& s) {
    int n = s.order();
    if (n == 0) return s;
    TSeries r(n - 1);
    for (int k = 1; k < n; ++k) r[k - 1] = s[k] * Scalar(k);
    return r;
}

// f∘lam with lam(0) = 0 (Horner)
inline TSeries compose_aut(const TSeries& f, const TSeries& lam) {
    require_same_order(f.order(), lam.order(), "compose_aut");
    int n = f.order();
    if (n == 0) return f;
    if (!lam[0].is_zero()) throw Error(ErrorKind::CompositionUndefined, "lam(0) != 0");
    TSeries r = TSeries::constant(f[n - 1], n);
    for (int k = n - 2; k >= 0; --k) {
        r = r * lam;
        r[0] += f[k];
    }
    return r;
}

// compositional inverse, order by order
inline TSeries reverse(const TSeries& lam) {
    int n = lam.order();
    if (n == 0) return lam;
    if (!lam[0].is_zero()) throw Error(ErrorKind::CompositionUndefined, "lam(0) != 0");
    if (n < 2) return lam;
    if (lam[1].is_zero()) throw Error(ErrorKind::NotInvertible, "lam'(0) = 0");
    Scalar inv1 = lam[1].inv();
    TSeries mu = TSeries::monomial(inv1, 1, n);
    for (int k = 2; k < n; ++k) {
        TSeries e = compose_aut(lam, mu);
        mu[k] -= e[k] * inv1;
    }
    return mu;
}

// exp(s) for s(0) = 0
inline TSeries exp_series(const TSeries& s) {
    int n = s.order();
    if (n == 0) return s;
    if (!s[0].is_zero()) throw Error(ErrorKind::Domain, "exp of a series with nonzero constant term");
    TSeries y(n);
    y[0] = Scalar(1);
    for (int m = 1; m < n; ++m) {
        Scalar acc;
        for (int k = 1; k <= m; ++k)
            if (!s[k].is_zero()) acc += Scalar(k) * s[k] * y[m - k];
        y[m] = acc / Scalar(m);
    }
    return y;
}

// u^a for u(0) = 1 and any exponent a (binomial series via u y' = a u' y)
inline TSeries pow_unit(const TSeries& u, const Scalar& a) {
    int n = u.order();
    if (n == 0) return u;
    if (!u[0].is_one()) throw Error(ErrorKind::Domain, "pow_unit expects constant term 1");
    TSeries y(n);
    y[0] = Scalar(1);
    for (int m = 1; m < n; ++m) {
        Scalar acc;
        for (int k = 1; k <= m; ++k)
            if (!u[k].is_zero()) acc += (a * Scalar(k) - Scalar(m - k)) * u[k] * y[m - k];
        y[m] = acc / Scalar(m);
    }
    return y;
}

// ---------------------------------------------------------------- AffinePoly1

class AffinePoly1 {
public:
    TSeries c0, c1;  // p = c0(t2) + t1*c1(t2)

    AffinePoly1() = default;
    explicit AffinePoly1(int nt) : c0(nt), c1(nt) {}
    AffinePoly1(TSeries a, TSeries b) : c0(std::move(a)), c1(std::move(b)) {
        require_same_order(c0.order(), c1.order(), "AffinePoly1");
    }
    static AffinePoly1 of(const TSeries& a) { return AffinePoly1(a, TSeries(a.order())); }

    int order() const { return c0.order(); }
    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool t1_free() const { return c1.is_zero(); }

    AffinePoly1& operator+=(const AffinePoly1& o) {
        c0 += o.c0;
        c1 += o.c1;
        return *this;
    }
    AffinePoly1& operator-=(const AffinePoly1& o) {
        c0 -= o.c0;
        c1 -= o.c1;
        return *this;
    }
    AffinePoly1& operator*=(const Scalar& a) {
        c0 *= a;
        c1 *= a;
        return *this;
    }
    AffinePoly1 operator-() const { return AffinePoly1(-c0, -c1); }
    friend AffinePoly1 operator+(AffinePoly1 a, const AffinePoly1& b) { return a += b; }
    friend AffinePoly1 operator-(AffinePoly1 a, const AffinePoly1& b) { return a -= b; }
    friend AffinePoly1 operator*(AffinePoly1 a, const Scalar& s) { return a *= s; }
    friend AffinePoly1 operator*(const Scalar& s, AffinePoly1 a) { return a *= s; }
    friend AffinePoly1 operator*(const AffinePoly1& a, const AffinePoly1& b) {
        bool af = a.c1.is_zero(), bf = b.c1.is_zero();
        if (!af && !bf) throw Error(ErrorKind::DegreeOverflow, "product has t1-degree 2");
        AffinePoly1 r(a.order());
        if (a.c0.is_zero() && af) return r;
        if (b.c0.is_zero() && bf) return r;
        r.c0 = a.c0 * b.c0;
        if (!af) r.c1 = a.c1 * b.c0;
        if (!bf) r.c1 += a.c0 * b.c1;
        return r;
    }
    friend bool operator==(const AffinePoly1& a, const AffinePoly1& b) { return a.c0 == b.c0 && a.c1 == b.c1; }
    friend bool operator!=(const AffinePoly1& a, const AffinePoly1& b) { return !(a == b); }

    AffinePoly1 truncated(int n) const { return AffinePoly1(c0.truncated(n), c1.truncated(n)); }
    AffinePoly1 resized(int n) const { return AffinePoly1(c0.resized(n), c1.resized(n)); }
};

inline AffinePoly1 derive_t2(const AffinePoly1& p) { return AffinePoly1(derive(p.c0), derive(p.c1)); }
inline AffinePoly1 derive_t1(const AffinePoly1& p) { return AffinePoly1::of(p.c1); }
inline AffinePoly1 compose_aut(const AffinePoly1& p, const TSeries& lam) {
    return AffinePoly1(compose_aut(p.c0, lam), compose_aut(p.c1, lam));
}

// ---------------------------------------------------------------- ZTSeries

class ZTSeries {
public:
    ZTSeries() = default;
    ZTSeries(int nz, int nt) : nt_(nt), z_(static_cast<std::size_t>(std::max(nz, 0)), AffinePoly1(nt)) {}

    static ZTSeries zero(int nz, int nt) { return ZTSeries(nz, nt); }
    static ZTSeries from_t(const TSeries& s, int nz) {
        ZTSeries r(nz, s.order());
        if (nz > 0) r.z_[0].c0 = s;
        return r;
    }
    static ZTSeries constant(const Scalar& a, int nz, int nt) { return from_t(TSeries::constant(a, nt), nz); }
    // a * z^k * t2^j
    static ZTSeries monomial(const Scalar& a, int k, int j, int nz, int nt) {
        ZTSeries r(nz, nt);
        if (k >= 0 && k < nz && j >= 0 && j < nt) r.z_[static_cast<std::size_t>(k)].c0[j] = a;
        return r;
    }
    static ZTSeries t1(int nz, int nt) {
        ZTSeries r(nz, nt);
        if (nz > 0 && nt > 0) r.z_[0].c1[0] = Scalar(1);
        return r;
    }
    // z-series with constant-in-t coefficients
    static ZTSeries from_z(const TSeries& zs, int nt) {
        ZTSeries r(zs.order(), nt);
        for (int k = 0; k < zs.order(); ++k)
            if (nt > 0) r.z_[static_cast<std::size_t>(k)].c0[0] = zs[k];
        return r;
    }

    int nz() const { return static_cast<int>(z_.size()); }
    int nt() const { return nt_; }
    const AffinePoly1& operator[](int k) const { return z_[static_cast<std::size_t>(k)]; }
    AffinePoly1& operator[](int k) { return z_[static_cast<std::size_t>(k)]; }
    // coefficient of z^k t1^a t2^j
    Scalar coeff(int k, int a, int j) const {
        if (k < 0 || k >= nz() || j < 0 || j >= nt_) return Scalar(0);
        return a == 0 ? z_[static_cast<std::size_t>(k)].c0[j] : z_[static_cast<std::size_t>(k)].c1[j];
    }

    bool is_zero() const {
        return std::all_of(z_.begin(), z_.end(), [](const AffinePoly1& p) { return p.is_zero(); });
    }
    bool t1_free() const {
        return std::all_of(z_.begin(), z_.end(), [](const AffinePoly1& p) { return p.t1_free(); });
    }
    // highest z-power with a nonzero coefficient, -1 for zero
    int z_degree() const {
        for (int k = nz() - 1; k >= 0; --k)
            if (!z_[static_cast<std::size_t>(k)].is_zero()) return k;
        return -1;
    }

    ZTSeries& operator+=(const ZTSeries& o) {
        check(o, "ZTSeries add");
        for (std::size_t k = 0; k < z_.size(); ++k) z_[k] += o.z_[k];
        return *this;
    }
    ZTSeries& operator-=(const ZTSeries& o) {
        check(o, "ZTSeries sub");
        for (std::size_t k = 0; k < z_.size(); ++k) z_[k] -= o.z_[k];
        return *this;
    }
    ZTSeries& operator*=(const Scalar& a) {
        if (a.is_one()) return *this;
        for (auto& p : z_) p *= a;
        return *this;
    }
    ZTSeries operator-() const {
        ZTSeries r = *this;
        for (auto& p : r.z_) p = -p;
        return r;
    }
    friend ZTSeries operator+(ZTSeries a, const ZTSeries& b) { return a += b; }
    friend ZTSeries operator-(ZTSeries a, const ZTSeries& b) { return a -= b; }
    friend ZTSeries operator*(ZTSeries a, const Scalar& s) { return a *= s; }
    friend ZTSeries operator*(const Scalar& s, ZTSeries a) { return a *= s; }
    friend ZTSeries operator*(const ZTSeries& a, const ZTSeries& b) {
        a.check(b, "ZTSeries mul");
        int n = a.nz();
        ZTSeries r(n, a.nt_);
        std::vector<bool> az(static_cast<std::size_t>(n)), bz(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            az[static_cast<std::size_t>(i)] = a.z_[static_cast<std::size_t>(i)].is_zero();
            bz[static_cast<std::size_t>(i)] = b.z_[static_cast<std::size_t>(i)].is_zero();
        }
        for (int i = 0; i < n; ++i) {
            if (az[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; i + j < n; ++j) {
                if (bz[static_cast<std::size_t>(j)]) continue;
                r.z_[static_cast<std::size_t>(i + j)] += a.z_[static_cast<std::size_t>(i)] * b.z_[static_cast<std::size_t>(j)];
            }
        }
        return r;
    }
    friend bool operator==(const ZTSeries& a, const ZTSeries& b) { return a.nt_ == b.nt_ && a.z_ == b.z_; }
    friend bool operator!=(const ZTSeries& a, const ZTSeries& b) { return !(a == b); }

    // multiply by z^k keeping orders
    ZTSeries shift_z(int k) const {
        ZTSeries r(nz(), nt_);
        for (int i = 0; i + k < nz(); ++i)
            if (i >= 0) r.z_[static_cast<std::size_t>(i + k)] = z_[static_cast<std::size_t>(i)];
        return r;
    }
    // divide by z^k; requires the low coefficients to vanish; z-order drops by k
    ZTSeries unshift_z(int k) const {
        for (int i = 0; i < std::min(k, nz()); ++i)
            if (!z_[static_cast<std::size_t>(i)].is_zero())
                throw Error(ErrorKind::Shape, "series not divisible by z^" + std::to_string(k));
        ZTSeries r(std::max(nz() - k, 0), nt_);
        for (int i = k; i < nz(); ++i) r.z_[static_cast<std::size_t>(i - k)] = z_[static_cast<std::size_t>(i)];
        return r;
    }

    ZTSeries truncated(int nz2, int nt2) const {
        if (nz2 > nz() || nt2 > nt_) throw Error(ErrorKind::OrderMismatch, "truncate to larger orders");
        ZTSeries r(nz2, nt2);
        for (int k = 0; k < nz2; ++k) r.z_[static_cast<std::size_t>(k)] = z_[static_cast<std::size_t>(k)].truncated(nt2);
        return r;
    }
    // zero-padding in either direction; exact only for polynomial data
    ZTSeries resized(int nz2, int nt2) const {
        ZTSeries r(nz2, nt2);
        for (int k = 0; k < std::min(nz2, nz()); ++k)
            r.z_[static_cast<std::size_t>(k)] = z_[static_cast<std::size_t>(k)].resized(nt2);
        return r;
    }

    // restriction t1 = t2 = 0, as a z-series
    TSeries at_origin() const {
        TSeries r(nz());
        for (int k = 0; k < nz(); ++k)
            if (nt_ > 0) r[k] = z_[static_cast<std::size_t>(k)].c0[0];
        return r;
    }
    // restriction t1 = 0, t2 = 0 of the j-th t2-derivative divided by j! (the t2^j coefficient) as a z-series
    TSeries t2_coeff_series(int j) const {
        TSeries r(nz());
        for (int k = 0; k < nz(); ++k)
            if (j < nt_) r[k] = z_[static_cast<std::size_t>(k)].c0[j];
        return r;
    }
    // z^0 part as an affine t-polynomial
    const AffinePoly1& z0() const { return z_[0]; }

private:
    void check(const ZTSeries& o, const char* what) const {
        require_same_order(nz(), o.nz(), what);
        require_same_order(nt_, o.nt_, what);
    }
    int nt_ = 0;
    std::vector<AffinePoly1> z_;
};

inline ZTSeries derive_z(const ZTSeries& s) {
    int n = s.nz();
    ZTSeries r(std::max(n - 1, 0), s.nt());
    for (int k = 1; k < n; ++k) r[k - 1] = s[k] * Scalar(k);
    return r;
}
// z^2 d/dz keeps the z-order
inline ZTSeries z2_derive_z(const ZTSeries& s) {
    ZTSeries r(s.nz(), s.nt());
    for (int k = 2; k < s.nz(); ++k) r[k] = s[k - 1] * Scalar(k - 1);
    return r;
}
// z d/dz keeps the z-order
inline ZTSeries z_derive_z(const ZTSeries& s) {
    ZTSeries r(s.nz(), s.nt());
    for (int k = 1; k < s.nz(); ++k) r[k] = s[k] * Scalar(k);
    return r;
}
inline ZTSeries derive_t2(const ZTSeries& s) {
    ZTSeries r(s.nz(), std::max(s.nt() - 1, 0));
    for (int k = 0; k < s.nz(); ++k) r[k] = derive_t2(s[k]);
    return r;
}
inline ZTSeries derive_t1(const ZTSeries& s) {
    ZTSeries r(s.nz(), s.nt());
    for (int k = 0; k < s.nz(); ++k) r[k] = derive_t1(s[k]);
    return r;
}
inline ZTSeries compose_aut(const ZTSeries& s, const TSeries& lam) {
    ZTSeries r(s.nz(), s.nt());
    for (int k = 0; k < s.nz(); ++k) r[k] = compose_aut(s[k], lam);
    return r;
}
// multiply every z-coefficient by a t-series
inline ZTSeries mul_t(const ZTSeries& s, const TSeries& f) {
    ZTSeries r(s.nz(), s.nt());
    for (int k = 0; k < s.nz(); ++k) r[k] = s[k] * AffinePoly1::of(f);
    return r;
}

// inverse of a t1-free series with unit constant term: z-recursion over t-series inverses
inline ZTSeries invert_unit(const ZTSeries& s) {
    if (!s.t1_free()) throw Error(ErrorKind::NotAUnit, "inverse of a t1-dependent series");
    int n = s.nz();
    ZTSeries r(n, s.nt());
    if (n == 0) return r;
    TSeries i0 = invert_unit(s[0].c0);
    r[0].c0 = i0;
    for (int k = 1; k < n; ++k) {
        TSeries acc(s.nt());
        for (int j = 1; j <= k; ++j)
            if (!s[j].c0.is_zero() && !r[k - j].c0.is_zero()) acc += s[j].c0 * r[k - j].c0;
        r[k].c0 = -(acc * i0);
    }
    return r;
}

}  // namespace connexa
