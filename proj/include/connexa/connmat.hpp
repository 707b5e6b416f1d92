#pragma once

// 2x2 matrices in the basis {C1, C2, D, E} and (TE)-structures over the nilpotent germ N2.
//
// Basis: C1 = Id, C2 = e21, D = diag(1,-1), E = e12, so
//   x*C1 + y*C2 + u*D + w*E = [[x+u, w], [y, x-u]].
// Connection convention: nabla s = s * Omega, Omega = sum A_i dt_i / z + B dz / z^2.

#include <optional>
#include <vector>
#include <string>

#include "connexa/error.hpp"
#include "connexa/scalar.hpp"
#include "connexa/series.hpp"

namespace connexa {

inline Scalar zero_like(const Scalar&) { return Scalar(0); }
inline TSeries zero_like(const TSeries& s) { return TSeries(s.order()); }
inline ZTSeries zero_like(const ZTSeries& s) { return ZTSeries(s.nz(), s.nt()); }

template <class R>
struct BasisMat {
    R c1, c2, d, e;

    static BasisMat filled(const R& zero) { return BasisMat{zero, zero, zero, zero}; }
    static BasisMat from_entries(const R& m11, const R& m12, const R& m21, const R& m22) {
        Scalar h = Scalar::frac(1, 2);
        return BasisMat{(m11 + m22) * h, m21, (m11 - m22) * h, m12};
    }
    R m11() const { return c1 + d; }
    R m12() const { return e; }
    R m21() const { return c2; }
    R m22() const { return c1 - d; }

    bool is_zero() const { return c1.is_zero() && c2.is_zero() && d.is_zero() && e.is_zero(); }

    BasisMat& operator+=(const BasisMat& o) {
        c1 += o.c1;
        c2 += o.c2;
        d += o.d;
        e += o.e;
        return *this;
    }
    BasisMat& operator-=(const BasisMat& o) {
        c1 -= o.c1;
        c2 -= o.c2;
        d -= o.d;
        e -= o.e;
        return *this;
    }
    BasisMat& operator*=(const Scalar& s) {
        c1 *= s;
        c2 *= s;
        d *= s;
        e *= s;
        return *this;
    }
    BasisMat operator-() const { return BasisMat{-c1, -c2, -d, -e}; }
    friend BasisMat operator+(BasisMat a, const BasisMat& b) { return a += b; }
    friend BasisMat operator-(BasisMat a, const BasisMat& b) { return a -= b; }
    friend BasisMat operator*(BasisMat a, const Scalar& s) { return a *= s; }
    friend BasisMat operator*(const Scalar& s, BasisMat a) { return a *= s; }
    friend bool operator==(const BasisMat& a, const BasisMat& b) {
        return a.c1 == b.c1 && a.c2 == b.c2 && a.d == b.d && a.e == b.e;
    }
    friend bool operator!=(const BasisMat& a, const BasisMat& b) { return !(a == b); }

    // product through the structure constants of the basis
    friend BasisMat operator*(const BasisMat& a, const BasisMat& b) {
        const R z = zero_like(a.c1);
        auto mul = [&z](const R& p, const R& q) -> R {
            if (p.is_zero() || q.is_zero()) return z;
            return p * q;
        };
        Scalar h = Scalar::frac(1, 2);
        R yw = mul(a.c2, b.e), wy = mul(a.e, b.c2);
        BasisMat r;
        r.c1 = mul(a.c1, b.c1) + mul(a.d, b.d) + (yw + wy) * h;
        r.c2 = mul(a.c1, b.c2) + mul(a.c2, b.c1) + mul(a.c2, b.d) - mul(a.d, b.c2);
        r.d = mul(a.c1, b.d) + mul(a.d, b.c1) + (wy - yw) * h;
        r.e = mul(a.c1, b.e) + mul(a.e, b.c1) + mul(a.d, b.e) - mul(a.e, b.d);
        return r;
    }

    BasisMat adjugate() const { return BasisMat{c1, -c2, -d, -e}; }
    R det() const {
        const R z = zero_like(c1);
        auto mul = [&z](const R& p, const R& q) -> R {
            if (p.is_zero() || q.is_zero()) return z;
            return p * q;
        };
        return mul(c1, c1) - mul(d, d) - mul(c2, e);
    }
};

template <class R>
BasisMat<R> commutator(const BasisMat<R>& a, const BasisMat<R>& b) {
    return a * b - b * a;
}

using Mat2 = BasisMat<ZTSeries>;
using CMat = BasisMat<Scalar>;
using TMat = BasisMat<TSeries>;

enum class BasisElem { C1, C2, D, E };

inline Mat2 mat_zero(int nz, int nt) { return Mat2::filled(ZTSeries(nz, nt)); }
inline Mat2 mat_basis(BasisElem b, int nz, int nt, const ZTSeries* coeff = nullptr) {
    Mat2 m = mat_zero(nz, nt);
    ZTSeries v = coeff ? *coeff : ZTSeries::constant(Scalar(1), nz, nt);
    switch (b) {
        case BasisElem::C1: m.c1 = v; break;
        case BasisElem::C2: m.c2 = v; break;
        case BasisElem::D: m.d = v; break;
        case BasisElem::E: m.e = v; break;
    }
    return m;
}
inline Mat2 mat_identity(int nz, int nt) { return mat_basis(BasisElem::C1, nz, nt); }
inline Mat2 mat_const(const CMat& c, int nz, int nt) {
    return Mat2{ZTSeries::constant(c.c1, nz, nt), ZTSeries::constant(c.c2, nz, nt), ZTSeries::constant(c.d, nz, nt),
                ZTSeries::constant(c.e, nz, nt)};
}

template <class R, class F>
BasisMat<R> map_components(const BasisMat<R>& m, F f) {
    return BasisMat<R>{f(m.c1), f(m.c2), f(m.d), f(m.e)};
}
inline int mat_nz(const Mat2& m) { return m.c1.nz(); }
inline int mat_nt(const Mat2& m) { return m.c1.nt(); }
inline Mat2 truncated(const Mat2& m, int nz, int nt) {
    return map_components(m, [&](const ZTSeries& s) { return s.truncated(nz, nt); });
}
inline Mat2 resized(const Mat2& m, int nz, int nt) {
    return map_components(m, [&](const ZTSeries& s) { return s.resized(nz, nt); });
}
inline Mat2 shift_z(const Mat2& m, int k) {
    return map_components(m, [&](const ZTSeries& s) { return s.shift_z(k); });
}
inline Mat2 derive_t1(const Mat2& m) { return map_components(m, [](const ZTSeries& s) { return derive_t1(s); }); }
inline Mat2 derive_t2(const Mat2& m) { return map_components(m, [](const ZTSeries& s) { return derive_t2(s); }); }
inline Mat2 z2_derive_z(const Mat2& m) { return map_components(m, [](const ZTSeries& s) { return z2_derive_z(s); }); }
inline Mat2 compose_aut(const Mat2& m, const TSeries& lam) {
    return map_components(m, [&](const ZTSeries& s) { return compose_aut(s, lam); });
}
inline Mat2 mul_t(const Mat2& m, const TSeries& f) {
    return map_components(m, [&](const ZTSeries& s) { return mul_t(s, f); });
}
inline Mat2 scale(const Mat2& m, const ZTSeries& f) {
    return map_components(m, [&](const ZTSeries& s) { return s.is_zero() ? s : s * f; });
}
inline bool t1_free(const Mat2& m) { return m.c1.t1_free() && m.c2.t1_free() && m.d.t1_free() && m.e.t1_free(); }

// true when some coefficient beyond t2^0 is nonzero
inline bool depends_on_t2(const ZTSeries& s) {
    for (int k = 0; k < s.nz(); ++k)
        for (int j = 1; j < s.nt(); ++j)
            if (!s[k].c0[j].is_zero() || !s[k].c1[j].is_zero()) return true;
    return false;
}
inline bool depends_on_t2(const Mat2& m) {
    return depends_on_t2(m.c1) || depends_on_t2(m.c2) || depends_on_t2(m.d) || depends_on_t2(m.e);
}

// z^k coefficient as a matrix over t-series (t1 part must vanish)
inline TMat zcoeff(const Mat2& m, int k) {
    auto pick = [&](const ZTSeries& s) {
        if (!s[k].c1.is_zero()) throw Error(ErrorKind::Shape, "t1-dependent coefficient where none is allowed");
        return s[k].c0;
    };
    return TMat{pick(m.c1), pick(m.c2), pick(m.d), pick(m.e)};
}
inline CMat at_origin(const TMat& m) { return CMat{m.c1.coeff(0), m.c2.coeff(0), m.d.coeff(0), m.e.coeff(0)}; }

inline Mat2 inverse(const Mat2& m) {
    if (!t1_free(m)) throw Error(ErrorKind::Unsupported, "inverse of a t1-dependent matrix");
    ZTSeries det = m.det();
    if (det.nz() == 0 || det.nt() == 0 || det[0].c0[0].is_zero())
        throw Error(ErrorKind::NotInvertible, "determinant has zero constant term");
    ZTSeries di = invert_unit(det);
    return scale(m.adjugate(), di);
}
inline CMat inverse(const CMat& m) {
    Scalar det = m.det();
    if (det.is_zero()) throw Error(ErrorKind::NotInvertible, "singular constant matrix");
    return m.adjugate() * det.inv();
}
inline TMat inverse(const TMat& m) {
    TSeries det = m.det();
    TSeries di = invert_unit(det);
    auto f = [&](const TSeries& s) { return s * di; };
    TMat a = m.adjugate();
    return TMat{f(a.c1), f(a.c2), f(a.d), f(a.e)};
}

inline std::string mat_str(const CMat& m) {
    return "(" + m.c1.str() + ")C1 + (" + m.c2.str() + ")C2 + (" + m.d.str() + ")D + (" + m.e.str() + ")E";
}

// ---------------------------------------------------------------- structures

enum class StructKind { T, TE };

struct TEStruct {
    Mat2 A1, A2, B;
    int nz = 0, nt = 0;
    StructKind kind = StructKind::TE;

    friend bool operator==(const TEStruct& a, const TEStruct& b) {
        return a.nz == b.nz && a.nt == b.nt && a.kind == b.kind && a.A1 == b.A1 && a.A2 == b.A2 && a.B == b.B;
    }
    TEStruct truncated(int nz2, int nt2) const {
        return TEStruct{connexa::truncated(A1, nz2, nt2), connexa::truncated(A2, nz2, nt2),
                        connexa::truncated(B, nz2, nt2), nz2, nt2, kind};
    }
};

inline void check_orders(const TEStruct& s) {
    for (const Mat2* m : {&s.A1, &s.A2, &s.B})
        if (mat_nz(*m) != s.nz || mat_nt(*m) != s.nt)
            throw Error(ErrorKind::OrderMismatch, "matrix orders differ from the structure orders");
}

struct FlatnessResiduals {
    Mat2 Rt, Rz1, Rz2;
    int nz = 0, nt = 0;
    bool skipped_z = false;
    bool flat() const { return Rt.is_zero() && (skipped_z || (Rz1.is_zero() && Rz2.is_zero())); }
};

// residuals are exact at orders (nz, nt-1): one t2-derivative is taken
inline FlatnessResiduals flatness_residuals(const TEStruct& s) {
    check_orders(s);
    const int nz = s.nz, nt = std::max(s.nt - 1, 0);
    auto cut = [&](const Mat2& m) { return truncated(m, nz, nt); };
    FlatnessResiduals r;
    r.nz = nz;
    r.nt = nt;
    Mat2 A1 = cut(s.A1), A2 = cut(s.A2), B = cut(s.B);
    r.Rt = shift_z(cut(derive_t1(s.A2)), 1) - shift_z(derive_t2(s.A1), 1) + commutator(A1, A2);
    if (s.kind == StructKind::T) {
        r.skipped_z = true;
        r.Rz1 = mat_zero(nz, nt);
        r.Rz2 = mat_zero(nz, nt);
        return r;
    }
    r.Rz1 = shift_z(cut(derive_t1(s.B)), 1) - z2_derive_z(A1) + shift_z(A1, 1) + commutator(A1, B);
    r.Rz2 = shift_z(derive_t2(s.B), 1) - z2_derive_z(A2) + shift_z(A2, 1) + commutator(A2, B);
    return r;
}

// ---------------------------------------------------------------- gauges and isomorphisms

// T is given in the target coordinates (T~ = T o h); h = (t1, lam(t2)), identity when lam is empty.
struct GaugeMap {
    Mat2 T;
    std::optional<TSeries> lam;
};

// A~_i = T^-1 (z d_i T + A_i T), B~ = T^-1 (z^2 d_z T + B T).
// A t2-dependent T costs one t-order unless supplied at order nt+1.
inline TEStruct apply_gauge(const TEStruct& s, const Mat2& T_in) {
    check_orders(s);
    if (!t1_free(T_in)) throw Error(ErrorKind::Unsupported, "gauge depends on t1");
    if (mat_nz(T_in) < s.nz) throw Error(ErrorKind::OrderMismatch, "gauge z-order below the structure z-order");
    bool dep = depends_on_t2(T_in);
    int nt_out = dep ? std::min(s.nt, mat_nt(T_in) - 1) : s.nt;
    Mat2 T = dep ? truncated(T_in, s.nz, nt_out) : resized(truncated(T_in, s.nz, std::min(mat_nt(T_in), 1)), s.nz, nt_out);
    Mat2 Ti = inverse(T);
    Mat2 dT2 = dep ? derive_t2(truncated(T_in, s.nz, nt_out + 1)) : mat_zero(s.nz, nt_out);
    auto cut = [&](const Mat2& m) { return truncated(m, s.nz, nt_out); };
    TEStruct out;
    out.nz = s.nz;
    out.nt = nt_out;
    out.kind = s.kind;
    out.A1 = Ti * (cut(s.A1) * T);
    out.A2 = Ti * (shift_z(dT2, 1) + cut(s.A2) * T);
    out.B = Ti * (z2_derive_z(T) + cut(s.B) * T);
    return out;
}

// pull back along (t1, lam(t2)); lam at order nt+1 keeps the t-order
inline TEStruct pull_back(const TEStruct& s, const TSeries& lam) {
    check_orders(s);
    if (lam.order() < s.nt) throw Error(ErrorKind::OrderMismatch, "automorphism known to a lower t-order");
    if (lam.order() >= 1 && !lam[0].is_zero()) throw Error(ErrorKind::CompositionUndefined, "lam(0) != 0");
    if (lam.order() >= 2 && lam[1].is_zero()) throw Error(ErrorKind::NotInvertible, "lam'(0) = 0");
    int nt_out = std::min(s.nt, lam.order() - 1);
    TSeries l = lam.truncated(nt_out);
    TSeries dl = derive(lam.truncated(nt_out + 1));
    auto cut = [&](const Mat2& m) { return truncated(m, s.nz, nt_out); };
    TEStruct out;
    out.nz = s.nz;
    out.nt = nt_out;
    out.kind = s.kind;
    out.A1 = compose_aut(cut(s.A1), l);
    out.A2 = mul_t(compose_aut(cut(s.A2), l), dl);
    out.B = compose_aut(cut(s.B), l);
    return out;
}

// iso(iso(s,(T1,h1)),(T2,h2)) = iso(s, ((T1 o h2) T2, h1 o h2))
inline TEStruct apply_isomorphism(const TEStruct& s, const GaugeMap& g) {
    TEStruct p = g.lam ? pull_back(s, *g.lam) : s;
    return apply_gauge(p, g.T);
}

// ---------------------------------------------------------------- vector fields

// X = e1 d/dt1 + e2 d/dt2
struct VectorField {
    AffinePoly1 e1, e2;
};

// E = (t1 + c) d/dt1 + g(t2) d/dt2
struct EulerField {
    Scalar c;
    TSeries g;
    friend bool operator==(const EulerField& a, const EulerField& b) { return a.c == b.c && a.g == b.g; }
};

inline std::optional<EulerField> as_euler(const VectorField& v) {
    const int nt = v.e1.order();
    if (nt == 0) return std::nullopt;
    if (!(v.e1.c1 == TSeries::one(nt))) return std::nullopt;
    if (v.e1.c0.degree() > 0) return std::nullopt;
    if (!v.e2.c1.is_zero()) return std::nullopt;
    return EulerField{v.e1.c0[0], v.e2.c0};
}

// e1 A1^(0) + e2 A2^(0) = -B^(0); requires A1^(0) = C1 and a unit coordinate in A2^(0)
inline VectorField induced_vector_field(const TEStruct& s) {
    check_orders(s);
    if (s.nz == 0 || s.nt == 0) throw Error(ErrorKind::Precondition, "empty structure");
    const int nt = s.nt;
    auto z0 = [](const Mat2& m) { return BasisMat<AffinePoly1>{m.c1[0], m.c2[0], m.d[0], m.e[0]}; };
    auto a1 = z0(s.A1), a2 = z0(s.A2), b = z0(s.B);
    if (!(a1.c1 == AffinePoly1::of(TSeries::one(nt)) && a1.c2.is_zero() && a1.d.is_zero() && a1.e.is_zero()))
        throw Error(ErrorKind::UnfoldingViolation, "A1^(0) is not C1");
    const AffinePoly1* comps_a[3] = {&a2.c2, &a2.d, &a2.e};
    const AffinePoly1* comps_b[3] = {&b.c2, &b.d, &b.e};
    int pick = -1;
    for (int i = 0; i < 3; ++i)
        if (comps_a[i]->t1_free() && !comps_a[i]->c0[0].is_zero()) {
            pick = i;
            break;
        }
    if (pick < 0) throw Error(ErrorKind::UnfoldingViolation, "A1^(0), A2^(0) are not independent at the origin");
    if (!comps_b[pick]->t1_free()) throw Error(ErrorKind::UnfoldingViolation, "-B^(0) not in the span");
    TSeries e2 = -(comps_b[pick]->c0 * invert_unit(comps_a[pick]->c0));
    AffinePoly1 e2p = AffinePoly1::of(e2);
    for (int i = 0; i < 3; ++i) {
        AffinePoly1 rest = -*comps_b[i] - e2p * *comps_a[i];
        if (!rest.is_zero()) throw Error(ErrorKind::UnfoldingViolation, "-B^(0) not in the span of A1^(0), A2^(0)");
    }
    AffinePoly1 e1 = -b.c1 - e2p * a2.c1;
    return VectorField{e1, e2p};
}

inline EulerField induced_euler(const TEStruct& s) {
    auto e = as_euler(induced_vector_field(s));
    if (!e) throw Error(ErrorKind::UnfoldingViolation, "induced field is not of Euler shape");
    return *e;
}

// ---------------------------------------------------------------- pre-normal form

// A1 = C1, A2 = C2 + z f E, B = (-t1 + c + alpha z) C1 + b2 C2 + z b3 D + z b4 E
// with b3 = -(d2 b2 + 1)/2 and b4 = -(z/2) d2^2 b2 + f b2.
struct PreNormalForm {
    ZTSeries f;   // t1-free
    ZTSeries b2;  // t1-free
    Scalar c, alpha;
};

inline ZTSeries prenormal_b3(const ZTSeries& b2, int nt) {
    ZTSeries d = derive_t2(b2).truncated(b2.nz(), nt);
    return (d + ZTSeries::constant(Scalar(1), b2.nz(), nt)) * Scalar::frac(-1, 2);
}
inline ZTSeries prenormal_b4(const ZTSeries& b2, const ZTSeries& f, int nt) {
    ZTSeries dd = derive_t2(derive_t2(b2)).truncated(b2.nz(), nt);
    return dd.shift_z(1) * Scalar::frac(-1, 2) + f.truncated(b2.nz(), nt) * b2.truncated(b2.nz(), nt);
}

// master equation -(z/2) d2^3 b2 + (d2 f) b2 + 2 f d2 b2 - z dz f + f, at orders (nz, nt-3)
inline ZTSeries master_residual(const PreNormalForm& p) {
    const int nz = std::min(p.b2.nz(), p.f.nz());
    const int nt = std::max(std::min(p.b2.nt(), p.f.nt()) - 3, 0);
    auto cut = [&](const ZTSeries& s) { return s.truncated(nz, nt); };
    ZTSeries b2 = cut(p.b2), f = cut(p.f);
    ZTSeries d3 = cut(derive_t2(derive_t2(derive_t2(p.b2.truncated(nz, p.b2.nt())))));
    ZTSeries df = cut(derive_t2(p.f.truncated(nz, p.f.nt())));
    ZTSeries db = cut(derive_t2(p.b2.truncated(nz, p.b2.nt())));
    ZTSeries zdf(nz, nt);
    for (int k = 1; k < nz; ++k) zdf[k] = f[k] * Scalar(k);
    return d3.shift_z(1) * Scalar::frac(-1, 2) + df * b2 + f * db * Scalar(2) - zdf + f;
}

// Structure from pre-normal data. b2 must be known to t-order nt+2 and f to (nz, nt).
inline TEStruct prenormal_structure(const PreNormalForm& p, int nz, int nt) {
    if (p.b2.nt() < nt + 2 || p.b2.nz() < nz) throw Error(ErrorKind::OrderMismatch, "b2 needs t-order nt+2");
    // f enters only as z f, so nz-1 coefficients suffice
    if (p.f.nt() < nt || p.f.nz() < nz - 1) throw Error(ErrorKind::OrderMismatch, "f known to lower orders");
    if (!p.b2.t1_free() || !p.f.t1_free()) throw Error(ErrorKind::Shape, "f and b2 must not depend on t1");
    ZTSeries b2 = p.b2.truncated(nz, nt + 2);
    ZTSeries f = p.f.truncated(std::min(nz, p.f.nz()), nt).resized(nz, nt);
    TEStruct s;
    s.nz = nz;
    s.nt = nt;
    s.kind = StructKind::TE;
    s.A1 = mat_identity(nz, nt);
    s.A2 = mat_basis(BasisElem::C2, nz, nt);
    s.A2.e = f.shift_z(1);
    ZTSeries b1 = ZTSeries::constant(p.c, nz, nt) + ZTSeries::monomial(p.alpha, 1, 0, nz, nt) - ZTSeries::t1(nz, nt);
    s.B.c1 = b1;
    s.B.c2 = b2.truncated(nz, nt);
    s.B.d = prenormal_b3(b2, nt).shift_z(1);
    s.B.e = prenormal_b4(b2, f.resized(nz, nt), nt).shift_z(1);
    return s;
}

// Solves the master equation for b2 given f with f(0,0) != 0. The z^k coefficient of b2 is fixed by
// its value at t2 = 0 (init[k]); each z-order costs three t-orders, so f is read at t-order nt + 2 + 3 nz.
inline ZTSeries solve_master_for_b2(const ZTSeries& f, const std::vector<Scalar>& init, int nz, int nt) {
    const int N0 = nt + 2 + 3 * nz;
    if (f.nz() < nz || f.nt() < N0) throw Error(ErrorKind::OrderMismatch, "f needs orders (nz, nt + 2 + 3 nz)");
    if (!f.t1_free()) throw Error(ErrorKind::Shape, "f must not depend on t1");
    const TSeries f0 = f[0].c0;
    if (f0[0].is_zero()) throw Error(ErrorKind::NotAUnit, "f(0,0) = 0");
    std::vector<TSeries> b(static_cast<std::size_t>(nz));
    for (int k = 0; k < nz; ++k) {
        const int N = N0 - 3 * k;
        // 2 f0 b' + f0' b = R
        TSeries R(N);
        if (k > 0) R = R + derive(derive(derive(b[static_cast<std::size_t>(k - 1)]))).resized(N) * Scalar::frac(1, 2);
        for (int j = 1; j <= k; ++j) {
            const TSeries fj = f[j].c0.truncated(N), bj = b[static_cast<std::size_t>(k - j)].resized(N + 1);
            R = R - derive(fj).resized(N) * bj.truncated(N) - fj * derive(bj) * Scalar(2);
        }
        R = R + f[k].c0.truncated(N) * Scalar(k - 1);
        TSeries bk(N);
        bk[0] = k < static_cast<int>(init.size()) ? init[static_cast<std::size_t>(k)] : Scalar(0);
        const TSeries df0 = derive(f0.resized(N + 1));
        for (int n = 0; n + 1 < N; ++n) {
            Scalar acc = R[n];
            for (int j = 1; j <= n; ++j) acc -= f0[j] * bk[n - j + 1] * Scalar(2 * (n - j + 1));
            for (int j = 0; j <= n; ++j) acc -= df0[j] * bk[n - j];
            bk[n + 1] = acc / (f0[0] * Scalar(2 * (n + 1)));
        }
        b[static_cast<std::size_t>(k)] = bk;
    }
    ZTSeries out(nz, nt + 2);
    for (int k = 0; k < nz; ++k) out[k].c0 = b[static_cast<std::size_t>(k)].truncated(nt + 2);
    return out;
}

// Reads (f, b2, b1) off a structure of pre-normal shape up to the C1 coefficient, which is returned
// as the z-series b1 (constant in t). Throws a shape error otherwise.
struct PreNormalShape {
    ZTSeries f;   // orders (nz-1, nt)
    ZTSeries b2;  // orders (nz, nt)
    TSeries b1;   // z-series
};

inline PreNormalShape read_prenormal_shape(const TEStruct& s) {
    check_orders(s);
    const int nz = s.nz, nt = s.nt;
    if (nz < 2 || nt < 1) throw Error(ErrorKind::Shape, "orders too small for pre-normal analysis");
    if (!(s.A1 == mat_identity(nz, nt))) throw Error(ErrorKind::Shape, "A1 != C1");
    if (!(s.A2.c1.is_zero() && s.A2.d.is_zero() && s.A2.c2 == ZTSeries::constant(Scalar(1), nz, nt)))
        throw Error(ErrorKind::Shape, "A2 is not of the form C2 + z f E");
    if (!s.A2.e.t1_free() || !s.A2.e[0].is_zero()) throw Error(ErrorKind::Shape, "A2 E-coefficient not of the form z f");
    PreNormalShape out;
    out.f = s.A2.e.unshift_z(1);
    // B: C1 part -t1 + b1(z), others t1-free
    ZTSeries c1 = s.B.c1 + ZTSeries::t1(nz, nt);
    if (!c1.t1_free()) throw Error(ErrorKind::Shape, "B is not affine in t1 with slope -C1");
    if (depends_on_t2(c1)) throw Error(ErrorKind::Shape, "C1-coefficient of B depends on t2");
    if (!s.B.c2.t1_free() || !s.B.d.t1_free() || !s.B.e.t1_free()) throw Error(ErrorKind::Shape, "B depends on t1 outside C1");
    out.b1 = c1.at_origin();
    out.b2 = s.B.c2;
    if (!s.B.d[0].is_zero() || !s.B.e[0].is_zero()) throw Error(ErrorKind::Shape, "B^(0) has D or E components");
    // derived coefficients
    ZTSeries b3 = s.B.d.unshift_z(1), b4 = s.B.e.unshift_z(1);
    int nt3 = std::max(nt - 1, 0), nt4 = std::max(nt - 2, 0);
    ZTSeries b3x = prenormal_b3(out.b2.truncated(nz - 1, nt), nt3);
    if (!(b3.truncated(nz - 1, nt3) == b3x)) throw Error(ErrorKind::Shape, "D-coefficient of B violates b3 = -(d2 b2 + 1)/2");
    ZTSeries b4x = prenormal_b4(out.b2.truncated(nz - 1, nt), out.f, nt4);
    if (!(b4.truncated(nz - 1, nt4) == b4x)) throw Error(ErrorKind::Shape, "E-coefficient of B violates b4 = -(z/2) d2^2 b2 + f b2");
    return out;
}

inline bool is_prenormal(const TEStruct& s) {
    try {
        auto sh = read_prenormal_shape(s);
        for (int k = 2; k < sh.b1.order(); ++k)
            if (!sh.b1[k].is_zero()) return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

inline PreNormalForm prenormal_data(const TEStruct& s) {
    auto sh = read_prenormal_shape(s);
    for (int k = 2; k < sh.b1.order(); ++k)
        if (!sh.b1[k].is_zero()) throw Error(ErrorKind::Shape, "b1 has terms of z-degree >= 2");
    return PreNormalForm{sh.f, sh.b2, sh.b1.coeff(0), sh.b1.coeff(1)};
}

// ---------------------------------------------------------------- restriction to the origin

// Omega^restr = z^-2 ((c + alpha z) C1 + eta C2 - z(lam+1)/2 D + z(-z beta/2 + gam eta) E) dz
struct OriginRestriction {
    TSeries eta, lam, beta, gam;  // z-series
    Scalar c, alpha;
};

inline OriginRestriction restrict_origin(const PreNormalForm& p) {
    OriginRestriction r;
    r.eta = p.b2.t2_coeff_series(0);
    r.lam = p.b2.t2_coeff_series(1);
    r.beta = p.b2.t2_coeff_series(2) * Scalar(2);
    r.gam = p.f.t2_coeff_series(0);
    r.c = p.c;
    r.alpha = p.alpha;
    return r;
}
inline OriginRestriction restrict_origin(const TEStruct& s) { return restrict_origin(prenormal_data(s)); }

// B(z, 0, 0) as a matrix of z-series
inline TMat restriction_matrix(const TEStruct& s) {
    // t1 = t2 = 0: the t1 part drops out
    auto at0 = [](const ZTSeries& m) { return m.at_origin(); };
    return TMat{at0(s.B.c1), at0(s.B.c2), at0(s.B.d), at0(s.B.e)};
}

inline TMat restriction_matrix(const OriginRestriction& r) {
    const int n = r.eta.order();
    TSeries lam = r.lam.resized(n), beta = r.beta.resized(n), gam = r.gam.resized(n);
    TMat m{TSeries::constant(r.c, n) + TSeries::monomial(r.alpha, 1, n), r.eta,
           (lam + TSeries::one(n)).shifted(1) * Scalar::frac(-1, 2),
           (beta.shifted(1) * Scalar::frac(-1, 2) + gam * r.eta).shifted(1)};
    return m;
}

}  // namespace connexa
