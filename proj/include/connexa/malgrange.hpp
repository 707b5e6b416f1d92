#pragma once

// Malgrange universal unfoldings of connections in Birkhoff normal form, their holomorphic normal
// forms and the holomorphic classification of structures.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "connexa/connmat.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/origin.hpp"

namespace connexa {

// x, y solve
//   x' = -B21 x^2 + (B11 - B22) x + B12,      x(0) = 0
//   y' = y (2 B21 x + B22 - B11 - 1),          y(0) = c0
struct MalgrangeState {
    CMat B0o, Binf;  // B0o = c C1 + c0 C2
    TSeries x, y;
    std::optional<std::pair<Scalar, Scalar>> roots;  // a, b with x' = -B21 (x - a)(x - b)
    std::string closed_form;                          // which closed form was checked, empty if none
};

namespace detail {
inline bool lex_nonneg(const Scalar& s) { return sgn(s.re) > 0 || (sgn(s.re) == 0 && sgn(s.im) >= 0); }

// roots of B21 X^2 - (B11 - B22) X - B12, ordered so that b - a is lexicographically >= 0
inline std::optional<std::pair<Scalar, Scalar>> malgrange_roots(const CMat& Binf) {
    const Scalar B21 = Binf.c2, B12 = Binf.e, kap = Scalar(2) * Binf.d;
    if (B21.is_zero()) return std::nullopt;
    auto s = sqrt_exact(kap * kap + Scalar(4) * B21 * B12);
    if (!s) return std::nullopt;
    Scalar a = (kap - *s) / (Scalar(2) * B21), b = (kap + *s) / (Scalar(2) * B21);
    if (!lex_nonneg(b - a)) std::swap(a, b);
    return std::make_pair(a, b);
}

inline TSeries exp_lin(const Scalar& k, int n) { return exp_series(TSeries::monomial(k, 1, n)); }
}  // namespace detail

inline MalgrangeState malgrange_xy(const CMat& Binf, const Scalar& c0, int nt) {
    if (nt < 1) throw Error(ErrorKind::OrderMismatch, "t-order must be positive");
    const Scalar B21 = Binf.c2, B12 = Binf.e, kap = Scalar(2) * Binf.d;
    MalgrangeState st;
    st.Binf = Binf;
    st.B0o = CMat{0, c0, 0, 0};
    TSeries x(nt), y(nt);
    y[0] = c0;
    for (int n = 0; n + 1 < nt; ++n) {
        Scalar xx, xy;
        for (int j = 0; j <= n; ++j) {
            xx += x[j] * x[n - j];
            xy += x[j] * y[n - j];
        }
        Scalar rx = -B21 * xx + kap * x[n] + (n == 0 ? B12 : Scalar(0));
        Scalar ry = Scalar(2) * B21 * xy - (kap + Scalar(1)) * y[n];
        x[n + 1] = rx / Scalar(n + 1);
        y[n + 1] = ry / Scalar(n + 1);
    }
    st.x = x;
    st.y = y;
    st.roots = detail::malgrange_roots(Binf);

    // closed forms, available in the normalized shape B11 - B22 = -1/2, B12 = c0
    if (Binf.d != Scalar::frac(-1, 4) || B12 != c0 || c0.is_zero()) return st;
    TSeries cx, cy;
    const TSeries t = TSeries::t(nt), one = TSeries::one(nt);
    if (B21.is_zero()) {
        TSeries e = detail::exp_lin(Scalar::frac(-1, 2), nt);
        cx = (one - e) * (Scalar(2) * c0);
        cy = e * c0;
        st.closed_form = "B21 = 0";
    } else if (c0 * B21 == Scalar::frac(-1, 16)) {
        TSeries t4 = t + one * Scalar(4);
        cx = t * (Scalar(4) * c0) * invert_unit(t4);
        cy = detail::exp_lin(-1, nt) * t4 * t4 * (c0 / Scalar(16));
        st.closed_form = "double root";
    } else if (st.roots) {
        const auto& [a, b] = *st.roots;
        TSeries E = detail::exp_lin((b - a) * B21, nt);
        TSeries den = one * b - E * a;
        cx = (one - E) * (a * b) * invert_unit(den);
        cy = den * den * detail::exp_lin(B21 * (a - b) - Scalar(1), nt) * (c0 / ((b - a) * (b - a)));
        st.closed_form = "simple roots";
    } else {
        return st;
    }
    if (cx != x || cy != y) throw Error(ErrorKind::ReductionFailed, "closed form disagrees with the recursion (" + st.closed_form + ")");
    return st;
}

// both ODE residuals to t-order nt - 1
inline std::pair<TSeries, TSeries> malgrange_residual(const MalgrangeState& st) {
    const int n = st.x.order() - 1;
    if (n < 1) throw Error(ErrorKind::OrderMismatch, "residual needs t-order >= 2");
    const Scalar B21 = st.Binf.c2, B12 = st.Binf.e, kap = Scalar(2) * st.Binf.d;
    const TSeries x = st.x.truncated(n), y = st.y.truncated(n);
    TSeries rx = derive(st.x) + x * x * B21 - x * kap - TSeries::constant(B12, n);
    TSeries ry = derive(st.y) - y * (x * (Scalar(2) * B21) - TSeries::constant(kap + Scalar(1), n));
    return {rx, ry};
}

// A1 = C1, A2 = y [[x, -x^2], [1, -x]], B = A2 + (-t1 + c) C1 + z Binf
inline TEStruct malgrange_connection(const MalgrangeState& st, const Scalar& c, int nz, int nt) {
    if (st.x.order() < nt) throw Error(ErrorKind::OrderMismatch, "Malgrange state known to a lower t-order");
    if (nz < 2) throw Error(ErrorKind::OrderMismatch, "z-order must be at least 2");
    TSeries x = st.x.truncated(nt), y = st.y.truncated(nt);
    auto lift = [&](const TSeries& s) { return ZTSeries::from_t(s, nz); };
    TEStruct s;
    s.nz = nz;
    s.nt = nt;
    s.kind = StructKind::TE;
    s.A1 = mat_identity(nz, nt);
    s.A2 = Mat2{ZTSeries(nz, nt), lift(y), lift(x * y), lift(-(x * x * y))};
    ZTSeries zc = ZTSeries::monomial(1, 1, 0, nz, nt);
    s.B = s.A2;
    s.B.c1 = ZTSeries::constant(c, nz, nt) - ZTSeries::t1(nz, nt);
    s.B = s.B + Mat2{zc * st.Binf.c1, zc * st.Binf.c2, zc * st.Binf.d, zc * st.Binf.e};
    return s;
}

// Birkhoff data with B0o = c C1 + c0 C2 and Binf = alpha C1 + c1 C2 - D/4 + c0 E
inline MalgrangeState malgrange_xy(const BirkhoffData& d, int nt) { return malgrange_xy(d.Binf(), d.c0, nt); }
inline TEStruct malgrange_connection(const BirkhoffData& d, int nz, int nt) {
    return malgrange_connection(malgrange_xy(d, nt), d.c, nz, nt);
}

// ---------------------------------------------------------------- holomorphic normal forms

struct HoloNFResult {
    NormalFormId id;
    std::string branch;  // "i", "ii", "iii" or "first type"
    Scalar k, k1;        // second-type gauge parameters, k0 = 1
    TEStruct universal;  // the Malgrange connection the map starts from
    GaugeMap map;        // universal -> normal form
    TEStruct structure;
    std::vector<std::string> log;
};

inline void check_normalized(const BirkhoffData& d) {
    if (d.c0.is_zero()) throw Error(ErrorKind::Precondition, "c0 must be nonzero");
}

// c1 = 0: the unfolding is the pull-back of F1 along x
inline HoloNFResult first_type_normal_form(const BirkhoffData& d, int nz, int nt) {
    check_normalized(d);
    if (!d.c1.is_zero()) throw Error(ErrorKind::Precondition, "first-type normal form needs c1 = 0");
    const int N = nt + 1;
    MalgrangeState st = malgrange_xy(d, N);
    HoloNFResult out;
    out.branch = "first type";
    out.id = nf_f1(d.c, d.alpha, d.c0);
    out.universal = malgrange_connection(st, d.c, nz, N);
    ZTSeries tz = ZTSeries::monomial(1, 0, 1, nz, N);
    out.map = GaugeMap{mat_identity(nz, N) + mat_basis(BasisElem::E, nz, N, &tz), reverse(st.x)};
    out.log.push_back("pull back along x^-1, then gauge by C1 + t2 E");
    out.structure = apply_isomorphism(out.universal, out.map);
    if (out.structure != make_normal_form(out.id, nz, out.structure.nt))
        throw Error(ErrorKind::ReductionFailed, "first-type gauge did not reach F1");
    return out;
}

// c1 != 0. swap_roots exchanges a and b in the generic branch.
inline HoloNFResult holo_normal_form_second_type(const BirkhoffData& d, int nz, int nt, bool swap_roots = false) {
    check_normalized(d);
    if (d.c1.is_zero()) throw Error(ErrorKind::Precondition, "second-type normal form needs c1 != 0");
    const int N = nt + 1;
    const Scalar c0 = d.c0, B21 = d.c1;
    MalgrangeState st = malgrange_xy(d, N);
    HoloNFResult out;
    std::optional<TSeries> mu;  // mu2, identity when empty
    if (c0 * B21 == Scalar::frac(-1, 16)) {
        out.branch = "i";
        out.k = Scalar(4) * c0;
        out.k1 = Scalar(16) * c0 * c0 * c0;
        mu = TSeries::one(N) - detail::exp_lin(-1, N);
        out.id = hnf_mal(1, d.c, d.alpha, c0);
    } else {
        if (!st.roots)
            throw Error(ErrorKind::Exactness, "1 + 16 c0 c1 = " + (Scalar(1) + Scalar(16) * c0 * B21).str() + " is not a square in Q(i)");
        auto [a, b] = *st.roots;
        // lambda = 0 for one of the two orderings goes to branch iii
        if (B21 * (b - a) == Scalar(-1)) std::swap(a, b);
        else if (swap_roots && B21 * (b - a) != Scalar(1)) std::swap(a, b);
        const Scalar lam = B21 * (b - a) - Scalar(1);
        out.k = a;
        if (lam.is_zero()) {
            out.branch = "iii";
            out.k1 = a * a * c0;
            out.id = hnf_mal(3, d.c, d.alpha, c0);
        } else {
            out.branch = "ii";
            out.k1 = a * a;
            mu = (detail::exp_lin(lam, N) - TSeries::one(N)) * (c0 / lam);
            out.id = hnf_mal(2, d.c, d.alpha, c0, lam);
        }
    }
    // T = [[k, k1 x/(k-x)], [1, k1/(k-x)]]
    const TSeries x = st.x, one = TSeries::one(N);
    const TSeries w = invert_unit(one * out.k - x) * out.k1;
    auto lift = [&](const TSeries& s) { return ZTSeries::from_t(s, nz); };
    Mat2 T = Mat2::from_entries(lift(one * out.k), lift(x * w), lift(one), lift(w));
    out.universal = malgrange_connection(st, d.c, nz, N);
    if (mu) {
        TSeries mi = reverse(*mu);
        out.map = GaugeMap{compose_aut(T, mi), mi};
    } else {
        out.map = GaugeMap{T, std::nullopt};
    }
    out.log.push_back("branch " + out.branch + ": k = " + out.k.str() + ", k1/k0 = " + out.k1.str() +
                      (mu ? ", mu2 = " + mu->str() : ", mu2 = identity"));
    out.structure = apply_isomorphism(out.universal, out.map);
    if (out.structure.nt > nt) out.structure = out.structure.truncated(nz, nt);
    if (out.structure != make_normal_form(out.id, nz, out.structure.nt))
        throw Error(ErrorKind::ReductionFailed, "second-type gauge did not reach " + out.id.str());
    return out;
}

inline HoloNFResult holo_normal_form(const BirkhoffData& d, int nz, int nt) {
    return d.c1.is_zero() ? first_type_normal_form(d, nz, nt) : holo_normal_form_second_type(d, nz, nt);
}

// the invariant c1 of a holomorphic normal form
inline Scalar assign_c1(const NormalFormId& id) {
    validate(id);
    const Scalar c0 = id.params.count("c0") ? id.p("c0") : Scalar(0);
    switch (id.family) {
        case NFFamily::HNF_Mal1: return Scalar(-1) / (Scalar(16) * c0);
        case NFFamily::HNF_Mal2: {
            Scalar l = id.p("lambda");
            return (Scalar(4) * l * l + Scalar(8) * l + Scalar(3)) / (Scalar(16) * c0);
        }
        case NFFamily::HNF_Mal3: return Scalar(3) / (Scalar(16) * c0);
        case NFFamily::F1:
            if (!c0.is_zero()) return Scalar(0);
            break;
        default: break;
    }
    throw Error(ErrorKind::Domain, id.str() + " is elementary; c1 is defined for non-elementary forms only");
}

// ---------------------------------------------------------------- classification

struct HoloClassification {
    bool prenormal = false;
    bool elementary = false;
    std::optional<FormalNFResult> formal;  // formal normal form, when the input is pre-normal
    std::optional<NormalFormId> formal_id;
    std::optional<BirkhoffData> birkhoff;
    bool birkhoff_exact = false;  // the restriction was already Birkhoff: c1 is a holomorphic invariant
    std::optional<NormalFormId> holo_id;
    std::optional<Scalar> c1;
    std::optional<BirkhoffIsoVerdict> iso_to_formal;
    std::vector<std::string> warnings;
};

inline HoloClassification classify_holomorphic(const TEStruct& s, int nmax = 64) {
    HoloClassification out;
    out.prenormal = is_prenormal(s);
    out.elementary = is_elementary(s);
    if (out.prenormal) {
        try {
            out.formal = formal_normal_form(s);
            out.formal_id = out.formal->id;
            for (const auto& w : out.formal->warnings) out.warnings.push_back(w);
        } catch (const Error& e) {
            if (out.elementary) throw;
            out.warnings.push_back(std::string("formal normal form: ") + e.what());
        }
    }
    if (out.elementary) {
        // elementary: the formal classification is the holomorphic one
        if (!out.formal) throw Error(ErrorKind::Unsupported, "elementary structure not in pre-normal shape");
        out.holo_id = out.formal_id;
        return out;
    }
    TMat R = restriction_matrix(s);
    BirkhoffReduction red = birkhoff_reduce(R);
    out.birkhoff_exact = red.exact;
    if (!red.exact)
        out.warnings.push_back("restriction is not of z-degree <= 1 in the residue frame; c1 comes from a formal reduction");
    NormalizedBirkhoff nb = normalize_birkhoff(red.B0, red.Binf);
    out.birkhoff = nb.data;
    out.c1 = nb.data.c1;
    out.formal_id = nf_f1(nb.data.c, nb.data.alpha, nb.data.c0);
    out.iso_to_formal = birkhoff_iso_decision(nb.data, BirkhoffData{nb.data.c, nb.data.alpha, nb.data.c0, 0}, nmax);
    const int nz = std::max(s.nz, 2), nt = 2;
    try {
        out.holo_id = holo_normal_form(nb.data, nz, nt).id;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Exactness) throw;
        out.warnings.push_back(std::string("holomorphic normal form: ") + e.what());
    }
    return out;
}

}  // namespace connexa
