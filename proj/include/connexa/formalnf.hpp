#pragma once

// Formal classification over N2: pre-normal reduction, extension solving, formal normal forms
// and the formal isomorphism decision.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "connexa/connmat.hpp"
#include "connexa/error.hpp"
#include "connexa/linalg.hpp"
#include "connexa/scalar.hpp"
#include "connexa/series.hpp"

namespace connexa {

// ---------------------------------------------------------------- normal-form identifiers

enum class NFFamily {
    F1,
    Fr,
    NF3_1,
    NF3_2,
    NF3_3,
    NF3_4,
    NF3_5,
    NF3_6,
    NF3_7,
    NF3_8,
    NF3_9,
    HNF_Mal1,
    HNF_Mal2,
    HNF_Mal3,
};

inline const char* family_name(NFFamily f) {
    switch (f) {
        case NFFamily::F1: return "F1";
        case NFFamily::Fr: return "Fr";
        case NFFamily::NF3_1: return "NF3-1";
        case NFFamily::NF3_2: return "NF3-2";
        case NFFamily::NF3_3: return "NF3-3";
        case NFFamily::NF3_4: return "NF3-4";
        case NFFamily::NF3_5: return "NF3-5";
        case NFFamily::NF3_6: return "NF3-6";
        case NFFamily::NF3_7: return "NF3-7";
        case NFFamily::NF3_8: return "NF3-8";
        case NFFamily::NF3_9: return "NF3-9";
        case NFFamily::HNF_Mal1: return "HNF-Mal1";
        case NFFamily::HNF_Mal2: return "HNF-Mal2";
        case NFFamily::HNF_Mal3: return "HNF-Mal3";
    }
    return "?";
}

inline std::optional<NFFamily> family_from_name(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(NFFamily::HNF_Mal3); ++k) {
        auto f = static_cast<NFFamily>(k);
        if (s == family_name(f)) return f;
    }
    return std::nullopt;
}

inline bool is_nf3(NFFamily f) { return f >= NFFamily::NF3_1 && f <= NFFamily::NF3_9; }
inline bool is_hnf(NFFamily f) { return f >= NFFamily::HNF_Mal1; }

struct NormalFormId {
    NFFamily family = NFFamily::F1;
    std::map<std::string, Scalar> params;  // c, alpha, c0, r, lambda, gamma

    Scalar p(const std::string& k) const {
        auto it = params.find(k);
        if (it == params.end()) throw Error(ErrorKind::Domain, std::string(family_name(family)) + " has no parameter " + k);
        return it->second;
    }
    std::string str() const {
        std::string s = family_name(family);
        s += "(";
        bool first = true;
        for (const auto& [k, v] : params) {
            if (!first) s += ", ";
            first = false;
            s += k + "=" + v.str();
        }
        return s + ")";
    }
    friend bool operator==(const NormalFormId& a, const NormalFormId& b) {
        return a.family == b.family && a.params == b.params;
    }
    friend bool operator!=(const NormalFormId& a, const NormalFormId& b) { return !(a == b); }
};

inline std::vector<std::string> required_params(NFFamily f) {
    switch (f) {
        case NFFamily::F1: return {"alpha", "c", "c0"};
        case NFFamily::Fr: return {"alpha", "c", "r"};
        case NFFamily::NF3_1:
        case NFFamily::NF3_2: return {"alpha", "c"};
        case NFFamily::NF3_3:
        case NFFamily::NF3_4:
        case NFFamily::NF3_6:
        case NFFamily::NF3_7:
        case NFFamily::NF3_8:
        case NFFamily::NF3_9: return {"alpha", "c", "lambda"};
        case NFFamily::NF3_5: return {"alpha", "c", "gamma", "lambda"};
        case NFFamily::HNF_Mal1:
        case NFFamily::HNF_Mal3: return {"alpha", "c", "c0"};
        case NFFamily::HNF_Mal2: return {"alpha", "c", "c0", "lambda"};
    }
    return {};
}

// parameter presence and the integrality / exclusion constraints of each family
inline void validate(const NormalFormId& id) {
    auto req = required_params(id.family);
    if (id.params.size() != req.size()) throw Error(ErrorKind::Domain, "wrong parameter set for " + id.str());
    for (const auto& k : req)
        if (!id.params.count(k)) throw Error(ErrorKind::Domain, "missing parameter " + k + " in " + id.str());
    auto bad = [&](const std::string& why) { throw Error(ErrorKind::Domain, id.str() + ": " + why); };
    const bool has_l = id.params.count("lambda") > 0;
    Scalar l = has_l ? id.p("lambda") : Scalar(0);
    switch (id.family) {
        case NFFamily::Fr:
            if (!id.p("r").is_integer() || id.p("r").to_long() < 1) bad("r must be a positive integer");
            break;
        case NFFamily::NF3_3:
            if (l.is_zero() || l.is_integer()) bad("lambda must not be an integer");
            break;
        case NFFamily::NF3_4:
            if (l.is_integer() && !l.is_zero()) bad("lambda must not be a nonzero integer");
            break;
        case NFFamily::NF3_5:
        case NFFamily::NF3_6:
        case NFFamily::NF3_7:
            if (!l.is_integer() || l.to_long() < 1) bad("lambda must be an integer >= 1");
            break;
        case NFFamily::NF3_8:
        case NFFamily::NF3_9:
            if (!l.is_integer() || l.to_long() > -1) bad("lambda must be an integer <= -1");
            break;
        case NFFamily::F1:
        case NFFamily::HNF_Mal1:
        case NFFamily::HNF_Mal3:
            if (is_hnf(id.family) && id.p("c0").is_zero()) bad("c0 must be nonzero");
            break;
        case NFFamily::HNF_Mal2:
            if (id.p("c0").is_zero()) bad("c0 must be nonzero");
            if (l.is_zero()) bad("lambda must be nonzero");
            break;
        default: break;
    }
}

inline NormalFormId nf_f1(const Scalar& c, const Scalar& alpha, const Scalar& c0) {
    return {NFFamily::F1, {{"c", c}, {"alpha", alpha}, {"c0", c0}}};
}
inline NormalFormId nf_fr(const Scalar& c, const Scalar& alpha, int r) {
    return {NFFamily::Fr, {{"c", c}, {"alpha", alpha}, {"r", Scalar(r)}}};
}
inline NormalFormId nf3(int k, const Scalar& c, const Scalar& alpha, const Scalar& lambda = 0, const Scalar& gamma = 0) {
    if (k < 1 || k > 9) throw Error(ErrorKind::Domain, "NF3 index out of range");
    NormalFormId id{static_cast<NFFamily>(static_cast<int>(NFFamily::NF3_1) + k - 1), {{"c", c}, {"alpha", alpha}}};
    if (k >= 3) id.params["lambda"] = lambda;
    if (k == 5) id.params["gamma"] = gamma;
    return id;
}
inline NormalFormId hnf_mal(int k, const Scalar& c, const Scalar& alpha, const Scalar& c0, const Scalar& lambda = 0) {
    if (k < 1 || k > 3) throw Error(ErrorKind::Domain, "HNF index out of range");
    NormalFormId id{static_cast<NFFamily>(static_cast<int>(NFFamily::HNF_Mal1) + k - 1), {{"c", c}, {"alpha", alpha}, {"c0", c0}}};
    if (k == 2) id.params["lambda"] = lambda;
    return id;
}

// f at orders (nz, nt), b2 at (nz, nt + 2)
inline PreNormalForm make_normal_form_data(const NormalFormId& id, int nz, int nt) {
    validate(id);
    const int nb = nt + 2;
    PreNormalForm p;
    p.c = id.p("c");
    p.alpha = id.p("alpha");
    p.f = ZTSeries(nz, nt);
    p.b2 = ZTSeries(nz, nb);
    auto set_b2 = [&](int k, const TSeries& s) {
        if (k < nz) p.b2[k].c0 += s;
    };
    const Scalar half = Scalar::frac(1, 2);
    switch (id.family) {
        case NFFamily::F1:
            p.f = ZTSeries::constant(1, nz, nt);
            set_b2(0, TSeries::poly({id.p("c0"), -half}, nb));
            break;
        case NFFamily::Fr: {
            long r = id.p("r").to_long();
            p.f = ZTSeries::from_t(TSeries::monomial(1, static_cast<int>(r), nt), nz);
            set_b2(0, TSeries::monomial(Scalar(-1) / Scalar(r + 2), 1, nb));
            break;
        }
        case NFFamily::NF3_1: break;
        case NFFamily::NF3_2: set_b2(0, TSeries::monomial(1, 2, nb)); break;
        case NFFamily::NF3_3:
        case NFFamily::NF3_7:
        case NFFamily::NF3_9: set_b2(0, TSeries::monomial(id.p("lambda"), 1, nb)); break;
        case NFFamily::NF3_4: set_b2(0, TSeries::poly({1, id.p("lambda")}, nb)); break;
        case NFFamily::NF3_5: {
            Scalar l = id.p("lambda");
            set_b2(0, TSeries::poly({1, l}, nb));
            set_b2(static_cast<int>(l.to_long()), TSeries::monomial(id.p("gamma"), 2, nb));
            break;
        }
        case NFFamily::NF3_6: {
            Scalar l = id.p("lambda");
            set_b2(0, TSeries::monomial(l, 1, nb));
            set_b2(static_cast<int>(l.to_long()), TSeries::monomial(1, 2, nb));
            break;
        }
        case NFFamily::NF3_8: {
            Scalar l = id.p("lambda");
            set_b2(0, TSeries::monomial(l, 1, nb));
            set_b2(static_cast<int>(-l.to_long()), TSeries::constant(1, nb));
            break;
        }
        case NFFamily::HNF_Mal1: {
            Scalar c0 = id.p("c0");
            TSeries geo(nt);
            for (int k = 0; k < nt; ++k) geo[k] = c0 * c0;
            p.f = ZTSeries::from_t(geo, nz);
            set_b2(0, TSeries::poly({1, -1}, nb));
            break;
        }
        case NFFamily::HNF_Mal2: {
            Scalar c0 = id.p("c0"), l = id.p("lambda");
            TSeries u = TSeries::poly({1, l / c0}, nt);
            p.f = ZTSeries::from_t(pow_unit(u, Scalar(-2) - l.inv()), nz);
            set_b2(0, TSeries::poly({c0, l}, nb));
            break;
        }
        case NFFamily::HNF_Mal3: {
            Scalar c0 = id.p("c0");
            p.f = ZTSeries::from_t(exp_series(TSeries::monomial(-1, 1, nt)) * (c0 * c0), nz);
            set_b2(0, TSeries::constant(1, nb));
            break;
        }
    }
    return p;
}

inline TEStruct make_normal_form(const NormalFormId& id, int nz, int nt) {
    return prenormal_structure(make_normal_form_data(id, nz, nt), nz, nt);
}

// ---------------------------------------------------------------- transformation logs

struct LogStep {
    std::string name;
    GaugeMap map;
};

inline TEStruct replay(const TEStruct& s, const std::vector<LogStep>& log) {
    TEStruct cur = s;
    for (const auto& st : log) cur = apply_isomorphism(cur, st.map);
    return cur;
}

// ---------------------------------------------------------------- pre-normal reduction

struct PreNormalResult {
    PreNormalForm data;  // f at (nz-1, nt), b2 at (nz, nt)
    GaugeMap gauge;
    bool identity = true;
};

// Kills b1^(k), k >= 2, by T = exp(-sum_{k>=2} b1^(k) z^(k-1)/(k-1)) C1 and checks the master equation.
inline PreNormalResult to_prenormal(const TEStruct& s) {
    auto sh = read_prenormal_shape(s);
    const int nz = s.nz, nt = s.nt;
    TSeries expo(nz);
    bool id = true;
    for (int k = 2; k < nz; ++k)
        if (!sh.b1[k].is_zero()) {
            expo[k - 1] = -sh.b1[k] / Scalar(k - 1);
            id = false;
        }
    ZTSeries tz = ZTSeries::from_z(exp_series(expo), nt);
    PreNormalResult out;
    out.gauge = GaugeMap{mat_basis(BasisElem::C1, nz, nt, &tz), std::nullopt};
    out.identity = id;
    out.data = PreNormalForm{sh.f, sh.b2, sh.b1.coeff(0), sh.b1.coeff(1)};
    if (!master_residual(out.data).is_zero())
        throw Error(ErrorKind::Precondition, "pre-normal data violate the master equation (structure is not flat)");
    return out;
}

// ---------------------------------------------------------------- extensions of the (T)-normal forms

enum class FShapeKind { One, TPower, PerturbedTPower, Zero, Other };

struct FShape {
    FShapeKind kind = FShapeKind::Other;
    int r = 0;
};

inline FShape f_shape(const ZTSeries& f) {
    FShape out;
    if (f.nz() == 0 || f.nt() == 0) return out;
    if (!f.t1_free()) return out;
    if (f.is_zero()) {
        out.kind = FShapeKind::Zero;
        return out;
    }
    const TSeries& f0 = f[0].c0;
    auto v = f0.valuation();
    if (!v || f0.degree() != *v || !f0[*v].is_one()) return out;
    int r = *v;
    bool higher_zero = true, higher_low = true;
    for (int k = 1; k < f.nz(); ++k) {
        if (!f[k].c0.is_zero()) higher_zero = false;
        if (f[k].c0.degree() > r - 2) higher_low = false;
    }
    out.r = r;
    if (higher_zero) {
        out.kind = r == 0 ? FShapeKind::One : FShapeKind::TPower;
        return out;
    }
    if (r >= 2 && higher_low) out.kind = FShapeKind::PerturbedTPower;
    return out;
}

struct ExtensionInfo {
    std::string case_id;   // "i" .. "iv"
    int r = 0;
    std::string description;
    std::optional<TSeries> b2_0;  // the unique b2^(0) when it is forced
};

inline ExtensionInfo solve_b2_extensions(const ZTSeries& f, int nt) {
    FShape sh = f_shape(f);
    ExtensionInfo e;
    switch (sh.kind) {
        case FShapeKind::One:
            e.case_id = "i";
            e.description = "b2 = -t2/2 + sum_k c_k z^k with free constants c_k";
            e.b2_0 = std::nullopt;
            return e;
        case FShapeKind::TPower:
            e.case_id = sh.r == 1 ? "ii" : "iv";
            e.r = sh.r;
            e.b2_0 = TSeries::monomial(Scalar(-1) / Scalar(sh.r + 2), 1, nt);
            e.description = "b2 = -t2/" + std::to_string(sh.r + 2) + " (unique)";
            return e;
        case FShapeKind::Zero:
            e.case_id = "iii";
            e.description = "every b2 with d2^3 b2^(n) = 0 for all n";
            return e;
        case FShapeKind::PerturbedTPower:
            throw Error(ErrorKind::NoExtension,
                        "f = t2^" + std::to_string(sh.r) + " + sum P_k z^k extends only when every P_k vanishes");
        case FShapeKind::Other: break;
    }
    throw Error(ErrorKind::Unsupported, "f is not one of 1, t2^r, 0: requires (T)-normalization first");
}

// ---------------------------------------------------------------- formal normal forms

struct FormalNFResult {
    NormalFormId id;
    std::vector<LogStep> log;
    std::vector<NormalFormId> alternates;  // other normal forms in the same formal class
    std::vector<std::string> warnings;
    std::string extension_case;
    bool replay_checked = false;
    int replay_nt = 0;  // t-order at which the replay matched
};

namespace detail {

// quadratic work polynomials live in TSeries of this order
constexpr int kPolyOrder = 8;

inline TSeries poly_of(const TSeries& s) {
    if (s.degree() > 2) throw Error(ErrorKind::Unsupported, "b2 coefficient of t2-degree > 2 with f = 0");
    return s.truncated(std::min(s.order(), 3)).resized(kPolyOrder);
}
inline TSeries pd(const TSeries& s) { return derive(s).resized(kPolyOrder); }

// B^(l) without the C1 part, from the z-coefficients of b2 (f = 0)
inline TMat b_coeff(const std::vector<TSeries>& b, int l) {
    const int W = kPolyOrder;
    auto bk = [&](int k) { return (k >= 0 && k < static_cast<int>(b.size())) ? b[static_cast<std::size_t>(k)] : TSeries(W); };
    TMat m{TSeries(W), bk(l), TSeries(W), TSeries(W)};
    if (l >= 1) {
        TSeries b3 = pd(bk(l - 1));
        if (l == 1) b3 += TSeries::one(W);
        m.d = b3 * Scalar::frac(-1, 2);
        if (l >= 2) m.e = pd(pd(bk(l - 2))) * Scalar::frac(-1, 2);
    }
    return m;
}

inline TMat t_coeff(const std::vector<Scalar>& tau1, const std::vector<TSeries>& tau2, int m) {
    const int W = kPolyOrder;
    auto t2 = [&](int k) { return (k >= 0 && k < static_cast<int>(tau2.size())) ? tau2[static_cast<std::size_t>(k)] : TSeries(W); };
    Scalar t1 = (m >= 0 && m < static_cast<int>(tau1.size())) ? tau1[static_cast<std::size_t>(m)] : Scalar(0);
    return TMat{TSeries::constant(t1, W), t2(m), pd(t2(m - 1)) * Scalar::frac(-1, 2), pd(pd(t2(m - 2))) * Scalar::frac(-1, 2)};
}

// relation at z^r: (r-1) T^(r-1) + sum_l (B^(l) T^(r-l) - T^(r-l) Bt^(l))
inline std::vector<Scalar> relation(const std::vector<TSeries>& b, const std::vector<TSeries>& bt, const std::vector<Scalar>& tau1,
                                    const std::vector<TSeries>& tau2, int r) {
    TMat acc = t_coeff(tau1, tau2, r - 1) * Scalar(r - 1);
    for (int l = 0; l <= r; ++l) {
        TMat T = t_coeff(tau1, tau2, r - l);
        if (T.is_zero()) continue;
        acc += b_coeff(b, l) * T - T * b_coeff(bt, l);
    }
    std::vector<Scalar> out;
    for (const TSeries* c : {&acc.c1, &acc.c2, &acc.d, &acc.e})
        for (int k = 0; k < c->order(); ++k) out.push_back((*c)[k]);
    return out;
}

enum class CorrMode { Zero, TSquared, Constant };

struct Correction {
    int order;
    CorrMode mode;
    Scalar value;
};

inline Mat2 diag_mat(const ZTSeries& p, const ZTSeries& q) {
    Scalar h = Scalar::frac(1, 2);
    Mat2 m = mat_zero(p.nz(), p.nt());
    m.c1 = (p + q) * h;
    m.d = (p - q) * h;
    return m;
}

struct F1Gauge {
    Mat2 T;
    bool identity;
};

// T = tau1(z) C1 + tau2(z) (C2 + z E) removing sum_{k>=1} c_k z^k from b2
inline F1Gauge f1_gauge(const std::vector<Scalar>& ck, int nz, int nt) {
    auto c = [&](int k) { return (k >= 1 && k < static_cast<int>(ck.size())) ? ck[static_cast<std::size_t>(k)] : Scalar(0); };
    std::vector<Scalar> t1(static_cast<std::size_t>(nz)), t2(static_cast<std::size_t>(nz));
    t1[0] = 1;
    bool id = true;
    for (int n = 1; n <= nz; ++n) {
        if (n >= 2) {
            Scalar acc;
            for (int l = 2; l <= n; ++l) acc += c(l - 1) * t2[static_cast<std::size_t>(n - l)];
            t1[static_cast<std::size_t>(n - 1)] = -acc / Scalar(n - 1);
        }
        Scalar acc;
        for (int l = 1; l <= n; ++l) acc += c(l) * t1[static_cast<std::size_t>(n - l)];
        t2[static_cast<std::size_t>(n - 1)] = -acc / (Scalar(n) - Scalar::frac(1, 2));
    }
    TSeries s1(nz), s2(nz);
    for (int k = 0; k < nz; ++k) {
        s1[k] = t1[static_cast<std::size_t>(k)];
        s2[k] = t2[static_cast<std::size_t>(k)];
        if ((k > 0 && !s1[k].is_zero()) || !s2[k].is_zero()) id = false;
    }
    Mat2 T = mat_zero(nz, nt);
    T.c1 = ZTSeries::from_z(s1, nt);
    T.c2 = ZTSeries::from_z(s2, nt);
    T.e = T.c2.shift_z(1);
    return {T, id};
}

}  // namespace detail


namespace detail {

// gauge killing the higher z-coefficients of b2 when f = 0; returns the new b2 coefficients
struct Nf3Gauge {
    Mat2 T;
    std::vector<TSeries> bt;
    std::vector<Correction> corrections;
    bool identity = true;
};

inline Nf3Gauge nf3_gauge(const std::vector<TSeries>& b, int nz, int ntT) {
    const int W = kPolyOrder;
    Nf3Gauge out;
    std::vector<Scalar> tau1(static_cast<std::size_t>(nz));
    std::vector<TSeries> tau2(static_cast<std::size_t>(nz), TSeries(W));
    std::vector<TSeries> bt(static_cast<std::size_t>(nz), TSeries(W));
    tau1[0] = 1;
    bt[0] = b[0];
    for (int n = 0; n + 1 < nz; ++n) {
        const int r = n + 1;
        bool solved = false;
        for (CorrMode mode : {CorrMode::Zero, CorrMode::TSquared, CorrMode::Constant}) {
            // unknowns: tau1^(n) (n >= 1), tau2^(n) coefficients 0..2, the correction value
            std::vector<int> kinds;
            if (n >= 1) kinds.push_back(0);
            kinds.insert(kinds.end(), {1, 2, 3});
            if (mode != CorrMode::Zero) kinds.push_back(4);
            auto set = [&](const std::vector<Scalar>& x) {
                if (n >= 1) tau1[static_cast<std::size_t>(n)] = 0;
                tau2[static_cast<std::size_t>(n)] = TSeries(W);
                bt[static_cast<std::size_t>(r)] = TSeries(W);
                for (std::size_t i = 0; i < kinds.size(); ++i) {
                    switch (kinds[i]) {
                        case 0: tau1[static_cast<std::size_t>(n)] = x[i]; break;
                        case 1:
                        case 2:
                        case 3: tau2[static_cast<std::size_t>(n)][kinds[i] - 1] = x[i]; break;
                        case 4:
                            bt[static_cast<std::size_t>(r)][mode == CorrMode::TSquared ? 2 : 0] = x[i];
                            break;
                    }
                }
            };
            const std::size_t m = kinds.size();
            std::vector<Scalar> zero(m);
            set(zero);
            std::vector<Scalar> r0 = relation(b, bt, tau1, tau2, r);
            std::vector<std::vector<Scalar>> A(r0.size(), std::vector<Scalar>(m));
            for (std::size_t j = 0; j < m; ++j) {
                std::vector<Scalar> ej(m);
                ej[j] = 1;
                set(ej);
                std::vector<Scalar> rj = relation(b, bt, tau1, tau2, r);
                for (std::size_t i = 0; i < r0.size(); ++i) A[i][j] = rj[i] - r0[i];
            }
            std::vector<Scalar> rhs(r0.size());
            for (std::size_t i = 0; i < r0.size(); ++i) rhs[i] = -r0[i];
            LinearSolution sol = solve_linear(A, rhs);
            if (!sol.consistent) continue;
            set(sol.x);
            if (mode != CorrMode::Zero) {
                Scalar v = sol.x.back();
                if (v.is_zero()) continue;  // the zero mode already failed, so a zero value cannot occur
                out.corrections.push_back({r, mode, v});
            }
            solved = true;
            break;
        }
        if (!solved)
            throw Error(ErrorKind::ReductionFailed, "no admissible b2 correction at z-order " + std::to_string(r));
    }
    Mat2 T = mat_zero(nz, ntT);
    for (int mm = 0; mm < nz; ++mm) {
        TMat tm = t_coeff(tau1, tau2, mm);
        for (int j = 0; j < std::min(ntT, W); ++j) {
            T.c1[mm].c0[j] = tm.c1[j];
            T.c2[mm].c0[j] = tm.c2[j];
            T.d[mm].c0[j] = tm.d[j];
            T.e[mm].c0[j] = tm.e[j];
        }
    }
    out.identity = T == mat_identity(nz, ntT);
    out.T = T;
    out.bt = bt;
    return out;
}

inline std::vector<TSeries> b2_polys(const TEStruct& s) {
    auto sh = read_prenormal_shape(s);
    if (!sh.f.is_zero()) throw Error(ErrorKind::ReductionFailed, "f became nonzero during the f = 0 reduction");
    std::vector<TSeries> b(static_cast<std::size_t>(s.nz));
    for (int k = 0; k < s.nz; ++k) b[static_cast<std::size_t>(k)] = poly_of(sh.b2[k].c0);
    return b;
}

}  // namespace detail

// Full pipeline on a structure of pre-normal shape (A1 = C1, A2 = C2 + z f E). Every logged step is an
// isomorphism; replaying the log on `s` gives make_normal_form(id) at orders (nz, replay_nt).
inline FormalNFResult formal_normal_form(const TEStruct& s) {
    using namespace detail;
    const int nz = s.nz, nt = s.nt;
    FormalNFResult out;
    PreNormalResult pn = to_prenormal(s);
    if (!pn.identity) out.log.push_back({"pre-normal gauge exp(-sum b1^(k) z^(k-1)/(k-1)) C1", pn.gauge});
    const PreNormalForm& p = pn.data;
    ExtensionInfo ext = solve_b2_extensions(p.f, nt);
    out.extension_case = ext.case_id;
    const Scalar c = p.c, alpha = p.alpha;
    FShape sh = f_shape(p.f);

    if (sh.kind == FShapeKind::One) {
        std::vector<Scalar> ck(static_cast<std::size_t>(nz));
        for (int k = 0; k < nz; ++k) {
            const TSeries& bk = p.b2[k].c0;
            TSeries expect = TSeries::constant(bk.coeff(0), nt);
            if (k == 0) expect += TSeries::monomial(Scalar::frac(-1, 2), 1, nt);
            if (bk != expect) throw Error(ErrorKind::ReductionFailed, "b2 is not of the form -t2/2 + sum c_k z^k");
            ck[static_cast<std::size_t>(k)] = bk.coeff(0);
        }
        auto g = f1_gauge(ck, nz, nt);
        if (!g.identity) out.log.push_back({"F1 gauge tau1 C1 + tau2 (C2 + z E)", GaugeMap{g.T, std::nullopt}});
        out.id = nf_f1(c, alpha, ck[0]);
        if (!ck[0].is_zero()) out.alternates.push_back(nf_f1(c, alpha, -ck[0]));
        if (ck[0].is_zero()) out.warnings.push_back("c0 = 0: the F1 sign exception does not apply");
    } else if (sh.kind == FShapeKind::TPower) {
        TSeries expect = TSeries::monomial(Scalar(-1) / Scalar(sh.r + 2), 1, nt);
        for (int k = 0; k < nz; ++k)
            if (p.b2[k].c0 != (k == 0 ? expect : TSeries(nt)))
                throw Error(ErrorKind::ReductionFailed, "b2 differs from the unique extension -t2/(r+2)");
        out.id = nf_fr(c, alpha, sh.r);
    } else {
        // f = 0
        if (nt < 3) throw Error(ErrorKind::Precondition, "t-order >= 3 needed to read quadratic b2 coefficients");
        const int ntT = nt + 1;  // maps supplied one order longer keep the t-order
        TEStruct cur = pn.identity ? s : apply_gauge(s, pn.gauge.T);
        std::vector<TSeries> b = b2_polys(cur);

        // step 1: b2^(0) -> one of 0, t^2, lambda t, lambda t + 1
        Scalar qa = b[0].coeff(2), qb = b[0].coeff(1), qc = b[0].coeff(0);
        Scalar k = 1, d = 1, e = 0;
        // 0, lambda t, t^2, and lambda t + 1 unless lambda is a negative integer
        const bool canonical = (qa.is_zero() && qc.is_zero()) || (qa.is_one() && qb.is_zero() && qc.is_zero()) ||
                               (qa.is_zero() && qc.is_one() && !(qb.is_integer() && qb.to_long() <= -1));
        if (canonical) {
            // already one of 0, t^2, lambda t, lambda t + 1
        } else if (!qc.is_zero()) {
            d = qc.inv();
            Scalar disc = qb * qb - Scalar(4) * qa * qc;
            auto root = sqrt_exact(disc);
            if (!root) throw Error(ErrorKind::Exactness, "normalizing b2^(0) needs sqrt(" + disc.str() + "), which is not in Q(i)");
            e = (*root - qb) / (Scalar(2) * qc);
        } else if (!qb.is_zero()) {
            e = -qa / qb;
        } else if (!qa.is_zero()) {
            d = qa;
        }
        if (!(k.is_one() && d.is_one() && e.is_zero())) {
            TSeries den = TSeries::poly({d, e}, ntT);
            ZTSeries p1 = ZTSeries::from_t(den, nz);
            ZTSeries q1 = ZTSeries::from_t(invert_unit(den) * (k * d), nz);
            Mat2 T = diag_mat(p1, q1);
            T.e = ZTSeries::monomial(e, 1, 0, nz, ntT);
            TSeries lam = TSeries::t(ntT) * k * invert_unit(den);
            out.log.push_back({"b2^(0) normalization: T = diag(e t + d, k d/(e t + d)) + z e E over t -> k t/(e t + d)",
                               GaugeMap{T, lam}});
            cur = apply_isomorphism(cur, out.log.back().map);
            PreNormalResult again = to_prenormal(cur);
            if (!again.identity) {
                out.log.push_back({"pre-normal gauge", again.gauge});
                cur = apply_gauge(cur, again.gauge.T);
            }
            b = b2_polys(cur);
        }
        const TSeries b0 = b[0];

        // step 2: gauge automorphisms fixing A1, A2 remove the higher coefficients
        Nf3Gauge g = nf3_gauge(b, nz, ntT);
        if (!g.identity) {
            out.log.push_back({"order-by-order gauge fixing A1 = C1, A2 = C2", GaugeMap{g.T, std::nullopt}});
            cur = apply_gauge(cur, g.T);
        }

        // classification of b0 plus corrections
        Scalar B2 = b0.coeff(2), B1 = b0.coeff(1), B0 = b0.coeff(0);
        auto fail = [&](const std::string& why) { throw Error(ErrorKind::ReductionFailed, why); };
        auto only = [&](int order, CorrMode mode) -> Scalar {
            Scalar v;
            for (const auto& cr : g.corrections) {
                if (cr.order != order || cr.mode != mode) fail("unexpected b2 correction at z-order " + std::to_string(cr.order));
                v = cr.value;
            }
            return v;
        };
        const Scalar lam = B1;
        auto warn_lambda = [&](long l) {
            if (std::labs(l) >= nz - 1)
                out.warnings.push_back("|lambda| >= nz - 1: the z^|lambda| coefficient lies at or beyond the truncation, the modulus is not determined");
        };
        if (B2.is_zero() && B1.is_zero() && B0.is_zero()) {
            only(-1, CorrMode::Zero);
            out.id = nf3(1, c, alpha);
        } else if (B2.is_one() && B1.is_zero() && B0.is_zero()) {
            only(-1, CorrMode::Zero);
            out.id = nf3(2, c, alpha);
        } else if (B2.is_zero() && B0.is_one()) {
            if (lam.is_integer() && lam.to_long() >= 1) {
                warn_lambda(lam.to_long());
                Scalar gam = only(static_cast<int>(lam.to_long()), CorrMode::TSquared);
                out.id = nf3(5, c, alpha, lam, gam);
            } else {
                only(-1, CorrMode::Zero);
                out.id = nf3(4, c, alpha, lam);
                if (!lam.is_zero()) out.alternates.push_back(nf3(4, c, alpha, -lam));
            }
        } else if (B2.is_zero() && B0.is_zero() && !lam.is_zero()) {
            if (!lam.is_integer()) {
                only(-1, CorrMode::Zero);
                out.id = nf3(3, c, alpha, lam);
            } else if (lam.to_long() >= 1) {
                warn_lambda(lam.to_long());
                Scalar gam = only(static_cast<int>(lam.to_long()), CorrMode::TSquared);
                if (gam.is_zero()) {
                    out.id = nf3(7, c, alpha, lam);
                } else if (gam.is_one()) {
                    out.id = nf3(6, c, alpha, lam);
                } else {
                    // step 3: rescale gamma to 1 with T = diag(gamma, 1) over t -> t/gamma
                    Mat2 T = detail::diag_mat(ZTSeries::constant(gam, nz, ntT), ZTSeries::constant(1, nz, ntT));
                    out.log.push_back({"rescaling T = diag(gamma, 1) over t -> t/gamma", GaugeMap{T, TSeries::t(ntT) * gam.inv()}});
                    cur = apply_isomorphism(cur, out.log.back().map);
                    out.id = nf3(6, c, alpha, lam);
                }
            } else {
                warn_lambda(lam.to_long());
                Scalar gam = only(static_cast<int>(-lam.to_long()), CorrMode::Constant);
                if (gam.is_zero()) {
                    out.id = nf3(9, c, alpha, lam);
                } else if (gam.is_one()) {
                    out.id = nf3(8, c, alpha, lam);
                } else {
                    Mat2 T = detail::diag_mat(ZTSeries::constant(1, nz, ntT), ZTSeries::constant(gam, nz, ntT));
                    out.log.push_back({"rescaling T = diag(1, gamma) over t -> gamma t", GaugeMap{T, TSeries::t(ntT) * gam}});
                    cur = apply_isomorphism(cur, out.log.back().map);
                    out.id = nf3(8, c, alpha, lam);
                }
            }
        } else {
            fail("b2^(0) = " + b0.truncated(3).str() + " did not reach a canonical shape");
        }
    }

    // replay the whole log on the input
    TEStruct rep = replay(s, out.log);
    TEStruct target = make_normal_form(out.id, nz, rep.nt);
    if (!(rep == target)) throw Error(ErrorKind::ReductionFailed, "replayed transformations do not reproduce " + out.id.str());
    out.replay_checked = true;
    out.replay_nt = rep.nt;
    return out;
}

// Convenience for pre-normal data; b2 coefficients of t-degree <= 2 are padded exactly when the
// data are only known to t-order nt.
inline FormalNFResult formal_normal_form(const PreNormalForm& p, int nz, int nt) {
    PreNormalForm q = p;
    if (q.b2.nt() < nt + 2) {
        for (int k = 0; k < q.b2.nz(); ++k)
            if (q.b2[k].c0.degree() > 2 || q.b2.nt() < 3)
                throw Error(ErrorKind::OrderMismatch, "b2 must be known to t-order nt+2 unless it is quadratic");
        q.b2 = q.b2.resized(q.b2.nz(), nt + 2);
    }
    return formal_normal_form(prenormal_structure(q, nz, nt));
}

// ---------------------------------------------------------------- formal isomorphism decision

struct FormalIsoVerdict {
    bool isomorphic = false;
    std::string witness;  // "equal", "c0-sign-flip", "lambda-sign-flip" or the reason for a negative verdict
    bool gauge = false;   // isomorphism covering the identity of the base
    bool boundary_flag = false;
    std::string note;
};

inline FormalIsoVerdict formal_iso_decision(const NormalFormId& a, const NormalFormId& b) {
    validate(a);
    validate(b);
    if (is_hnf(a.family) || is_hnf(b.family))
        throw Error(ErrorKind::Domain, "holomorphic normal forms are not formal normal forms");
    FormalIsoVerdict v;
    if (a == b) {
        v.isomorphic = true;
        v.gauge = true;
        v.witness = "equal";
        return v;
    }
    if (a.p("c") != b.p("c") || a.p("alpha") != b.p("alpha")) {
        v.witness = "c and alpha are formal invariants and differ";
        return v;
    }
    if (a.family == NFFamily::F1 && b.family == NFFamily::F1) {
        Scalar x = a.p("c0"), y = b.p("c0");
        if (!x.is_zero() && y == -x) {
            v.isomorphic = true;
            v.witness = "c0-sign-flip";
            v.note = "T = D over (t1, t2) -> (t1, -t2)";
            return v;
        }
        if ((x * y).is_zero()) {
            v.boundary_flag = true;
            v.note = "c0 * c0~ = 0: boundary case, treated as non-isomorphic";
        }
        v.witness = "distinct F1 constants";
        return v;
    }
    if (a.family == NFFamily::NF3_4 && b.family == NFFamily::NF3_4) {
        Scalar x = a.p("lambda"), y = b.p("lambda");
        if (!x.is_zero() && y == -x) {
            v.isomorphic = true;
            v.witness = "lambda-sign-flip";
            v.note = "T = diag(e t + 1, 1/(e t + 1)) + z e E over t -> t/(e t + 1), e = -lambda";
            return v;
        }
    }
    v.witness = "distinct normal forms";
    return v;
}

}  // namespace connexa
