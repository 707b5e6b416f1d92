#pragma once

// Euler fields E = (t1 + c) d/dt1 + g(t2) d/dt2 on N2: normal forms under automorphisms
// (t1, t2) -> (t1, lam(t2)), orbit decision and realizability by (TE)-structures.

#include <optional>
#include <string>

#include "connexa/connmat.hpp"
#include "connexa/odekit.hpp"

namespace connexa {

inline std::optional<EulerField> is_euler(const VectorField& v) { return as_euler(v); }

enum class EulerFamily { E1, E2, E3, E4 };

inline const char* family_name(EulerFamily f) {
    switch (f) {
        case EulerFamily::E1: return "E1";
        case EulerFamily::E2: return "E2";
        case EulerFamily::E3: return "E3";
        case EulerFamily::E4: return "E4";
    }
    return "?";
}

// E1: g = 1; E2: g = 0; E3: g = c0 t; E4: g = t^r (1 + c1 t^(r-1))
struct EulerNormalForm {
    EulerFamily family = EulerFamily::E2;
    Scalar c, c0, c1;
    int r = 0;

    TSeries g(int n) const {
        switch (family) {
            case EulerFamily::E1: return TSeries::one(n);
            case EulerFamily::E2: return TSeries(n);
            case EulerFamily::E3: return TSeries::monomial(c0, 1, n);
            case EulerFamily::E4: return TSeries::monomial(1, r, n) + TSeries::monomial(c1, 2 * r - 1, n);
        }
        return TSeries(n);
    }
    EulerField field(int n) const { return EulerField{c, g(n)}; }
    std::string str() const {
        std::string s = std::string(family_name(family)) + "(c=" + c.str();
        if (family == EulerFamily::E3) s += ", c0=" + c0.str();
        if (family == EulerFamily::E4) s += ", r=" + std::to_string(r) + ", c1=" + c1.str();
        return s + ")";
    }
    friend bool operator==(const EulerNormalForm& a, const EulerNormalForm& b) {
        if (a.family != b.family || a.c != b.c) return false;
        if (a.family == EulerFamily::E3) return a.c0 == b.c0;
        if (a.family == EulerFamily::E4) return a.r == b.r && a.c1 == b.c1;
        return true;
    }
};

// h_* E for h = (t1, lam(t2)): g -> (lam' g) o lam^-1; order drops by one
inline EulerField push_forward(const EulerField& e, const TSeries& lam) {
    const int n = std::min(e.g.order(), lam.order()) - 1;
    if (n < 1) throw Error(ErrorKind::OrderMismatch, "push-forward needs order >= 2");
    TSeries l = lam.truncated(n + 1);
    TSeries h = derive(l) * e.g.truncated(n);
    return EulerField{e.c, compose_aut(h, reverse(l).truncated(n))};
}

struct EulerNFResult {
    EulerNormalForm nf;
    std::optional<TSeries> lam;  // h = (t1, lam) pushes e to the normal form
    int order = 0;               // t-order at which the push-forward matches
    std::string note;
};

inline EulerNFResult euler_normal_form(const EulerField& e) {
    const int N = e.g.order();
    EulerNFResult out;
    out.nf.c = e.c;
    auto v = e.g.valuation();
    if (!v) {
        out.nf.family = EulerFamily::E2;
        out.lam = TSeries::t(std::max(N, 2));
    } else if (*v == 0) {
        // t lt' + lt = 1/g, lam = t lt
        out.nf.family = EulerFamily::E1;
        auto sol = solve_linear_t_ode({{TSeries::one(N)}}, {invert_unit(e.g)});
        out.lam = sol.u[0].resized(N + 1).shifted(1);
    } else if (*v == 1) {
        // g = t/f; t lt' + (1 - c0 f) lt = 0 with c0 = 1/f(0), lt(0) = 1
        out.nf.family = EulerFamily::E3;
        TSeries gt(N - 1);
        for (int k = 0; k + 1 < N; ++k) gt[k] = e.g[k + 1];
        TSeries f = invert_unit(gt);
        out.nf.c0 = f[0].inv();
        auto sol = solve_linear_t_ode({{TSeries::one(N - 1) - f * out.nf.c0}}, {TSeries(N - 1)}, {{{0, 0}, Scalar(1)}});
        out.lam = sol.u[0].resized(N).shifted(1);
    } else {
        // g = t^r f, tau = (1-r) lt^(r-1):
        //   t tau' + (r-1) tau = -(tau^2/f)(1 + c1/(1-r) t^(r-1) tau),
        // which is the odekit Riccati form with r -> r-1, f -> -1/f, c -> c1/(1-r); tau_(r-1) := 0
        const int r = *v;
        out.nf.family = EulerFamily::E4;
        out.nf.r = r;
        TSeries f(N - r);
        for (int k = 0; k < N - r; ++k) f[k] = e.g[k + r];
        auto sol = solve_riccati_unique_c(-invert_unit(f), r - 1, Scalar(0));
        out.nf.c1 = sol.c * Scalar(1 - r);
        // lt = (tau/(1-r))^(1/(r-1)) with lt(0)^(r-1) = f(0)
        TSeries u = sol.tau * (Scalar(1 - r) * f[0]).inv();
        auto root = root_exact(f[0], static_cast<unsigned>(r - 1));
        if (root && N - r >= 1) {
            out.lam = (pow_unit(u, Scalar::frac(1, r - 1)) * *root).resized(N - r + 1).shifted(1);
        } else if (!root) {
            out.note = "f(0) = " + f[0].str() + " has no exact root of order " + std::to_string(r - 1) +
                       "; the automorphism is not represented";
        }
    }
    if (out.lam && out.lam->order() >= 2) {
        EulerField pushed = push_forward(e, *out.lam);
        out.order = pushed.g.order();
        if (!(pushed.g == out.nf.g(out.order)))
            throw Error(ErrorKind::ReductionFailed, "push-forward does not reach " + out.nf.str());
    }
    return out;
}

inline EulerNormalForm euler_nf(const EulerField& e) { return euler_normal_form(e).nf; }

inline bool euler_orbit_decision(const EulerNormalForm& a, const EulerNormalForm& b) { return a == b; }

inline bool realizable_by_te(const EulerNormalForm& n) {
    return n.family != EulerFamily::E4 || (n.r == 2 && n.c1.is_zero());
}

// Euler fields of a Frobenius manifold with underlying F-manifold N2
inline bool frobenius_realizable(const EulerNormalForm& n) { return n.family != EulerFamily::E4; }

}  // namespace connexa
