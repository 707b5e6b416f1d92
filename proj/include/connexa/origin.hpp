#pragma once

// Restriction of a structure to the origin of the base: elementary test, regular-singularity test
// through a cyclic vector, eigen-line search, reduction to Birkhoff normal form and the isomorphism
// decision for connections in Birkhoff normal form.

#include <optional>
#include <string>
#include <vector>

#include "connexa/connmat.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/linalg.hpp"
#include "connexa/odekit.hpp"

namespace connexa {

// ---------------------------------------------------------------- regular singularity

struct FuchsVerdict {
    bool regular = false;
    std::string cyclic_vector;  // "v1", "v2" or "diagonal"
    std::optional<int> v_a0, v_a1;
};

// Omega = B / z^2 with B a matrix of z-series; decides regular singularity of d + Omega dz.
// With twist the C1 component is dropped first (tensoring with a rank one connection).
inline FuchsVerdict cyclic_fuchs(const TMat& B_in, bool twist) {
    TMat B = B_in;
    if (twist) B.c1 = TSeries(B.c1.order());
    auto om = [](const TSeries& s) { return Laurent::from_series(s, -2); };
    const Laurent o11 = om(B.m11()), o12 = om(B.m12()), o21 = om(B.m21()), o22 = om(B.m22());
    auto need = [](const Laurent& a, int prec) {
        if (a.precision() < prec) throw Error(ErrorKind::OrderMismatch, "z-order too small to read the pole orders");
    };
    FuchsVerdict out;
    if (o21.is_zero() && o12.is_zero()) {
        need(o11, -1);
        need(o22, -1);
        out.cyclic_vector = "diagonal";
        auto v1 = o11.valuation(), v2 = o22.valuation();
        out.regular = (!v1 || *v1 >= -1) && (!v2 || *v2 >= -1);
        return out;
    }
    // nabla v1 = p v1 + q v2, nabla v2 = r v1 + s v2 (or the roles swapped)
    const bool use_v1 = !o21.is_zero();
    const Laurent& p = use_v1 ? o11 : o22;
    const Laurent& q = use_v1 ? o21 : o12;
    const Laurent& r = use_v1 ? o12 : o21;
    const Laurent& s = use_v1 ? o22 : o11;
    Laurent lq = q.derive() * q.inv();
    Laurent a1 = p + lq + s;
    Laurent a0 = p.derive() + q * r - p * lq - p * s;
    need(a1, -1);
    need(a0, -2);
    out.cyclic_vector = use_v1 ? "v1" : "v2";
    out.v_a0 = a0.valuation();
    out.v_a1 = a1.valuation();
    out.regular = fuchs_regular_singular(FuchsProblem{{a0, a1}, 2, out.cyclic_vector});
    return out;
}

inline FuchsVerdict cyclic_fuchs(const OriginRestriction& r, bool twist) { return cyclic_fuchs(restriction_matrix(r), twist); }

// ---------------------------------------------------------------- elementary test

inline bool is_elementary(const PreNormalForm& p) {
    const Scalar f00 = p.f.nz() > 0 ? p.f.coeff(0, 0, 0) : Scalar(0);
    return (f00 * p.b2.coeff(0, 0, 0)).is_zero();
}

// Pre-normal input is decided by the product test; anything else by the twisted Fuchs test on the
// restriction at the origin, which is invariant under isomorphisms.
inline bool is_elementary(const TEStruct& s) {
    std::optional<PreNormalForm> p;
    try {
        p = to_prenormal(s).data;
    } catch (const Error&) {
    }
    if (p) return is_elementary(*p);
    return cyclic_fuchs(restriction_matrix(s), true).regular;
}

// ---------------------------------------------------------------- eigen-line search

// z^2 g' - ((lam + 1) z + eta g) g - beta z^2 / 2 + eta gam z = 0 with g = z^k r(z), r(0) != 0
struct IrreducibilityVerdict {
    enum class Kind { Irreducible, Reducible, Inconclusive } kind = Kind::Irreducible;
    std::optional<int> k;         // valuation of the solution; empty for g = 0
    TSeries r;                    // r(z) to the verified order
    std::vector<int> inconclusive_k;
    std::string note;
};

inline const char* verdict_name(IrreducibilityVerdict::Kind k) {
    switch (k) {
        case IrreducibilityVerdict::Kind::Irreducible: return "irreducible";
        case IrreducibilityVerdict::Kind::Reducible: return "reducible";
        case IrreducibilityVerdict::Kind::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace detail {

struct EigenEquation {
    TSeries eta, lam1, beta, etagam;
    int n_eta, n_lam, n_beta, n_eg;

    explicit EigenEquation(const OriginRestriction& o)
        : eta(o.eta), lam1(o.lam + TSeries::one(o.lam.order())), beta(o.beta), n_eta(o.eta.order()),
          n_lam(o.lam.order()), n_beta(o.beta.order()) {
        n_eg = std::min(n_eta, o.gam.order());
        etagam = o.eta.truncated(n_eg) * o.gam.truncated(n_eg);
    }

    // the coefficient at z^e is exact below this exponent
    int exact_below(int k) const { return std::min({n_lam + k + 1, n_eta + 2 * k, n_beta + 2, n_eg + 1}); }

    bool inhomogeneous_zero() const { return beta.is_zero() && etagam.is_zero(); }

    std::optional<int> lowest(int k) const {
        std::optional<int> p = k + 1;
        auto take = [&](std::optional<int> v, int shift) {
            if (v) p = std::min(*p, *v + shift);
        };
        take(eta.valuation(), 2 * k);
        take(beta.valuation(), 2);
        take(etagam.valuation(), 1);
        return p;
    }

    Scalar coeff(int e, int k, const std::vector<Scalar>& r) const {
        const int nr = static_cast<int>(r.size());
        auto rj = [&](int j) { return (j >= 0 && j < nr) ? r[static_cast<std::size_t>(j)] : Scalar(0); };
        Scalar acc;
        // z^2 g'
        acc += rj(e - k - 1) * Scalar(e - 1);
        // -(lam + 1) z g
        for (int j = 0; j < nr; ++j) acc -= lam1.coeff(e - k - 1 - j) * r[static_cast<std::size_t>(j)];
        // -eta g^2
        for (int a = 0; a < nr; ++a)
            for (int b = 0; b < nr; ++b) {
                int i = e - 2 * k - a - b;
                if (i < 0) continue;
                acc -= eta.coeff(i) * r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
            }
        acc -= beta.coeff(e - 2) * Scalar::frac(1, 2);
        acc += etagam.coeff(e - 1);
        return acc;
    }
};

}  // namespace detail

inline IrreducibilityVerdict irreducibility_check(const OriginRestriction& o, int kmin, int kmax) {
    detail::EigenEquation eq(o);
    IrreducibilityVerdict out;
    if (eq.inhomogeneous_zero()) {
        out.kind = IrreducibilityVerdict::Kind::Reducible;
        out.note = "g = 0 solves the equation";
        return out;
    }
    for (int k = kmin; k <= kmax; ++k) {
        const int emax = eq.exact_below(k);
        const int p0 = *eq.lowest(k);
        if (p0 >= emax) {
            out.inconclusive_k.push_back(k);
            continue;
        }
        // leading order: quadratic in r0
        auto P = [&](const Scalar& x) { return eq.coeff(p0, k, {x}); };
        const Scalar c = P(Scalar(0)), pp = P(Scalar(1)), pm = P(Scalar(-1));
        const Scalar a = (pp + pm) * Scalar::frac(1, 2) - c, b = (pp - pm) * Scalar::frac(1, 2);
        std::vector<Scalar> roots;
        bool exact = true;
        if (!a.is_zero()) {
            auto s = sqrt_exact(b * b - Scalar(4) * a * c);
            if (!s) {
                exact = false;
            } else {
                for (const Scalar& w : {*s, -*s}) {
                    Scalar x = (-b + w) / (Scalar(2) * a);
                    if (!x.is_zero() && std::find(roots.begin(), roots.end(), x) == roots.end()) roots.push_back(x);
                }
            }
        } else if (!b.is_zero()) {
            Scalar x = -c / b;
            if (!x.is_zero()) roots.push_back(x);
        } else if (c.is_zero()) {
            roots.push_back(Scalar(1));
        }
        if (!exact) {
            out.inconclusive_k.push_back(k);
            continue;
        }
        for (const Scalar& r0 : roots) {
            std::vector<Scalar> r{r0};
            bool ok = true;
            for (int n = 1; p0 + n < emax && ok; ++n) {
                r.push_back(Scalar(0));
                Scalar v0 = eq.coeff(p0 + n, k, r);
                r.back() = Scalar(1);
                Scalar L = eq.coeff(p0 + n, k, r) - v0;
                if (!L.is_zero()) {
                    r.back() = -v0 / L;
                } else {
                    r.back() = Scalar(0);
                    ok = v0.is_zero();
                }
            }
            if (!ok) continue;
            out.kind = IrreducibilityVerdict::Kind::Reducible;
            out.k = k;
            out.r = TSeries(static_cast<int>(r.size()));
            for (int j = 0; j < out.r.order(); ++j) out.r[j] = r[static_cast<std::size_t>(j)];
            out.note = "solution verified below z^" + std::to_string(emax);
            return out;
        }
    }
    if (!out.inconclusive_k.empty()) {
        out.kind = IrreducibilityVerdict::Kind::Inconclusive;
        out.note = "precision or an irrational leading root left some k undecided";
    }
    return out;
}

// ---------------------------------------------------------------- Birkhoff reduction

struct BirkhoffReduction {
    CMat B0, Binf;
    TMat T;  // z^2 T' + B T - T (B0 + z Binf) = 0 below z^N
    bool exact = false;  // input already B0 + z Binf up to a constant frame; otherwise a formal representative
    std::vector<std::string> log;
};

inline TMat birkhoff_residual(const TMat& B, const BirkhoffReduction& r) {
    const int N = std::min(B.c1.order(), r.T.c1.order());
    auto cut = [&](const TSeries& s) { return s.resized(N); };
    TMat T = map_components(r.T, cut), Bn = map_components(B, cut);
    TMat dT = map_components(T, [&](const TSeries& s) { return derive(s).resized(N).shifted(2); });
    auto cm = [&](const Scalar& a, int k) { return TSeries::monomial(a, k, N); };
    TMat P{cm(r.B0.c1, 0) + cm(r.Binf.c1, 1), cm(r.B0.c2, 0) + cm(r.Binf.c2, 1), cm(r.B0.d, 0) + cm(r.Binf.d, 1),
           cm(r.B0.e, 0) + cm(r.Binf.e, 1)};
    return dT + Bn * T - T * P;
}

namespace detail {
inline bool single_jordan_block(const CMat& b) {
    return (b.d * b.d + b.c2 * b.e).is_zero() && !(b.c2.is_zero() && b.d.is_zero() && b.e.is_zero());
}

// constant P with P^-1 B0 P = c C1 + c0 C2, c0 != 0; identity when B0 has that shape already
inline CMat residue_frame(const CMat& B0) {
    if (B0.d.is_zero() && B0.e.is_zero() && !B0.c2.is_zero()) return CMat{1, 0, 0, 0};
    if (!single_jordan_block(B0)) throw Error(ErrorKind::Precondition, "residue is not a single Jordan block");
    // columns (v, N v) with N the nilpotent part
    CMat N{0, B0.c2, B0.d, B0.e};
    Scalar v1 = 1, v2 = 0;
    if (N.m11().is_zero() && N.m21().is_zero()) {
        v1 = 0;
        v2 = 1;
    }
    return CMat::from_entries(v1, N.m11() * v1 + N.m12() * v2, v2, N.m21() * v1 + N.m22() * v2);
}
}  // namespace detail

// The residue must be regular with a single eigenvalue. After a constant change of frame the residue
// is c C1 + c0 C2 and T^(0) = Id. Keeping the D-coefficient of B_inf equal to that of B^(1), the E-part
// of the z^2 equation fixes T^(1) = ... + u D with u = B^(2)_E / (2 B^(1)_E), which moves B_inf by
// 2 c0 u C2. What remains is linear in T^(1..N-1) and is solved in one exact system.
inline BirkhoffReduction birkhoff_reduce(const TMat& B) {
    const int N = B.c1.order();
    if (N < 2) throw Error(ErrorKind::OrderMismatch, "Birkhoff reduction needs z-order >= 2");
    auto raw = [&](int k) { return CMat{B.c1.coeff(k), B.c2.coeff(k), B.d.coeff(k), B.e.coeff(k)}; };
    const CMat P = detail::residue_frame(raw(0)), Pi = inverse(P);
    auto coef = [&](int k) { return Pi * raw(k) * P; };
    BirkhoffReduction out;
    const CMat B0 = coef(0), B1 = coef(1);
    Scalar u1;
    if (!B1.e.is_zero()) u1 = coef(2).e / (Scalar(2) * B1.e);
    CMat Binf = B1 + CMat{0, Scalar(2) * B0.c2 * u1, 0, 0};
    if (!u1.is_zero()) out.log.push_back("B_inf shifted by " + (Scalar(2) * B0.c2 * u1).str() + " C2");

    const int M = N - 1;  // unknown blocks T^(1..M)
    auto at = [](const CMat& m, int i) -> const Scalar& {
        switch (i) {
            case 0: return m.c1;
            case 1: return m.c2;
            case 2: return m.d;
            default: return m.e;
        }
    };
    auto unit = [](int i) {
        CMat u{0, 0, 0, 0};
        (i == 0 ? u.c1 : i == 1 ? u.c2 : i == 2 ? u.d : u.e) = Scalar(1);
        return u;
    };
    std::vector<std::vector<Scalar>> A;
    std::vector<Scalar> rhs;
    auto pin = [&](int col, const Scalar& v) {
        std::vector<Scalar> row(static_cast<std::size_t>(4 * M));
        row[static_cast<std::size_t>(col)] = Scalar(1);
        A.push_back(row);
        rhs.push_back(v);
    };
    pin(2, u1);
    pin(3, Scalar(0));
    // equation at z^m, m = 1..M: (m-1)T^(m-1) + sum_{j=0}^{m} B^(j)T^(m-j) - T^(m)B0 - T^(m-1)Binf = 0
    for (int m = 1; m <= M; ++m) {
        std::vector<std::vector<Scalar>> rows(4, std::vector<Scalar>(static_cast<std::size_t>(4 * M)));
        CMat cst = coef(m);
        if (m == 1) cst = cst - Binf;
        for (int blk = 1; blk <= m; ++blk)
            for (int i = 0; i < 4; ++i) {
                const CMat u = unit(i);
                CMat contrib = coef(m - blk) * u;
                if (blk == m) contrib = contrib - u * B0;
                if (blk == m - 1) contrib = contrib + u * Scalar(m - 1) - u * Binf;
                for (int row = 0; row < 4; ++row)
                    rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(4 * (blk - 1) + i)] = at(contrib, row);
            }
        for (int row = 0; row < 4; ++row) {
            A.push_back(rows[static_cast<std::size_t>(row)]);
            rhs.push_back(-at(cst, row));
        }
        auto sol = solve_linear(A, rhs);
        if (!sol.consistent) throw Error(ErrorKind::ReductionFailed, "obstruction at z-order " + std::to_string(m));
        if (m == M) {
            TMat T{TSeries::one(N), TSeries(N), TSeries(N), TSeries(N)};
            for (int blk = 1; blk <= M; ++blk) {
                T.c1[blk] = sol.x[static_cast<std::size_t>(4 * (blk - 1))];
                T.c2[blk] = sol.x[static_cast<std::size_t>(4 * (blk - 1) + 1)];
                T.d[blk] = sol.x[static_cast<std::size_t>(4 * (blk - 1) + 2)];
                T.e[blk] = sol.x[static_cast<std::size_t>(4 * (blk - 1) + 3)];
            }
            out.T = T;
            if (!sol.free_vars.empty())
                out.log.push_back(std::to_string(sol.free_vars.size()) + " free coefficients of T set to 0");
        }
    }
    if (M == 0) out.T = TMat{TSeries::one(N), TSeries(N), TSeries(N), TSeries(N)};
    // back to the input frame: T -> P T
    auto cs = [&](const Scalar& a) { return TSeries::constant(a, N); };
    out.T = TMat{cs(P.c1), cs(P.c2), cs(P.d), cs(P.e)} * out.T;
    out.B0 = B0;
    out.Binf = Binf;
    out.exact = true;
    for (int k = 2; k < N; ++k) out.exact = out.exact && coef(k).is_zero();
    return out;
}

// ---------------------------------------------------------------- Birkhoff normal form data

// B0 = c C1 + c0 C2, Binf = alpha C1 + c1 C2 - D/4 + c0 E
struct BirkhoffData {
    Scalar c, alpha, c0, c1;
    CMat B0() const { return CMat{c, c0, 0, 0}; }
    CMat Binf() const { return CMat{alpha, c1, Scalar::frac(-1, 4), c0}; }
    bool operator==(const BirkhoffData& o) const { return c == o.c && alpha == o.alpha && c0 == o.c0 && c1 == o.c1; }
};

struct NormalizedBirkhoff {
    BirkhoffData data;
    CMat gauge;  // constant T with T^-1 (B0 + z Binf) T in the normalized shape
};

inline NormalizedBirkhoff normalize_birkhoff(const CMat& B0_in, const CMat& Binf_in) {
    CMat B0 = B0_in, Binf = Binf_in;
    CMat G = CMat{1, 0, 0, 0};
    auto conj = [&](const CMat& T) {
        CMat Ti = inverse(T);
        B0 = Ti * B0 * T;
        Binf = Ti * Binf * T;
        G = G * T;
    };
    if (!(B0.d.is_zero() && B0.e.is_zero() && !B0.c2.is_zero())) conj(detail::residue_frame(B0));
    const Scalar f = Binf.e;
    if (f.is_zero()) throw Error(ErrorKind::Precondition, "E-coefficient of B_inf vanishes");
    const Scalar y = Binf.d;
    if (y != Scalar::frac(-1, 4)) conj(CMat{1, -(y + Scalar::frac(1, 4)) / f, 0, 0});
    const Scalar c0 = B0.c2;
    if (Binf.e != c0) {
        Scalar ct;
        if ((Binf.e * c0).is_zero()) throw Error(ErrorKind::Precondition, "c0 f = 0");
        auto s = sqrt_exact(c0 * Binf.e);
        if (!s) throw Error(ErrorKind::Exactness, "c0 f = " + (c0 * Binf.e).str() + " is not a square in Q(i)");
        ct = *s;
        // diag(a, b) with a/b = ct/c0
        conj(CMat::from_entries(ct, 0, 0, c0));
    }
    NormalizedBirkhoff out;
    out.data = BirkhoffData{B0.c1, Binf.c1, B0.c2, Binf.c2};
    out.gauge = G;
    if (!(B0 == out.data.B0() && Binf == out.data.Binf()))
        throw Error(ErrorKind::ReductionFailed, "constant normalization did not reach the target shape");
    return out;
}

// ---------------------------------------------------------------- isomorphism decision

struct BirkhoffIsoVerdict {
    bool isomorphic = false;
    std::string clause;  // "identical", "diag(1,-1)", "quartic", "invariants", "none"
    std::optional<int> n;
    int epsilon = 0;
    bool criterion_conflict = false;  // isomorphic by diag(1,-1) while the quartic test says no
    int n_bound = 0;         // no solution of the quartic exists beyond this n
    bool search_complete = true;
    std::string note;
};

namespace detail {
// |re| + |im| bounds the modulus from above
inline mpq_class abs_bound(const Scalar& s) { return abs(s.re.mpq()) + abs(s.im.mpq()); }

inline Scalar quartic_condition(const Scalar& c0, const Scalar& c1, const Scalar& ct1, int eps, long n) {
    const Scalar e(eps);
    const Scalar m1(n - 1);
    const Scalar diff = c1 - e * ct1, sum = c1 + e * ct1;
    return Scalar(4) * c0 * c0 * diff * diff - Scalar(8) * m1 * m1 * c0 * sum + Scalar((2 * n - 1) * (2 * n - 3)) * m1 * m1;
}

inline bool side_conditions(const Scalar& c0, const Scalar& c1, const Scalar& ct1, int eps, long n) {
    const Scalar lhs = c0 * (c1 + Scalar(eps) * ct1);
    for (long r = 2; r <= n - 1; ++r) {
        Scalar num = Scalar((2 * n - 1) * (2 * n - 3) * (n - 1) * (n - 1) - (2 * r - 1) * (2 * r - 3) * (r - 1) * (r - 1));
        Scalar den = Scalar(8 * (n - r) * (n - 2 + r));
        if (lhs == num / den) return false;
    }
    return true;
}
}  // namespace detail

inline BirkhoffIsoVerdict birkhoff_iso_decision(const BirkhoffData& a, const BirkhoffData& b, int nmax = 64) {
    if (a.c0.is_zero() || b.c0.is_zero()) throw Error(ErrorKind::Precondition, "c0 must be nonzero");
    BirkhoffIsoVerdict out;
    if (a == b) {
        out.isomorphic = true;
        out.clause = "identical";
        out.epsilon = 1;
        return out;
    }
    if (a.c != b.c || a.alpha != b.alpha) {
        out.clause = "invariants";
        out.note = "c or alpha differ";
        return out;
    }
    if (a.c0 == b.c0)
        out.epsilon = 1;
    else if (a.c0 == -b.c0)
        out.epsilon = -1;
    else {
        out.clause = "invariants";
        out.note = "c0 differs beyond sign";
        return out;
    }
    const bool flip = out.epsilon == -1 && a.c1 == -b.c1;
    // every solution n of the quartic satisfies 3 (n-1)^4 <= 8 (n-1)^2 |S| + 4 |P|
    const Scalar S = a.c0 * (a.c1 + Scalar(out.epsilon) * b.c1);
    const Scalar Dd = a.c0 * (a.c1 - Scalar(out.epsilon) * b.c1);
    const mpq_class sb = detail::abs_bound(S), pb = detail::abs_bound(Dd * Dd);
    long nb = 2;
    while (true) {
        mpq_class m2 = mpq_class((nb - 1) * (nb - 1));
        if (3 * m2 * m2 > 8 * m2 * sb + 4 * pb) break;
        ++nb;
    }
    out.n_bound = static_cast<int>(nb - 1);
    out.search_complete = out.n_bound <= nmax;
    for (long n = 2; n <= nmax; ++n) {
        if (!detail::quartic_condition(a.c0, a.c1, b.c1, out.epsilon, n).is_zero()) continue;
        if (!detail::side_conditions(a.c0, a.c1, b.c1, out.epsilon, n)) continue;
        out.n = static_cast<int>(n);
        break;
    }
    if (flip) {
        out.isomorphic = true;
        out.clause = "diag(1,-1)";
        if (!out.n) {
            out.criterion_conflict = true;
            out.note = "constant isomorphism diag(1,-1) exists but the quartic condition has no admissible n";
        }
        return out;
    }
    if (out.n) {
        out.isomorphic = true;
        out.clause = "quartic";
        return out;
    }
    out.clause = "none";
    if (!out.search_complete) out.note = "search stopped at n_max below the bound " + std::to_string(out.n_bound);
    return out;
}

}  // namespace connexa
