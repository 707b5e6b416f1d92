#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "connexa/connmat.hpp"
#include "connexa/sampling.hpp"

using namespace connexa;

namespace {
Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }
CMat cm(Scalar a, Scalar b, Scalar c, Scalar d) { return CMat{a, b, c, d}; }
const CMat C1 = cm(1, 0, 0, 0), C2 = cm(0, 1, 0, 0), D = cm(0, 0, 1, 0), E = cm(0, 0, 0, 1);

// F1-type pre-normal data: f = 1, b2 = -t/2 + c0
TEStruct f1_struct(const Scalar& c, const Scalar& alpha, const Scalar& c0, int nz, int nt) {
    PreNormalForm p;
    p.f = ZTSeries::constant(1, nz, nt);
    p.b2 = ZTSeries::from_t(TSeries::poly({c0, q(-1, 2)}, nt + 2), nz);
    p.c = c;
    p.alpha = alpha;
    return prenormal_structure(p, nz, nt);
}
}  // namespace

TEST_CASE("basis relations") {
    CHECK(C2 * C2 == cm(0, 0, 0, 0));
    CHECK(D * D == C1);
    CHECK(E * E == cm(0, 0, 0, 0));
    CHECK(C2 * E == cm(q(1, 2), 0, q(-1, 2), 0));
    CHECK(E * C2 == cm(q(1, 2), 0, q(1, 2), 0));
    CHECK(commutator(C2, D) == C2 * Scalar(2));
    CHECK(commutator(C2, E) == D * Scalar(-1));
    CHECK(commutator(D, E) == E * Scalar(2));
    CHECK(E * C2 - C2 * E == D);
}

TEST_CASE("basis product agrees with entrywise multiplication") {
    Sampler sm(5);
    for (int it = 0; it < 1000; ++it) {
        CMat a = sm.cmat(), b = sm.cmat();
        CMat p = a * b;
        CHECK(p.m11() == a.m11() * b.m11() + a.m12() * b.m21());
        CHECK(p.m12() == a.m11() * b.m12() + a.m12() * b.m22());
        CHECK(p.m21() == a.m21() * b.m11() + a.m22() * b.m21());
        CHECK(p.m22() == a.m21() * b.m12() + a.m22() * b.m22());
    }
    CMat m = CMat::from_entries(1, 2, 3, 4);
    CHECK(m.m11() == Scalar(1));
    CHECK(m.m12() == Scalar(2));
    CHECK(m.m21() == Scalar(3));
    CHECK(m.m22() == Scalar(4));
    CHECK(m * inverse(m) == C1);
}

TEST_CASE("series matrix inverse") {
    Sampler sm(9);
    for (int it = 0; it < 10; ++it) {
        Mat2 T = sm.gauge(4, 4, 3, 3);
        CHECK(T * inverse(T) == mat_identity(4, 4));
    }
}

TEST_CASE("flatness residuals") {
    const int nz = 6, nt = 6;
    CHECK(flatness_residuals(f1_struct(0, 0, 0, nz, nt)).flat());
    CHECK(flatness_residuals(f1_struct(q(2, 3), Scalar(1, 1), q(-5, 2), nz, nt)).flat());

    TEStruct s{mat_identity(nz, nt), mat_basis(BasisElem::C2, nz, nt), mat_zero(nz, nt), nz, nt, StructKind::TE};
    s.A2.e = ZTSeries::monomial(1, 1, 0, nz, nt);
    auto r = flatness_residuals(s);
    CHECK(r.Rt.is_zero());
    ZTSeries z = ZTSeries::monomial(1, 1, 0, nz, nt - 1);
    CHECK(r.Rz1 == mat_basis(BasisElem::C1, nz, nt - 1, &z));

    TEStruct t{mat_identity(nz, nt), mat_basis(BasisElem::C2, nz, nt), mat_zero(nz, nt), nz, nt, StructKind::T};
    auto rt = flatness_residuals(t);
    CHECK(rt.flat());
    CHECK(rt.skipped_z);
}

TEST_CASE("gauge actions") {
    const int nz = 5, nt = 5;
    TEStruct s = f1_struct(1, 2, 3, nz, nt);
    CHECK(apply_gauge(s, mat_identity(nz, nt)) == s);

    Sampler sm(21);
    for (int it = 0; it < 5; ++it) {
        Mat2 T = sm.gauge(nz, nt + 1, 2, 0);
        TEStruct g = apply_gauge(s, T);
        CHECK(flatness_residuals(g).flat());
        TEStruct back = apply_gauge(g, inverse(T));
        CHECK(back == s);
    }
    // t-dependent gauges cost one t-order unless supplied one order longer
    Mat2 T = sm.gauge(nz, nt + 1, 2, 3);
    TEStruct g = apply_gauge(s, T);
    CHECK(g.nt == nt);
    CHECK(flatness_residuals(g).flat());
    CHECK(apply_gauge(s, truncated(T, nz, nt)).nt == nt - 1);

    // b1 = c + alpha z + z^3 is reduced by exp(-z^2/2) C1
    TEStruct w = s;
    w.B.c1 += ZTSeries::monomial(1, 3, 0, nz, nt);
    TSeries ex = exp_series(TSeries::monomial(q(-1, 2), 2, nz));
    ZTSeries e = ZTSeries::from_z(ex, nt);
    CHECK(apply_gauge(w, mat_basis(BasisElem::C1, nz, nt, &e)) == s);
}

TEST_CASE("isomorphisms") {
    const int nz = 5, nt = 5;
    TEStruct a = f1_struct(q(1, 3), 2, 3, nz, nt + 1);
    TEStruct b = f1_struct(q(1, 3), 2, -3, nz, nt);
    GaugeMap g{mat_basis(BasisElem::D, nz, nt), TSeries::poly({0, -1}, nt + 1)};
    CHECK(apply_isomorphism(a, g) == b);
    CHECK(apply_isomorphism(b, GaugeMap{mat_identity(nz, nt), std::nullopt}) == b);

    // composition rule
    Sampler sm(4);
    TEStruct s = f1_struct(1, 0, 2, nz, nt + 2);
    TSeries h1 = sm.automorphism(nt + 2, 2, 2), h2 = sm.automorphism(nt + 2, 2, 2);
    Mat2 T1 = sm.gauge(nz, nt + 2, 1, 0), T2 = sm.gauge(nz, nt + 2, 1, 0);
    TEStruct two = apply_isomorphism(apply_isomorphism(s, {T1, h1}), {truncated(T2, nz, nt + 1), h2.truncated(nt + 1)});
    TSeries h12 = compose_aut(h1, h2);
    Mat2 T12 = compose_aut(T1, h2) * T2;
    TEStruct one = apply_isomorphism(s, {T12, h12});
    CHECK(two == one.truncated(two.nz, two.nt));
    CHECK(flatness_residuals(one).flat());
}

TEST_CASE("induced Euler field") {
    const int nz = 4, nt = 5;
    auto e = induced_euler(f1_struct(q(3, 2), 1, 5, nz, nt));
    CHECK(e.c == q(-3, 2));
    CHECK(e.g == TSeries::poly({-5, q(1, 2)}, nt));

    PreNormalForm p;
    p.f = ZTSeries::from_t(TSeries::monomial(1, 2, nt), nz);
    p.b2 = ZTSeries::from_t(TSeries::poly({0, q(-1, 4)}, nt + 2), nz);
    p.c = 7;
    auto e2 = induced_euler(prenormal_structure(p, nz, nt));
    CHECK(e2.c == Scalar(-7));
    CHECK(e2.g == TSeries::poly({0, q(1, 4)}, nt));

    TEStruct bad{mat_identity(nz, nt), mat_identity(nz, nt), mat_zero(nz, nt), nz, nt, StructKind::TE};
    CHECK_THROWS_AS(induced_euler(bad), Error);

    // push-forward under an isomorphism: (lam' g) o lam^-1 in the target coordinates of the pull-back
    TEStruct s = f1_struct(1, 0, 2, nz, nt + 1);
    TSeries lam = TSeries::poly({0, 2, 1}, nt + 1);
    TEStruct t = apply_isomorphism(s, {mat_identity(nz, nt + 1), lam});
    auto es = induced_euler(s), et = induced_euler(t);
    // pulled back along h: g~ = (g o lam) / lam'
    TSeries expect = compose_aut(es.g.resized(nt + 1), lam).truncated(nt) * invert_unit(derive(lam));
    CHECK(et.g == expect);
    CHECK(et.c == es.c);
}

TEST_CASE("origin restriction") {
    const int nz = 4, nt = 4;
    auto r = restrict_origin(f1_struct(0, 0, 7, nz, nt));
    CHECK(r.eta == TSeries::constant(7, nz));
    CHECK(r.lam == TSeries::constant(q(-1, 2), nz));
    CHECK(r.beta.is_zero());
    CHECK(r.gam == TSeries::constant(1, nz - 1));
    TEStruct s = f1_struct(1, 2, 7, nz, nt);
    TMat m1 = restriction_matrix(s), m2 = restriction_matrix(restrict_origin(s));
    CHECK(m1 == m2);
}

TEST_CASE("master equation solved for b2") {
    Sampler sm(8);
    for (int it = 0; it < 5; ++it) {
        const int nz = 4, nt = 4;
        ZTSeries f(nz, nt + 2 + 3 * nz);
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < 3; ++j) f[k].c0[j] = sm.rational(3);
        f[0].c0[0] = sm.nonzero_rational(3);
        std::vector<Scalar> init{sm.rational(3), sm.rational(3)};
        PreNormalForm p{f.truncated(nz, nt), solve_master_for_b2(f, init, nz, nt), sm.gaussian(3), sm.gaussian(3)};
        CHECK(p.b2.coeff(0, 0, 0) == init[0]);
        CHECK(master_residual(p).is_zero());
        CHECK(flatness_residuals(prenormal_structure(p, nz, nt)).flat());
    }
}
