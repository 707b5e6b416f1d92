#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "connexa/euler.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/sampling.hpp"

using namespace connexa;

namespace {
Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }
EulerField field(std::initializer_list<Scalar> g, int n, Scalar c = 0) { return EulerField{c, TSeries::poly(g, n)}; }
EulerNormalForm enf(EulerFamily f, Scalar c, Scalar c0 = 0, Scalar c1 = 0, int r = 0) {
    EulerNormalForm n;
    n.family = f;
    n.c = c;
    n.c0 = c0;
    n.c1 = c1;
    n.r = r;
    return n;
}
}  // namespace

TEST_CASE("Euler shape") {
    const int n = 4;
    auto ap = [&](TSeries c0, TSeries c1) { return AffinePoly1(c0, c1); };
    auto e = is_euler(VectorField{ap(TSeries::constant(3, n), TSeries::one(n)), AffinePoly1::of(TSeries::monomial(1, 2, n))});
    REQUIRE(e);
    CHECK(e->c == Scalar(3));
    CHECK(e->g == TSeries::monomial(1, 2, n));
    CHECK_FALSE(is_euler(VectorField{AffinePoly1::of(TSeries::t(n)), AffinePoly1(n)}));
    auto f = is_euler(VectorField{ap(TSeries(n), TSeries::one(n)), AffinePoly1::of(TSeries::one(n))});
    REQUIRE(f);
    CHECK(f->c.is_zero());
    CHECK(f->g == TSeries::one(n));
}

TEST_CASE("normal forms of the four families") {
    const int n = 16;
    auto r1 = euler_normal_form(field({2}, n));
    CHECK(r1.nf.family == EulerFamily::E1);
    CHECK(*r1.lam == TSeries::monomial(q(1, 2), 1, n + 1));

    auto r3 = euler_normal_form(field({0, 3}, n));
    CHECK(r3.nf.family == EulerFamily::E3);
    CHECK(r3.nf.c0 == Scalar(3));

    auto r4 = euler_normal_form(field({0, 0, 1}, n));
    CHECK(r4.nf.family == EulerFamily::E4);
    CHECK(r4.nf.r == 2);
    CHECK(r4.nf.c1.is_zero());

    auto r4b = euler_normal_form(field({0, 0, 1, 1}, n));
    CHECK(r4b.nf.r == 2);
    CHECK(r4b.nf.c1 == Scalar(1));
    CHECK(r4b.order >= 14);

    auto r4c = euler_normal_form(field({0, 0, 0, 1, 1}, n + 1));
    CHECK(r4c.nf.r == 3);
    CHECK(r4c.order >= 14);

    auto r2 = euler_normal_form(field({}, n));
    CHECK(r2.nf.family == EulerFamily::E2);

    // no exact square root of f(0) = 2 when r = 3: c1 is still found
    auto nr = euler_normal_form(field({0, 0, 0, 2, 1}, n));
    CHECK_FALSE(nr.lam.has_value());
    CHECK_FALSE(nr.note.empty());
}

TEST_CASE("push-forward replay and idempotence") {
    Sampler sm(41);
    for (int it = 0; it < 40; ++it) {
        const int n = 12;
        TSeries g = sm.series(n, 3);
        int r = sm.integer(0, 3);
        for (int k = 0; k < r; ++k) g[k] = 0;
        // r = 3 needs an exact square root of g_3
        const Scalar k = Scalar(sm.integer(1, 3));
        g[r] = r < 2 ? sm.nonzero_gaussian(3) : r == 2 ? k : k * k / Scalar(4);
        EulerField e{sm.gaussian(2), g};
        auto res = euler_normal_form(e);
        REQUIRE(res.lam.has_value());
        CHECK(push_forward(e, *res.lam).g == res.nf.g(res.order));
        // idempotent on the normal form itself
        CHECK(euler_nf(res.nf.field(n)) == res.nf);
        // a random automorphism does not change the normal form
        TSeries h = sm.automorphism(n, 3, 3);
        EulerField moved = push_forward(e, h);
        CHECK(euler_nf(moved) == res.nf);
    }
}

TEST_CASE("orbit decision and realizability") {
    EulerNormalForm e1 = enf(EulerFamily::E1, 1), e2 = enf(EulerFamily::E2, 1);
    CHECK_FALSE(euler_orbit_decision(e1, e2));
    EulerNormalForm a = enf(EulerFamily::E3, 0, 2), b = enf(EulerFamily::E3, 0, 3);
    CHECK_FALSE(euler_orbit_decision(a, b));
    EulerNormalForm f = enf(EulerFamily::E4, 0, 0, 5, 3);
    CHECK(euler_orbit_decision(f, f));

    CHECK(realizable_by_te(e1));
    CHECK(realizable_by_te(e2));
    CHECK(realizable_by_te(a));
    CHECK(realizable_by_te(enf(EulerFamily::E4, 0, 0, 0, 2)));
    CHECK_FALSE(realizable_by_te(enf(EulerFamily::E4, 0, 0, 1, 2)));
    CHECK_FALSE(realizable_by_te(enf(EulerFamily::E4, 0, 0, 0, 3)));
    CHECK(frobenius_realizable(a));
    CHECK_FALSE(frobenius_realizable(enf(EulerFamily::E4, 0, 0, 0, 2)));
}

TEST_CASE("induced Euler fields of normal forms are realizable") {
    std::vector<NormalFormId> ids = {nf_f1(1, 2, 3), nf_f1(0, 0, 0), hnf_mal(1, 0, 1, 2), hnf_mal(2, 1, 0, 3, q(1, 2)),
                                     hnf_mal(3, 0, 0, -1)};
    for (int r = 1; r <= 5; ++r) ids.push_back(nf_fr(q(1, 2), 1, r));
    for (int k = 1; k <= 9; ++k) {
        try {
            NormalFormId id = nf3(k, 1, 0, q(1, 2), 0);
            validate(id);
            ids.push_back(id);
        } catch (const Error&) {
        }
    }
    for (const auto& id : ids) {
        CAPTURE(id.str());
        EulerField e = induced_euler(make_normal_form(id, 3, 8));
        auto nf = euler_nf(e);
        CHECK(realizable_by_te(nf));
        if (nf.family == EulerFamily::E4) CHECK(nf.r == 2);
    }
}
