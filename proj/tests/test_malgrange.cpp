#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "connexa/malgrange.hpp"
#include "connexa/sampling.hpp"

using namespace connexa;

namespace {
Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }

// Birkhoff data from the roots a, b of B21 X^2 + X/2 - c0
BirkhoffData from_roots(const Scalar& a, const Scalar& b, const Scalar& c = 0, const Scalar& alpha = 0) {
    Scalar B21 = Scalar(-1) / (Scalar(2) * (a + b));
    return BirkhoffData{c, alpha, -a * b * B21, B21};
}
}  // namespace

TEST_CASE("x and y against the closed forms") {
    const int n = 14;
    auto s1 = malgrange_xy(from_roots(-3, 1), n);
    CHECK(s1.closed_form == "simple roots");
    CHECK(s1.x[0].is_zero());
    CHECK(s1.y[0] == q(3, 4));
    auto s2 = malgrange_xy(BirkhoffData{0, 0, 2, q(-1, 32)}, n);
    CHECK(s2.closed_form == "double root");
    auto s3 = malgrange_xy(BirkhoffData{1, 1, q(5, 3), 0}, n);
    CHECK(s3.closed_form == "B21 = 0");
    CHECK(s3.x[1] == q(5, 3));
    // irrational roots: no closed form to compare
    auto s4 = malgrange_xy(BirkhoffData{0, 0, 1, 1}, n);
    CHECK_FALSE(s4.roots.has_value());
    CHECK(s4.closed_form.empty());
    // Gaussian roots
    auto s5 = malgrange_xy(from_roots(Scalar::I(), Scalar(2) + Scalar::I()), n);
    CHECK(s5.closed_form == "simple roots");

    Sampler sm(31);
    for (int it = 0; it < 30; ++it) {
        Scalar a = sm.nonzero_gaussian(3), b = sm.nonzero_gaussian(3);
        if (a == b || (a + b).is_zero()) continue;
        auto s = malgrange_xy(from_roots(a, b, sm.gaussian(2), sm.gaussian(2)), 10);
        CHECK(s.closed_form == "simple roots");
    }
}

TEST_CASE("Malgrange connection is flat") {
    Sampler sm(32);
    for (int it = 0; it < 20; ++it) {
        BirkhoffData d{sm.gaussian(3), sm.gaussian(3), sm.nonzero_gaussian(3), sm.gaussian(3)};
        TEStruct s = malgrange_connection(d, 4, 8);
        CHECK(flatness_residuals(s).flat());
        // A2 at z = 0 is nilpotent and trace-free, d/dt1 B = -C1
        CHECK(s.A2.c1.is_zero());
        CHECK((s.A2 * s.A2).is_zero());
        CHECK(derive_t1(s.B) == mat_basis(BasisElem::C1, 4, 8) * Scalar(-1));
        // restriction to the origin is B0o + z Binf
        TMat r = restriction_matrix(s);
        CHECK(at_origin(r) == d.B0());
        CHECK(CMat{r.c1[1], r.c2[1], r.d[1], r.e[1]} == d.Binf());
        CHECK_FALSE(is_elementary(s));
    }
}

TEST_CASE("second-type normal forms at orders (12, 12)") {
    const int nz = 12, nt = 12;
    // branch iii: a = -3, b = 1
    auto r3 = holo_normal_form_second_type(from_roots(-3, 1, q(1, 2), 2), nz, nt);
    CHECK(r3.branch == "iii");
    CHECK(r3.id.family == NFFamily::HNF_Mal3);
    CHECK(r3.structure == make_normal_form(r3.id, nz, nt));
    // branch ii with lambda = 1: a = -5, b = 3
    auto r2 = holo_normal_form_second_type(from_roots(-5, 3, 1, q(-1, 3)), nz, nt);
    CHECK(r2.branch == "ii");
    CHECK(r2.id == hnf_mal(2, 1, q(-1, 3), q(15, 4), 1));
    CHECK(r2.structure == make_normal_form(r2.id, nz, nt));
    CHECK(flatness_residuals(r2.structure).flat());
    // branch i
    const Scalar c0 = q(2, 3);
    auto r1 = holo_normal_form_second_type(BirkhoffData{0, 1, c0, Scalar(-1) / (Scalar(16) * c0)}, nz, nt);
    CHECK(r1.branch == "i");
    CHECK(r1.id.family == NFFamily::HNF_Mal1);
    CHECK(r1.structure == make_normal_form(r1.id, nz, nt));
    // replay of the logged map
    CHECK(apply_isomorphism(r1.universal, r1.map) == r1.structure);
}

TEST_CASE("first-type normal form") {
    auto r = first_type_normal_form(BirkhoffData{q(1, 2), 3, q(-7, 5), 0}, 6, 10);
    CHECK(r.id == nf_f1(q(1, 2), 3, q(-7, 5)));
    CHECK(r.structure == make_normal_form(r.id, 6, 10));
    // the intermediate pull-back along x^-1 has A2 = C2 + t D - t^2 E
    TEStruct pb = pull_back(r.universal, *r.map.lam);
    ZTSeries t = ZTSeries::monomial(1, 0, 1, 6, pb.nt), t2 = ZTSeries::monomial(-1, 0, 2, 6, pb.nt);
    CHECK(pb.A2 == Mat2{ZTSeries(6, pb.nt), ZTSeries::constant(1, 6, pb.nt), t, t2});
    CHECK_THROWS_AS(first_type_normal_form(BirkhoffData{0, 0, 1, 1}, 4, 4), Error);
}

TEST_CASE("assigned c1 matches the Malgrange data") {
    Sampler sm(33);
    for (int it = 0; it < 15; ++it) {
        Scalar a = sm.nonzero_rational(4), b = sm.nonzero_rational(4);
        if (a == b || (a + b).is_zero()) continue;
        BirkhoffData d = from_roots(a, b, sm.rational(2), sm.rational(2));
        auto r = holo_normal_form_second_type(d, 4, 5);
        CHECK(assign_c1(r.id) == d.c1);
        CHECK(r.structure == make_normal_form(r.id, 4, 5));
        // the other root ordering lands in the same holomorphic class
        auto s = holo_normal_form_second_type(d, 4, 5, true);
        CHECK(assign_c1(s.id) == d.c1);
        CHECK(s.structure == make_normal_form(s.id, 4, 5));
        if (r.branch == "ii" && s.branch == "ii") CHECK(s.id.p("lambda") == Scalar(-2) - r.id.p("lambda"));
    }
    CHECK(assign_c1(hnf_mal(2, 0, 0, q(15, 4), 1)) == q(1, 4));
    CHECK(assign_c1(hnf_mal(3, 0, 0, 2)) == q(3, 32));
    CHECK(assign_c1(hnf_mal(1, 0, 0, 2)) == q(-1, 32));
    CHECK(assign_c1(nf_f1(0, 0, 5)).is_zero());
    CHECK_THROWS_AS(assign_c1(nf_f1(0, 0, 0)), Error);
    CHECK_THROWS_AS(assign_c1(nf_fr(0, 0, 2)), Error);
}

TEST_CASE("holomorphic classification") {
    // Malgrange connection with lambda = 1
    BirkhoffData d = from_roots(-5, 3, 2, q(1, 2));
    auto c = classify_holomorphic(malgrange_connection(d, 4, 6));
    CHECK_FALSE(c.elementary);
    CHECK_FALSE(c.prenormal);
    CHECK(c.birkhoff_exact);
    REQUIRE(c.birkhoff.has_value());
    CHECK(*c.birkhoff == d);
    CHECK(*c.holo_id == hnf_mal(2, 2, q(1, 2), q(15, 4), 1));
    CHECK(*c.c1 == q(15, 16) / q(15, 4));
    CHECK_FALSE(c.iso_to_formal->isomorphic);

    // the holomorphic normal forms classify to themselves, up to the sign of c0
    for (const auto& id : {hnf_mal(1, 1, 2, q(3, 2)), hnf_mal(2, 0, 1, 3, 1), hnf_mal(3, q(1, 3), 0, -2), nf_f1(1, 1, 4)}) {
        auto h = classify_holomorphic(make_normal_form(id, 4, 6));
        CAPTURE(id.str());
        CHECK(h.prenormal);
        CHECK(h.birkhoff_exact);
        REQUIRE(h.holo_id.has_value());
        CHECK(h.holo_id->family == id.family);
        CHECK(h.formal_id->family == NFFamily::F1);
        CHECK(*h.c1 * h.birkhoff->c0 == assign_c1(id) * id.p("c0"));
        CHECK(h.iso_to_formal->isomorphic == (id.family == NFFamily::F1));
    }

    // lambda = 1/2 gives c0 c1 = 1/2, a root of the quartic at n = 2
    auto half = classify_holomorphic(make_normal_form(hnf_mal(2, 0, 1, 3, q(1, 2)), 4, 6));
    CHECK(half.iso_to_formal->isomorphic);
    CHECK(half.iso_to_formal->clause == "quartic");
    CHECK(*half.iso_to_formal->n == 2);

    // elementary input: formal classification
    auto e = classify_holomorphic(make_normal_form(nf_fr(0, 1, 2), 4, 6));
    CHECK(e.elementary);
    CHECK(e.holo_id->family == NFFamily::Fr);
    CHECK_FALSE(e.birkhoff.has_value());
}
