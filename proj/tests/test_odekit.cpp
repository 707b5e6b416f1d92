#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "connexa/odekit.hpp"
#include "connexa/sampling.hpp"

using namespace connexa;

namespace {
Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }
}  // namespace

TEST_CASE("linear t-ODE") {
    const int n = 8;
    TSeries geo(n), expect(n);
    for (int k = 0; k < n; ++k) {
        geo[k] = 1;
        expect[k] = q(1, k + 1);
    }
    auto r = solve_linear_t_ode({{TSeries::one(n)}}, {geo});
    CHECK(r.u[0] == expect);
    CHECK(r.free_params.empty());

    auto z = solve_linear_t_ode({{TSeries::constant(q(1, 3), n)}}, {TSeries(n)});
    CHECK(z.u[0].is_zero());

    // t l' + l = 1/g
    TSeries g = TSeries::poly({2, 1}, n);
    auto l = solve_linear_t_ode({{TSeries::one(n)}}, {invert_unit(g)});
    CHECK(l.u[0][0] == q(1, 2));

    // resonance at n = 2 with a consistent right side: one free parameter
    auto res = solve_linear_t_ode({{TSeries::constant(-2, n)}}, {TSeries::monomial(1, 1, n)}, {{{2, 0}, q(5)}});
    REQUIRE(res.free_params.size() == 1);
    CHECK(res.free_params[0] == std::make_pair(2, 0));
    CHECK(res.u[0][2] == q(5));
    CHECK(res.u[0][1] == Scalar(-1));
    // inconsistent resonance
    CHECK_THROWS_AS(solve_linear_t_ode({{TSeries::constant(-2, n)}}, {TSeries::monomial(1, 2, n)}), Error);

    Sampler sm(13);
    for (int it = 0; it < 100; ++it) {
        int d = sm.integer(1, 3);
        std::vector<std::vector<TSeries>> A(static_cast<std::size_t>(d));
        std::vector<TSeries> b;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                TSeries a = sm.series(6);
                a[0] = Scalar(i == j ? sm.integer(1, 4) : 0);  // A(0) with positive eigenvalues
                A[static_cast<std::size_t>(i)].push_back(a);
            }
            b.push_back(sm.series(6));
        }
        auto sol = solve_linear_t_ode(A, b);
        for (const auto& rr : linear_t_ode_residual(A, b, sol.u)) CHECK(rr.is_zero());
    }
}

TEST_CASE("third-derivative system") {
    auto a = solve_third_der(2, TSeries::poly({0, 1}, 3), TSeries::poly({1, 1, 1}, 3));
    CHECK(a.verdict == ThirdDerVerdict::Unique);
    CHECK(*a.x == TSeries::poly({q(1, 3), q(1, 2), 1}, 3));

    auto b = solve_third_der(3, TSeries::poly({0, 3}, 3), TSeries::poly({0, 0, 1}, 3));
    CHECK(b.verdict == ThirdDerVerdict::NoSolution);
    CHECK(b.condition == "g2 = 0");
    auto b2 = solve_third_der(3, TSeries::poly({0, 3}, 3), TSeries::poly({1, 1}, 3));
    CHECK(b2.verdict == ThirdDerVerdict::SolvableFamily);

    auto c = solve_third_der(5, TSeries::poly({0, 0, 1}, 3), TSeries(3));
    CHECK(c.verdict == ThirdDerVerdict::Unique);
    CHECK(c.x->is_zero());

    CHECK_THROWS_AS(solve_third_der(1, TSeries::poly({1, 1, 1}, 3), TSeries(3)), Error);
}

TEST_CASE("third-derivative solutions satisfy the equation") {
    Sampler sm(17);
    for (int it = 0; it < 50; ++it) {
        Scalar m = sm.nonzero_rational(3);
        Scalar lam = sm.rational(3);
        int shape = sm.integer(0, 2);
        TSeries b = shape == 0 ? TSeries::poly({0, lam}, 4) : shape == 1 ? TSeries::poly({1, lam}, 4) : TSeries::poly({0, 0, 1}, 4);
        TSeries g = sm.series(3).resized(4);
        auto r = solve_third_der(m, b.truncated(3), g.truncated(3));
        if (r.verdict == ThirdDerVerdict::NoSolution) continue;
        TSeries x = r.x->resized(4);
        TSeries lhs = x * m + derive(b).resized(4) * x - b * derive(x).resized(4);
        CHECK(lhs.truncated(3) == g.truncated(3));
        CHECK(lhs.coeff(3).is_zero());
    }
}

TEST_CASE("Riccati equation with a unique constant") {
    const int n = 12;
    auto s1 = solve_riccati_unique_c(TSeries::one(n), 1, 0);
    CHECK(s1.tau[0] == Scalar(1));
    CHECK(riccati_residual(TSeries::one(n), 1, s1.c, s1.tau).is_zero());

    TSeries f = TSeries::poly({1, 1}, n);
    auto s2 = solve_riccati_unique_c(f, 2, 0);
    CHECK(s2.tau[0] == Scalar(2));
    CHECK(riccati_residual(f, 2, s2.c, s2.tau).is_zero());

    Sampler sm(23);
    for (int it = 0; it < 20; ++it) {
        TSeries u = sm.unit(10, 3);
        int r = sm.integer(1, 4);
        auto s = solve_riccati_unique_c(u, r, 0);
        CHECK(s.tau[0] == Scalar(r) / u[0]);
        CHECK(riccati_residual(u, r, s.c, s.tau).is_zero());
        for (const Scalar& delta : {Scalar(1), Scalar::I(), q(1, 2)}) {
            TSeries res = riccati_residual(u, r, s.c + delta, s.tau);
            Scalar expect = -delta * s.tau[0] * s.tau[0] * s.tau[0] * u[0];
            CHECK(res[r] == expect);
            for (int k = 0; k < r; ++k) CHECK(res[k].is_zero());
        }
        auto other = solve_riccati_unique_c(u, r, Scalar(1));
        CHECK(other.c == s.c);
        CHECK(riccati_residual(u, r, other.c, other.tau).is_zero());
        for (int k = 0; k < r; ++k) CHECK(other.tau[k] == s.tau[k]);
        CHECK(other.tau[r] != s.tau[r]);
    }
    CHECK_THROWS_AS(solve_riccati_unique_c(TSeries::poly({0, 1}, n), 1, 0), Error);
}

TEST_CASE("convolution inequality") {
    auto a = check_convolution_inequality(2, 2);
    CHECK(a.lhs == 1);
    CHECK(a.holds);
    auto b = check_convolution_inequality(2, 3);
    CHECK(b.lhs == mpq_class(1, 2));
    for (int l = 2; l <= 30; ++l)
        for (int bb = l; bb <= 30; ++bb) CHECK(check_convolution_inequality(l, bb).holds);
}

TEST_CASE("Fuchs criterion") {
    auto lau = [](int v) { return Laurent::from_series(TSeries::one(4), v); };
    CHECK(fuchs_regular_singular(FuchsProblem{{lau(-1)}, 1, "v"}));
    CHECK(fuchs_regular_singular(FuchsProblem{{lau(-2), lau(-1)}, 2, "v"}));
    CHECK_FALSE(fuchs_regular_singular(FuchsProblem{{lau(-3), lau(-1)}, 2, "v"}));
    Laurent x = Laurent::from_series(TSeries::poly({1, 2}, 5), -1);
    Laurent y = x * x.inv();
    CHECK(y.valuation() == 0);
    CHECK(y.coeff(0) == Scalar(1));
    CHECK(x.derive().coeff(-2) == Scalar(-1));
}
