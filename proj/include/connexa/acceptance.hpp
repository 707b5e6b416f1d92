#pragma once

// The acceptance suite: nine exact checks shared by the acceptance binary and `connexa selftest`.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "connexa/document.hpp"
#include "connexa/euler.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/malgrange.hpp"
#include "connexa/odekit.hpp"
#include "connexa/origin.hpp"
#include "connexa/sampling.hpp"

namespace connexa {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

namespace acceptance {

// counts checks and keeps the first failure
struct Tally {
    long checks = 0;
    std::string first_failure;
    void check(bool ok, const std::string& what) {
        ++checks;
        if (!ok && first_failure.empty()) first_failure = what;
    }
    bool ok() const { return first_failure.empty(); }
    std::string summary() const { return ok() ? std::to_string(checks) + " checks" : "failed: " + first_failure; }
};

inline Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }

// Every formal normal form at (16, 16), 20 random Q(i) parameter tuples per family instance.
inline Tally flatness_sweep() {
    Tally t;
    Sampler sm(1001);
    const int n = 16;
    std::vector<Scalar> lambdas;
    for (int k = -3; k <= 3; ++k) lambdas.push_back(k);
    // the integer grid leaves NF3-3 empty, so half-integers join it
    for (int k : {-5, -3, -1, 1, 3, 5}) lambdas.push_back(q(k, 2));
    std::vector<std::function<NormalFormId(const Scalar&, const Scalar&)>> makers;
    makers.push_back([&](const Scalar& c, const Scalar& a) { return nf_f1(c, a, sm.gaussian(5)); });
    for (int r = 1; r <= 5; ++r) makers.push_back([r](const Scalar& c, const Scalar& a) { return nf_fr(c, a, r); });
    for (int k = 1; k <= 9; ++k) {
        const bool has_l = k >= 3;
        for (const Scalar& l : has_l ? lambdas : std::vector<Scalar>{0}) {
            for (int g : k == 5 ? std::vector<int>{0, 1} : std::vector<int>{0}) {
                try {
                    validate(nf3(k, 0, 0, l, g));
                } catch (const Error&) {
                    continue;
                }
                makers.push_back([k, l, g](const Scalar& c, const Scalar& a) { return nf3(k, c, a, l, g); });
            }
        }
    }
    for (const auto& mk : makers)
        for (int it = 0; it < 20; ++it) {
            Scalar c = sm.gaussian(5), a = sm.gaussian(5);
            NormalFormId id = mk(c, a);
            t.check(flatness_residuals(make_normal_form(id, n, n)).flat(), id.str());
        }
    return t;
}

// Gauges commuting with A2 = C2 + z f E keep the pre-normal shape: a(z) C1 + b(z) N with N = C2 for
// f = 0, N = C2 + z E for f = 1, N = 0 otherwise.
inline Tally normalization_round_trip() {
    Tally t;
    Sampler sm(1002);
    const int nz = 6, nt = 8;
    auto poly = [&](int lo, bool unit) {
        TSeries p(nz);
        for (int k = lo; k <= 4 && k < nz; ++k) p[k] = sm.rational(3);
        if (unit) p[0] = sm.nonzero_rational(3);
        return ZTSeries::from_t(TSeries(nt), nz) + ZTSeries::from_z(p, nt);
    };
    for (int it = 0; it < 50; ++it) {
        const Scalar c = sm.gaussian(3), a = sm.gaussian(3);
        NormalFormId id;
        ZTSeries zero(nz, nt);
        Mat2 N{zero, zero, zero, zero};
        switch (it % 10) {
            case 0:
            case 1:
                id = nf_f1(c, a, it % 4 == 0 ? Scalar(0) : sm.nonzero_gaussian(3));
                N = Mat2{zero, ZTSeries::constant(1, nz, nt), zero, ZTSeries::monomial(1, 1, 0, nz, nt)};
                break;
            case 2: id = nf_fr(c, a, sm.integer(1, 3)); break;
            case 3: id = nf3(1, c, a); break;
            case 4: id = nf3(2, c, a); break;
            case 5: id = nf3(3, c, a, q(2 * sm.integer(-2, 2) + 1, 2)); break;
            case 6: id = nf3(4, c, a, sm.coin() ? Scalar(0) : q(sm.integer(-3, 3), 3 + 2 * sm.integer(0, 1))); break;
            case 7: id = nf3(5, c, a, sm.integer(1, 3), sm.integer(0, 1)); break;
            case 8: id = sm.coin() ? nf3(6, c, a, sm.integer(1, 3)) : nf3(7, c, a, sm.integer(1, 3)); break;
            default: id = sm.coin() ? nf3(8, c, a, -sm.integer(1, 3)) : nf3(9, c, a, -sm.integer(1, 3)); break;
        }
        if (id.family == NFFamily::NF3_4 && id.p("lambda").is_integer() && !id.p("lambda").is_zero())
            id = nf3(4, c, a, q(1, 3));
        if (is_nf3(id.family)) N = mat_basis(BasisElem::C2, nz, nt);
        Mat2 T = mat_identity(nz, nt) * Scalar(0);
        T.c1 = poly(0, true);
        ZTSeries b = poly(0, false);
        T = T + Mat2{N.c1 * b, N.c2 * b, N.d * b, N.e * b};
        TEStruct base = make_normal_form(id, nz, nt);
        TEStruct s = apply_gauge(base, T);
        const std::string tag = id.str() + " #" + std::to_string(it);
        t.check(flatness_residuals(s).flat(), tag + " gauged structure not flat");
        auto r = formal_normal_form(s);
        bool iso = r.id == id || std::find(r.alternates.begin(), r.alternates.end(), id) != r.alternates.end() ||
                   formal_iso_decision(r.id, id).isomorphic;
        t.check(iso, tag + " recovered " + r.id.str());
        TEStruct rep = replay(s, r.log);
        t.check(rep == make_normal_form(r.id, nz, rep.nt), tag + " replay");
    }
    return t;
}

inline Tally elementary_dichotomy() {
    Tally t;
    Sampler sm(1003);
    for (int it = 0; it < 200; ++it) {
        PreNormalForm p = sm.prenormal(5, 3);
        t.check(is_elementary(p) == cyclic_fuchs(restrict_origin(p), true).regular, "sample " + std::to_string(it));
    }
    auto restr = [](std::initializer_list<Scalar> eta, std::initializer_list<Scalar> gam) {
        const int n = 6;
        OriginRestriction r;
        r.eta = TSeries::poly(eta, n);
        r.lam = TSeries::poly({q(1, 3), 1}, n);
        r.beta = TSeries::poly({2, -1}, n);
        r.gam = TSeries::poly(gam, n);
        return r;
    };
    t.check(cyclic_fuchs(restr({2, 1}, {0, 1}), true).regular, "eta(0) != 0, gam(0) = 0 is regular");
    t.check(!cyclic_fuchs(restr({2, 1}, {5, 1}), true).regular, "eta(0) gam(0) != 0 is irregular");
    t.check(cyclic_fuchs(restr({0}, {5, 1}), true).regular, "eta = 0 is regular");
    return t;
}

inline std::vector<Scalar> cond_c0c1_values(int nmax) {
    std::vector<Scalar> v;
    for (long n = 2; n <= nmax; ++n) {
        v.push_back(q((n - 1) * (2 * n - 1), 2));
        v.push_back(q((n - 1) * (2 * n - 3), 2));
    }
    return v;
}

inline Tally birkhoff_table() {
    Tally t;
    const Scalar c0 = q(3, 2);
    const std::vector<Scalar> good = cond_c0c1_values(10), family = cond_c0c1_values(64);
    auto decide = [&](const Scalar& v) { return birkhoff_iso_decision(BirkhoffData{1, 2, c0, v / c0}, BirkhoffData{1, 2, c0, 0}, 64); };
    for (const Scalar& v : good) {
        auto r = decide(v);
        t.check(r.isomorphic && r.search_complete, "c0 c1 = " + v.str());
    }
    Sampler sm(1004);
    int tested = 0;
    while (tested < 50) {
        Scalar v = sm.coin() ? sm.nonzero_gaussian(30) : sm.nonzero_rational(60) / Scalar(sm.integer(1, 4));
        if (std::find(family.begin(), family.end(), v) != family.end()) continue;
        auto r = decide(v);
        t.check(!r.isomorphic && r.search_complete, "c0 c1 = " + v.str() + " outside the set");
        ++tested;
    }
    return t;
}

inline Tally malgrange_fidelity() {
    Tally t;
    Sampler sm(1005);
    for (int it = 0; it < 30; ++it) {
        CMat Binf{sm.gaussian(3), sm.gaussian(3), sm.gaussian(3), sm.gaussian(3)};
        auto st = malgrange_xy(Binf, sm.nonzero_gaussian(3), 16);
        auto [rx, ry] = malgrange_residual(st);
        t.check(rx.order() == 15 && rx.is_zero() && ry.is_zero(), "random B_inf #" + std::to_string(it));
    }
    for (const Scalar& c0 : {q(2), q(-1, 3), Scalar::I() + Scalar(1)}) {
        // B12 B21 = -1/16 with B12 = c0: the double root; B21 = 0
        auto d = malgrange_xy(BirkhoffData{0, 0, c0, Scalar(-1) / (Scalar(16) * c0)}, 13);
        t.check(d.closed_form == "double root", "double root closed form for c0 = " + c0.str());
        auto z = malgrange_xy(BirkhoffData{1, q(1, 2), c0, 0}, 13);
        t.check(z.closed_form == "B21 = 0", "B21 = 0 closed form for c0 = " + c0.str());
    }
    return t;
}

inline Tally holomorphic_branch_replay() {
    Tally t;
    const int nz = 12, nt = 12;
    auto from_roots = [](const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& alpha) {
        Scalar B21 = Scalar(-1) / (Scalar(2) * (a + b));
        return BirkhoffData{c, alpha, -a * b * B21, B21};
    };
    const Scalar c0 = q(2, 3);
    struct Case {
        BirkhoffData d;
        std::string branch;
        NFFamily family;
    };
    for (const Case& cs : {Case{from_roots(-3, 1, q(1, 2), 2), "iii", NFFamily::HNF_Mal3},
                           Case{from_roots(-5, 3, 1, q(-1, 3)), "ii", NFFamily::HNF_Mal2},
                           Case{BirkhoffData{0, 1, c0, Scalar(-1) / (Scalar(16) * c0)}, "i", NFFamily::HNF_Mal1}}) {
        auto r = holo_normal_form_second_type(cs.d, nz, nt);
        t.check(r.branch == cs.branch && r.id.family == cs.family, "branch " + cs.branch + " gave " + r.id.str());
        TEStruct out = apply_isomorphism(r.universal, r.map);
        t.check(out.nz == nz && out.nt == nt, "branch " + cs.branch + " orders");
        t.check(out == make_normal_form(r.id, nz, nt), "branch " + cs.branch + " replay");
    }
    return t;
}

inline Tally euler_suite() {
    Tally t;
    const int N = 18;
    struct Case {
        TSeries g;
        EulerFamily family;
        Scalar c0, c1;
        int r;
        bool realizable;
    };
    std::vector<Case> cases = {
        {TSeries::poly({2}, N), EulerFamily::E1, 0, 0, 0, true},
        {TSeries::poly({0, 3}, N), EulerFamily::E3, 3, 0, 0, true},
        {TSeries::poly({0, 0, 1, 1}, N), EulerFamily::E4, 0, 1, 2, false},
        {TSeries::poly({0, 0, 0, 1, 1}, N), EulerFamily::E4, 0, 0, 3, false},
    };
    for (const auto& cs : cases) {
        const std::string tag = "g = " + cs.g.str();
        auto res = euler_normal_form(EulerField{0, cs.g});
        const auto& nf = res.nf;
        bool shape = nf.family == cs.family;
        if (cs.family == EulerFamily::E3) shape = shape && nf.c0 == cs.c0;
        if (cs.family == EulerFamily::E4) shape = shape && nf.r == cs.r && (cs.r != 2 || nf.c1 == cs.c1);
        t.check(shape, tag + " gave " + nf.str());
        t.check(res.lam.has_value() && res.order >= 14, tag + " replay order");
        if (res.lam) t.check(push_forward(EulerField{0, cs.g}, *res.lam).g == nf.g(res.order), tag + " push-forward");
        const bool expect = nf.family == EulerFamily::E4 ? (nf.r == 2 && nf.c1.is_zero()) : true;
        t.check(realizable_by_te(nf) == expect && expect == cs.realizable, tag + " realizability");
    }
    return t;
}

inline Tally auxiliary_equations() {
    Tally t;
    for (int l = 2; l <= 30; ++l)
        for (int b = l; b <= 30; ++b) t.check(check_convolution_inequality(l, b).holds, "convolution " + std::to_string(l) + "," + std::to_string(b));

    Sampler sm(1008);
    for (int it = 0; it < 20; ++it) {
        TSeries u = sm.unit(10, 3);
        const int r = sm.integer(1, 4);
        auto s = solve_riccati_unique_c(u, r, 0);
        t.check(riccati_residual(u, r, s.c, s.tau).is_zero(), "Riccati solution #" + std::to_string(it));
        for (const Scalar& delta : {Scalar(1), Scalar::I(), q(1, 2)}) {
            TSeries res = riccati_residual(u, r, s.c + delta, s.tau);
            bool low = true;
            for (int k = 0; k < r; ++k) low = low && res[k].is_zero();
            t.check(low && !res[r].is_zero(), "perturbation by " + delta.str() + " at order r = " + std::to_string(r));
        }
    }

    // the six branches: lambda t and lambda t + 1, each at generic m, m = lambda, m = -lambda
    auto solves = [](const Scalar& m, const TSeries& b, const TSeries& g, const ThirdDerResult& r) {
        if (!r.x) return false;
        TSeries x = r.x->resized(4), bb = b.resized(4);
        TSeries lhs = x * m + derive(bb).resized(4) * x - bb * derive(x).resized(4);
        return lhs.truncated(3) == g.truncated(3) && lhs.coeff(3).is_zero();
    };
    const Scalar l = q(3, 2);
    const TSeries lt = TSeries::poly({0, l}, 3), lt1 = TSeries::poly({1, l}, 3);
    const TSeries g = TSeries::poly({1, 2, 3}, 3);
    auto expect = [&](const Scalar& m, const TSeries& b, const TSeries& gg, ThirdDerVerdict v, const std::string& what) {
        auto r = solve_third_der(m, b, gg);
        bool ok = r.verdict == v;
        if (v != ThirdDerVerdict::NoSolution) ok = ok && solves(m, b, gg, r);
        t.check(ok, what + ": " + verdict_name(r.verdict));
    };
    expect(5, lt, g, ThirdDerVerdict::Unique, "lambda t, generic m");
    expect(l, lt, g, ThirdDerVerdict::NoSolution, "lambda t, m = lambda, g2 != 0");
    expect(l, lt, TSeries::poly({1, 2}, 3), ThirdDerVerdict::SolvableFamily, "lambda t, m = lambda, g2 = 0");
    expect(-l, lt, g, ThirdDerVerdict::NoSolution, "lambda t, m = -lambda, g0 != 0");
    expect(-l, lt, TSeries::poly({0, 2, 3}, 3), ThirdDerVerdict::SolvableFamily, "lambda t, m = -lambda, g0 = 0");
    expect(5, lt1, g, ThirdDerVerdict::Unique, "lambda t + 1, generic m");
    expect(l, lt1, g, ThirdDerVerdict::NoSolution, "lambda t + 1, m = lambda, g2 != 0");
    expect(l, lt1, TSeries::poly({1, 2}, 3), ThirdDerVerdict::SolvableFamily, "lambda t + 1, m = lambda, g2 = 0");
    expect(-l, lt1, g, ThirdDerVerdict::NoSolution, "lambda t + 1, m = -lambda, condition fails");
    // m^2 g0 + m g1 + g2 = 0 with m = -3/2: g = 4 + 2 t - 6 t^2
    expect(-l, lt1, TSeries::poly({4, 2, -6}, 3), ThirdDerVerdict::SolvableFamily, "lambda t + 1, m = -lambda, condition holds");
    expect(2, TSeries::poly({0, 0, 1}, 3), g, ThirdDerVerdict::Unique, "t^2");
    return t;
}

inline std::vector<std::string> fixture_files(const std::string& dir) {
    std::vector<std::string> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline Tally fixture_coherence(const std::string& dir) {
    Tally t;
    const auto files = fixture_files(dir);
    t.check(!files.empty(), "no fixtures in " + dir);
    Sampler sm(1009);
    for (const auto& path : files) {
        const std::string name = std::filesystem::path(path).stem().string();
        TEStruct s = load_structure(path);
        auto cls = classify_holomorphic(s);
        t.check(cls.holo_id.has_value(), name + " has no holomorphic normal form");
        if (cls.holo_id) {
            TEStruct nf = make_normal_form(*cls.holo_id, std::max(s.nz, 2), std::max(s.nt, 4));
            auto e = euler_nf(induced_euler(nf));
            t.check(realizable_by_te(e), name + " induced Euler field " + e.str() + " not realizable");
        }
        const bool e0 = is_elementary(s);
        for (int it = 0; it < 10; ++it) {
            TEStruct moved = apply_isomorphism(s, {sm.gauge(s.nz, s.nt + 1, 3, 2), sm.automorphism(s.nt + 1, 2, 3)});
            t.check(is_elementary(moved) == e0, name + " elementary flag changed under an isomorphism");
        }
    }
    return t;
}

}  // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(const std::string& fixture_dir) {
    using namespace acceptance;
    std::vector<std::pair<std::string, std::function<Tally()>>> items = {
        {"normal-form flatness sweep", flatness_sweep},
        {"round-trip normalization", normalization_round_trip},
        {"elementary dichotomy", elementary_dichotomy},
        {"Birkhoff decision table", birkhoff_table},
        {"Malgrange ODE fidelity", malgrange_fidelity},
        {"holomorphic branch replay", holomorphic_branch_replay},
        {"Euler suite", euler_suite},
        {"auxiliary equations", auxiliary_equations},
        {"cross-module coherence", [&] { return fixture_coherence(fixture_dir); }},
    };
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        CriterionResult r;
        r.id = static_cast<int>(i) + 1;
        r.name = items[i].first;
        auto t0 = std::chrono::steady_clock::now();
        try {
            Tally t = items[i].second();
            r.pass = t.ok();
            r.detail = t.summary();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(r);
    }
    return out;
}

}  // namespace connexa
