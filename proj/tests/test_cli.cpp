#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "connexa/cli.hpp"
#include "connexa/sampling.hpp"

using namespace connexa;
using namespace connexa::cli;

namespace {
Scalar q(long p, long d = 1) { return Scalar::frac(p, d); }

// sparse Gaussian-rational coefficients, some beyond 64 bits
Scalar coefficient(Sampler& sm) {
    switch (sm.integer(0, 5)) {
        case 0:
        case 1: return 0;
        case 2: return sm.rational(9);
        case 3: return sm.gaussian(9);
        case 4: return Scalar(mpq_class("123456789012345678901234567/1000000000000000000000001")) * sm.nonzero_gaussian(3);
        default: return sm.nonzero_rational(4) / Scalar(sm.integer(1, 7));
    }
}

TEStruct random_structure(Sampler& sm) {
    TEStruct s;
    s.nz = sm.integer(1, 4);
    s.nt = sm.integer(1, 5);
    s.kind = sm.coin() ? StructKind::TE : StructKind::T;
    const bool t1 = sm.coin();
    for (Mat2* m : {&s.A1, &s.A2, &s.B})
        for (ZTSeries* c : {&m->c1, &m->c2, &m->d, &m->e}) {
            *c = ZTSeries(s.nz, s.nt);
            for (int k = 0; k < s.nz; ++k)
                for (int j = 0; j < s.nt; ++j) {
                    (*c)[k].c0[j] = coefficient(sm);
                    if (t1) (*c)[k].c1[j] = coefficient(sm);
                }
        }
    return s;
}

Options opts() {
    Options o;
    o.fixtures = CONNEXA_FIXTURE_DIR;
    return o;
}

std::string write_temp(const std::string& name, const std::string& text) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}
}  // namespace

TEST_CASE("scalar text is canonical and round-trips") {
    Sampler sm(501);
    for (int it = 0; it < 300; ++it) {
        Scalar v = coefficient(sm);
        CHECK(Scalar::parse(v.str()) == v);
        CHECK(Scalar::parse(v.str()).str() == v.str());
    }
}

TEST_CASE("structure documents round-trip bit-exactly") {
    Sampler sm(502);
    for (int it = 0; it < 100; ++it) {
        TEStruct s = random_structure(sm);
        const std::string text = structure_text(s);
        TEStruct back = structure_from_json(parse_json_text(text, "doc"));
        CHECK(back == s);
        CHECK(structure_text(back) == text);
    }
}

TEST_CASE("document diagnostics") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            structure_from_json(parse_json_text(text, "doc"));
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            const std::string msg = e.what();
            CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
            return;
        }
        FAIL("no error for " << text);
    };
    fails_with("{\n  \"format\": \"connexa-structure\",\n  oops", "doc:3:");
    fails_with(R"({"format": "other"})", "document.format");
    TEStruct s = make_normal_form(nf_f1(1, 1, 1), 2, 2);
    Json j = to_json(s);
    j["matrices"]["B"]["D"][0]["c"] = "1/0";
    fails_with(j.dump(), "matrices.B.D[0].c");
    j = to_json(s);
    j["matrices"]["A2"]["E"][0]["z"] = 7;
    fails_with(j.dump(), "matrices.A2.E[0].z");
    j = to_json(s);
    auto& terms = j["matrices"]["B"]["C1"];
    std::swap(terms[0], terms[1]);
    fails_with(j.dump(), "sorted");
    j = to_json(s);
    j["orders"].erase("nt");
    fails_with(j.dump(), "missing field 'nt'");
}

TEST_CASE("fixture commands") {
    Options o = opts();
    auto v = cmd_verify("f1_r2", o);
    CHECK(v.code == kOk);
    CHECK(v.report["flat"].get<bool>());
    CHECK(v.report["residuals_zero"]["t1_t2"].get<bool>());

    auto c = cmd_classify("mal2_lambda1", o);
    CHECK(c.code == kOk);
    CHECK(c.report["holomorphic_normal_form"]["family"] == "HNF-Mal2");
    const Scalar c0 = Scalar::parse(c.report["holomorphic_normal_form"]["params"]["c0"].get<std::string>());
    CHECK(c.report["holomorphic_normal_form"]["params"]["lambda"] == "1");
    CHECK(Scalar::parse(c.report["c1"].get<std::string>()) == Scalar(15) / (Scalar(16) * c0));
    CHECK(c.report["induced_euler"]["realizable_by_te"].get<bool>());

    auto e = cmd_euler_nf("2", 0, o);
    CHECK(e.report["family"] == "E1");
    auto r = cmd_euler_realizable("0,0,1,1", 0, o);
    CHECK_FALSE(r.report["realizable_by_te"].get<bool>());

    auto f = cmd_formal_nf("nf3_4", o);
    CHECK(f.report["name"] == "NF3-4(alpha=0, c=1, lambda=1/2)");
    CHECK(f.report["replay_checked"].get<bool>());
    auto iso = cmd_formal_iso("f1_c0", "f1_c0_neg", o);
    CHECK(iso.report["isomorphic"].get<bool>());
    CHECK(iso.report["witness"] == "c0-sign-flip");

    auto p = cmd_prenormal("f1_c0", o);
    CHECK(p.report["elementary"].get<bool>() == false);
}

TEST_CASE("classification of every fixture") {
    Options o = opts();
    for (const auto& path : acceptance::fixture_files(CONNEXA_FIXTURE_DIR)) {
        CAPTURE(path);
        auto c = run_guarded("classify", [&] { return cmd_classify(path, o); });
        CHECK(c.code == kOk);
        CHECK_FALSE(c.report["holomorphic_normal_form"].is_null());
    }
    auto m1 = cmd_classify("mal1", o);
    CHECK(m1.report["holomorphic_map"]["branch"] == "i");
    auto m3 = cmd_classify("mal3", o);
    CHECK(m3.report["holomorphic_map"]["branch"] == "iii");
    auto c2 = cmd_classify("mal_c1_zero", o);
    CHECK(c2.report["holomorphic_normal_form"]["family"] == "F1");
    CHECK(c2.report["isomorphic_to_formal_model"]["isomorphic"].get<bool>());
}

TEST_CASE("reports are deterministic") {
    Options o = opts();
    for (const char* f : {"mal2_lambda1", "nf3_5", "f1_c0"}) CHECK(dump(cmd_classify(f, o).report) == dump(cmd_classify(f, o).report));
    for (const char* f : {"nf3_8", "f1_r2"}) CHECK(dump(cmd_formal_nf(f, o).report) == dump(cmd_formal_nf(f, o).report));
    CHECK(*cmd_malgrange(1, 2, 3, 4, o).document == *cmd_malgrange(1, 2, 3, 4, o).document);
}

TEST_CASE("generated documents load back") {
    Options o = opts();
    o.order_z = 3;
    o.order_t = 5;
    auto m = cmd_malgrange(q(1, 2), 0, q(15, 4), q(1, 4), o);
    TEStruct s = structure_from_json(parse_json_text(*m.document, "mal"));
    CHECK(s.nz == 3);
    CHECK(s.nt == 5);
    CHECK(flatness_residuals(s).flat());
    auto n = cmd_normal_form("NF3-5", {"c=1", "alpha=i", "lambda=2", "gamma=1/3"}, o);
    CHECK(structure_from_json(parse_json_text(*n.document, "nf")) == make_normal_form(nf3(5, 1, Scalar::I(), 2, q(1, 3)), 3, 5));
}

TEST_CASE("exit codes") {
    Options o = opts();
    auto code = [&](auto&& f) { return run_guarded("x", f).code; };
    CHECK(code([&] { return cmd_verify("no_such_fixture", o); }) == kParse);
    const std::string bad = write_temp("connexa_bad.json", "{\"format\": 1");
    CHECK(code([&] { return cmd_verify(bad, o); }) == kParse);
    CHECK(code([&] { return cmd_birkhoff_iso("1,2,3", "1,2,3,4", o); }) == kParse);
    CHECK(code([&] { return cmd_euler_nf("1/0", 0, o); }) == kParse);
    // orders beyond the document
    Options big = o;
    big.order_t = 99;
    CHECK(code([&] { return cmd_verify("f1_r2", big); }) == kPrecondition);
    // a Malgrange connection is not in pre-normal shape
    CHECK(code([&] { return cmd_formal_nf("mal1", o); }) == kPrecondition);
    CHECK(code([&] { return cmd_birkhoff_iso("0,0,0,1", "0,0,0,1", o); }) == kPrecondition);
    // the constant isomorphism diag(1,-1) without an admissible n raises the inconsistency flag
    auto flag = cmd_birkhoff_iso("0,0,2,1", "0,0,-2,-1", o);
    CHECK(flag.code == kInconsistency);
    CHECK(flag.report["criterion_conflict"].get<bool>());
    auto ok = cmd_birkhoff_iso("0,0,3/2,1", "0,0,3/2,0", o);
    CHECK(ok.code == kOk);
    CHECK(ok.report["n"] == 2);
}

TEST_CASE("fixture directory resolution") {
    Options o;
    o.fixtures = "/nonexistent";
    CHECK(run_guarded("verify", [&] { return cmd_verify("f1_r2", o); }).code == kParse);
    setenv("CONNEXA_FIXTURES", CONNEXA_FIXTURE_DIR, 1);
    CHECK(fixture_dir(o) == CONNEXA_FIXTURE_DIR);
    CHECK(cmd_verify("f1_r2", o).code == kOk);
    unsetenv("CONNEXA_FIXTURES");
    CHECK(fixture_dir(o) == "/nonexistent");
}
