#pragma once

// Command implementations behind the `connexa` executable. Each command returns a JSON report and
// an exit code; the executable only parses flags and prints.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "connexa/acceptance.hpp"
#include "connexa/document.hpp"
#include "connexa/euler.hpp"
#include "connexa/formalnf.hpp"
#include "connexa/malgrange.hpp"
#include "connexa/origin.hpp"

#ifndef CONNEXA_FIXTURE_DIR
#define CONNEXA_FIXTURE_DIR "fixtures"
#endif

namespace connexa::cli {

enum ExitCode { kOk = 0, kFailure = 1, kParse = 2, kPrecondition = 3, kInconsistency = 4 };

struct Options {
    int order_z = 0;  // 0: keep the document orders
    int order_t = 0;
    int nmax = 64;
    int kmax = 0;  // 0: use the z-order of the input
    std::string fixtures;
};

struct Outcome {
    Json report;
    int code = kOk;
    std::optional<std::string> document;  // printed instead of the report when set
};

// CONNEXA_FIXTURES beats --fixtures beats the built-in directory
inline std::string fixture_dir(const Options& o) {
    if (const char* env = std::getenv("CONNEXA_FIXTURES"); env && *env) return env;
    if (!o.fixtures.empty()) return o.fixtures;
    return CONNEXA_FIXTURE_DIR;
}

// a path, or the bare name of a shipped fixture
inline std::string resolve_input(const std::string& arg, const Options& o) {
    if (std::filesystem::is_regular_file(arg)) return arg;
    std::filesystem::path p = std::filesystem::path(fixture_dir(o)) / arg;
    if (p.extension() != ".json") p += ".json";
    if (std::filesystem::is_regular_file(p)) return p.string();
    throw Error(ErrorKind::Parse, "no such file or fixture '" + arg + "' (fixtures: " + fixture_dir(o) + ")");
}

inline TEStruct load_input(const std::string& arg, const Options& o) {
    TEStruct s = load_structure(resolve_input(arg, o));
    const int nz = o.order_z > 0 ? o.order_z : s.nz, nt = o.order_t > 0 ? o.order_t : s.nt;
    if (nz > s.nz || nt > s.nt)
        throw Error(ErrorKind::Precondition, "requested orders (" + std::to_string(nz) + ", " + std::to_string(nt) +
                                                 ") exceed the document orders (" + std::to_string(s.nz) + ", " +
                                                 std::to_string(s.nt) + ")");
    return (nz == s.nz && nt == s.nt) ? s : s.truncated(nz, nt);
}

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Parse: return kParse;
        case ErrorKind::ReductionFailed: return kFailure;
        default: return kPrecondition;
    }
}

// ---------------------------------------------------------------- report pieces

inline Json cmat_json(const CMat& m) {
    return Json{{"C1", m.c1.str()}, {"C2", m.c2.str()}, {"D", m.d.str()}, {"E", m.e.str()}};
}

inline Json map_json(const GaugeMap& g) {
    Json j{{"T", to_json(g.T)}};
    j["lam"] = g.lam ? to_json(*g.lam) : Json(nullptr);
    return j;
}

inline Json log_json(const std::vector<LogStep>& log) {
    Json a = Json::array();
    for (const auto& st : log) {
        Json j{{"step", st.name}};
        j.update(map_json(st.map));
        a.push_back(j);
    }
    return a;
}

inline Json strings_json(const std::vector<std::string>& v) {
    Json a = Json::array();
    for (const auto& s : v) a.push_back(s);
    return a;
}

inline Json orders_json(const TEStruct& s) { return Json{{"nz", s.nz}, {"nt", s.nt}}; }

inline Json birkhoff_json(const BirkhoffData& d) {
    return Json{{"c", d.c.str()}, {"alpha", d.alpha.str()}, {"c0", d.c0.str()}, {"c1", d.c1.str()}};
}

inline Json iso_verdict_json(const BirkhoffIsoVerdict& v) {
    Json j{{"isomorphic", v.isomorphic}, {"clause", v.clause}};
    j["n"] = v.n ? Json(*v.n) : Json(nullptr);
    j["epsilon"] = v.epsilon;
    j["n_bound"] = v.n_bound;
    j["search_complete"] = v.search_complete;
    j["criterion_conflict"] = v.criterion_conflict;
    j["note"] = v.note;
    return j;
}

inline Json formal_json(const FormalNFResult& r) {
    Json alts = Json::array();
    for (const auto& a : r.alternates) alts.push_back(to_json(a));
    return Json{{"normal_form", to_json(r.id)}, {"name", r.id.str()},   {"alternates", alts},
                {"extension_case", r.extension_case}, {"replay_checked", r.replay_checked},
                {"replay_nt", r.replay_nt},         {"log", log_json(r.log)}, {"warnings", strings_json(r.warnings)}};
}

inline Json euler_json(const EulerNFResult& r) {
    Json j{{"normal_form", r.nf.str()}, {"family", family_name(r.nf.family)}, {"c", r.nf.c.str()}};
    if (r.nf.family == EulerFamily::E3) j["c0"] = r.nf.c0.str();
    if (r.nf.family == EulerFamily::E4) {
        j["r"] = r.nf.r;
        j["c1"] = r.nf.c1.str();
    }
    j["lam"] = r.lam ? to_json(*r.lam) : Json(nullptr);
    j["replay_order"] = r.order;
    j["realizable_by_te"] = realizable_by_te(r.nf);
    j["frobenius_realizable"] = frobenius_realizable(r.nf);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline Json header(const std::string& cmd) { return Json{{"command", cmd}}; }

// ---------------------------------------------------------------- commands

inline Outcome cmd_verify(const std::string& in, const Options& o) {
    TEStruct s = load_input(in, o);
    auto r = flatness_residuals(s);
    auto zero = [](const Mat2& m) { return m.is_zero(); };
    Json j = header("verify");
    j["input"] = in;
    j["orders"] = orders_json(s);
    j["kind"] = s.kind == StructKind::TE ? "TE" : "T";
    j["residual_orders"] = Json{{"nz", r.nz}, {"nt", r.nt}};
    j["residuals_zero"] = Json{{"t1_t2", zero(r.Rt)},
                               {"z_t1", r.skipped_z ? Json(nullptr) : Json(zero(r.Rz1))},
                               {"z_t2", r.skipped_z ? Json(nullptr) : Json(zero(r.Rz2))}};
    j["flat"] = r.flat();
    if (!zero(r.Rt)) j["residual_t1_t2"] = to_json(r.Rt);
    if (!r.skipped_z && !zero(r.Rz1)) j["residual_z_t1"] = to_json(r.Rz1);
    if (!r.skipped_z && !zero(r.Rz2)) j["residual_z_t2"] = to_json(r.Rz2);
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_prenormal(const std::string& in, const Options& o) {
    TEStruct s = load_input(in, o);
    auto r = to_prenormal(s);
    TEStruct out = apply_isomorphism(s, r.gauge);
    Json j = header("prenormal");
    j["input"] = in;
    j["orders"] = orders_json(s);
    j["identity_gauge"] = r.identity;
    j["c"] = r.data.c.str();
    j["alpha"] = r.data.alpha.str();
    j["f"] = terms_json(r.data.f);
    j["b2"] = terms_json(r.data.b2);
    j["elementary"] = is_elementary(r.data);
    j["log"] = log_json({{"pre-normal gauge", r.gauge}});
    j["replay_prenormal"] = is_prenormal(out);
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_formal_nf(const std::string& in, const Options& o) {
    TEStruct s = load_input(in, o);
    auto r = formal_normal_form(s);
    Json j = header("formal-nf");
    j["input"] = in;
    j["orders"] = orders_json(s);
    j.update(formal_json(r));
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_formal_iso(const std::string& a, const std::string& b, const Options& o) {
    TEStruct sa = load_input(a, o), sb = load_input(b, o);
    auto ra = formal_normal_form(sa), rb = formal_normal_form(sb);
    // the alternates belong to the same class, so any match among them decides
    std::optional<FormalIsoVerdict> v;
    NormalFormId wa = ra.id, wb = rb.id;
    std::vector<NormalFormId> ca{ra.id}, cb{rb.id};
    ca.insert(ca.end(), ra.alternates.begin(), ra.alternates.end());
    cb.insert(cb.end(), rb.alternates.begin(), rb.alternates.end());
    for (const auto& x : ca)
        for (const auto& y : cb) {
            auto d = formal_iso_decision(x, y);
            if (!v || (d.isomorphic && !v->isomorphic)) {
                v = d;
                wa = x;
                wb = y;
            }
        }
    Json j = header("formal-iso");
    j["inputs"] = Json::array({a, b});
    j["isomorphic"] = v->isomorphic;
    j["witness"] = v->witness;
    j["covers_identity"] = v->gauge;
    j["boundary_flag"] = v->boundary_flag;
    j["note"] = v->note;
    j["compared"] = Json::array({wa.str(), wb.str()});
    j["a"] = formal_json(ra);
    j["b"] = formal_json(rb);
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_classify(const std::string& in, const Options& o) {
    TEStruct s = load_input(in, o);
    auto c = classify_holomorphic(s, o.nmax);
    Json j = header("classify");
    j["input"] = in;
    j["orders"] = orders_json(s);
    j["prenormal"] = c.prenormal;
    j["elementary"] = c.elementary;
    if (c.formal) j["formal"] = formal_json(*c.formal);
    j["formal_normal_form"] = c.formal_id ? Json(c.formal_id->str()) : Json(nullptr);
    if (c.prenormal) {
        const int k = o.kmax > 0 ? o.kmax : s.nz;
        auto v = irreducibility_check(restrict_origin(s), -k, k);
        Json irr{{"verdict", verdict_name(v.kind)}, {"k_range", Json::array({-k, k})}};
        irr["k"] = v.k ? Json(*v.k) : Json(nullptr);
        Json inc = Json::array();
        for (int x : v.inconclusive_k) inc.push_back(x);
        irr["inconclusive_k"] = inc;
        if (!v.note.empty()) irr["note"] = v.note;
        j["irreducibility"] = irr;
    }
    if (c.birkhoff) {
        TMat R = restriction_matrix(s);
        BirkhoffReduction red = birkhoff_reduce(R);
        NormalizedBirkhoff nb = normalize_birkhoff(red.B0, red.Binf);
        j["birkhoff"] = Json{{"data", birkhoff_json(*c.birkhoff)}, {"exact", c.birkhoff_exact},
                             {"B0", cmat_json(red.B0)},          {"B_inf", cmat_json(red.Binf)},
                             {"constant_frame", cmat_json(nb.gauge)}, {"log", strings_json(red.log)}};
        j["c1"] = c.c1->str();
        j["isomorphic_to_formal_model"] = iso_verdict_json(*c.iso_to_formal);
    }
    j["holomorphic_normal_form"] = c.holo_id ? to_json(*c.holo_id) : Json(nullptr);
    j["holomorphic_name"] = c.holo_id ? Json(c.holo_id->str()) : Json(nullptr);
    if (c.birkhoff && c.holo_id) {
        auto h = holo_normal_form(*c.birkhoff, std::max(s.nz, 2), 2);
        Json m{{"branch", h.branch}, {"k", h.k.str()}, {"k1", h.k1.str()}, {"log", strings_json(h.log)}};
        m.update(map_json(h.map));
        j["holomorphic_map"] = m;
        try {
            j["assigned_c1"] = assign_c1(*c.holo_id).str();
        } catch (const Error&) {
        }
    }
    if (c.holo_id) {
        TEStruct nf = make_normal_form(*c.holo_id, std::max(s.nz, 2), std::max(s.nt, 4));
        j["induced_euler"] = euler_json(euler_normal_form(induced_euler(nf)));
    }
    j["warnings"] = strings_json(c.warnings);
    int code = kOk;
    if (c.iso_to_formal && c.iso_to_formal->criterion_conflict) code = kInconsistency;
    return {j, code, std::nullopt};
}

// "c,alpha,c0,c1"
inline BirkhoffData parse_tuple(const std::string& text) {
    std::vector<Scalar> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) v.push_back(Scalar::parse(part));
    if (v.size() != 4) throw Error(ErrorKind::Parse, "expected c,alpha,c0,c1 in '" + text + "'");
    return BirkhoffData{v[0], v[1], v[2], v[3]};
}

inline Outcome cmd_birkhoff_iso(const std::string& a, const std::string& b, const Options& o) {
    BirkhoffData da = parse_tuple(a), db = parse_tuple(b);
    auto v = birkhoff_iso_decision(da, db, o.nmax);
    Json j = header("birkhoff-iso");
    j["a"] = birkhoff_json(da);
    j["b"] = birkhoff_json(db);
    j["nmax"] = o.nmax;
    j.update(iso_verdict_json(v));
    return {j, v.criterion_conflict ? kInconsistency : kOk, std::nullopt};
}

inline Outcome cmd_malgrange(const Scalar& c, const Scalar& alpha, const Scalar& c0, const Scalar& c1, const Options& o) {
    const int nz = o.order_z > 0 ? o.order_z : 4, nt = o.order_t > 0 ? o.order_t : 8;
    TEStruct s = malgrange_connection(BirkhoffData{c, alpha, c0, c1}, nz, nt);
    Outcome out;
    out.report = to_json(s);
    out.document = dump(out.report);
    return out;
}

inline Outcome cmd_normal_form(const std::string& family, const std::vector<std::string>& params, const Options& o) {
    auto f = family_from_name(family);
    if (!f) throw Error(ErrorKind::Parse, "unknown normal-form family '" + family + "'");
    NormalFormId id{*f, {}};
    for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected name=value, got '" + p + "'");
        id.params[p.substr(0, eq)] = Scalar::parse(p.substr(eq + 1));
    }
    const int nz = o.order_z > 0 ? o.order_z : 4, nt = o.order_t > 0 ? o.order_t : 8;
    TEStruct s = make_normal_form(id, nz, nt);
    Outcome out;
    out.report = to_json(s);
    out.document = dump(out.report);
    return out;
}

// "a0,a1,..." coefficients of g, t-order from --order-t or the list length
inline TSeries parse_coefficients(const std::string& text, int order) {
    std::vector<Scalar> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) v.push_back(Scalar::parse(part));
    if (v.empty()) throw Error(ErrorKind::Parse, "empty coefficient list");
    const int n = order > 0 ? order : std::max<int>(static_cast<int>(v.size()) + 14, 16);
    if (static_cast<int>(v.size()) > n) throw Error(ErrorKind::Precondition, "more coefficients than the t-order");
    TSeries g(n);
    for (std::size_t k = 0; k < v.size(); ++k) g[static_cast<int>(k)] = v[k];
    return g;
}

inline Outcome cmd_euler_nf(const std::string& g, const Scalar& c, const Options& o) {
    EulerField e{c, parse_coefficients(g, o.order_t)};
    Json j = header("euler-nf");
    j["g"] = to_json(e.g);
    j.update(euler_json(euler_normal_form(e)));
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_euler_realizable(const std::string& g, const Scalar& c, const Options& o) {
    EulerField e{c, parse_coefficients(g, o.order_t)};
    auto r = euler_normal_form(e);
    Json j = header("euler-realizable");
    j["normal_form"] = r.nf.str();
    j["realizable_by_te"] = realizable_by_te(r.nf);
    j["frobenius_realizable"] = frobenius_realizable(r.nf);
    return {j, kOk, std::nullopt};
}

inline Outcome cmd_selftest(const Options& o) {
    auto res = run_acceptance(fixture_dir(o));
    Json j = header("selftest");
    Json a = Json::array();
    bool all = true;
    for (const auto& r : res) {
        a.push_back(Json{{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    j["criteria"] = a;
    j["pass"] = all;
    return {j, all ? kOk : kFailure, std::nullopt};
}

// runs a command and turns library errors into a report with the matching exit code
template <class F>
Outcome run_guarded(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        Json j = header(name);
        j["error"] = Json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
        return {j, exit_code_for(e), std::nullopt};
    } catch (const std::exception& e) {
        Json j = header(name);
        j["error"] = Json{{"kind", "internal"}, {"message", e.what()}};
        return {j, kFailure, std::nullopt};
    }
}

}  // namespace connexa::cli
