#pragma once

// JSON structure documents.
//
// {
//   "format": "connexa-structure", "version": 1, "kind": "TE" | "T",
//   "orders": {"nz": int, "nt": int, "t1_degree": 0 | 1},
//   "matrices": {"A1": M, "A2": M, "B": M}
// }
// M = {"C1": terms, "C2": terms, "D": terms, "E": terms}; terms lists the nonzero coefficients
// [{"z": k, "t1": a, "t2": j, "c": "p/q+r/s*i"}] sorted by z, then t1, then t2.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "connexa/connmat.hpp"
#include "connexa/formalnf.hpp"

namespace connexa {

using Json = nlohmann::ordered_json;

inline constexpr const char* kStructureFormat = "connexa-structure";
inline constexpr int kStructureVersion = 1;

inline Json to_json(const Scalar& s) { return s.str(); }

inline Json terms_json(const ZTSeries& s) {
    Json arr = Json::array();
    for (int k = 0; k < s.nz(); ++k)
        for (int a = 0; a <= 1; ++a)
            for (int j = 0; j < s.nt(); ++j) {
                Scalar c = s.coeff(k, a, j);
                if (c.is_zero()) continue;
                arr.push_back(Json{{"z", k}, {"t1", a}, {"t2", j}, {"c", c.str()}});
            }
    return arr;
}

inline Json to_json(const Mat2& m) {
    return Json{{"C1", terms_json(m.c1)}, {"C2", terms_json(m.c2)}, {"D", terms_json(m.d)}, {"E", terms_json(m.e)}};
}

inline int t1_degree(const TEStruct& s) {
    for (const Mat2* m : {&s.A1, &s.A2, &s.B})
        if (!t1_free(*m)) return 1;
    return 0;
}

inline Json to_json(const TEStruct& s) {
    return Json{{"format", kStructureFormat},
                {"version", kStructureVersion},
                {"kind", s.kind == StructKind::TE ? "TE" : "T"},
                {"orders", Json{{"nz", s.nz}, {"nt", s.nt}, {"t1_degree", t1_degree(s)}}},
                {"matrices", Json{{"A1", to_json(s.A1)}, {"A2", to_json(s.A2)}, {"B", to_json(s.B)}}}};
}

inline Json to_json(const NormalFormId& id) {
    Json p = Json::object();
    for (const auto& [k, v] : id.params) p[k] = v.str();
    return Json{{"family", family_name(id.family)}, {"params", p}};
}

inline Json to_json(const TSeries& s) {
    Json arr = Json::array();
    for (const auto& c : s.coeffs()) arr.push_back(c.str());
    return arr;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- reading

namespace detail {
[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Parse, where + ": " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) parse_fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) parse_fail(where, std::string("missing field '") + key + "'");
    return *it;
}

inline int int_field(const Json& j, const char* key, const std::string& where, int lo, int hi) {
    const Json& v = field(j, key, where);
    if (!v.is_number_integer()) parse_fail(where + "." + key, "expected an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi) parse_fail(where + "." + key, "value " + std::to_string(x) + " out of range");
    return static_cast<int>(x);
}

inline Scalar scalar_field(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return Scalar(v.get<long>());
    if (!v.is_string()) parse_fail(where, "expected a scalar string \"p/q+r/s*i\"");
    try {
        return Scalar::parse(v.get<std::string>());
    } catch (const Error& e) {
        parse_fail(where, e.what());
    }
}

inline ZTSeries read_terms(const Json& arr, int nz, int nt, int t1deg, const std::string& where) {
    if (!arr.is_array()) parse_fail(where, "expected an array of terms");
    ZTSeries s(nz, nt);
    int prev = -1;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const Json& t = arr[i];
        int k = int_field(t, "z", w, 0, nz - 1);
        int a = int_field(t, "t1", w, 0, t1deg);
        int j = int_field(t, "t2", w, 0, nt - 1);
        Scalar c = scalar_field(field(t, "c", w), w + ".c");
        int key = (k * 2 + a) * nt + j;
        if (key <= prev) parse_fail(w, "terms must be sorted by z, t1, t2 without repetition");
        prev = key;
        (a == 0 ? s[k].c0 : s[k].c1)[j] = c;
    }
    return s;
}

inline Mat2 read_mat(const Json& j, int nz, int nt, int t1deg, const std::string& where) {
    Mat2 m;
    m.c1 = read_terms(field(j, "C1", where), nz, nt, t1deg, where + ".C1");
    m.c2 = read_terms(field(j, "C2", where), nz, nt, t1deg, where + ".C2");
    m.d = read_terms(field(j, "D", where), nz, nt, t1deg, where + ".D");
    m.e = read_terms(field(j, "E", where), nz, nt, t1deg, where + ".E");
    return m;
}
}  // namespace detail

inline TEStruct structure_from_json(const Json& j) {
    using namespace detail;
    const Json& fmt = field(j, "format", "document");
    if (!fmt.is_string() || fmt.get<std::string>() != kStructureFormat) parse_fail("document.format", "expected \"connexa-structure\"");
    if (int_field(j, "version", "document", 0, 1 << 20) != kStructureVersion) parse_fail("document.version", "unsupported version");
    const Json& kind = field(j, "kind", "document");
    TEStruct s;
    if (kind == "TE")
        s.kind = StructKind::TE;
    else if (kind == "T")
        s.kind = StructKind::T;
    else
        parse_fail("document.kind", "expected \"TE\" or \"T\"");
    const Json& ord = field(j, "orders", "document");
    s.nz = int_field(ord, "nz", "orders", 1, 4096);
    s.nt = int_field(ord, "nt", "orders", 1, 4096);
    const int t1deg = int_field(ord, "t1_degree", "orders", 0, 1);
    const Json& mats = field(j, "matrices", "document");
    s.A1 = read_mat(field(mats, "A1", "matrices"), s.nz, s.nt, t1deg, "matrices.A1");
    s.A2 = read_mat(field(mats, "A2", "matrices"), s.nz, s.nt, t1deg, "matrices.A2");
    s.B = read_mat(field(mats, "B", "matrices"), s.nz, s.nt, t1deg, "matrices.B");
    return s;
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // locate the byte offset as line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline TEStruct load_structure(const std::string& path) {
    return structure_from_json(parse_json_text(read_file(path), path));
}

inline std::string structure_text(const TEStruct& s) { return dump(to_json(s)); }

}  // namespace connexa
