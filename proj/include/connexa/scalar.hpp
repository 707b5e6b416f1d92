#pragma once

// Gaussian rationals Q(i) on top of GMP.

#include <gmpxx.h>

#include <optional>
#include <ostream>
#include <regex>
#include <string>

#include "connexa/error.hpp"
#include "connexa/rational.hpp"

namespace connexa {

class Scalar {
public:
    Rat re, im;

    Scalar() = default;
    Scalar(long v) : re(v) {}  // NOLINT implicit on purpose
    Scalar(int v) : re(v) {}   // NOLINT
    Scalar(const Rat& r) : re(r) {}  // NOLINT
    Scalar(const mpq_class& r) : re(canonical(r)) {}  // NOLINT
    Scalar(const mpq_class& r, const mpq_class& i) : re(canonical(r)), im(canonical(i)) {}

    static Scalar frac(long p, long q) {
        if (q == 0) throw Error(ErrorKind::Domain, "zero denominator");
        return Scalar(mpq_class(p, q));
    }
    static Scalar parts(Rat r, Rat i) {
        Scalar s;
        s.re = std::move(r);
        s.im = std::move(i);
        return s;
    }
    static Scalar I() { return parts(0, 1); }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }
    bool is_integer() const { return is_real() && re.is_integer(); }
    bool is_nonneg_integer() const { return is_integer() && sgn(re) >= 0; }
    bool is_one() const { return is_real() && re.is_one(); }

    // only meaningful when is_integer()
    long to_long() const { return re.to_long(); }

    Scalar conj() const { return parts(re, -im); }
    mpq_class norm2() const { return (re * re + im * im).mpq(); }

    Scalar operator-() const { return parts(-re, -im); }
    Scalar& operator+=(const Scalar& o) {
        re += o.re;
        if (!o.im.is_zero()) im += o.im;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re -= o.re;
        if (!o.im.is_zero()) im -= o.im;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        if (im.is_zero() && o.im.is_zero()) {
            re *= o.re;
            return *this;
        }
        Rat r = re * o.re - im * o.im;
        Rat i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    // *this += a * b
    Scalar& add_mul(const Scalar& a, const Scalar& b) {
        if (a.im.is_zero() && b.im.is_zero()) {
            re += a.re * b.re;
            return *this;
        }
        re += a.re * b.re - a.im * b.im;
        im += a.re * b.im + a.im * b.re;
        return *this;
    }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw Error(ErrorKind::NotInvertible, "division by zero scalar");
        if (im.is_zero() && o.im.is_zero()) {
            re /= o.re;
            return *this;
        }
        Rat n = o.re * o.re + o.im * o.im;
        Rat r = (re * o.re + im * o.im) / n;
        Rat i = (im * o.re - re * o.im) / n;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    Scalar inv() const { return Scalar(1) / *this; }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Canonical text: "p/q", "r/s*i", "p/q+r/s*i"; unit imaginary parts print as "i" / "-i".
    std::string str() const {
        if (sgn(im) == 0) return re.get_str();
        std::string ims;
        Rat a = abs(im);
        if (a.is_one())
            ims = "i";
        else
            ims = a.get_str() + "*i";
        if (sgn(re) == 0) return (sgn(im) < 0 ? "-" : "") + ims;
        return re.get_str() + (sgn(im) < 0 ? "-" : "+") + ims;
    }

    static Scalar parse(const std::string& text) {
        std::string s;
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
        if (s.empty()) throw Error(ErrorKind::Parse, "empty scalar");
        std::string rs, is;
        bool has_im = s.back() == 'i';
        if (has_im) {
            std::string body = s.substr(0, s.size() - 1);
            std::size_t split = std::string::npos;
            for (std::size_t k = body.size(); k-- > 1;) {
                if ((body[k] == '+' || body[k] == '-') && body[k - 1] != '/') {
                    split = k;
                    break;
                }
            }
            if (split == std::string::npos) {
                is = body;
            } else {
                rs = body.substr(0, split);
                is = body.substr(split);
            }
            if (!is.empty() && is.back() == '*') {
                is.pop_back();
                if (is.empty() || is == "+" || is == "-")
                    throw Error(ErrorKind::Parse, "dangling '*' in scalar '" + text + "'");
            }
            if (is.empty() || is == "+")
                is = "1";
            else if (is == "-")
                is = "-1";
        } else {
            rs = s;
        }
        Scalar out;
        if (!rs.empty()) out.re = Rat(parse_rational(rs, text));
        if (has_im) out.im = Rat(parse_rational(is, text));
        return out;
    }

    static mpq_class canonical(mpq_class q) {
        q.canonicalize();
        return q;
    }

    static mpq_class parse_rational(std::string r, const std::string& whole) {
        static const std::regex re_rat(R"(^[+-]?[0-9]+(/[0-9]+)?$)");
        if (!std::regex_match(r, re_rat))
            throw Error(ErrorKind::Parse, "malformed scalar '" + whole + "'");
        if (r[0] == '+') r.erase(0, 1);
        auto slash = r.find('/');
        if (slash != std::string::npos && mpz_class(r.substr(slash + 1)) == 0)
            throw Error(ErrorKind::Parse, "zero denominator in '" + whole + "'");
        mpq_class q(r, 10);
        q.canonicalize();
        return q;
    }
};

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

// preferred branch among {w, -w}: positive real part, ties broken by nonnegative imaginary part
inline bool is_canonical_branch(const Scalar& w) {
    return sgn(w.re) > 0 || (sgn(w.re) == 0 && sgn(w.im) >= 0);
}

inline std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
    if (sgn(q) < 0) return std::nullopt;
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
    mpq_class r(sn, sd);
    r.canonicalize();
    return r;
}

// Exact square root in Q(i), canonical branch; nullopt when the root leaves Q(i).
inline std::optional<Scalar> sqrt_exact(const Scalar& z) {
    if (z.is_zero()) return Scalar(0);
    if (z.is_real()) {
        if (sgn(z.re) > 0) {
            auto r = rational_sqrt(z.re.mpq());
            if (!r) return std::nullopt;
            return Scalar(*r);
        }
        auto r = rational_sqrt(-z.re.mpq());
        if (!r) return std::nullopt;
        return Scalar(mpq_class(0), *r);
    }
    auto m = rational_sqrt(z.norm2());
    if (!m) return std::nullopt;
    auto u = rational_sqrt((z.re.mpq() + *m) / 2);
    if (!u || sgn(*u) == 0) return std::nullopt;
    Scalar w(*u, mpq_class(z.im.mpq() / (2 * *u)));
    if (!is_canonical_branch(w)) w = -w;
    return w;
}

inline std::optional<mpq_class> rational_root(const mpq_class& q, unsigned k) {
    if (k == 1) return q;
    bool neg = sgn(q) < 0;
    if (neg && k % 2 == 0) return std::nullopt;
    mpz_class n = abs(q.get_num()), d = q.get_den(), rn, rd;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k)) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
    mpq_class r(neg ? mpz_class(-rn) : rn, rd);
    r.canonicalize();
    return r;
}

// Some k-th root of z in Q(i): real rationals directly, powers of two through repeated square roots.
inline std::optional<Scalar> root_exact(const Scalar& z, unsigned k) {
    if (k == 0) throw Error(ErrorKind::Domain, "zeroth root");
    if (k == 1 || z.is_zero()) return z;
    if (z.is_real()) {
        if (auto r = rational_root(z.re.mpq(), k)) return Scalar(*r);
    }
    if ((k & (k - 1)) == 0) {
        Scalar w = z;
        for (unsigned j = k; j > 1; j /= 2) {
            auto s = sqrt_exact(w);
            if (!s) return std::nullopt;
            w = *s;
        }
        return w;
    }
    return std::nullopt;
}

}  // namespace connexa
