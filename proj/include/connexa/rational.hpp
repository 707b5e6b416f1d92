#pragma once

// Exact rationals with an inline 64-bit fast path. Values that fit in a reduced
// int64 fraction never touch the heap; everything else lives in an mpq_class.
// The representation is canonical: a value is stored big only if it does not fit.

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <memory>
#include <string>

namespace connexa {

namespace detail {
__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

inline u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::uint64_t uabs(std::int64_t v) {
    return v < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

inline void mpz_from_u128(mpz_t out, u128 v) {
    const std::uint64_t parts[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
    mpz_import(out, 2, -1, sizeof(std::uint64_t), 0, 0, parts);
}
}  // namespace detail

class Rat {
public:
    Rat() = default;
    Rat(long v) { set_small(v); }  // NOLINT
    Rat(int v) : n_(v) {}          // NOLINT
    explicit Rat(const mpq_class& q) { set(q); }
    Rat(const Rat& o) : n_(o.n_), d_(o.d_), big_(o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr) {}
    Rat(Rat&&) noexcept = default;
    Rat& operator=(const Rat& o) {
        if (this == &o) return *this;
        n_ = o.n_;
        d_ = o.d_;
        if (!o.big_)
            big_.reset();
        else if (big_)
            *big_ = *o.big_;
        else
            big_ = std::make_unique<mpq_class>(*o.big_);
        return *this;
    }
    Rat& operator=(Rat&&) noexcept = default;

    static Rat frac(long p, long q) {
        mpq_class v(p, q);
        v.canonicalize();
        return Rat(v);
    }

    mpq_class mpq() const {
        if (big_) return *big_;
        mpq_class q;
        mpq_set_si(q.get_mpq_t(), n_, static_cast<unsigned long>(d_));
        return q;
    }

    int sign() const { return big_ ? sgn(*big_) : (n_ > 0) - (n_ < 0); }
    bool is_zero() const { return !big_ && n_ == 0; }
    bool is_integer() const { return big_ ? big_->get_den() == 1 : d_ == 1; }
    bool is_one() const { return !big_ && n_ == 1 && d_ == 1; }
    // numerator as a long; only meaningful for integers of moderate size
    long to_long() const { return big_ ? big_->get_num().get_si() : n_; }
    std::string get_str() const {
        if (big_) return big_->get_str();
        return d_ == 1 ? std::to_string(n_) : std::to_string(n_) + "/" + std::to_string(d_);
    }

    Rat operator-() const {
        if (big_) return Rat(mpq_class(-*big_));
        Rat r;
        r.n_ = -n_;
        r.d_ = d_;
        return r;
    }
    Rat abs() const { return sign() < 0 ? -*this : *this; }

    Rat& operator+=(const Rat& o) { return add_signed(o, false); }
    Rat& operator-=(const Rat& o) { return add_signed(o, true); }
    Rat& operator*=(const Rat& o) {
        if (big_ || o.big_) {
            set(mpq() * o.mpq());
            return *this;
        }
        if (n_ == 0) return *this;
        if (o.n_ == 0) {
            n_ = 0;
            d_ = 1;
            return *this;
        }
        // cross-reduce so the product is already in lowest terms
        std::uint64_t g1 = detail::gcd64(detail::uabs(n_), static_cast<std::uint64_t>(o.d_));
        std::uint64_t g2 = detail::gcd64(detail::uabs(o.n_), static_cast<std::uint64_t>(d_));
        detail::i128 n = detail::i128(n_ / static_cast<std::int64_t>(g1)) * (o.n_ / static_cast<std::int64_t>(g2));
        detail::i128 d = detail::i128(d_ / static_cast<std::int64_t>(g2)) * (o.d_ / static_cast<std::int64_t>(g1));
        store(n, d);
        return *this;
    }
    // caller guarantees o != 0
    Rat& operator/=(const Rat& o) {
        if (big_ || o.big_) {
            set(mpq() / o.mpq());
            return *this;
        }
        Rat inv;
        inv.n_ = o.n_ < 0 ? -o.d_ : o.d_;
        inv.d_ = o.n_ < 0 ? -o.n_ : o.n_;
        return *this *= inv;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
    friend bool operator==(const Rat& a, const Rat& b) {
        if (a.big_ || b.big_) return a.big_ && b.big_ && *a.big_ == *b.big_;
        return a.n_ == b.n_ && a.d_ == b.d_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

private:
    std::int64_t n_ = 0, d_ = 1;
    std::unique_ptr<mpq_class> big_;

    static constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();

    void set_small(long v) {
        if (v == kMin) {
            big_ = std::make_unique<mpq_class>(v);
            return;
        }
        n_ = v;
        d_ = 1;
        big_.reset();
    }

    void set(const mpq_class& q) {
        mpz_srcptr num = q.get_num_mpz_t(), den = q.get_den_mpz_t();
        if (mpz_fits_slong_p(num) && mpz_fits_slong_p(den)) {
            long n = mpz_get_si(num);
            if (n != kMin) {
                n_ = n;
                d_ = mpz_get_si(den);
                big_.reset();
                return;
            }
        }
        if (big_)
            *big_ = q;
        else
            big_ = std::make_unique<mpq_class>(q);
    }

    // n/d with d > 0, reduced by the caller or here
    void store(detail::i128 n, detail::i128 d) {
        constexpr detail::i128 lim = std::numeric_limits<std::int64_t>::max();
        if (n >= -lim && n <= lim && d <= lim) {
            n_ = static_cast<std::int64_t>(n);
            d_ = static_cast<std::int64_t>(d);
            big_.reset();
            return;
        }
        mpq_class q;
        detail::mpz_from_u128(mpq_numref(q.get_mpq_t()), n < 0 ? detail::u128(-n) : detail::u128(n));
        if (n < 0) mpz_neg(mpq_numref(q.get_mpq_t()), mpq_numref(q.get_mpq_t()));
        detail::mpz_from_u128(mpq_denref(q.get_mpq_t()), detail::u128(d));
        q.canonicalize();
        set(q);
    }

    Rat& add_signed(const Rat& o, bool negate) {
        if (big_ || o.big_) {
            set(negate ? mpq_class(mpq() - o.mpq()) : mpq_class(mpq() + o.mpq()));
            return *this;
        }
        if (o.n_ == 0) return *this;
        const detail::i128 on = negate ? -detail::i128(o.n_) : detail::i128(o.n_);
        if (d_ == o.d_) {
            detail::i128 n = detail::i128(n_) + on;
            if (d_ == 1) {
                store(n, 1);
                return *this;
            }
            detail::u128 g = detail::gcd128(n < 0 ? detail::u128(-n) : detail::u128(n), detail::u128(d_));
            store(n / detail::i128(g), detail::i128(d_) / detail::i128(g));
            return *this;
        }
        detail::i128 n = detail::i128(n_) * o.d_ + on * d_;
        detail::i128 d = detail::i128(d_) * o.d_;
        if (n == 0) {
            n_ = 0;
            d_ = 1;
            return *this;
        }
        detail::u128 g = detail::gcd128(n < 0 ? detail::u128(-n) : detail::u128(n), detail::u128(d));
        store(n / detail::i128(g), d / detail::i128(g));
        return *this;
    }
};

inline int sgn(const Rat& r) { return r.sign(); }
inline Rat abs(const Rat& r) { return r.abs(); }

}  // namespace connexa
