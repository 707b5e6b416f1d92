#pragma once

// Seeded random exact data for property checks and the acceptance suite.

#include <random>

#include "connexa/connmat.hpp"
#include "connexa/scalar.hpp"
#include "connexa/series.hpp"

namespace connexa {

class Sampler {
public:
    explicit Sampler(unsigned seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Scalar rational(int h = 5) {
        long p = integer(-h, h), q = integer(1, h);
        return Scalar::frac(p, q);
    }
    Scalar nonzero_rational(int h = 5) {
        Scalar s;
        while (s.is_zero()) s = rational(h);
        return s;
    }
    // Q(i) sample; the imaginary part is present about half the time
    Scalar gaussian(int h = 5) {
        Scalar s = rational(h);
        if (coin()) s += rational(h) * Scalar::I();
        return s;
    }
    Scalar nonzero_gaussian(int h = 5) {
        Scalar s;
        while (s.is_zero()) s = gaussian(h);
        return s;
    }

    TSeries series(int n, int h = 5) {
        TSeries s(n);
        for (int k = 0; k < n; ++k) s[k] = gaussian(h);
        return s;
    }
    TSeries unit(int n, int h = 5) {
        TSeries s = series(n, h);
        if (n > 0) s[0] = nonzero_gaussian(h);
        return s;
    }
    // lam(0) = 0, lam'(0) != 0
    TSeries automorphism(int n, int h = 3, int degree = -1) {
        TSeries s(n);
        int top = degree < 0 ? n - 1 : std::min(degree, n - 1);
        for (int k = 1; k <= top; ++k) s[k] = rational(h);
        if (n > 1) s[1] = nonzero_rational(h);
        return s;
    }
    ZTSeries ztseries(int nz, int nt, int h = 5, bool with_t1 = false) {
        ZTSeries s(nz, nt);
        for (int k = 0; k < nz; ++k) {
            s[k].c0 = series(nt, h);
            if (with_t1) s[k].c1 = series(nt, h);
        }
        return s;
    }
    Mat2 mat(int nz, int nt, int h = 5) {
        return Mat2{ztseries(nz, nt, h), ztseries(nz, nt, h), ztseries(nz, nt, h), ztseries(nz, nt, h)};
    }
    CMat cmat(int h = 5) { return CMat{gaussian(h), gaussian(h), gaussian(h), gaussian(h)}; }
    CMat invertible_cmat(int h = 5) {
        CMat m = cmat(h);
        while (m.det().is_zero()) m = cmat(h);
        return m;
    }
    // t1-free gauge with invertible constant term, polynomial in z of degree <= zdeg and in t2 of degree <= tdeg
    Mat2 gauge(int nz, int nt, int zdeg, int tdeg, int h = 3) {
        Mat2 T = mat_const(invertible_cmat(h), nz, nt);
        for (ZTSeries* comp : {&T.c1, &T.c2, &T.d, &T.e}) {
            for (int k = 0; k <= std::min(zdeg, nz - 1); ++k)
                for (int j = 0; j <= std::min(tdeg, nt - 1); ++j) {
                    if (k == 0 && j == 0) continue;
                    if (integer(0, 2) == 0) (*comp)[k].c0[j] = rational(h);
                }
        }
        return T;
    }

    // Flat pre-normal data. Either f(0,0) != 0 with b2 solved from the master equation, or f = 0 and
    // b2 quadratic in t2; about a third of the samples have b2(0,0) = 0.
    PreNormalForm prenormal(int nz, int nt, int h = 3) {
        PreNormalForm p;
        p.c = gaussian(h);
        p.alpha = gaussian(h);
        const bool vanish = integer(0, 2) == 0;
        if (coin()) {
            const int N = nt + 2 + 3 * nz;
            ZTSeries f(nz, N);
            for (int k = 0; k < nz; ++k)
                for (int j = 0; j < 3; ++j) f[k].c0[j] = rational(h);
            f[0].c0[0] = nonzero_gaussian(h);
            std::vector<Scalar> init;
            for (int k = 0; k < nz; ++k) init.push_back(rational(h));
            init[0] = vanish ? Scalar(0) : nonzero_gaussian(h);
            p.b2 = solve_master_for_b2(f, init, nz, nt);
            p.f = f.truncated(nz, nt);
        } else {
            p.f = ZTSeries(nz, nt);
            p.b2 = ZTSeries(nz, nt + 2);
            for (int k = 0; k < nz; ++k)
                for (int j = 0; j < 3 && j < nt + 2; ++j) p.b2[k].c0[j] = rational(h);
            if (vanish) p.b2[0].c0[0] = Scalar(0);
        }
        return p;
    }

private:
    std::mt19937 rng_;
};

}  // namespace connexa
