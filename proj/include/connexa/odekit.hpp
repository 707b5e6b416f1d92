#pragma once

// Solvers for the four problem classes used by the classification pipelines:
// linear t-ODEs with a regular singular point, the third-derivative system, the Riccati-type
// equation with a unique constant, and the Fuchs valuation test.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "connexa/error.hpp"
#include "connexa/linalg.hpp"
#include "connexa/scalar.hpp"
#include "connexa/series.hpp"

namespace connexa {

// ---------------------------------------------------------------- t u' + A(t) u = b(t)

struct LinearTOdeResult {
    std::vector<TSeries> u;
    std::vector<std::pair<int, int>> free_params;  // (power n, component) left to the caller's choice
};

// Recursion (n Id + A_0) u_n = b_n - sum_{k>=1} A_k u_{n-k}. At singular steps with a consistent
// right side the free components take values from `free_values[(n, i)]` (default 0).
inline LinearTOdeResult solve_linear_t_ode(const std::vector<std::vector<TSeries>>& A, const std::vector<TSeries>& b,
                                           const std::map<std::pair<int, int>, Scalar>& free_values = {}) {
    const int d = static_cast<int>(b.size());
    if (d == 0) return {};
    const int N = b[0].order();
    for (const auto& row : A) {
        if (static_cast<int>(row.size()) != d) throw Error(ErrorKind::Shape, "matrix A is not square");
        for (const auto& s : row) require_same_order(s.order(), N, "solve_linear_t_ode");
    }
    LinearTOdeResult out;
    out.u.assign(static_cast<std::size_t>(d), TSeries(N));
    for (int n = 0; n < N; ++n) {
        std::vector<std::vector<Scalar>> M(static_cast<std::size_t>(d), std::vector<Scalar>(static_cast<std::size_t>(d)));
        std::vector<Scalar> rhs(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            rhs[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)][n];
            for (int j = 0; j < d; ++j) {
                const TSeries& a = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a[0] + (i == j ? Scalar(n) : Scalar(0));
                for (int k = 1; k <= n; ++k)
                    if (!a[k].is_zero()) rhs[static_cast<std::size_t>(i)] -= a[k] * out.u[static_cast<std::size_t>(j)][n - k];
            }
        }
        std::vector<Scalar> fv(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            auto it = free_values.find({n, i});
            if (it != free_values.end()) fv[static_cast<std::size_t>(i)] = it->second;
        }
        LinearSolution sol = solve_linear(M, rhs, &fv);
        if (!sol.consistent)
            throw Error(ErrorKind::NoSolution, "resonant step n = " + std::to_string(n) + " has an inconsistent right side");
        for (int f : sol.free_vars) out.free_params.emplace_back(n, f);
        for (int i = 0; i < d; ++i) out.u[static_cast<std::size_t>(i)][n] = sol.x[static_cast<std::size_t>(i)];
    }
    return out;
}

// residual t u' + A u - b, componentwise (for checks)
inline std::vector<TSeries> linear_t_ode_residual(const std::vector<std::vector<TSeries>>& A, const std::vector<TSeries>& b,
                                                  const std::vector<TSeries>& u) {
    const int d = static_cast<int>(b.size());
    std::vector<TSeries> r;
    for (int i = 0; i < d; ++i) {
        const TSeries& ui = u[static_cast<std::size_t>(i)];
        TSeries tu(ui.order());
        for (int n = 1; n < ui.order(); ++n) tu[n] = ui[n] * Scalar(n);
        TSeries acc = tu - b[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) acc += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
        r.push_back(acc);
    }
    return r;
}

// ---------------------------------------------------------------- third-derivative system

enum class ThirdDerShape { LambdaT, LambdaTPlusOne, TSquared };
enum class ThirdDerVerdict { Unique, SolvableFamily, NoSolution };

inline const char* verdict_name(ThirdDerVerdict v) {
    switch (v) {
        case ThirdDerVerdict::Unique: return "unique";
        case ThirdDerVerdict::SolvableFamily: return "solvable-iff-condition";
        case ThirdDerVerdict::NoSolution: return "no-solution";
    }
    return "?";
}

struct ThirdDerResult {
    ThirdDerShape shape;
    Scalar lambda;  // for the two linear shapes
    ThirdDerVerdict verdict;
    std::optional<TSeries> x;  // one solution (free coefficient set to 0) when solvable
    std::string condition;     // the solvability condition checked at a resonant m
};

inline ThirdDerShape third_der_shape(const TSeries& b, Scalar& lambda) {
    if (b.degree() > 2) throw Error(ErrorKind::Unsupported, "b is not quadratic");
    Scalar b0 = b.coeff(0), b1 = b.coeff(1), b2 = b.coeff(2);
    if (b2.is_zero() && b0.is_zero()) {
        lambda = b1;
        return ThirdDerShape::LambdaT;
    }
    if (b2.is_zero() && b0.is_one()) {
        lambda = b1;
        return ThirdDerShape::LambdaTPlusOne;
    }
    if (b2.is_one() && b1.is_zero() && b0.is_zero()) {
        lambda = Scalar(0);
        return ThirdDerShape::TSquared;
    }
    throw Error(ErrorKind::Unsupported, "b must be one of lambda t, lambda t + 1, t^2");
}

// m x + b' x - b x' = g with x''' = 0
inline ThirdDerResult solve_third_der(const Scalar& m, const TSeries& b, const TSeries& g) {
    if (m.is_zero()) throw Error(ErrorKind::Precondition, "m must be nonzero");
    if (g.degree() > 2) throw Error(ErrorKind::Precondition, "g must be quadratic");
    ThirdDerResult out;
    out.shape = third_der_shape(b, out.lambda);
    const Scalar l = out.lambda;
    std::vector<std::vector<Scalar>> M(3, std::vector<Scalar>(3));
    switch (out.shape) {
        case ThirdDerShape::LambdaT:
            M[0][0] = m + l;
            M[1][1] = m;
            M[2][2] = m - l;
            break;
        case ThirdDerShape::LambdaTPlusOne:
            M[0][0] = m + l;
            M[0][1] = Scalar(-1);
            M[1][1] = m;
            M[1][2] = Scalar(-2);
            M[2][2] = m - l;
            break;
        case ThirdDerShape::TSquared:
            M[0][0] = m;
            M[1][0] = Scalar(2);
            M[1][1] = m;
            M[2][1] = Scalar(1);
            M[2][2] = m;
            break;
    }
    std::vector<Scalar> rhs{g.coeff(0), g.coeff(1), g.coeff(2)};
    LinearSolution sol = solve_linear(M, rhs);
    if (out.shape == ThirdDerShape::LambdaT && m == l) out.condition = "g2 = 0";
    if (out.shape == ThirdDerShape::LambdaT && m == -l) out.condition = "g0 = 0";
    if (out.shape == ThirdDerShape::LambdaTPlusOne && m == l) out.condition = "g2 = 0";
    if (out.shape == ThirdDerShape::LambdaTPlusOne && m == -l) out.condition = "m^2 g0 + m g1 + g2 = 0";
    if (!sol.consistent) {
        out.verdict = ThirdDerVerdict::NoSolution;
        return out;
    }
    out.verdict = sol.free_vars.empty() ? ThirdDerVerdict::Unique : ThirdDerVerdict::SolvableFamily;
    TSeries x(3);
    for (int j = 0; j < 3; ++j) x[j] = sol.x[static_cast<std::size_t>(j)];
    out.x = x;
    return out;
}

// ---------------------------------------------------------------- Riccati-type equation
//
//   t tau' + r tau = tau^2 f (1 + c t^r tau)
//
// The Euler-field equation t tau' + (r-1) tau = -(tau^2 / f)(1 + c1/(1-r) t^(r-1) tau) is the same
// equation with r -> r-1, f -> -1/f, c -> c1/(1-r); the euler module performs that substitution.

struct RiccatiSolution {
    Scalar c;
    TSeries tau;
    int r = 1;
    Scalar free_index_value;
};

inline TSeries riccati_residual(const TSeries& f, int r, const Scalar& c, const TSeries& tau) {
    const int N = tau.order();
    TSeries lhs(N);
    for (int n = 0; n < N; ++n) lhs[n] = tau[n] * Scalar(n + r);
    TSeries tau2 = tau * tau;
    TSeries inner = TSeries::one(N) + (tau.shifted(r) * c);
    return lhs - tau2 * f.truncated(N) * inner;
}

inline RiccatiSolution solve_riccati_unique_c(const TSeries& f, int r, const Scalar& tau_r) {
    if (r < 1) throw Error(ErrorKind::Precondition, "r must be >= 1");
    const int N = f.order();
    if (N == 0 || f[0].is_zero()) throw Error(ErrorKind::NotAUnit, "f(0) = 0");
    RiccatiSolution out;
    out.r = r;
    out.free_index_value = tau_r;
    out.tau = TSeries(N);
    TSeries& tau = out.tau;
    tau[0] = Scalar(r) / f[0];
    // sum_{j+k+p=n; k,p<=n-1} f_j tau_k tau_p
    auto quad = [&](int n) {
        Scalar s;
        for (int k = 0; k <= n - 1; ++k)
            for (int p = 0; p <= n - 1 && k + p <= n; ++p) {
                int j = n - k - p;
                if (j < N && !f[j].is_zero() && !tau[k].is_zero() && !tau[p].is_zero()) s += f[j] * tau[k] * tau[p];
            }
        return s;
    };
    // sum_{j+k+p+s=m} tau_j tau_k tau_p f_s
    auto cubic = [&](int m) {
        Scalar s;
        for (int j = 0; j <= m; ++j)
            for (int k = 0; j + k <= m; ++k)
                for (int p = 0; j + k + p <= m; ++p) {
                    int q = m - j - k - p;
                    if (!tau[j].is_zero() && !tau[k].is_zero() && !tau[p].is_zero() && !f[q].is_zero())
                        s += tau[j] * tau[k] * tau[p] * f[q];
                }
        return s;
    };
    for (int n = 1; n < std::min(r, N); ++n) tau[n] = quad(n) / Scalar(n - r);
    if (r < N) {
        out.c = -quad(r) / (tau[0] * tau[0] * tau[0] * f[0]);
        tau[r] = tau_r;
    } else {
        // the constant is fixed at order r; with a shorter truncation use the same formula on a padded f
        TSeries fp = f.resized(r + 1);
        RiccatiSolution longer = solve_riccati_unique_c(fp, r, tau_r);
        out.c = longer.c;
        return out;
    }
    for (int n = r + 1; n < N; ++n) tau[n] = (quad(n) + out.c * cubic(n - r)) / Scalar(n - r);
    return out;
}

// ---------------------------------------------------------------- convolution inequality

struct ConvolutionReport {
    mpq_class lhs, rhs;
    bool holds = false;
};

inline const mpq_class& convolution_constant() {
    static const mpq_class C(329, 50);  // rational upper bound for 2 pi^2 / 3
    return C;
}

// sum over (a_1..a_l), a_i >= 1, sum a_i = b of (a_1...a_l)^-2, against C^(l-1) b^-2
inline ConvolutionReport check_convolution_inequality(int l, int b) {
    if (l < 2 || b < l) throw Error(ErrorKind::Precondition, "need 2 <= l <= b");
    // P[j][s]: sum over j-tuples with sum s
    std::vector<std::vector<mpq_class>> P(static_cast<std::size_t>(l + 1), std::vector<mpq_class>(static_cast<std::size_t>(b + 1), mpq_class(0)));
    P[0][0] = 1;
    for (int j = 1; j <= l; ++j)
        for (int s = j; s <= b; ++s) {
            mpq_class acc = 0;
            for (int a = 1; a <= s - (j - 1); ++a) {
                const mpq_class& prev = P[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(s - a)];
                if (sgn(prev) != 0) acc += prev / mpq_class(a * a);
            }
            acc.canonicalize();
            P[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = acc;
        }
    ConvolutionReport rep;
    rep.lhs = P[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)];
    mpq_class rhs = 1;
    for (int i = 0; i < l - 1; ++i) rhs *= convolution_constant();
    rhs /= mpq_class(b * b);
    rhs.canonicalize();
    rep.rhs = rhs;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

// ---------------------------------------------------------------- Laurent series and Fuchs

// z^offset * sum_k coeffs[k] z^k, coefficients known up to relative order coeffs.order()
struct Laurent {
    int offset = 0;
    TSeries coeffs;

    static Laurent from_series(const TSeries& s, int offset = 0) { return Laurent{offset, s}.normalized(); }
    int precision() const { return offset + coeffs.order(); }  // absolute: known below z^precision
    bool is_zero() const { return coeffs.is_zero(); }
    std::optional<int> valuation() const {
        auto v = coeffs.valuation();
        if (!v) return std::nullopt;
        return offset + *v;
    }
    Scalar coeff(int k) const { return coeffs.coeff(k - offset); }

    Laurent normalized() const {
        auto v = coeffs.valuation();
        if (!v || *v == 0) return *this;
        int n = coeffs.order() - *v;
        TSeries c(n);
        for (int k = 0; k < n; ++k) c[k] = coeffs[k + *v];
        return Laurent{offset + *v, c};
    }
    // re-express with a given offset and absolute precision
    TSeries window(int off, int prec) const {
        TSeries c(std::max(prec - off, 0));
        for (int k = 0; k < c.order(); ++k) c[k] = coeff(off + k);
        return c;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) {
        int off = std::min(a.offset, b.offset);
        int prec = std::min(a.precision(), b.precision());
        return Laurent{off, a.window(off, prec) + b.window(off, prec)}.normalized();
    }
    Laurent operator-() const { return Laurent{offset, -coeffs}; }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }
    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent x = a.normalized(), y = b.normalized();
        int n = std::min(x.coeffs.order(), y.coeffs.order());
        return Laurent{x.offset + y.offset, x.coeffs.truncated(n) * y.coeffs.truncated(n)}.normalized();
    }
    friend Laurent operator*(const Scalar& s, const Laurent& a) { return Laurent{a.offset, a.coeffs * s}; }
    Laurent inv() const {
        Laurent x = normalized();
        if (x.coeffs.order() == 0 || x.coeffs[0].is_zero())
            throw Error(ErrorKind::NotAUnit, "Laurent inverse of a series that vanishes within precision");
        return Laurent{-x.offset, invert_unit(x.coeffs)};
    }
    Laurent derive() const {
        TSeries c(coeffs.order());
        for (int k = 0; k < coeffs.order(); ++k) c[k] = coeffs[k] * Scalar(offset + k);
        return Laurent{offset - 1, c}.normalized();
    }
};

struct FuchsProblem {
    std::vector<Laurent> a;  // a_0 .. a_{d-1}
    int d = 0;
    std::string cyclic_vector;
};

// v(a_i) >= i - d for all i; a coefficient vanishing within precision counts as valuation +infinity
inline bool fuchs_regular_singular(const FuchsProblem& p) {
    for (int i = 0; i < p.d; ++i) {
        auto v = p.a[static_cast<std::size_t>(i)].valuation();
        if (v && *v < i - p.d) return false;
    }
    return true;
}

}  // namespace connexa
