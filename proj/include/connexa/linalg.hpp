#pragma once

// Exact Gaussian elimination over Q(i).

#include <vector>

#include "connexa/scalar.hpp"

namespace connexa {

struct LinearSolution {
    bool consistent = false;
    std::vector<Scalar> x;       // one solution (free variables set to the supplied values, default 0)
    std::vector<int> free_vars;  // column indices left undetermined by the system
};

inline LinearSolution solve_linear(std::vector<std::vector<Scalar>> a, std::vector<Scalar> b,
                                   const std::vector<Scalar>* free_values = nullptr) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (!a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].is_zero()) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(r)]);
        std::swap(b[static_cast<std::size_t>(p)], b[static_cast<std::size_t>(r)]);
        auto& pr = a[static_cast<std::size_t>(r)];
        Scalar inv = pr[static_cast<std::size_t>(c)].inv();
        for (int j = c; j < cols; ++j) pr[static_cast<std::size_t>(j)] *= inv;
        b[static_cast<std::size_t>(r)] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            auto& row = a[static_cast<std::size_t>(i)];
            Scalar f = row[static_cast<std::size_t>(c)];
            if (f.is_zero()) continue;
            for (int j = c; j < cols; ++j)
                if (!pr[static_cast<std::size_t>(j)].is_zero()) row[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(r)];
        }
        pivot_col.push_back(c);
        ++r;
    }
    LinearSolution out;
    out.consistent = true;
    for (int i = r; i < rows; ++i)
        if (!b[static_cast<std::size_t>(i)].is_zero()) out.consistent = false;
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    out.x.assign(static_cast<std::size_t>(cols), Scalar(0));
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) {
            out.free_vars.push_back(c);
            if (free_values && static_cast<int>(free_values->size()) > c) out.x[static_cast<std::size_t>(c)] = (*free_values)[static_cast<std::size_t>(c)];
        }
    if (!out.consistent) return out;
    for (int i = 0; i < r; ++i) {
        int c = pivot_col[static_cast<std::size_t>(i)];
        Scalar v = b[static_cast<std::size_t>(i)];
        for (int fc : out.free_vars) {
            const Scalar& coef = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(fc)];
            if (!coef.is_zero()) v -= coef * out.x[static_cast<std::size_t>(fc)];
        }
        out.x[static_cast<std::size_t>(c)] = v;
    }
    return out;
}

}  // namespace connexa
