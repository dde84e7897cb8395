// Finite-difference Wirtinger derivatives used as an independent check on the
// jet engine.  Nested central differences, one variable at a time, with one
// Richardson refinement step; accurate enough for total order <= 4 at
// moderate tolerances.
#pragma once

#include <szk/common.hpp>

#include <functional>
#include <vector>

namespace szk_test {

using szk::cplx;
using field_fn = std::function<cplx(const std::vector<cplx>&)>;

// single d/dz_j or d/dzbar_j by central differences in the two real directions
inline cplx fd_single(const field_fn& f, std::vector<cplx> z, int j, bool bar, double h) {
    auto at = [&](cplx dz) {
        std::vector<cplx> w = z;
        w[j] += dz;
        return f(w);
    };
    cplx dx = (at(h) - at(-h)) / (2.0 * h);
    cplx dy = (at(cplx(0, h)) - at(cplx(0, -h))) / (2.0 * h);
    return bar ? 0.5 * (dx + cplx(0, 1) * dy) : 0.5 * (dx - cplx(0, 1) * dy);
}

inline cplx fd_wirtinger_raw(const field_fn& f, const std::vector<cplx>& z,
                             std::vector<int> alpha, std::vector<int> beta, double h) {
    for (int j = 0; j < (int)alpha.size(); ++j) {
        if (alpha[j] > 0) {
            auto a2 = alpha;
            a2[j] -= 1;
            field_fn inner = [&, a2, beta](const std::vector<cplx>& w) {
                return fd_wirtinger_raw(f, w, a2, beta, h);
            };
            return fd_single(inner, z, j, false, h);
        }
    }
    for (int j = 0; j < (int)beta.size(); ++j) {
        if (beta[j] > 0) {
            auto b2 = beta;
            b2[j] -= 1;
            field_fn inner = [&, alpha, b2](const std::vector<cplx>& w) {
                return fd_wirtinger_raw(f, w, alpha, b2, h);
            };
            return fd_single(inner, z, j, true, h);
        }
    }
    return f(z);
}

// Richardson: combine h and h/2 to cancel the leading O(h^2) error
inline cplx fd_wirtinger(const field_fn& f, const std::vector<cplx>& z,
                         const std::vector<int>& alpha, const std::vector<int>& beta,
                         double h = 0.02) {
    cplx d1 = fd_wirtinger_raw(f, z, alpha, beta, h);
    cplx d2 = fd_wirtinger_raw(f, z, alpha, beta, h / 2);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace szk_test
