// Dense matrices of size <= 3 over plain complex numbers or over jets.
// Determinants and inverses go through explicit cofactors so the same code
// works for any commutative scalar with + * and a reciprocal.
#pragma once

#include "jets.hpp"

#include <vector>

namespace szk {

template <class T>
struct Mat {
    int n = 0, m = 0;
    std::vector<T> a; // row major

    Mat() = default;
    Mat(int rows, int cols, T fill) : n(rows), m(cols), a((std::size_t)rows * cols, fill) {}

    T& operator()(int i, int j) { return a[(std::size_t)i * m + j]; }
    const T& operator()(int i, int j) const { return a[(std::size_t)i * m + j]; }
};

template <class T>
T scalar_zero_like(const Mat<T>& M) {
    return M.a[0] - M.a[0];
}

template <class T>
Mat<T> mat_mul(const Mat<T>& A, const Mat<T>& B) {
    if (A.m != B.n)
        throw invalid_argument_error("mat_mul: shape mismatch");
    Mat<T> C(A.n, B.m, scalar_zero_like(A));
    for (int i = 0; i < A.n; ++i)
        for (int k = 0; k < A.m; ++k)
            for (int j = 0; j < B.m; ++j)
                C(i, j) = C(i, j) + A(i, k) * B(k, j);
    return C;
}

template <class T>
Mat<T> mat_add(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i)
        C.a[i] = C.a[i] + B.a[i];
    return C;
}

template <class T>
Mat<T> mat_transpose(const Mat<T>& A) {
    Mat<T> C(A.m, A.n, scalar_zero_like(A));
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j)
            C(j, i) = A(i, j);
    return C;
}

template <class T>
T mat_det(const Mat<T>& A) {
    if (A.n != A.m)
        throw invalid_argument_error("mat_det: not square");
    switch (A.n) {
    case 1:
        return A(0, 0);
    case 2:
        return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    case 3:
        return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
               A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
               A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    default:
        throw invalid_argument_error("mat_det: size > 3 not supported");
    }
}

inline cplx one_like(const cplx&) { return cplx(1.0); }
inline Jet one_like(const Jet& j) { return Jet::constant(j.ctx, 1.0); }

// adj(A) with A * adj(A) = det(A) I
template <class T>
Mat<T> mat_adjugate(const Mat<T>& A) {
    if (A.n != A.m)
        throw invalid_argument_error("mat_adjugate: not square");
    Mat<T> C(A.n, A.n, scalar_zero_like(A));
    switch (A.n) {
    case 1:
        C(0, 0) = one_like(A(0, 0));
        return C;
    case 2:
        C(0, 0) = A(1, 1);
        C(0, 1) = -A(0, 1);
        C(1, 0) = -A(1, 0);
        C(1, 1) = A(0, 0);
        return C;
    case 3:
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int r0 = (j + 1) % 3, r1 = (j + 2) % 3; // note: adj = transpose of cofactors
                int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
                C(i, j) = A(r0, c0) * A(r1, c1) - A(r0, c1) * A(r1, c0);
            }
        return C;
    default:
        throw invalid_argument_error("mat_adjugate: size > 3 not supported");
    }
}

inline cplx scalar_reciprocal(const cplx& v) {
    if (std::abs(v) == 0.0)
        throw numeric_error("matrix inverse: zero determinant");
    return 1.0 / v;
}
inline Jet scalar_reciprocal(const Jet& v) { return jet_reciprocal(v); }

template <class T>
Mat<T> mat_inverse(const Mat<T>& A) {
    T idet = scalar_reciprocal(mat_det(A));
    Mat<T> C = mat_adjugate(A);
    for (auto& x : C.a)
        x = x * idet;
    return C;
}

inline Mat<cplx> mat_identity(int n) {
    Mat<cplx> I(n, n, cplx(0.0));
    for (int i = 0; i < n; ++i)
        I(i, i) = 1.0;
    return I;
}

inline Mat<cplx> mat_conj_transpose(const Mat<cplx>& A) {
    Mat<cplx> C(A.m, A.n, cplx(0.0));
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j)
            C(j, i) = std::conj(A(i, j));
    return C;
}

inline Mat<cplx> mat_conj(const Mat<cplx>& A) {
    Mat<cplx> C = A;
    for (auto& x : C.a)
        x = std::conj(x);
    return C;
}

// lower triangular L with A = L L^H; requires A Hermitian positive definite
inline Mat<cplx> cholesky(const Mat<cplx>& A) {
    if (A.n != A.m)
        throw invalid_argument_error("cholesky: not square");
    const int n = A.n;
    Mat<cplx> L(n, n, cplx(0.0));
    for (int j = 0; j < n; ++j) {
        double d = A(j, j).real();
        for (int k = 0; k < j; ++k)
            d -= std::norm(L(j, k));
        if (!(d > 0.0))
            throw numeric_error("cholesky: matrix is not positive definite");
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            cplx s = A(i, j);
            for (int k = 0; k < j; ++k)
                s -= L(i, k) * std::conj(L(j, k));
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

inline Mat<cplx> mat_value(const Mat<Jet>& A) {
    Mat<cplx> C(A.n, A.m, cplx(0.0));
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j)
            C(i, j) = A(i, j).value();
    return C;
}

inline double mat_max_abs_diff(const Mat<cplx>& A, const Mat<cplx>& B) {
    double w = 0.0;
    for (std::size_t i = 0; i < A.a.size(); ++i)
        w = std::max(w, std::abs(A.a[i] - B.a[i]));
    return w;
}

} // namespace szk
