// Rigid CR curvature calculus at a point, from chart jets.
//
// Conventions (locked by the end-to-end sphere identities in the test suite):
//   g_{jk}   = 2 d^2 phi / dz_j dzbar_k          (Levi matrix, Hermitian > 0)
//   h        = g / (2 pi)                         (Levi-metric Gram <Z_j|Z_k>)
//   a        = det g / pi^n                       (volume density of the Levi metric)
//   b        = 2^n det H                          (volume density of the rigid Gram H)
//   Lap_L f  = -2 sum_{j,k} (h^{-1})_{kj} f_{z_j zbar_k}
//   S_L      = Lap_L log a,   S^Theta_L = Lap_L log b
//   theta    = (d h) h^{-1}; curvature coefficients
//   C[j][k][s][t] = - dbar_t [ (d_s h) h^{-1} ]_{jk}   (dz_s ^ dzbar_t part of R_{j,k};
//                    j is the endomorphism input index, k the output index)
//   ricci    rho_{st} = - sum_b C[s][b][b][t]
//   form norm on (1,1): <eta|sigma> = sum eta_{st} conj(sigma_{s't'}) K_{ss'} conj(K_{tt'}),
//                    K = conj(h^{-1})  (so that |c dw^dwbar|^2 = |c|^2 (h^{11})^2 for n=1)
//   Rdot     = conj(H^{-1} g): the endomorphism with i domega0(V, Wbar) = <Rdot V|W>_H
#pragma once

#include "brt.hpp"

namespace szk {

inline Jet jet_dd(const Jet& f, int j, int k) {
    return jet_derivative(jet_derivative(f, j, false), k, true);
}

// Lap_L f at the base point; f must retain order >= 2
inline double laplacian_levi(const Jet& f, const Mat<cplx>& g) {
    Mat<cplx> h = g;
    for (auto& x : h.a)
        x /= 2.0 * pi;
    Mat<cplx> hinv = mat_inverse(h);
    cplx s = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k)
            s += hinv(k, j) * jet_dd(f, j, k).value();
    return -2.0 * s.real();
}

// Lap_L f as a jet of the given order (needs f.order >= order + 2 and
// hinv entries of order >= order)
inline Jet laplacian_levi_jet(const Jet& f, const Mat<Jet>& hinv, int order) {
    auto ctx = JetContext::get(f.n_pairs(), order);
    Jet s(ctx);
    for (int j = 0; j < hinv.n; ++j)
        for (int k = 0; k < hinv.n; ++k)
            s = s + jet_truncate(hinv(k, j), order) * jet_truncate(jet_dd(f, j, k), order);
    return -2.0 * s;
}

struct CurvatureNorms {
    double rdet2 = 0.0;    // |R^det_Theta|^2_L
    double ric2 = 0.0;     // |Ric_L|^2_L
    double ric_rdet = 0.0; // <Ric_L | R^det_Theta>_L
    double chern2 = 0.0;   // |R^{T^{1,0}}|^2_L
};

struct CurvatureReport {
    int n = 0;
    Mat<cplx> g, h, h_inv;
    Mat<cplx> gram; // rigid Gram H at the point
    double a_density = 0.0, b_density = 0.0;
    double S_L = 0.0, S_Theta_L = 0.0;
    double lap_S_L = 0.0, lap_S_Theta_L = 0.0;
    Mat<cplx> Rdet_Theta;
    std::vector<cplx> chern; // C[j][k][s][t], flattened
    Mat<cplx> ricci;
    CurvatureNorms norms;
    Mat<cplx> Rdot;
    double det_Rdot = 0.0;
    double tw_scalar = 0.0;

    cplx chern_at(int j, int k, int s, int t) const {
        return chern[(std::size_t)(((j * n + k) * n + s) * n + t)];
    }
};

// <eta|sigma>_L for (1,1)-form coefficient matrices, K = conj(h^{-1})
inline cplx form_pairing(const Mat<cplx>& eta, const Mat<cplx>& sigma, const Mat<cplx>& K) {
    const int n = K.n;
    cplx acc = 0.0;
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            for (int s2 = 0; s2 < n; ++s2)
                for (int t2 = 0; t2 < n; ++t2)
                    acc += eta(s, t) * std::conj(sigma(s2, t2)) * K(s, s2) * std::conj(K(t, t2));
    return acc;
}

// Tanaka-Webster scalar curvature of the pseudohermitian structure, through
// the connection-form route (no determinant or logarithm is formed; this is
// the path independent of S_L):
//   omega_a^b(j) = (d_j G  G^{-1})_{ab},
//   Ricci R_{ak} = - dbar_k sum_j (d_j G G^{-1})_{aj},
//   R = sum (G^{-1})_{ka} R_{ak}.
inline double tw_scalar_curvature(const BRTChart& chart, const std::vector<cplx>& z) {
    const int n = chart.n;
    Mat<Jet> G = levi_matrix_jet(chart, z, 2);
    Mat<Jet> Gi = mat_inverse(G);
    auto ctx1 = JetContext::get(n, 1);
    Mat<cplx> ric(n, n, cplx(0.0));
    for (int a = 0; a < n; ++a) {
        Jet tracepart(ctx1);
        for (int j = 0; j < n; ++j) {
            // (d_j G G^{-1})_{aj}
            Jet entry(ctx1);
            for (int s = 0; s < n; ++s)
                entry = entry + jet_derivative(G(a, s), j, false) * jet_truncate(Gi(s, j), 1);
            tracepart = tracepart + entry;
        }
        for (int k = 0; k < n; ++k)
            ric(a, k) = -jet_derivative(tracepart, k, true).value();
    }
    Mat<cplx> G0 = mat_value(G);
    Mat<cplx> G0i = mat_inverse(G0);
    cplx R = 0.0;
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
            R += G0i(k, a) * ric(a, k);
    return R.real();
}

inline double rigid_scalar_curvature(const BRTChart& chart, const std::vector<cplx>& z) {
    Mat<Jet> G = levi_matrix_jet(chart, z, 2);
    Jet a = mat_det(G) * cplx(std::pow(pi, -chart.n));
    return laplacian_levi(jet_log(a), mat_value(G));
}

struct ThetaQuantities {
    double b_density = 0.0;
    double S_Theta_L = 0.0;
    Mat<cplx> Rdet_Theta;
};

inline ThetaQuantities theta_quantities(const BRTChart& chart, const std::vector<cplx>& z) {
    const int n = chart.n;
    Mat<Jet> G = levi_matrix_jet(chart, z, 2);
    Mat<Jet> H = chart.has_gram() ? chart.gram(JetContext::get(n, 2), z) : [&] {
        Mat<Jet> L = G;
        for (auto& e : L.a)
            e = e * (1.0 / (2.0 * pi));
        return L;
    }();
    Jet b = mat_det(H) * cplx(std::pow(2.0, n));
    Jet logb = jet_log(b);
    ThetaQuantities q;
    q.b_density = b.value().real();
    q.S_Theta_L = laplacian_levi(logb, mat_value(G));
    q.Rdet_Theta = Mat<cplx>(n, n, cplx(0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            q.Rdet_Theta(s, t) = jet_dd(logb, s, t).value();
    return q;
}

inline CurvatureReport curvature_report(const BRTChart& chart, const std::vector<cplx>& z) {
    const int n = chart.n;
    CurvatureReport rep;
    rep.n = n;

    Mat<Jet> G4 = levi_matrix_jet(chart, z, 4);
    Mat<Jet> h4 = G4;
    for (auto& e : h4.a)
        e = e * (1.0 / (2.0 * pi));
    Mat<Jet> hinv4 = mat_inverse(h4);

    rep.g = mat_value(G4);
    rep.h = mat_value(h4);
    rep.h_inv = mat_inverse(rep.h);
    cholesky(rep.g); // strong pseudoconvexity gate

    // densities and rigid scalar curvatures, with enough jet orders left to
    // apply the Laplacian twice
    Jet a4 = mat_det(G4) * cplx(std::pow(pi, -n));
    Jet loga = jet_log(a4);
    Mat<Jet> H4 = chart.has_gram() ? chart.gram(JetContext::get(n, 4), z) : h4;
    rep.gram = mat_value(H4);
    Jet b4 = mat_det(H4) * cplx(std::pow(2.0, n));
    Jet logb = jet_log(b4);
    rep.a_density = a4.value().real();
    rep.b_density = b4.value().real();

    Jet S_L_jet = laplacian_levi_jet(loga, hinv4, 2);
    Jet S_T_jet = laplacian_levi_jet(logb, hinv4, 2);
    rep.S_L = S_L_jet.value().real();
    rep.S_Theta_L = S_T_jet.value().real();
    rep.lap_S_L = laplacian_levi(S_L_jet, rep.g);
    rep.lap_S_Theta_L = laplacian_levi(S_T_jet, rep.g);

    rep.Rdet_Theta = Mat<cplx>(n, n, cplx(0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            rep.Rdet_Theta(s, t) = jet_dd(logb, s, t).value();

    // Chern curvature coefficients of the Levi metric
    rep.chern.assign((std::size_t)n * n * n * n, cplx(0.0));
    {
        Mat<Jet> hinv3(n, n, Jet::constant(JetContext::get(n, 3), 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                hinv3(i, j) = jet_truncate(hinv4(i, j), 3);
        for (int s = 0; s < n; ++s) {
            Mat<Jet> dh(n, n, Jet::constant(JetContext::get(n, 3), 0.0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dh(i, j) = jet_derivative(h4(i, j), s, false);
            Mat<Jet> theta_s = mat_mul(dh, hinv3);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int t = 0; t < n; ++t)
                        rep.chern[(std::size_t)(((j * n + k) * n + s) * n + t)] =
                            -jet_derivative(theta_s(j, k), t, true).value();
        }
    }

    rep.ricci = Mat<cplx>(n, n, cplx(0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            cplx acc = 0.0;
            for (int b = 0; b < n; ++b)
                acc += rep.chern_at(s, b, b, t);
            rep.ricci(s, t) = -acc;
        }

    Mat<cplx> K = mat_conj(rep.h_inv);
    rep.norms.rdet2 = form_pairing(rep.Rdet_Theta, rep.Rdet_Theta, K).real();
    rep.norms.ric2 = form_pairing(rep.ricci, rep.ricci, K).real();
    rep.norms.ric_rdet = form_pairing(rep.ricci, rep.Rdet_Theta, K).real();

    // |R^{T1,0}|^2 in an h-orthonormal frame e_s = sum_a E_{as} Z_a
    {
        Mat<cplx> E = mat_transpose(mat_inverse(cholesky(rep.h)));
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int s = 0; s < n; ++s)
                    for (int t = 0; t < n; ++t) {
                        cplx m = 0.0;
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b)
                                for (int u = 0; u < n; ++u)
                                    for (int v = 0; v < n; ++v)
                                        for (int c = 0; c < n; ++c)
                                            m += rep.chern_at(a, b, u, v) * E(u, k) *
                                                 std::conj(E(v, j)) * E(a, s) * rep.h(b, c) *
                                                 std::conj(E(c, t));
                        acc += std::norm(m);
                    }
        rep.norms.chern2 = acc;
    }

    // Rdot = conj(H^{-1} g), determinant is the Levi eigenvalue product
    {
        Mat<cplx> Hi = mat_inverse(rep.gram);
        rep.Rdot = mat_conj(mat_mul(Hi, rep.g));
        rep.det_Rdot = (mat_det(rep.g) / mat_det(rep.gram)).real();
    }

    rep.tw_scalar = tw_scalar_curvature(chart, z);
    return rep;
}

struct RdotResult {
    Mat<cplx> matrix;
    double det = 0.0;
};

inline RdotResult rdot(const BRTChart& chart, const std::vector<cplx>& z) {
    Mat<cplx> g = levi_matrix(chart, z);
    Mat<Jet> H = chart.has_gram()
                     ? chart.gram(JetContext::get(chart.n, 0), z)
                     : [&] {
                           Mat<Jet> L = levi_matrix_jet(chart, z, 0);
                           for (auto& e : L.a)
                               e = e * (1.0 / (2.0 * pi));
                           return L;
                       }();
    Mat<cplx> H0 = mat_value(H);
    RdotResult r;
    r.matrix = mat_conj(mat_mul(mat_inverse(H0), g));
    r.det = (mat_det(g) / mat_det(H0)).real();
    return r;
}

} // namespace szk
