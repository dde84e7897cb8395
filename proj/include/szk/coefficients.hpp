// Assembly of the expansion coefficients b0, b1, b2 from curvature data, the
// chart-local Bergman-side counterparts (an independent implementation using
// the Kaehler-metric index conventions), the cyclic sum factor, and truncated
// expansion predictions.
#pragma once

#include "curvature.hpp"

#include <array>

namespace szk {

struct CoefficientSet {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    int n = 0;
    std::string provenance;
};

// the nine-term bracket shared by the second coefficient on both sides
inline double b2_bracket(double S, double ST, double lapS, double lapST,
                         const CurvatureNorms& N) {
    const double p2 = pi * pi;
    return S * S / (128.0 * p2) - S * ST / (32.0 * p2) + ST * ST / (32.0 * p2) -
           lapST / (32.0 * p2) - N.rdet2 / (8.0 * p2) + N.ric_rdet / (8.0 * p2) +
           lapS / (96.0 * p2) - N.ric2 / (24.0 * p2) + N.chern2 / (96.0 * p2);
}

inline CoefficientSet coefficients_from_report(const CurvatureReport& rep, std::string provenance) {
    CoefficientSet c;
    c.n = rep.n;
    c.provenance = std::move(provenance);
    c.b0 = std::pow(2.0 * pi, -(rep.n + 1)) * rep.det_Rdot;
    c.b1 = c.b0 * (rep.S_Theta_L / (4.0 * pi) - rep.S_L / (8.0 * pi));
    c.b2 = c.b0 * b2_bracket(rep.S_L, rep.S_Theta_L, rep.lap_S_L, rep.lap_S_Theta_L, rep.norms);
    return c;
}

inline CoefficientSet coefficients_at(const BRTChart& chart, const std::vector<cplx>& z,
                                      std::string provenance = "") {
    if (provenance.empty())
        provenance = chart.label + (chart.has_gram() ? "/gram" : "/levi");
    return coefficients_from_report(curvature_report(chart, z), std::move(provenance));
}

// ---- chart-local Bergman coefficients (Kaehler side) ----
//
// Written against the transposed index conventions of the Kaehler-metric
// formulation: omega_{j,k} = g_{jk}/(2 pi), Gram matrix hK_{j,k} = omega_{k,j},
// connection alpha = hK^{-1} d hK (left product), dual pairing
// <dz_j, dz_k> = (hK^{-1})_{jk}.  Numerically these must reproduce the rigid
// CR quantities entry for entry; the code path is kept separate on purpose.
struct LocalBergman {
    int n = 0;
    double r = 0.0, r_hat = 0.0;
    double lap_r = 0.0, lap_r_hat = 0.0;
    double det_rdot = 0.0;
    Mat<cplx> rdet;
    Mat<cplx> ricci;
    CurvatureNorms norms;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0; // b_{B,j}
};

inline LocalBergman local_bergman_coefficients(const BRTChart& chart, const std::vector<cplx>& z) {
    const int n = chart.n;
    LocalBergman out;
    out.n = n;

    Mat<Jet> G4 = levi_matrix_jet(chart, z, 4);
    Mat<Jet> Om(n, n, Jet::constant(JetContext::get(n, 4), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Om(i, j) = G4(i, j) * (1.0 / (2.0 * pi));
    Mat<Jet> hK = mat_transpose(Om);
    Mat<Jet> hKi = mat_inverse(hK);
    Mat<cplx> hK0 = mat_value(hK);
    Mat<cplx> hKi0 = mat_inverse(hK0);
    Mat<cplx> Om0 = mat_value(Om);

    Mat<Jet> Th = chart.has_gram() ? chart.gram(JetContext::get(n, 4), z) : Om;
    Mat<cplx> Th0 = mat_value(Th);

    auto lap_omega_jet = [&](const Jet& f, int order) {
        auto ctx = JetContext::get(n, order);
        Jet s(ctx);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                s = s + jet_truncate(hKi(j, k), order) * jet_truncate(jet_dd(f, j, k), order);
        return -2.0 * s;
    };
    auto lap_omega_value = [&](const Jet& f) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                s += hKi0(j, k) * jet_dd(f, j, k).value();
        return -2.0 * s.real();
    };

    Jet logVom = jet_log(mat_det(Om));
    Jet logVth = jet_log(mat_det(Th));
    Jet r_jet = lap_omega_jet(logVom, 2);
    Jet rh_jet = lap_omega_jet(logVth, 2);
    out.r = r_jet.value().real();
    out.r_hat = rh_jet.value().real();
    out.lap_r = lap_omega_value(r_jet);
    out.lap_r_hat = lap_omega_value(rh_jet);

    out.rdet = Mat<cplx>(n, n, cplx(0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            out.rdet(s, t) = jet_dd(logVth, s, t).value();

    // alpha = hK^{-1} d hK; C'[j][k][s][t] = - dbar_t alpha_{j,k}(s)
    std::vector<cplx> C((std::size_t)n * n * n * n, cplx(0.0));
    auto C_at = [&](int j, int k, int s, int t) -> cplx& {
        return C[(std::size_t)(((j * n + k) * n + s) * n + t)];
    };
    {
        Mat<Jet> hKi3(n, n, Jet::constant(JetContext::get(n, 3), 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                hKi3(i, j) = jet_truncate(hKi(i, j), 3);
        for (int s = 0; s < n; ++s) {
            Mat<Jet> dh(n, n, Jet::constant(JetContext::get(n, 3), 0.0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dh(i, j) = jet_derivative(hK(i, j), s, false);
            Mat<Jet> alpha_s = mat_mul(hKi3, dh);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int t = 0; t < n; ++t)
                        C_at(j, k, s, t) = -jet_derivative(alpha_s(j, k), t, true).value();
        }
    }

    // Ricci: the endomorphism input sits in the second index here
    out.ricci = Mat<cplx>(n, n, cplx(0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            cplx acc = 0.0;
            for (int b = 0; b < n; ++b)
                acc += C_at(b, s, b, t);
            out.ricci(s, t) = -acc;
        }

    out.norms.rdet2 = form_pairing(out.rdet, out.rdet, hKi0).real();
    out.norms.ric2 = form_pairing(out.ricci, out.ricci, hKi0).real();
    out.norms.ric_rdet = form_pairing(out.ricci, out.rdet, hKi0).real();
    {
        Mat<cplx> E = mat_transpose(mat_inverse(cholesky(Om0)));
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
                                            m += C_at(a, b, u, v) * E(u, k) * std::conj(E(v, j)) *
                                                 E(b, s) * Om0(a, c) * std::conj(E(c, t));
                        acc += std::norm(m);
                    }
        out.norms.chern2 = acc;
    }

    out.det_rdot = (mat_det(mat_value(G4)) / mat_det(Th0)).real();
    out.b0 = std::pow(2.0 * pi, -n) * out.det_rdot;
    out.b1 = out.b0 * (out.r_hat / (4.0 * pi) - out.r / (8.0 * pi));
    out.b2 = out.b0 * b2_bracket(out.r, out.r_hat, out.lap_r, out.lap_r_hat, out.norms);
    return out;
}

// ---- cyclic sum factor and truncated predictions ----

// sum_{s=1}^{p} e^{2 pi i (s-1) m / p} as exact integer arithmetic
inline int sum_factor(long long m, int p_r) {
    if (p_r < 1)
        throw invalid_argument_error("sum_factor: period denominator must be >= 1");
    long long rmod = m % p_r;
    if (rmod < 0)
        rmod += p_r;
    return rmod == 0 ? p_r : 0;
}

struct ExpansionPrediction {
    long long m = 0;
    int p_r = 1;
    int sum_factor = 0;
    int N = 3;
    std::array<double, 3> terms{}; // b_j m^{n-j} for j < N
    double value = 0.0;
};

inline ExpansionPrediction expansion_prediction(const CoefficientSet& c, long long m, int p_r,
                                                int N) {
    if (N < 1 || N > 3)
        throw invalid_argument_error("expansion_prediction: only N in 1..3 is supported");
    if (m < 1)
        throw invalid_argument_error("expansion_prediction: m must be >= 1");
    ExpansionPrediction p;
    p.m = m;
    p.p_r = p_r;
    p.N = N;
    p.sum_factor = sum_factor(m, p_r);
    const double bs[3] = {c.b0, c.b1, c.b2};
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
        p.terms[j] = bs[j] * std::pow((double)m, c.n - j);
        acc += p.terms[j];
    }
    p.value = p.sum_factor * acc;
    return p;
}

} // namespace szk
