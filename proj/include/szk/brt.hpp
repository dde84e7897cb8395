// Canonical-coordinate charts (z, theta) for strongly pseudoconvex CR
// manifolds with a transversal circle action.  A chart carries a real
// theta-independent potential phi; the frames are
//     Z_j = d/dz_j + i phi_{z_j} d/dtheta,
// the contact form is omega0 = -dtheta + i d'phi - i d''phi, and the Levi
// matrix is g_{jk} = 2 phi_{z_j zbar_k}.  An optional Gram field H supplies a
// rigid Hermitian metric on the holomorphic tangent bundle (H_{jk} = <Z_j|Z_k>);
// when absent the Levi metric h = g/(2 pi) is used downstream.
#pragma once

#include "expr.hpp"
#include "linalg.hpp"

#include <functional>
#include <string>

namespace szk {

using PhiProvider = std::function<Jet(const std::shared_ptr<const JetContext>&, const std::vector<cplx>&)>;
using GramProvider = std::function<Mat<Jet>(const std::shared_ptr<const JetContext>&, const std::vector<cplx>&)>;

struct BRTChart {
    int n = 1;
    std::string label;
    double domain_radius = 1.0;
    PhiProvider phi;
    GramProvider gram; // null: use the Levi Gram g/(2 pi)

    bool has_gram() const { return (bool)gram; }

    Jet phi_jet(const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) const {
        if ((int)z.size() != n)
            throw invalid_argument_error("chart: point dimension mismatch");
        return phi(ctx, z);
    }
};

inline BRTChart chart_from_expr(int n, ExprPtr phi_expr, std::string label, double radius = 1.0) {
    BRTChart c;
    c.n = n;
    c.label = std::move(label);
    c.domain_radius = radius;
    c.phi = [phi_expr](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        return eval_jet(phi_expr, ctx, coordinate_bindings(ctx, z));
    };
    return c;
}

inline void set_gram_exprs(BRTChart& c, std::vector<std::vector<ExprPtr>> entries) {
    const int n = c.n;
    c.gram = [entries, n](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        auto bind = coordinate_bindings(ctx, z);
        Mat<Jet> H(n, n, Jet::constant(ctx, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                H(i, j) = eval_jet(entries[i][j], ctx, bind);
        return H;
    };
}

// Levi matrix g_{jk} = 2 d^2 phi / dz_j dzbar_k as jets of the given order
// (the potential is expanded two orders higher internally).
inline Mat<Jet> levi_matrix_jet(const BRTChart& c, const std::vector<cplx>& z, int order) {
    auto ctx = JetContext::get(c.n, order + 2);
    Jet phi = c.phi_jet(ctx, z);
    Mat<Jet> G(c.n, c.n, Jet::constant(JetContext::get(c.n, order), 0.0));
    for (int j = 0; j < c.n; ++j) {
        Jet dj = jet_derivative(phi, j, false);
        for (int k = 0; k < c.n; ++k)
            G(j, k) = 2.0 * jet_derivative(dj, k, true);
    }
    return G;
}

inline Mat<cplx> levi_matrix(const BRTChart& c, const std::vector<cplx>& z) {
    Mat<cplx> g = mat_value(levi_matrix_jet(c, z, 0));
    cholesky(g); // throws if the chart is not strongly pseudoconvex here
    return g;
}

// the Gram field of the rigid metric actually in force (preset fallback: Levi)
inline Mat<Jet> gram_matrix_jet(const BRTChart& c, const std::vector<cplx>& z, int order) {
    if (c.has_gram()) {
        auto ctx = JetContext::get(c.n, order);
        return c.gram(ctx, z);
    }
    Mat<Jet> G = levi_matrix_jet(c, z, order);
    for (auto& e : G.a)
        e = e * (1.0 / (2.0 * pi));
    return G;
}

// ---- contact form ----
struct ContactData {
    double theta_coeff = -1.0;      // <omega0, d/dtheta>
    std::vector<cplx> dz_coeff;     // i phi_{z_j}
    std::vector<cplx> dzbar_coeff;  // -i phi_{zbar_j}
    std::vector<cplx> phi_z;        // frame data: Z_j = d/dz_j + i phi_z[j] d/dtheta
};

inline ContactData contact_data(const BRTChart& c, const std::vector<cplx>& z) {
    auto ctx = JetContext::get(c.n, 1);
    Jet phi = c.phi_jet(ctx, z);
    ContactData d;
    for (int j = 0; j < c.n; ++j) {
        std::vector<int> a(c.n, 0), b(c.n, 0);
        a[j] = 1;
        cplx pz = wirtinger(phi, a, b);
        cplx pzb = wirtinger(phi, b, a);
        d.phi_z.push_back(pz);
        d.dz_coeff.push_back(cplx(0, 1) * pz);
        d.dzbar_coeff.push_back(cplx(0, -1) * pzb);
    }
    return d;
}

// pairings of omega0 with the frame fields
inline cplx pair_omega_frame(const ContactData& d, int j) {
    // <omega0, Z_j> = dz-part + theta-part * (i phi_z)
    return d.dz_coeff[j] + (double)d.theta_coeff * (cplx(0, 1) * d.phi_z[j]);
}
inline cplx pair_omega_conj_frame(const ContactData& d, int j) {
    return d.dzbar_coeff[j] + (double)d.theta_coeff * (cplx(0, -1) * std::conj(d.phi_z[j]));
}
inline double pair_omega_T(const ContactData& d) { return d.theta_coeff; }

// ---- tangential CR operator on one Fourier mode ----
//
// For u = e^{i m theta} u~(z), the dzbar_j coefficient of dbar_b u is
// e^{i m theta} ( d u~/dzbar_j + m phi_{zbar_j} u~ ).
inline std::vector<Jet> dbar_b(const BRTChart& c, const std::vector<cplx>& z, int m,
                               const ExprPtr& u_tilde, int order) {
    auto ctx = JetContext::get(c.n, order + 1);
    auto bind = coordinate_bindings(ctx, z);
    Jet u = eval_jet(u_tilde, ctx, bind);
    Jet phi = c.phi_jet(ctx, z);
    std::vector<Jet> out;
    for (int j = 0; j < c.n; ++j) {
        Jet du = jet_derivative(u, j, true);
        Jet pzb = jet_derivative(phi, j, true);
        out.push_back(du + (double)m * pzb * jet_truncate(u, order));
    }
    return out;
}

// max |coefficient| over terms with a nonzero antiholomorphic exponent
inline double antiholomorphic_defect(const Jet& a) {
    const JetContext& C = *a.ctx;
    double w = 0.0;
    for (int i = 0; i < C.size(); ++i) {
        bool anti = false;
        for (int t = C.n_pairs; t < 2 * C.n_pairs; ++t)
            anti = anti || C.exps[i][t] != 0;
        if (anti)
            w = std::max(w, std::abs(a.c[i]));
    }
    return w;
}

// ---- holomorphic transitions between charts ----
//
// w = H(z) holomorphic, theta shift gamma = theta + Im F(z) with F holomorphic;
// the pulled-back potential is phi_B(H(z)) = phi_A(z) - Re F(z).
struct Transition {
    std::vector<ExprPtr> H; // components use ex_z only
    ExprPtr F;              // may be null (no angular shift)
};

inline std::vector<Jet> holomorphic_map_jets(const Transition& t,
                                             const std::shared_ptr<const JetContext>& ctx,
                                             const JetBindings& bind) {
    std::vector<Jet> w;
    for (auto& Hj : t.H)
        w.push_back(eval_jet(Hj, ctx, bind));
    return w;
}

inline Mat<Jet> jacobian_jets(const Transition& t, const std::shared_ptr<const JetContext>& ctx,
                              const JetBindings& bind) {
    const int n = (int)t.H.size();
    Mat<Jet> J(n, n, Jet::constant(ctx, 0.0));
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j)
            J(a, j) = eval_jet(ex_d_z(t.H[a], j), ctx, bind);
    return J;
}

inline std::vector<cplx> apply_map(const Transition& t, const std::vector<cplx>& z) {
    std::vector<cplx> w;
    for (auto& Hj : t.H)
        w.push_back(eval_scalar(Hj, z));
    return w;
}

// scalar Newton for H(z) = w
inline std::vector<cplx> invert_map_scalar(const Transition& t, const std::vector<cplx>& w,
                                           std::vector<cplx> z) {
    const int n = (int)t.H.size();
    for (int it = 0; it < 60; ++it) {
        std::vector<cplx> r = apply_map(t, z);
        double resid = 0.0;
        for (int j = 0; j < n; ++j) {
            r[j] -= w[j];
            resid = std::max(resid, std::abs(r[j]));
        }
        if (resid < 1e-13)
            return z;
        Mat<cplx> J(n, n, cplx(0.0));
        for (int a = 0; a < n; ++a)
            for (int j = 0; j < n; ++j)
                J(a, j) = eval_scalar(ex_d_z(t.H[a], j), z);
        Mat<cplx> Ji = mat_inverse(J);
        for (int j = 0; j < n; ++j) {
            cplx d = 0.0;
            for (int a = 0; a < n; ++a)
                d += Ji(j, a) * r[a];
            z[j] -= d;
        }
    }
    throw numeric_error("invert_map_scalar: Newton did not converge");
}

// jets of the inverse map: Z(w) with H(Z(w)) = w, expanded at w0
inline std::vector<Jet> invert_map_jets(const Transition& t,
                                        const std::shared_ptr<const JetContext>& ctx,
                                        const std::vector<cplx>& w0, const std::vector<cplx>& z_seed) {
    const int n = (int)t.H.size();
    std::vector<cplx> z0 = invert_map_scalar(t, w0, z_seed);
    std::vector<Jet> Z;
    for (int j = 0; j < n; ++j)
        Z.push_back(Jet::constant(ctx, z0[j]));
    std::vector<Jet> wv;
    for (int j = 0; j < n; ++j)
        wv.push_back(Jet::variable(ctx, j, w0[j]));
    int steps = 2;
    for (int k = 1; k < ctx->order + 1; k *= 2)
        ++steps;
    for (int it = 0; it < steps; ++it) {
        JetBindings zb;
        zb.z = Z;
        for (auto& Zj : Z)
            zb.zbar.push_back(jet_conj(Zj)); // unused by holomorphic H, bound for safety
        std::vector<Jet> r = holomorphic_map_jets(t, ctx, zb);
        for (int j = 0; j < n; ++j)
            r[j] = r[j] - wv[j];
        Mat<Jet> Ji = mat_inverse(jacobian_jets(t, ctx, zb));
        for (int j = 0; j < n; ++j) {
            Jet d = Jet::constant(ctx, 0.0);
            for (int a = 0; a < n; ++a)
                d = d + Ji(j, a) * r[a];
            Z[j] = Z[j] - d;
        }
    }
    JetBindings zb;
    zb.z = Z;
    for (auto& Zj : Z)
        zb.zbar.push_back(jet_conj(Zj));
    auto r = holomorphic_map_jets(t, ctx, zb);
    double resid = 0.0;
    for (int j = 0; j < n; ++j)
        resid = std::max(resid, max_abs_coeff(r[j] - wv[j]));
    if (!(resid < 1e-9))
        throw numeric_error("invert_map_jets: residual " + std::to_string(resid));
    return Z;
}

// Chart of the w = H(z) coordinates built from a chart in z.  Potential and
// Gram field are pulled back through the jet inverse of H; an inverse_seed
// callback supplies the scalar Newton start (default: w itself).
inline BRTChart pullback_chart(const BRTChart& a, const Transition& t, std::string label,
                               std::function<std::vector<cplx>(const std::vector<cplx>&)> inverse_seed = {}) {
    if ((int)t.H.size() != a.n)
        throw invalid_argument_error("pullback_chart: transition dimension mismatch");
    if (!inverse_seed)
        inverse_seed = [](const std::vector<cplx>& w) { return w; };
    BRTChart b;
    b.n = a.n;
    b.label = std::move(label);
    b.domain_radius = a.domain_radius;

    auto inverse_jets = [a, t, inverse_seed](const std::shared_ptr<const JetContext>& ctx,
                                             const std::vector<cplx>& w) {
        return invert_map_jets(t, ctx, w, inverse_seed(w));
    };

    b.phi = [a, t, inverse_jets](const std::shared_ptr<const JetContext>& ctx,
                                 const std::vector<cplx>& w) {
        std::vector<Jet> Z = inverse_jets(ctx, w);
        std::vector<cplx> z0;
        for (auto& Zj : Z)
            z0.push_back(Zj.value());
        Jet phiA = a.phi_jet(ctx, z0);
        std::vector<Jet> dz, dzbar;
        for (int j = 0; j < a.n; ++j) {
            dz.push_back(Z[j] - z0[j]);
            dzbar.push_back(jet_conj(dz.back()));
        }
        Jet phi = jet_compose(phiA, dz, dzbar);
        if (t.F) {
            JetBindings zb;
            zb.z = Z;
            for (auto& Zj : Z)
                zb.zbar.push_back(jet_conj(Zj));
            phi = phi - jet_real(eval_jet(t.F, ctx, zb));
        }
        return phi;
    };

    if (a.has_gram()) {
        b.gram = [a, t, inverse_jets](const std::shared_ptr<const JetContext>& ctx,
                                      const std::vector<cplx>& w) {
            std::vector<Jet> Z = inverse_jets(ctx, w);
            std::vector<cplx> z0;
            for (auto& Zj : Z)
                z0.push_back(Zj.value());
            std::vector<Jet> dz, dzbar;
            for (int j = 0; j < a.n; ++j) {
                dz.push_back(Z[j] - z0[j]);
                dzbar.push_back(jet_conj(dz.back()));
            }
            JetBindings zb;
            zb.z = Z;
            for (auto& Zj : Z)
                zb.zbar.push_back(jet_conj(Zj));
            // frame transform: H_B = (J^{-1})^T H_A conj(J^{-1}) along z = Z(w)
            Mat<Jet> Ji = mat_inverse(jacobian_jets(t, ctx, zb));
            Mat<Jet> HA = a.gram(ctx, z0);
            Mat<Jet> HAw(a.n, a.n, Jet::constant(ctx, 0.0));
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j)
                    HAw(i, j) = jet_compose(HA(i, j), dz, dzbar);
            Mat<Jet> JiC(a.n, a.n, Jet::constant(ctx, 0.0));
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j)
                    JiC(i, j) = jet_conj(Ji(i, j));
            return mat_mul(mat_transpose(Ji), mat_mul(HAw, JiC));
        };
    }
    return b;
}

// | a~(H(z)) |det dH/dz|^2 - a(z) | for the volume densities a = det g / pi^n
inline double transition_density_check(const Transition& t, const BRTChart& chart_a,
                                       const BRTChart& chart_b, const std::vector<cplx>& z) {
    const int n = chart_a.n;
    Mat<cplx> ga = levi_matrix(chart_a, z);
    std::vector<cplx> w = apply_map(t, z);
    Mat<cplx> gb = levi_matrix(chart_b, w);
    Mat<cplx> J(n, n, cplx(0.0));
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j)
            J(a, j) = eval_scalar(ex_d_z(t.H[a], j), z);
    double pin = std::pow(pi, n);
    double a_here = (mat_det(ga) / pin).real();
    double a_there = (mat_det(gb) / pin).real();
    double jac2 = std::norm(mat_det(J));
    return std::abs(a_there * jac2 - a_here);
}

} // namespace szk
