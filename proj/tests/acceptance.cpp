// Acceptance gate: exercises every end-to-end guarantee of the library and
// prints exactly one PASS/FAIL line per criterion.  All tolerances are pinned
// in this file.  Exit status is 0 only if every criterion passes.
//
// Deliberately a plain main() (no test framework) so the output reads as a
// checklist and the binary can be run standalone or under ctest.

#include <szk/coefficients.hpp>
#include <szk/harness.hpp>

#include "fd_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace szk;

namespace {

struct Criterion {
    std::string label;
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// deviation between two values that are claimed equal, measured relative to
// their size with a unit floor so identities between vanishing quantities
// (e.g. flat-model curvatures) remain well posed
double rel_dev(double got, double want) {
    return std::abs(got - want) / std::max({1.0, std::abs(got), std::abs(want)});
}

// ---- local chart fixtures (independent of the sphere-model chart builder) ----

BRTChart hopf_chart() {
    ExprPtr phi = ex_mul(ex_const(0.5), ex_log(ex_add(ex_const(1.0), ex_abs2(0))));
    return chart_from_expr(1, phi, "hopf");
}

BRTChart bf_chart(int n) {
    ExprPtr phi = ex_abs2(0);
    for (int j = 1; j < n; ++j)
        phi = ex_add(phi, ex_abs2(j));
    return chart_from_expr(n, phi, "bargmann-fock");
}

BRTChart fs2_chart() {
    ExprPtr phi = ex_mul(ex_const(0.5),
                         ex_log(ex_add(ex_const(1.0), ex_add(ex_abs2(0), ex_abs2(1)))));
    return chart_from_expr(2, phi, "fs2");
}

BRTChart weighted_singular_chart() {
    BRTChart c;
    c.n = 1;
    c.label = "w12-singular";
    ExprPtr E = ex_sub(ex_add(ex_mul(ex_u(), ex_u()), ex_mul(ex_abs2(0), ex_u())), ex_const(1.0));
    c.phi = [E](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        Jet b = newton_jet_solve(E, ctx, coordinate_bindings(ctx, z), 1.0);
        return -0.5 * jet_log(b);
    };
    return c;
}

BRTChart weighted_regular_chart() {
    BRTChart c;
    c.n = 1;
    c.label = "w12-regular";
    ExprPtr E = ex_sub(ex_add(ex_mul(ex_u(), ex_u()), ex_mul(ex_abs2(0), ex_pow(ex_u(), 4.0))),
                       ex_const(1.0));
    c.phi = [E](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        Jet rho = newton_jet_solve(E, ctx, coordinate_bindings(ctx, z), 1.0);
        return -1.0 * jet_log(rho);
    };
    return c;
}

BRTChart round_sphere_chart(int n) {
    ExprPtr s = ex_const(1.0);
    for (int j = 0; j < n; ++j)
        s = ex_add(s, ex_abs2(j));
    BRTChart base = chart_from_expr(n, ex_mul(ex_const(0.5), ex_log(s)), "round-ambient");
    BRTChart out = base;
    out.gram = [base](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        Mat<Jet> H = levi_matrix_jet(base, z, ctx->order);
        for (auto& e : H.a)
            e = e * 0.5;
        return H;
    };
    return out;
}

BRTChart bf_identity_gram_chart(int n) {
    BRTChart c = bf_chart(n);
    c.gram = [n](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>&) {
        Mat<Jet> H(n, n, Jet::constant(ctx, 0.0));
        for (int j = 0; j < n; ++j)
            H(j, j) = Jet::constant(ctx, 1.0);
        return H;
    };
    return c;
}

std::vector<cplx> random_point(std::mt19937& rng, int n, double radius) {
    std::uniform_real_distribution<double> U(-radius, radius);
    std::vector<cplx> z(n);
    for (auto& w : z)
        w = cplx(U(rng), U(rng));
    return z;
}

// ---- criterion 1: round 3-sphere, constant coefficients + linear kernel law ----

Criterion crit_round3() {
    Criterion c;
    c.label = "round 3-sphere: coefficients (1/2pi^2, 1/2pi^2, 0); kernel (m+1)/(2pi^2), m <= 200";
    const double tol_coeff = 1e-8;  // absolute
    const double tol_kernel = 1e-10; // relative

    auto X = weighted_sphere(1, {1, 1}, MetricPreset::ambient_round);
    std::mt19937_64 rng(20260814ULL);
    const double b_ref = 1.0 / (2.0 * pi * pi);

    double worst_c = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto x = random_sphere_point(X, rng);
        auto cap = brt_chart_at(X, x);
        auto cs = coefficients_at(cap.chart, cap.w0);
        worst_c = std::max({worst_c, std::abs(cs.b0 - b_ref), std::abs(cs.b1 - b_ref),
                            std::abs(cs.b2)});
    }

    double worst_k = 0.0;
    for (long long m = 0; m <= 200; ++m) {
        auto basis = monomial_norms(X, m);
        double ref = (double)(m + 1) / (2.0 * pi * pi);
        for (int i = 0; i < 2; ++i) {
            auto x = random_sphere_point(X, rng);
            worst_k = std::max(worst_k, std::abs(szego_value(X, basis, x) - ref) / ref);
        }
    }

    c.pass = worst_c <= tol_coeff && worst_k <= tol_kernel;
    c.detail = "max coefficient dev " + fmt(worst_c) + " (tol 1e-8 abs); max kernel rel dev " +
               fmt(worst_k) + " (tol 1e-10)";
    return c;
}

// ---- criterion 2: round 5-sphere analogue ----

Criterion crit_round5() {
    Criterion c;
    c.label = "round 5-sphere: coefficients (1/2pi^3, 3/2pi^3, 1/pi^3); kernel (m+1)(m+2)/(2pi^3), m <= 100";
    const double tol_coeff = 1e-6;
    const double tol_kernel = 1e-10;

    auto X = weighted_sphere(2, {1, 1, 1}, MetricPreset::ambient_round);
    std::mt19937_64 rng(5150ULL);
    const double p3 = pi * pi * pi;

    double worst_c = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto x = random_sphere_point(X, rng);
        auto cap = brt_chart_at(X, x);
        auto cs = coefficients_at(cap.chart, cap.w0);
        worst_c = std::max({worst_c, std::abs(cs.b0 - 1.0 / (2.0 * p3)),
                            std::abs(cs.b1 - 3.0 / (2.0 * p3)), std::abs(cs.b2 - 1.0 / p3)});
    }

    double worst_k = 0.0;
    for (long long m = 0; m <= 100; ++m) {
        auto basis = monomial_norms(X, m);
        double ref = (double)((m + 1) * (m + 2)) / (2.0 * p3);
        for (int i = 0; i < 2; ++i) {
            auto x = random_sphere_point(X, rng);
            worst_k = std::max(worst_k, std::abs(szego_value(X, basis, x) - ref) / ref);
        }
    }

    c.pass = worst_c <= tol_coeff && worst_k <= tol_kernel;
    c.detail = "max coefficient dev " + fmt(worst_c) + " (tol 1e-6 abs); max kernel rel dev " +
               fmt(worst_k) + " (tol 1e-10)";
    return c;
}

// ---- criterion 3: scalar-curvature identity by two independent code paths ----

Criterion crit_scalar_identity() {
    Criterion c;
    c.label = "S_L = 4 pi R at 100 random points (two independent curvature paths)";
    const double tol = 1e-8;

    std::vector<BRTChart> charts = {hopf_chart(), weighted_regular_chart(),
                                    weighted_singular_chart(), bf_chart(2)};
    std::mt19937 rng(314159);
    double worst = 0.0;
    for (const auto& chart : charts) {
        for (int i = 0; i < 25; ++i) {
            auto z = random_point(rng, chart.n, 0.4);
            double s_l = rigid_scalar_curvature(chart, z);
            double r = tw_scalar_curvature(chart, z);
            worst = std::max(worst, rel_dev(s_l, 4.0 * pi * r));
        }
    }
    c.pass = worst <= tol;
    c.detail = "max rel dev " + fmt(worst) + " over 4 charts x 25 points (tol 1e-8)";
    return c;
}

// ---- criterion 4: disc-bundle / circle-bundle correspondence ----

Criterion crit_correspondence() {
    Criterion c;
    c.label = "disc-bundle vs circle-bundle quantities agree at 50 random points per chart";
    const double tol = 1e-8;

    std::vector<BRTChart> charts = {hopf_chart(),
                                    fs2_chart(),
                                    weighted_singular_chart(),
                                    weighted_regular_chart(),
                                    bf_chart(2),
                                    bf_identity_gram_chart(2),
                                    round_sphere_chart(1),
                                    round_sphere_chart(2)};
    std::mt19937 rng(271828);
    double worst = 0.0;
    for (const auto& chart : charts) {
        for (int i = 0; i < 50; ++i) {
            auto z = random_point(rng, chart.n, 0.4);
            auto rep = curvature_report(chart, z);
            auto lb = local_bergman_coefficients(chart, z);
            auto cs = coefficients_from_report(rep, chart.label);
            double w = 0.0;
            w = std::max(w, rel_dev(lb.r_hat, rep.S_Theta_L));
            w = std::max(w, rel_dev(lb.r, rep.S_L));
            w = std::max(w, rel_dev(lb.lap_r, rep.lap_S_L));
            w = std::max(w, rel_dev(lb.lap_r_hat, rep.lap_S_Theta_L));
            w = std::max(w, rel_dev(lb.det_rdot, rep.det_Rdot));
            w = std::max(w, rel_dev(lb.norms.rdet2, rep.norms.rdet2));
            w = std::max(w, rel_dev(lb.norms.ric2, rep.norms.ric2));
            w = std::max(w, rel_dev(lb.norms.ric_rdet, rep.norms.ric_rdet));
            w = std::max(w, rel_dev(lb.norms.chern2, rep.norms.chern2));
            w = std::max(w, rel_dev(lb.b0, 2.0 * pi * cs.b0));
            w = std::max(w, rel_dev(lb.b1, 2.0 * pi * cs.b1));
            w = std::max(w, rel_dev(lb.b2, 2.0 * pi * cs.b2));
            worst = std::max(worst, w);
        }
    }
    c.pass = worst <= tol;
    c.detail = "max rel dev " + fmt(worst) + " over 8 charts x 50 points x 12 equalities (tol 1e-8)";
    return c;
}

// ---- criterion 5: invariance under the cubic reparametrization w = z + z^3 ----

Criterion crit_chart_invariance() {
    Criterion c;
    c.label = "S_L, S^Theta, b0, b1, b2 invariant under w = z + z^3; transition density residual";
    const double tol = 1e-8;

    double worst_q = 0.0, worst_d = 0.0;

    auto run_case = [&](const BRTChart& a, const Transition& t, const char* tag,
                        const std::vector<std::vector<cplx>>& pts) {
        auto b = pullback_chart(a, t, tag);
        for (const auto& z : pts) {
            worst_d = std::max(worst_d, transition_density_check(t, a, b, z));
            auto w = apply_map(t, z);
            auto rep_a = curvature_report(a, z);
            auto rep_b = curvature_report(b, w);
            auto ca = coefficients_from_report(rep_a, "a");
            auto cb = coefficients_from_report(rep_b, "b");
            worst_q = std::max({worst_q, rel_dev(rep_a.S_L, rep_b.S_L),
                                rel_dev(rep_a.S_Theta_L, rep_b.S_Theta_L),
                                rel_dev(ca.b0, cb.b0), rel_dev(ca.b1, cb.b1),
                                rel_dev(ca.b2, cb.b2)});
        }
    };

    Transition t1;
    t1.H = {ex_add(ex_z(0), ex_mul(ex_z(0), ex_mul(ex_z(0), ex_z(0))))};
    run_case(hopf_chart(), t1, "hopf-cubic",
             {{cplx(0.2, 0.1)}, {cplx(-0.25, 0.05)}, {cplx(0.05, -0.3)}});

    Transition t2;
    t2.H = {ex_add(ex_z(0), ex_mul(ex_z(0), ex_mul(ex_z(0), ex_z(0)))),
            ex_add(ex_z(1), ex_mul(ex_const(0.5), ex_mul(ex_z(1), ex_mul(ex_z(1), ex_z(1)))))};
    run_case(fs2_chart(), t2, "fs2-cubic",
             {{cplx(0.2, 0.1), cplx(-0.1, 0.15)},
              {cplx(-0.25, 0.05), cplx(0.2, -0.2)},
              {cplx(0.05, -0.3), cplx(0.12, 0.22)}});

    c.pass = worst_q <= tol && worst_d <= tol;
    c.detail = "max quantity rel dev " + fmt(worst_q) + "; max density residual " + fmt(worst_d) +
               " (tol 1e-8)";
    return c;
}

// ---- criterion 6: exact cancellation on the singular stratum + cyclic sum factor ----

Criterion crit_cancellation() {
    Criterion c;
    c.label = "(1,2)-sphere: S_m on the singular stratum is exactly 0 for odd m <= 201; cyclic sum factor";
    const double tol_sum = 1e-12;

    auto X = weighted_sphere(1, {1, 2}, MetricPreset::levi);
    auto x = sphere_point({cplx(0.0), cplx(1.0)});
    bool exact_zero = true;
    long long first_bad = -1;
    for (long long m = 1; m <= 201; m += 2) {
        if (szego_value(X, m, x) != 0.0) {
            exact_zero = false;
            if (first_bad < 0)
                first_bad = m;
        }
    }

    double worst_sf = 0.0;
    for (int p = 1; p <= 12; ++p) {
        for (long long m = 1; m <= 500; ++m) {
            cplx osum = 0.0;
            for (int s = 1; s <= p; ++s) {
                // reduce the integer phase mod p before the complex exponential
                // so the oracle itself carries no large-argument rounding
                long long k = ((long long)(s - 1) * m) % p;
                osum += std::exp(cplx(0.0, 2.0 * pi * (double)k / (double)p));
            }
            worst_sf = std::max(worst_sf, std::abs(osum - cplx((double)sum_factor(m, p))));
        }
    }

    c.pass = exact_zero && worst_sf <= tol_sum;
    c.detail = std::string("odd-m stratum values ") +
               (exact_zero ? "all exactly 0" : ("nonzero at m = " + std::to_string(first_bad))) +
               "; max sum-factor dev " + fmt(worst_sf) + " for p <= 12, m <= 500 (tol 1e-12)";
    return c;
}

// ---- criterion 7: even-m stratum doubling ratio ----

Criterion crit_doubling() {
    Criterion c;
    c.label = "(1,2)-sphere even m: |S_m / (sum_factor (b0 m + b1)) - 1| decreases, <= 0.02 at m = 200";
    const double tol_final = 0.02;

    auto X = weighted_sphere(1, {1, 2}, MetricPreset::levi);
    auto x = sphere_point({cplx(0.0), cplx(1.0)});
    auto cap = brt_chart_at(X, x);
    auto cs = coefficients_at(cap.chart, cap.w0);

    std::vector<long long> ms = {40, 80, 120, 160, 200};
    std::vector<double> q;
    for (long long m : ms) {
        double s = szego_value(X, m, x);
        double pred = (double)sum_factor(m, 2) * (cs.b0 * (double)m + cs.b1);
        q.push_back(std::abs(s / pred - 1.0));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < q.size(); ++i)
        decreasing = decreasing && q[i] < q[i - 1];

    c.pass = decreasing && q.back() <= tol_final;
    std::string seq;
    for (std::size_t i = 0; i < q.size(); ++i)
        seq += (i ? ", " : "") + fmt(q[i]);
    c.detail = "ratio deviation at m = {40,80,120,160,200}: " + seq + " (final tol 0.02)";
    return c;
}

// ---- criterion 8: exponential decay of the deviation off the singular stratum ----

Criterion crit_decay() {
    Criterion c;
    c.label = "(1,2)-sphere decay: fitted rate > 0 and half-rate envelope holds on the full grid";

    auto X = weighted_sphere(1, {1, 2}, MetricPreset::levi);
    std::vector<SpherePoint> pts;
    for (int j = 0; j < 8; ++j) {
        double s = 0.05 + (0.4 - 0.05) * (double)j / 7.0;
        pts.push_back(sphere_point({cplx(s), cplx(std::sqrt(1.0 - s * s))}));
    }
    std::vector<long long> ms;
    for (long long m = 11; m <= 201; m += 2)
        ms.push_back(m);

    auto scan = decay_scan(X, pts, ms, 3);
    bool envelope_ok = true;
    double worst_ratio = 0.0;
    for (const auto& row : scan.rows) {
        envelope_ok = envelope_ok && row.deviation <= row.envelope * (1.0 + 1e-12);
        if (row.envelope > 0.0)
            worst_ratio = std::max(worst_ratio, row.deviation / row.envelope);
    }

    c.pass = scan.pass && scan.eps0_hat > 0.0 && std::isfinite(scan.C) && envelope_ok;
    c.detail = "fitted rate " + fmt(scan.eps0_hat) + ", envelope constant " + fmt(scan.C) +
               ", max deviation/envelope " + fmt(worst_ratio) + " over " +
               std::to_string(scan.rows.size()) + " grid rows";
    return c;
}

// ---- criterion 9: oscillatory circle-average vs closed-form mode ----

Criterion crit_oscillatory() {
    Criterion c;
    c.label = "circle average vs closed-form mode: rel <= 1e-10 when p | m, abs <= 1e-12 m^n otherwise";
    const double tol_rel = 1e-10;
    const double tol_abs = 1e-12; // times m^n

    double worst_rel = 0.0, worst_abs = 0.0;

    auto sweep = [&](int n, int p) {
        // |z|^2 = 1/(2p) puts the extracted mode at the peak of the
        // coefficient profile, so the relative comparison is meaningful
        std::vector<cplx> z(n, cplx(std::sqrt(0.5 / (double)p / (double)n)));
        for (long long m = 1; m <= 200; ++m) {
            auto r = oscillatory_demo(n, p, z, m);
            if (m % p == 0)
                worst_rel = std::max(worst_rel, std::abs(r.quad - cplx(r.exact)) / r.exact);
            else
                worst_abs = std::max(worst_abs,
                                     std::abs(r.quad) / std::pow((double)m, (double)n));
        }
    };
    for (int p : {1, 2, 3, 4, 5, 7})
        sweep(1, p);
    sweep(2, 3);
    sweep(2, 5);

    c.pass = worst_rel <= tol_rel && worst_abs <= tol_abs;
    c.detail = "max rel dev " + fmt(worst_rel) + " (tol 1e-10); max scaled abs " + fmt(worst_abs) +
               " (tol 1e-12)";
    return c;
}

// ---- criterion 10: jet derivatives vs Richardson finite differences ----

Criterion crit_jets() {
    Criterion c;
    c.label = "jet derivatives (order <= 4) match Richardson finite differences; polynomial jets exact";
    const double tol = 1e-6;

    // polynomial jets carry exact integer coefficients
    auto ctx3 = JetContext::get(2, 3);
    auto z1 = Jet::variable(ctx3, 0, 0.0);
    auto zb2 = Jet::conj_variable(ctx3, 1, 0.0);
    Jet f = pow_int(z1 + 2.0 * zb2, 3);
    bool poly_exact = wirtinger(f, {3, 0}, {0, 0}) == cplx(6.0) &&
                      wirtinger(f, {2, 0}, {0, 1}) == cplx(12.0) &&
                      wirtinger(f, {1, 0}, {0, 2}) == cplx(24.0) &&
                      wirtinger(f, {0, 0}, {0, 3}) == cplx(48.0) &&
                      wirtinger(f, {1, 1}, {0, 0}) == cplx(0.0);

    double worst = 0.0;
    auto check_field = [&](const ExprPtr& fe, const std::vector<cplx>& z0) {
        int n = (int)z0.size();
        auto ctx = JetContext::get(n, 4);
        Jet g = eval_jet(fe, ctx, coordinate_bindings(ctx, z0));
        auto fn = [&](const std::vector<cplx>& z) { return eval_scalar(fe, z); };
        for (int r = 0; r < ctx->size(); ++r) {
            std::vector<int> alpha(n), beta(n);
            for (int j = 0; j < n; ++j) {
                alpha[j] = ctx->exps[r][j];
                beta[j] = ctx->exps[r][n + j];
            }
            cplx jet_val = wirtinger(g, alpha, beta);
            cplx fd_val = szk_test::fd_wirtinger(fn, z0, alpha, beta);
            worst = std::max(worst,
                             std::abs(jet_val - fd_val) / std::max(1.0, std::abs(fd_val)));
        }
    };

    // mixed exp/rational field in two variables
    check_field(ex_div(ex_mul(ex_exp(ex_sub(ex_abs2(0), ex_mul(ex_const(0.5), ex_abs2(1)))),
                              ex_add(ex_const(1.0),
                                     ex_add(ex_mul(ex_z(0), ex_zbar(1)),
                                            ex_mul(ex_z(1), ex_zbar(0))))),
                       ex_add(ex_const(2.0), ex_abs2(0))),
                {cplx(0.3, 0.1), cplx(-0.2, 0.4)});
    // logarithmic potential-type field in one variable
    check_field(ex_log(ex_add(ex_const(2.0),
                              ex_add(ex_abs2(0),
                                     ex_mul(ex_const(0.3), ex_add(ex_z(0), ex_zbar(0)))))),
                {cplx(0.25, -0.15)});

    c.pass = poly_exact && worst <= tol;
    c.detail = std::string("polynomial coefficients ") + (poly_exact ? "exact" : "NOT exact") +
               "; max FD rel dev " + fmt(worst) + " (tol 1e-6)";
    return c;
}

} // namespace

int main() {
    std::vector<std::function<Criterion()>> crits = {
        crit_round3,       crit_round5,     crit_scalar_identity, crit_correspondence,
        crit_chart_invariance, crit_cancellation, crit_doubling,  crit_decay,
        crit_oscillatory,  crit_jets,
    };

    int passed = 0;
    for (std::size_t i = 0; i < crits.size(); ++i) {
        Criterion c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c = crits[i]();
        } catch (const std::exception& e) {
            c.pass = false;
            if (c.label.empty())
                c.label = "criterion body threw";
            c.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu: %s  %s  [%s; %.1fs]\n", i + 1, c.pass ? "PASS" : "FAIL",
                    c.label.c_str(), c.detail.c_str(), secs);
        std::fflush(stdout);
        if (c.pass)
            ++passed;
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, crits.size());
    return passed == (int)crits.size() ? 0 : 1;
}
