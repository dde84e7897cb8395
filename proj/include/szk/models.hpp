// Weighted spheres S^{2n+1} subset C^{n+1} with the diagonal circle action
// e^{i theta} . z = (e^{i p_1 theta} z_1, ..., e^{i p_{n+1} theta} z_{n+1}):
// strata and periods, distances to the singular set, pivot charts with
// implicit radial profiles, monomial section bases with exact or quadrature
// norms, and the exact kernel values S_m(x) built from those bases.
#pragma once

#include "brt.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace szk {

enum class MetricPreset { levi, ambient_round };

inline MetricPreset parse_metric_preset(const std::string& s) {
    if (s == "levi")
        return MetricPreset::levi;
    if (s == "ambient-round" || s == "ambient_round" || s == "round")
        return MetricPreset::ambient_round;
    throw invalid_argument_error("unknown metric preset '" + s + "' (use levi | ambient-round)");
}

inline std::string metric_preset_name(MetricPreset p) {
    return p == MetricPreset::levi ? "levi" : "ambient-round";
}

struct SpherePoint {
    std::vector<cplx> z; // unit vector in C^{n+1}
};

inline double point_norm(const std::vector<cplx>& z) {
    double s = 0.0;
    for (const auto& v : z)
        s += std::norm(v);
    return std::sqrt(s);
}

inline SpherePoint sphere_point(std::vector<cplx> z) {
    if (z.empty())
        throw invalid_argument_error("sphere_point: empty coordinate vector");
    if (std::abs(point_norm(z) - 1.0) > 1e-12)
        throw invalid_argument_error("sphere_point: coordinates are not unit length");
    return SpherePoint{std::move(z)};
}

inline SpherePoint normalized_point(std::vector<cplx> z) {
    double r = point_norm(z);
    if (r < 1e-14)
        throw invalid_argument_error("normalized_point: zero vector");
    for (auto& v : z)
        v /= r;
    return SpherePoint{std::move(z)};
}

struct StratumInfo {
    std::vector<int> p_list; // sorted distinct support gcds p_1 < ... < p_t
};

struct WeightedSphere {
    int n = 0;                // CR dimension; ambient space is C^{n+1}
    std::vector<int> weights; // n+1 positive integers, gcd 1
    MetricPreset preset = MetricPreset::levi;
    StratumInfo strata;
};

namespace detail {
inline std::vector<int> all_subset_gcds(const std::vector<int>& w) {
    std::vector<int> out;
    const int k = (int)w.size();
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        long long g = 0;
        for (int j = 0; j < k; ++j)
            if (mask & (1u << j))
                g = gcd_ll(g, w[j]);
        out.push_back((int)g);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}
} // namespace detail

inline WeightedSphere weighted_sphere(int n, std::vector<int> weights,
                                      MetricPreset preset = MetricPreset::levi) {
    if (n < 1 || n > 3)
        throw invalid_argument_error("weighted_sphere: CR dimension must be 1..3");
    if ((int)weights.size() != n + 1)
        throw invalid_argument_error("weighted_sphere: need exactly n+1 weights");
    long long g = 0;
    for (int p : weights) {
        if (p < 1)
            throw invalid_argument_error("weighted_sphere: weights must be positive integers");
        g = gcd_ll(g, p);
    }
    if (g != 1)
        throw invalid_argument_error("weighted_sphere: weights must have gcd 1");
    if (preset == MetricPreset::ambient_round)
        for (int p : weights)
            if (p != 1)
                throw invalid_argument_error(
                    "weighted_sphere: the ambient-round metric needs <T|T> = 1, which requires "
                    "all weights equal to 1; use the levi preset instead");
    WeightedSphere X;
    X.n = n;
    X.weights = std::move(weights);
    X.preset = preset;
    X.strata.p_list = detail::all_subset_gcds(X.weights);
    return X;
}

constexpr double support_threshold = 1e-10;

inline int support_gcd(const WeightedSphere& X, const SpherePoint& x) {
    long long g = 0;
    for (std::size_t j = 0; j < x.z.size(); ++j)
        if (std::abs(x.z[j]) > support_threshold)
            g = gcd_ll(g, X.weights[j]);
    if (g == 0)
        throw invalid_argument_error("support_gcd: point has empty support");
    return (int)g;
}

// index r into strata.p_list with x in X_{p_r}
inline int stratum_of(const WeightedSphere& X, const SpherePoint& x) {
    int g = support_gcd(X, x);
    for (std::size_t r = 0; r < X.strata.p_list.size(); ++r)
        if (X.strata.p_list[r] == g)
            return (int)r;
    throw numeric_error("stratum_of: support gcd not in the period list");
}

// period of the orbit through x: 2 pi / gcd{p_j : z_j != 0}
inline double period(const WeightedSphere& X, const SpherePoint& x) {
    return 2.0 * pi / support_gcd(X, x);
}

inline SpherePoint rotate(const WeightedSphere& X, const SpherePoint& x, double theta) {
    SpherePoint y = x;
    for (std::size_t j = 0; j < y.z.size(); ++j)
        y.z[j] *= std::exp(cplx(0.0, X.weights[j] * theta));
    return y;
}

// great-circle distance from x to the union of coordinate subspheres whose
// weight gcd exceeds p_r (the singular set of the r-th stratum); 0 when that
// union is empty
inline double distance_to_stratum(const WeightedSphere& X, const SpherePoint& x, int r) {
    if (r < 0 || r >= (int)X.strata.p_list.size())
        throw invalid_argument_error("distance_to_stratum: stratum index out of range");
    const int k = X.n + 1;
    const int pr = X.strata.p_list[r];
    double best = -1.0;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        long long g = 0;
        for (int j = 0; j < k; ++j)
            if (mask & (1u << j))
                g = gcd_ll(g, X.weights[j]);
        if (g <= pr)
            continue;
        double dropped2 = 0.0;
        for (int j = 0; j < k; ++j)
            if (!(mask & (1u << j)))
                dropped2 += std::norm(x.z[j]);
        double d = std::asin(std::min(1.0, std::sqrt(dropped2)));
        if (best < 0.0 || d < best)
            best = d;
    }
    return best < 0.0 ? 0.0 : best;
}

// self-return distance proxy: inf over theta in [delta, 2 pi / p_r - delta]
// of the great-circle distance d(x, e^{-i theta} x); 0 when the singular set
// of the stratum is empty
inline double d_hat(const WeightedSphere& X, const SpherePoint& x, int r, double delta) {
    const auto& plist = X.strata.p_list;
    if (r < 0 || r >= (int)plist.size())
        throw invalid_argument_error("d_hat: stratum index out of range");
    double window_bound = pi / plist.back();
    if (r + 1 < (int)plist.size())
        window_bound = std::min(window_bound, 2.0 * pi / plist[r] - 2.0 * pi / plist[r + 1]);
    if (!(delta > 0.0) || delta >= window_bound)
        throw invalid_argument_error("d_hat: delta outside the admissible window");
    if (r + 1 == (int)plist.size())
        return 0.0; // nothing is more singular than the top stratum

    std::vector<double> t(x.z.size());
    for (std::size_t j = 0; j < x.z.size(); ++j)
        t[j] = std::norm(x.z[j]);
    auto dist = [&](double theta) {
        double c = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j)
            c += t[j] * std::cos(X.weights[j] * theta);
        return std::acos(std::max(-1.0, std::min(1.0, c)));
    };

    const double lo = delta, hi = 2.0 * pi / plist[r] - delta;
    const int grid = 4096;
    double best_theta = lo, best = dist(lo);
    for (int i = 1; i <= grid; ++i) {
        double th = lo + (hi - lo) * i / grid;
        double d = dist(th);
        if (d < best) {
            best = d;
            best_theta = th;
        }
    }
    // golden-section refinement inside the bracketing cell
    double a = std::max(lo, best_theta - (hi - lo) / grid);
    double b = std::min(hi, best_theta + (hi - lo) / grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = dist(c1), f2 = dist(c2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = dist(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = dist(c2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

// ---- pivot charts ----

struct ChartAtPoint {
    BRTChart chart;
    std::vector<cplx> w0;              // chart coordinates of the base point
    int pivot = 0;                     // ambient coordinate used as pivot
    double theta0 = 0.0, rho0 = 1.0;   // gauge data of the centering
    std::vector<int> ambient_of_chart; // chart slot -> ambient index
};

// chart around x: pick the largest coordinate as pivot k; coordinates w_s for
// the remaining ambient slots; ambient embedding z_j = e^{i p_j theta} w_j
// rho(w)^{p_j} (and z_k = e^{i p_k theta} rho^{p_k}) with rho > 0 solving
// sum_{j != k} |w_j|^2 rho^{2 p_j} + rho^{2 p_k} = 1; potential
// phi(w) = -log rho(w)
inline ChartAtPoint brt_chart_at(const WeightedSphere& X, const SpherePoint& x) {
    const int k_amb = X.n + 1;
    int pivot = 0;
    for (int j = 1; j < k_amb; ++j)
        if (std::abs(x.z[j]) > std::abs(x.z[pivot]))
            pivot = j;
    if (std::abs(x.z[pivot]) < 1e-8)
        throw invalid_argument_error("brt_chart_at: point too close to the origin");

    ChartAtPoint out;
    out.pivot = pivot;
    const int pk = X.weights[pivot];
    out.theta0 = std::arg(x.z[pivot]) / pk;
    out.rho0 = std::pow(std::abs(x.z[pivot]), 1.0 / pk);
    for (int j = 0; j < k_amb; ++j)
        if (j != pivot)
            out.ambient_of_chart.push_back(j);
    for (int j : out.ambient_of_chart)
        out.w0.push_back(x.z[j] * std::exp(cplx(0.0, -X.weights[j] * out.theta0)) *
                         std::pow(out.rho0, -X.weights[j]));

    // unit-sphere constraint in the profile variable u = rho
    ExprPtr E = ex_pow(ex_u(), 2.0 * pk);
    for (std::size_t s = 0; s < out.ambient_of_chart.size(); ++s) {
        int pj = X.weights[out.ambient_of_chart[s]];
        E = ex_add(E, ex_mul(ex_abs2((int)s), ex_pow(ex_u(), 2.0 * pj)));
    }
    E = ex_sub(E, ex_const(1.0));

    BRTChart c;
    c.n = X.n;
    {
        std::string lbl = "wsphere";
        for (int p : X.weights)
            lbl += "-" + std::to_string(p);
        c.label = lbl + "-pivot" + std::to_string(pivot);
    }
    c.phi = [E](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
        Jet rho = newton_jet_solve(E, ctx, coordinate_bindings(ctx, z), 1.0);
        return -1.0 * jet_log(rho);
    };
    if (X.preset == MetricPreset::ambient_round) {
        BRTChart base = c; // Levi data of the same potential
        c.gram = [base](const std::shared_ptr<const JetContext>& ctx, const std::vector<cplx>& z) {
            Mat<Jet> H = levi_matrix_jet(base, z, ctx->order);
            for (auto& e : H.a)
                e = e * 0.5;
            return H;
        };
    }
    out.chart = std::move(c);
    return out;
}

// ---- monomial section bases and kernel values ----

struct MonomialEntry {
    std::vector<int> alpha; // exponent, size n+1
    double norm2 = 0.0;     // ||z^alpha||^2 under the preset volume form
    double log_norm2 = 0.0;
};

struct MonomialBasis {
    long long m = 0;
    std::vector<MonomialEntry> entries; // lexicographic in alpha
};

namespace detail {
inline void enumerate_exponents(const std::vector<int>& w, int slot, long long remaining,
                                std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slot == (int)w.size() - 1) {
        if (remaining % w[slot] == 0) {
            cur[slot] = (int)(remaining / w[slot]);
            out.push_back(cur);
        }
        return;
    }
    for (long long a = 0; a * w[slot] <= remaining; ++a) {
        cur[slot] = (int)a;
        enumerate_exponents(w, slot + 1, remaining - a * w[slot], cur, out);
    }
}
} // namespace detail

// ||z^alpha||^2 for the levi preset: the volume density against the round
// measure is 1/(pi^n P(t)^{n+1}) with P(t) = sum p_j t_j, t_j = |z_j|^2, so
// ||z^alpha||^2 = 2 pi * integral over the simplex of t^alpha P(t)^{-(n+1)}.
inline double levi_monomial_norm2(const WeightedSphere& X, const std::vector<int>& alpha,
                                  long long m) {
    const int n = X.n;
    auto integrand = [&](const double* t) {
        double v = 1.0;
        for (int j = 0; j <= n; ++j)
            if (alpha[j] != 0)
                v *= std::pow(t[j], alpha[j]);
        double P = 0.0;
        for (int j = 0; j <= n; ++j)
            P += X.weights[j] * t[j];
        return v / std::pow(P, n + 1);
    };
    const int order = std::max(64, (int)(m / 2) + 16);
    double i1 = integrate_simplex(n, integrand, order);
    double i2 = integrate_simplex(n, integrand, 2 * order);
    if (std::abs(i1 - i2) > 1e-9 * std::max(std::abs(i2), 1e-300))
        throw numeric_error("levi_monomial_norm2: quadrature tolerance not met");
    return 2.0 * pi * i2;
}

inline MonomialBasis monomial_norms(const WeightedSphere& X, long long m) {
    if (m < 0)
        throw invalid_argument_error("monomial_norms: m must be nonnegative");
    MonomialBasis basis;
    basis.m = m;
    std::vector<std::vector<int>> exps;
    std::vector<int> cur(X.n + 1, 0);
    detail::enumerate_exponents(X.weights, 0, m, cur, exps);
    basis.entries.reserve(exps.size());
    for (auto& alpha : exps) {
        MonomialEntry e;
        e.alpha = alpha;
        if (X.preset == MetricPreset::ambient_round) {
            // closed form: integral of |z^alpha|^2 over the round sphere is
            // 2 pi^{n+1} alpha! / (n + |alpha|)!
            double lg = std::log(2.0) + (X.n + 1) * std::log(pi);
            long long total = 0;
            for (int a : alpha) {
                lg += std::lgamma(a + 1.0);
                total += a;
            }
            lg -= std::lgamma((double)(X.n + total + 1));
            e.log_norm2 = lg;
            e.norm2 = std::exp(lg);
        } else {
            e.norm2 = levi_monomial_norm2(X, alpha, m);
            if (!(e.norm2 > 0.0))
                throw numeric_error("monomial_norms: non-positive norm from quadrature");
            e.log_norm2 = std::log(e.norm2);
        }
        basis.entries.push_back(std::move(e));
    }
    return basis;
}

// sum_alpha |z^alpha|^2 / ||z^alpha||^2 with per-term log-space evaluation,
// structural zeros for vanishing coordinates, and compensated summation in
// the (deterministic) enumeration order; defined for any ambient z
inline double szego_value_at(const WeightedSphere& X, const MonomialBasis& basis,
                             const std::vector<cplx>& z) {
    const int k = X.n + 1;
    if ((int)z.size() != k)
        throw invalid_argument_error("szego_value_at: wrong coordinate count");
    std::vector<double> logt(k, 0.0);
    std::vector<bool> zero(k, false);
    for (int j = 0; j < k; ++j) {
        double a = std::abs(z[j]);
        zero[j] = (a == 0.0);
        logt[j] = zero[j] ? 0.0 : 2.0 * std::log(a);
    }
    compensated_sum acc;
    for (const auto& e : basis.entries) {
        double lg = -e.log_norm2;
        bool dead = false;
        for (int j = 0; j < k && !dead; ++j) {
            if (e.alpha[j] == 0)
                continue;
            if (zero[j])
                dead = true; // the monomial vanishes identically here
            else
                lg += e.alpha[j] * logt[j];
        }
        if (!dead)
            acc.add(std::exp(lg));
    }
    return acc.value();
}

inline double szego_value(const WeightedSphere& X, const MonomialBasis& basis,
                          const SpherePoint& x) {
    return szego_value_at(X, basis, x.z);
}

inline double szego_value(const WeightedSphere& X, long long m, const SpherePoint& x) {
    return szego_value_at(X, monomial_norms(X, m), x.z);
}

// ambient holomorphic (Wirtinger) gradient: component j is
// sum_alpha alpha_j / z_j * |z^alpha|^2 / ||z^alpha||^2 (zero where z_j = 0)
inline std::vector<cplx> szego_gradient_at(const WeightedSphere& X, const MonomialBasis& basis,
                                           const std::vector<cplx>& z) {
    const int k = X.n + 1;
    if ((int)z.size() != k)
        throw invalid_argument_error("szego_gradient_at: wrong coordinate count");
    std::vector<double> logt(k, 0.0);
    std::vector<bool> zero(k, false);
    for (int j = 0; j < k; ++j) {
        double a = std::abs(z[j]);
        zero[j] = (a == 0.0);
        logt[j] = zero[j] ? 0.0 : 2.0 * std::log(a);
    }
    std::vector<compensated_sum> re(k), im(k);
    for (const auto& e : basis.entries) {
        double lg = -e.log_norm2;
        bool dead = false;
        for (int j = 0; j < k && !dead; ++j) {
            if (e.alpha[j] == 0)
                continue;
            if (zero[j])
                dead = true;
            else
                lg += e.alpha[j] * logt[j];
        }
        if (dead)
            continue;
        double term = std::exp(lg);
        for (int j = 0; j < k; ++j) {
            if (e.alpha[j] == 0 || zero[j])
                continue;
            cplx g = term * (double)e.alpha[j] / z[j];
            re[j].add(g.real());
            im[j].add(g.imag());
        }
    }
    std::vector<cplx> grad(k);
    for (int j = 0; j < k; ++j)
        grad[j] = cplx(re[j].value(), im[j].value());
    return grad;
}

inline std::vector<cplx> szego_gradient(const WeightedSphere& X, const MonomialBasis& basis,
                                        const SpherePoint& x) {
    return szego_gradient_at(X, basis, x.z);
}

inline std::vector<cplx> szego_gradient(const WeightedSphere& X, long long m,
                                        const SpherePoint& x) {
    return szego_gradient_at(X, monomial_norms(X, m), x.z);
}

} // namespace szk
