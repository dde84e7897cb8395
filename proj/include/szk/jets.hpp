// Truncated Taylor ("jet") arithmetic in n conjugate variable pairs (z, zbar).
//
// A jet stores the coefficients c(alpha,beta) of
//     f(z,zbar) = sum c(alpha,beta) (z - z0)^alpha (zbar - conj(z0))^beta
// for |alpha|+|beta| <= order, i.e. c(alpha,beta) = d^{alpha}_z d^{beta}_zbar f / (alpha! beta!).
// The two groups are treated as independent variables (Wirtinger calculus);
// a real-valued f satisfies c(alpha,beta) = conj(c(beta,alpha)).
#pragma once

#include "common.hpp"

#include <array>
#include <memory>
#include <map>
#include <mutex>
#include <vector>

namespace szk {

constexpr int jet_max_pairs = 3;

// Exponent vector: alpha (n entries) followed by beta (n entries).
using jet_exponents = std::array<std::uint8_t, 2 * jet_max_pairs>;

// Shared per-(n_pairs, order) tables: graded ordering of exponent vectors,
// degree block offsets, and a stride-indexed rank lookup.
class JetContext {
public:
    int n_pairs;
    int order;
    std::vector<jet_exponents> exps;   // rank -> exponents (graded lex)
    std::vector<int> degree_offset;    // degree d block begins at degree_offset[d]
    std::vector<int> degree_of;        // rank -> total degree
    std::vector<std::int32_t> rank_of; // stride-indexed exponents -> rank (-1 outside)

    static std::shared_ptr<const JetContext> get(int n_pairs, int order);

    int size() const { return (int)exps.size(); }

    int rank(const jet_exponents& e) const {
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < 2 * n_pairs; ++i) {
            idx += stride * e[i];
            stride *= (std::size_t)(order + 1);
        }
        return rank_of[idx];
    }

private:
    JetContext(int n, int k);
};

inline JetContext::JetContext(int n, int k) : n_pairs(n), order(k) {
    if (n < 1 || n > jet_max_pairs)
        throw invalid_argument_error("jet context: n_pairs must be in 1.." + std::to_string(jet_max_pairs));
    if (k < 0 || k > 16)
        throw invalid_argument_error("jet context: order must be in 0..16");
    const int v = 2 * n;
    // enumerate by total degree, lexicographic within a degree
    jet_exponents e{};
    degree_offset.assign(k + 2, 0);
    for (int d = 0; d <= k; ++d) {
        degree_offset[d] = (int)exps.size();
        // iterate all e with |e| == d
        std::fill(e.begin(), e.end(), 0);
        e[0] = (std::uint8_t)d;
        while (true) {
            exps.push_back(e);
            degree_of.push_back(d);
            // next composition of d into v parts (colex-style enumeration)
            int i = 0;
            while (i < v - 1 && e[i] == 0)
                ++i;
            if (i == v - 1)
                break;
            int head = e[i];
            e[i] = 0;
            e[i + 1] += 1;
            e[0] = (std::uint8_t)(head - 1);
            (void)0;
            // note: standard "next composition" walk; terminates when all of d sits in the last slot
        }
    }
    degree_offset[k + 1] = (int)exps.size();
    std::size_t table = 1;
    for (int i = 0; i < v; ++i)
        table *= (std::size_t)(k + 1);
    rank_of.assign(table, -1);
    for (int r = 0; r < (int)exps.size(); ++r) {
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < v; ++i) {
            idx += stride * exps[r][i];
            stride *= (std::size_t)(k + 1);
        }
        rank_of[idx] = r;
    }
}

inline std::shared_ptr<const JetContext> JetContext::get(int n_pairs, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetContext>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(n_pairs, order);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto ctx = std::shared_ptr<const JetContext>(new JetContext(n_pairs, order));
    cache[key] = ctx;
    return ctx;
}

class Jet {
public:
    std::shared_ptr<const JetContext> ctx;
    std::vector<cplx> c;

    Jet() = default;
    explicit Jet(std::shared_ptr<const JetContext> context)
        : ctx(std::move(context)), c(ctx->size(), cplx(0.0)) {}

    static Jet constant(std::shared_ptr<const JetContext> ctx, cplx v) {
        Jet j(std::move(ctx));
        j.c[0] = v;
        return j;
    }
    // z_idx + (z - z_idx): the holomorphic coordinate shifted to base value v
    static Jet variable(std::shared_ptr<const JetContext> ctx, int idx, cplx v) {
        Jet j(std::move(ctx));
        j.c[0] = v;
        jet_exponents e{};
        e[idx] = 1;
        j.c[j.ctx->rank(e)] = 1.0;
        return j;
    }
    static Jet conj_variable(std::shared_ptr<const JetContext> ctx, int idx, cplx v) {
        Jet j(std::move(ctx));
        j.c[0] = std::conj(v);
        jet_exponents e{};
        e[j.ctx->n_pairs + idx] = 1;
        j.c[j.ctx->rank(e)] = 1.0;
        return j;
    }

    cplx value() const { return c[0]; }
    int order() const { return ctx->order; }
    int n_pairs() const { return ctx->n_pairs; }

    void check_same(const Jet& o) const {
        if (ctx.get() != o.ctx.get())
            throw invalid_argument_error("jet arithmetic: operands use different contexts");
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    a.check_same(b);
    Jet r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i)
        r.c[i] += b.c[i];
    return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
    a.check_same(b);
    Jet r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i)
        r.c[i] -= b.c[i];
    return r;
}
inline Jet operator-(const Jet& a) {
    Jet r = a;
    for (auto& x : r.c)
        x = -x;
    return r;
}
inline Jet operator*(const Jet& a, cplx s) {
    Jet r = a;
    for (auto& x : r.c)
        x *= s;
    return r;
}
inline Jet operator*(cplx s, const Jet& a) { return a * s; }
inline Jet operator+(const Jet& a, cplx s) {
    Jet r = a;
    r.c[0] += s;
    return r;
}
inline Jet operator+(cplx s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, cplx s) { return a + (-s); }
inline Jet operator-(cplx s, const Jet& a) { return (-a) + s; }

inline Jet operator*(const Jet& a, const Jet& b) {
    a.check_same(b);
    const JetContext& C = *a.ctx;
    Jet r(a.ctx);
    const int K = C.order;
    for (int i = 0; i < C.size(); ++i) {
        const cplx ai = a.c[i];
        if (ai == 0.0)
            continue;
        const int di = C.degree_of[i];
        const int jmax = C.degree_offset[K - di + 1];
        const auto& ei = C.exps[i];
        for (int j = 0; j < jmax; ++j) {
            const cplx bj = b.c[j];
            if (bj == 0.0)
                continue;
            jet_exponents e = C.exps[j];
            for (int t = 0; t < 2 * C.n_pairs; ++t)
                e[t] = (std::uint8_t)(e[t] + ei[t]);
            r.c[C.rank(e)] += ai * bj;
        }
    }
    return r;
}

// integer power by repeated multiplication (exponents here are small)
inline Jet pow_int(const Jet& a, int k) {
    if (k < 0)
        throw invalid_argument_error("pow_int: negative exponent, use jet_reciprocal");
    Jet r = Jet::constant(a.ctx, 1.0);
    Jet base = a;
    while (k > 0) {
        if (k & 1)
            r = r * base;
        base = (k >>= 1) ? base * base : base;
    }
    return r;
}

// f = c + g with g the zero-constant part; unary functions go through the
// scalar head c and a finite series in the nilpotent part g.
namespace detail {
inline void split_head(const Jet& f, cplx& head, Jet& tail) {
    head = f.c[0];
    tail = f;
    tail.c[0] = 0.0;
}
template <class CoefFn>
Jet head_series(const Jet& f, cplx c0, CoefFn coef) {
    // returns sum_k coef(k) * g^k for g = f - head
    cplx head;
    Jet g(f.ctx);
    detail::split_head(f, head, g);
    (void)c0;
    Jet acc = Jet::constant(f.ctx, coef(0));
    Jet gp = Jet::constant(f.ctx, 1.0);
    for (int k = 1; k <= f.order(); ++k) {
        gp = gp * g;
        acc = acc + gp * coef(k);
    }
    return acc;
}
} // namespace detail

inline Jet jet_reciprocal(const Jet& f) {
    cplx c = f.c[0];
    if (std::abs(c) == 0.0)
        throw numeric_error("jet reciprocal: constant term vanishes");
    // 1/(c+g) = (1/c) sum (-g/c)^k
    cplx inv = 1.0 / c;
    std::vector<cplx> coefs(f.order() + 1);
    cplx cur = inv;
    for (int k = 0; k <= f.order(); ++k) {
        coefs[k] = cur;
        cur *= -inv;
    }
    return detail::head_series(f, c, [&](int k) { return coefs[k]; });
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * jet_reciprocal(b); }
inline Jet operator/(const Jet& a, cplx s) { return a * (1.0 / s); }
inline Jet operator/(cplx s, const Jet& a) { return jet_reciprocal(a) * s; }

inline Jet jet_log(const Jet& f) {
    cplx c = f.c[0];
    if (std::abs(c) == 0.0)
        throw numeric_error("jet log: constant term vanishes");
    // log(c+g) = log c + sum_{k>=1} (-1)^{k+1} (g/c)^k / k   (principal branch)
    cplx logc = std::log(c);
    cplx inv = 1.0 / c;
    std::vector<cplx> coefs(f.order() + 1);
    coefs[0] = logc;
    cplx p = inv;
    for (int k = 1; k <= f.order(); ++k) {
        coefs[k] = (k % 2 ? p : -p) / (double)k;
        p *= inv;
    }
    return detail::head_series(f, c, [&](int k) { return coefs[k]; });
}

inline Jet jet_exp(const Jet& f) {
    cplx e = std::exp(f.c[0]);
    std::vector<cplx> coefs(f.order() + 1);
    double fact = 1.0;
    for (int k = 0; k <= f.order(); ++k) {
        if (k > 0)
            fact *= k;
        coefs[k] = e / fact;
    }
    return detail::head_series(f, f.c[0], [&](int k) { return coefs[k]; });
}

// real exponent r (integer and half-integer are the intended uses)
inline Jet jet_pow(const Jet& f, double r) {
    if (r == std::floor(r) && r >= 0 && r <= 64)
        return pow_int(f, (int)r);
    cplx c = f.c[0];
    if (std::abs(c) == 0.0)
        throw numeric_error("jet pow: constant term vanishes for non-integer exponent");
    cplx cr = std::pow(c, r);
    cplx inv = 1.0 / c;
    std::vector<cplx> coefs(f.order() + 1);
    cplx binom = 1.0; // binom(r, k) * c^{-k}, built incrementally
    for (int k = 0; k <= f.order(); ++k) {
        coefs[k] = cr * binom;
        binom *= (r - (double)k) / (double)(k + 1) * inv;
    }
    return detail::head_series(f, c, [&](int k) { return coefs[k]; });
}

inline Jet jet_sqrt(const Jet& f) { return jet_pow(f, 0.5); }

inline Jet jet_conj(const Jet& a) {
    Jet r(a.ctx);
    const JetContext& C = *a.ctx;
    const int n = C.n_pairs;
    for (int i = 0; i < C.size(); ++i) {
        jet_exponents e = C.exps[i];
        for (int t = 0; t < n; ++t)
            std::swap(e[t], e[n + t]);
        r.c[C.rank(e)] = std::conj(a.c[i]);
    }
    return r;
}

// d/dz_idx (conj = false) or d/dzbar_idx (conj = true); order drops by one.
inline Jet jet_derivative(const Jet& a, int idx, bool conj_var = false) {
    const JetContext& C = *a.ctx;
    if (C.order == 0)
        throw invalid_argument_error("jet derivative: order 0 jet");
    auto nctx = JetContext::get(C.n_pairs, C.order - 1);
    Jet r(nctx);
    const int slot = conj_var ? C.n_pairs + idx : idx;
    for (int i = 0; i < nctx->size(); ++i) {
        jet_exponents e = nctx->exps[i];
        e[slot] = (std::uint8_t)(e[slot] + 1);
        r.c[i] = a.c[C.rank(e)] * (double)e[slot];
    }
    return r;
}

inline Jet jet_truncate(const Jet& a, int order) {
    if (order > a.order())
        throw invalid_argument_error("jet truncate: target order exceeds source order");
    if (order == a.order())
        return a;
    auto nctx = JetContext::get(a.n_pairs(), order);
    Jet r(nctx);
    for (int i = 0; i < nctx->size(); ++i)
        r.c[i] = a.c[a.ctx->rank(nctx->exps[i])];
    return r;
}

// d^{alpha}_z d^{beta}_zbar f at the base point (coefficient times alpha! beta!).
inline cplx wirtinger(const Jet& a, const std::vector<int>& alpha, const std::vector<int>& beta) {
    const JetContext& C = *a.ctx;
    if ((int)alpha.size() != C.n_pairs || (int)beta.size() != C.n_pairs)
        throw invalid_argument_error("wirtinger: index length mismatch");
    jet_exponents e{};
    double fact = 1.0;
    int total = 0;
    for (int i = 0; i < C.n_pairs; ++i) {
        e[i] = (std::uint8_t)alpha[i];
        e[C.n_pairs + i] = (std::uint8_t)beta[i];
        total += alpha[i] + beta[i];
        for (int k = 2; k <= alpha[i]; ++k)
            fact *= k;
        for (int k = 2; k <= beta[i]; ++k)
            fact *= k;
    }
    if (total > C.order)
        throw invalid_argument_error("wirtinger: requested order exceeds jet order");
    return a.c[C.rank(e)] * fact;
}

inline Jet jet_real(const Jet& a) { return (a + jet_conj(a)) * 0.5; }

// Substitute jets for the displacement variables of f: given f expanded at
// some base, and jets dz_j, dzbar_j (zero constant term, all in one target
// context) representing z_j - base_j and its conjugate in new variables,
// return the jet of the composite.  Requires f.order() >= target order.
inline Jet jet_compose(const Jet& f, const std::vector<Jet>& dz, const std::vector<Jet>& dzbar) {
    if ((int)dz.size() != f.n_pairs() || (int)dzbar.size() != f.n_pairs())
        throw invalid_argument_error("jet_compose: argument count mismatch");
    auto tctx = dz[0].ctx;
    if (f.order() < tctx->order)
        throw invalid_argument_error("jet_compose: source jet order too low for target");
    for (auto const* group : {&dz, &dzbar})
        for (auto const& d : *group)
            if (std::abs(d.value()) > 1e-9)
                throw invalid_argument_error("jet_compose: displacement jet has nonzero constant term");
    const int n = f.n_pairs();
    const int K = tctx->order;
    // powers[v][k] = (v-th displacement)^k in the target context
    std::vector<std::vector<Jet>> powers(2 * n);
    for (int v = 0; v < 2 * n; ++v) {
        const Jet& base = v < n ? dz[v] : dzbar[v - n];
        powers[v].push_back(Jet::constant(tctx, 1.0));
        for (int k = 1; k <= K; ++k)
            powers[v].push_back(powers[v][k - 1] * base);
    }
    Jet r(tctx);
    const JetContext& C = *f.ctx;
    for (int i = 0; i < C.size(); ++i) {
        if (C.degree_of[i] > K)
            break; // higher-degree terms cannot reach the truncated target
        if (f.c[i] == 0.0)
            continue;
        Jet term = Jet::constant(tctx, f.c[i]);
        for (int v = 0; v < 2 * n; ++v)
            if (C.exps[i][v])
                term = term * powers[v][C.exps[i][v]];
        r = r + term;
    }
    return r;
}

// max |c(alpha,beta) - conj(c(beta,alpha))|: zero for jets of real functions
inline double reality_defect(const Jet& a) {
    double worst = 0.0;
    Jet cj = jet_conj(a);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        worst = std::max(worst, std::abs(a.c[i] - cj.c[i]));
    return worst;
}

inline double max_abs_coeff(const Jet& a) {
    double m = 0.0;
    for (auto& x : a.c)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace szk
