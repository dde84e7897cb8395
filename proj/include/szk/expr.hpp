// Small expression trees over the variables z_j, zbar_j and one extra scalar
// unknown u.  Used for chart data given in closed form, for implicit profile
// functions (Newton in jet arithmetic), and for coordinate transitions where
// the same formula has to be evaluated on jets, on plain numbers, and
// differentiated symbolically.
#pragma once

#include "jets.hpp"

#include <functional>

namespace szk {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum Kind { KConst, KZ, KZbar, KU, KAdd, KMul, KDiv, KPow, KExp, KLog, KNeg };
    Kind kind;
    cplx cval{};   // KConst
    int index = 0; // KZ / KZbar
    double expo = 0.0; // KPow
    ExprPtr a, b;
};

inline ExprPtr ex_const(cplx v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KConst;
    e->cval = v;
    return e;
}
inline ExprPtr ex_z(int j) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KZ;
    e->index = j;
    return e;
}
inline ExprPtr ex_zbar(int j) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KZbar;
    e->index = j;
    return e;
}
inline ExprPtr ex_u() {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KU;
    return e;
}

inline bool ex_is_const(const ExprPtr& e, cplx v) {
    return e->kind == Expr::KConst && e->cval == v;
}

inline ExprPtr ex_add(ExprPtr a, ExprPtr b) {
    if (ex_is_const(a, 0.0))
        return b;
    if (ex_is_const(b, 0.0))
        return a;
    if (a->kind == Expr::KConst && b->kind == Expr::KConst)
        return ex_const(a->cval + b->cval);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KAdd;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
inline ExprPtr ex_neg(ExprPtr a) {
    if (a->kind == Expr::KConst)
        return ex_const(-a->cval);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KNeg;
    e->a = std::move(a);
    return e;
}
inline ExprPtr ex_sub(ExprPtr a, ExprPtr b) { return ex_add(std::move(a), ex_neg(std::move(b))); }
inline ExprPtr ex_mul(ExprPtr a, ExprPtr b) {
    if (ex_is_const(a, 0.0) || ex_is_const(b, 0.0))
        return ex_const(0.0);
    if (ex_is_const(a, 1.0))
        return b;
    if (ex_is_const(b, 1.0))
        return a;
    if (a->kind == Expr::KConst && b->kind == Expr::KConst)
        return ex_const(a->cval * b->cval);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KMul;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
inline ExprPtr ex_div(ExprPtr a, ExprPtr b) {
    if (ex_is_const(a, 0.0))
        return ex_const(0.0);
    if (ex_is_const(b, 1.0))
        return a;
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KDiv;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
inline ExprPtr ex_pow(ExprPtr a, double r) {
    if (r == 0.0)
        return ex_const(1.0);
    if (r == 1.0)
        return a;
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KPow;
    e->a = std::move(a);
    e->expo = r;
    return e;
}
inline ExprPtr ex_exp(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KExp;
    e->a = std::move(a);
    return e;
}
inline ExprPtr ex_log(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::KLog;
    e->a = std::move(a);
    return e;
}

// |z_j|^2 as z_j zbar_j
inline ExprPtr ex_abs2(int j) { return ex_mul(ex_z(j), ex_zbar(j)); }

// ---- evaluation on jets ----
//
// z and zbar bindings are supplied separately so that composed (non
// coordinate) bindings work: for a pullback through a holomorphic map H the
// caller binds z_j -> jet of H_j and zbar_j -> conj of that jet.
struct JetBindings {
    std::vector<Jet> z;
    std::vector<Jet> zbar;
    const Jet* u = nullptr;
};

inline JetBindings coordinate_bindings(const std::shared_ptr<const JetContext>& ctx,
                                       const std::vector<cplx>& z0) {
    JetBindings b;
    for (int j = 0; j < (int)z0.size(); ++j) {
        b.z.push_back(Jet::variable(ctx, j, z0[j]));
        b.zbar.push_back(Jet::conj_variable(ctx, j, z0[j]));
    }
    return b;
}

inline Jet eval_jet(const ExprPtr& e, const std::shared_ptr<const JetContext>& ctx,
                    const JetBindings& bind) {
    switch (e->kind) {
    case Expr::KConst:
        return Jet::constant(ctx, e->cval);
    case Expr::KZ:
        if (e->index >= (int)bind.z.size())
            throw invalid_argument_error("eval_jet: unbound variable");
        return bind.z[e->index];
    case Expr::KZbar:
        if (e->index >= (int)bind.zbar.size())
            throw invalid_argument_error("eval_jet: unbound conjugate variable");
        return bind.zbar[e->index];
    case Expr::KU:
        if (!bind.u)
            throw invalid_argument_error("eval_jet: unbound u");
        return *bind.u;
    case Expr::KAdd:
        return eval_jet(e->a, ctx, bind) + eval_jet(e->b, ctx, bind);
    case Expr::KMul:
        return eval_jet(e->a, ctx, bind) * eval_jet(e->b, ctx, bind);
    case Expr::KDiv:
        return eval_jet(e->a, ctx, bind) / eval_jet(e->b, ctx, bind);
    case Expr::KPow:
        return jet_pow(eval_jet(e->a, ctx, bind), e->expo);
    case Expr::KExp:
        return jet_exp(eval_jet(e->a, ctx, bind));
    case Expr::KLog:
        return jet_log(eval_jet(e->a, ctx, bind));
    case Expr::KNeg:
        return -eval_jet(e->a, ctx, bind);
    }
    throw invalid_argument_error("eval_jet: bad node");
}

// ---- evaluation on plain numbers ----
inline cplx eval_scalar(const ExprPtr& e, const std::vector<cplx>& z, cplx u = 0.0) {
    switch (e->kind) {
    case Expr::KConst:
        return e->cval;
    case Expr::KZ:
        return z[e->index];
    case Expr::KZbar:
        return std::conj(z[e->index]);
    case Expr::KU:
        return u;
    case Expr::KAdd:
        return eval_scalar(e->a, z, u) + eval_scalar(e->b, z, u);
    case Expr::KMul:
        return eval_scalar(e->a, z, u) * eval_scalar(e->b, z, u);
    case Expr::KDiv:
        return eval_scalar(e->a, z, u) / eval_scalar(e->b, z, u);
    case Expr::KPow:
        return std::pow(eval_scalar(e->a, z, u), e->expo);
    case Expr::KExp:
        return std::exp(eval_scalar(e->a, z, u));
    case Expr::KLog:
        return std::log(eval_scalar(e->a, z, u));
    case Expr::KNeg:
        return -eval_scalar(e->a, z, u);
    }
    throw invalid_argument_error("eval_scalar: bad node");
}

// ---- symbolic derivatives (Wirtinger: z_j, zbar_j independent; u independent) ----
struct VarRef {
    enum Which { Z, Zbar, U } which;
    int index = 0;
};

inline ExprPtr ex_derivative(const ExprPtr& e, VarRef v) {
    switch (e->kind) {
    case Expr::KConst:
        return ex_const(0.0);
    case Expr::KZ:
        return ex_const(v.which == VarRef::Z && v.index == e->index ? 1.0 : 0.0);
    case Expr::KZbar:
        return ex_const(v.which == VarRef::Zbar && v.index == e->index ? 1.0 : 0.0);
    case Expr::KU:
        return ex_const(v.which == VarRef::U ? 1.0 : 0.0);
    case Expr::KAdd:
        return ex_add(ex_derivative(e->a, v), ex_derivative(e->b, v));
    case Expr::KMul:
        return ex_add(ex_mul(ex_derivative(e->a, v), e->b), ex_mul(e->a, ex_derivative(e->b, v)));
    case Expr::KDiv: {
        auto da = ex_derivative(e->a, v);
        auto db = ex_derivative(e->b, v);
        return ex_sub(ex_div(da, e->b), ex_div(ex_mul(e->a, db), ex_mul(e->b, e->b)));
    }
    case Expr::KPow: {
        auto da = ex_derivative(e->a, v);
        return ex_mul(ex_mul(ex_const(e->expo), ex_pow(e->a, e->expo - 1.0)), da);
    }
    case Expr::KExp: {
        ExprPtr self = std::make_shared<Expr>(*e);
        return ex_mul(self, ex_derivative(e->a, v));
    }
    case Expr::KLog:
        return ex_div(ex_derivative(e->a, v), e->a);
    case Expr::KNeg:
        return ex_neg(ex_derivative(e->a, v));
    }
    throw invalid_argument_error("ex_derivative: bad node");
}

inline ExprPtr ex_d_z(const ExprPtr& e, int j) { return ex_derivative(e, {VarRef::Z, j}); }
inline ExprPtr ex_d_zbar(const ExprPtr& e, int j) { return ex_derivative(e, {VarRef::Zbar, j}); }
inline ExprPtr ex_d_u(const ExprPtr& e) { return ex_derivative(e, {VarRef::U, 0}); }

// ---- implicit profile: solve E(z, zbar, u) = 0 for u as a jet ----
//
// Scalar Newton from the seed pins the constant term, then Newton in jet
// arithmetic doubles the number of correct orders per step.
inline Jet newton_jet_solve(const ExprPtr& E, const std::shared_ptr<const JetContext>& ctx,
                            JetBindings bind, double u_seed,
                            double tol = 1e-13, int max_scalar_iters = 60) {
    ExprPtr Eu = ex_d_u(E);
    std::vector<cplx> z0;
    for (auto& zj : bind.z)
        z0.push_back(zj.value());
    cplx u = u_seed;
    bool ok = false;
    for (int it = 0; it < max_scalar_iters; ++it) {
        cplx f = eval_scalar(E, z0, u);
        if (std::abs(f) < tol) {
            ok = true;
            break;
        }
        cplx df = eval_scalar(Eu, z0, u);
        if (std::abs(df) == 0.0)
            throw numeric_error("newton_jet_solve: zero derivative at scalar stage");
        u -= f / df;
    }
    if (!ok && std::abs(eval_scalar(E, z0, u)) >= tol)
        throw numeric_error("newton_jet_solve: scalar stage did not converge");

    Jet uj = Jet::constant(ctx, u);
    int steps = 2;
    for (int k = 1; k < ctx->order + 1; k *= 2)
        ++steps;
    for (int it = 0; it < steps; ++it) {
        bind.u = &uj;
        Jet f = eval_jet(E, ctx, bind);
        Jet df = eval_jet(Eu, ctx, bind);
        uj = uj - f / df;
    }
    bind.u = &uj;
    double resid = max_abs_coeff(eval_jet(E, ctx, bind));
    if (!(resid < 1e-9))
        throw numeric_error("newton_jet_solve: jet residual " + std::to_string(resid));
    return uj;
}

} // namespace szk
