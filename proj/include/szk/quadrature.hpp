// Fixed-order quadrature building blocks: Gauss-Legendre rules on [0,1]
// (cached, Newton on the Legendre recurrence), integration over the unit
// simplex in barycentric coordinates through the Duffy product map, and the
// periodic trapezoid rule with compensated accumulation.
#pragma once

#include "common.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace szk {

struct QuadRule {
    std::vector<double> x, w; // nodes and weights on [0,1]
};

inline const QuadRule& gauss_legendre(int order) {
    if (order < 1 || order > 4096)
        throw invalid_argument_error("gauss_legendre: order out of range");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end())
        return *it->second;

    auto rule = std::make_unique<QuadRule>();
    rule->x.resize(order);
    rule->w.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // root of P_order on (-1,1), refined by Newton
        double z = std::cos(pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15)
                break;
        }
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        rule->x[i] = 0.5 * (1.0 - z);
        rule->x[order - 1 - i] = 0.5 * (1.0 + z);
        rule->w[i] = 0.5 * wi;
        rule->w[order - 1 - i] = 0.5 * wi;
    }
    auto* ptr = rule.get();
    cache.emplace(order, std::move(rule));
    return *ptr;
}

// integral over the standard simplex { t in R^{n+1} : t_j >= 0, sum t_j = 1 }
// with respect to Lebesgue measure of its n-dimensional parametrization
// t_{n+1} = 1 - t_1 - ... - t_n; f receives the full barycentric tuple.
inline double integrate_simplex(int n, const std::function<double(const double*)>& f, int order) {
    const QuadRule& q = gauss_legendre(order);
    compensated_sum acc;
    double t[4];
    if (n == 1) {
        for (int i = 0; i < order; ++i) {
            t[0] = q.x[i];
            t[1] = 1.0 - q.x[i];
            acc.add(q.w[i] * f(t));
        }
    } else if (n == 2) {
        for (int i = 0; i < order; ++i) {
            const double u = q.x[i];
            for (int j = 0; j < order; ++j) {
                const double v = q.x[j];
                t[0] = u;
                t[1] = (1.0 - u) * v;
                t[2] = (1.0 - u) * (1.0 - v);
                acc.add(q.w[i] * q.w[j] * (1.0 - u) * f(t));
            }
        }
    } else if (n == 3) {
        for (int i = 0; i < order; ++i) {
            const double u = q.x[i];
            for (int j = 0; j < order; ++j) {
                const double v = q.x[j];
                for (int k = 0; k < order; ++k) {
                    const double w = q.x[k];
                    t[0] = u;
                    t[1] = (1.0 - u) * v;
                    t[2] = (1.0 - u) * (1.0 - v) * w;
                    t[3] = (1.0 - u) * (1.0 - v) * (1.0 - w);
                    acc.add(q.w[i] * q.w[j] * q.w[k] * sqr(1.0 - u) * (1.0 - v) * f(t));
                }
            }
        }
    } else {
        throw invalid_argument_error("integrate_simplex: dimension must be 1..3");
    }
    return acc.value();
}

// trapezoid rule for a period-T function: sum_{k} f(k T/N) * (T/N);
// spectrally accurate for smooth periodic integrands
inline cplx trapezoid_periodic(const std::function<cplx(double)>& f, int N,
                               double period = 2.0 * pi) {
    if (N < 1)
        throw invalid_argument_error("trapezoid_periodic: N must be positive");
    compensated_sum re, im;
    const double h = period / N;
    for (int k = 0; k < N; ++k) {
        cplx v = f(k * h);
        re.add(v.real());
        im.add(v.imag());
    }
    return cplx(re.value() * h, im.value() * h);
}

} // namespace szk
