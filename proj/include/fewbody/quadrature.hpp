#pragma once

// Small quadrature toolbox: Gauss-Legendre panels with doubling-based
// refinement, geometric grading towards an endpoint singularity.

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace fewbody {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Nodes by Newton iteration on the Legendre polynomial.
inline const GaussRule& gauss_legendre(int n = 16) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule& rule = cache[n] = [m = n] {
        GaussRule r;
        r.nodes.resize(m);
        r.weights.resize(m);
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = m * (x * p1 - p0) / (x * x - 1);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = m * (x * p1 - p0) / (x * x - 1);
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <typename F>
double gauss_panel(F&& f, double a, double b) {
    const GaussRule& r = gauss_legendre();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

// Integrate over [a, b] on a fixed panel decomposition, doubling the number
// of uniform panels until the relative change drops below rel_tol.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-9, int max_doublings = 16) {
    double prev = gauss_panel(f, a, b);
    int panels = 2;
    for (int d = 0; d < max_doublings; ++d, panels *= 2) {
        double s = 0;
        const double w = (b - a) / panels;
        for (int p = 0; p < panels; ++p) s += gauss_panel(f, a + p * w, a + (p + 1) * w);
        if (std::abs(s - prev) <= rel_tol * std::max(std::abs(s), 1e-300)) return s;
        prev = s;
    }
    throw std::runtime_error("integrate: refinement did not converge (integrability failure?)");
}

// Integrate over (0, b] with geometric grading towards 0, for integrands with
// an integrable endpoint singularity. Panels [b*q^{k+1}, b*q^k].
template <typename F>
double integrate_graded(F&& f, double b, double rel_tol = 1e-9, int levels = 60) {
    double total = 0;
    double hi = b;
    for (int k = 0; k < levels; ++k) {
        const double lo = hi * 0.5;
        const double s = integrate(f, lo, hi, rel_tol);
        total += s;
        if (k > 4 && std::abs(s) <= rel_tol * std::abs(total)) break;
        hi = lo;
    }
    return total;
}

} // namespace fewbody
