#pragma once

#include "fewbody/nbody.hpp"
#include "fewbody/quadrature.hpp"

namespace fewbody {

struct InequalityReport {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;
    bool pass = false;
    std::string instance;

    static InequalityReport make(std::string name, double lhs, double rhs, std::string instance,
                                 double tolerance = 1e-12) {
        InequalityReport r;
        r.name = std::move(name);
        r.lhs = lhs;
        r.rhs = rhs;
        r.ratio = rhs > 0 ? lhs / rhs : (lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());
        r.pass = lhs <= rhs * (1.0 + tolerance) + tolerance;
        r.instance = std::move(instance);
        return r;
    }
};

// ---- fermionic Hardy inequality ------------------------------------------------------

// sum_{i<j} int |psi|^2 / |x_i - x_j|^2 <= (N/d^2) ||grad psi||^2 for antisymmetric psi.
// Nodes with x_i = x_j are skipped: antisymmetric fields vanish there.
inline InequalityReport hardy_check(const Field& psi, int N, int d) {
    const Grid& g = psi.grid;
    if (g.num_particles != N || g.dim_per_particle != d)
        throw std::invalid_argument("hardy_check: grid shape does not match (N, d)");
    const double L = g.box_half_length, h = g.spacing();
    double lhs = 0;
    std::vector<int> j(g.ndim());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double a2 = std::norm(psi.values[i]);
        if (a2 == 0) continue;
        decode_index(g, i, j.data());
        double wsum = 0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) {
                double r2 = 0;
                for (int a = 0; a < d; ++a) {
                    const double ra = detail::wrap_to_box((j[p * d + a] - j[q * d + a]) * h, L);
                    r2 += ra * ra;
                }
                if (r2 > 0) wsum += 1.0 / r2;
            }
        lhs += a2 * wsum;
    }
    lhs *= g.cell_volume();
    Field lap = apply_multiplier(psi, [&](const double* k) {
        double k2 = 0;
        for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
        return k2;
    });
    const double grad_sq = std::real(inner(psi, lap));
    const double rhs = static_cast<double>(N) / (d * d) * grad_sq;
    return InequalityReport::make("hardy", lhs, rhs,
                                  "N=" + std::to_string(N) + " d=" + std::to_string(d) +
                                      " n=" + std::to_string(g.points_per_axis));
}

// ---- log-Holder embedding (d = 2) ----------------------------------------------------

// exact point evaluation of a band-limited grid field by its Fourier mode sum
inline double eval_band_limited(const Field& u, const double* x) {
    const Grid& g = u.grid;
    std::vector<cplx> uh = fft_forward(u);
    std::vector<int> j(g.ndim());
    cplx val = 0;
    const double c0 = g.coord(0); // phases are referenced to the first node
    for (std::size_t i = 0; i < uh.size(); ++i) {
        decode_index(g, i, j.data());
        double phase = 0;
        for (int a = 0; a < g.ndim(); ++a) phase += g.wavenumber(j[a]) * (x[a] - c0);
        val += uh[i] * std::exp(cplx{0, phase});
    }
    return std::abs(val / static_cast<double>(g.size()));
}

// |u(x+y) - u(x)| <= (1/(2 sqrt(pi))) |y| (2 + |log|y||)^{1/2} (||Du||^2 + ||grad u||^2)^{1/2}
inline InequalityReport log_holder_check(const Field& u, const double* x, const double* y) {
    const Grid& g = u.grid;
    if (g.dim_per_particle != 2 || g.num_particles != 1)
        throw std::invalid_argument("log_holder_check: needs a single d=2 block");
    const double ynorm = std::hypot(y[0], y[1]);
    if (ynorm == 0) throw std::invalid_argument("log_holder_check: y must be nonzero");
    const Grid gg = g;
    std::vector<cplx> uh = fft_forward(u);
    std::vector<int> j(g.ndim());
    cplx ux = 0, uxy = 0;
    double lap_sq = 0, grad_sq = 0;
    const double invvol = 1.0 / g.size();
    for (std::size_t i = 0; i < uh.size(); ++i) {
        decode_index(gg, i, j.data());
        const double k0 = gg.wavenumber(j[0]), k1 = gg.wavenumber(j[1]);
        const double k2 = k0 * k0 + k1 * k1;
        const double c0 = gg.coord(0); // phases are referenced to the first node
        double px = k0 * (x[0] - c0) + k1 * (x[1] - c0);
        ux += uh[i] * std::exp(cplx{0, px}) * invvol;
        uxy += uh[i] * std::exp(cplx{0, px + k0 * y[0] + k1 * y[1]}) * invvol;
        const double c2 = std::norm(uh[i]) * invvol * gg.cell_volume();
        lap_sq += k2 * k2 * c2;
        grad_sq += k2 * c2;
    }
    const double lhs = std::abs(uxy - ux);
    const double rhs = ynorm * std::sqrt(2.0 + std::abs(std::log(ynorm))) *
                       std::sqrt(lap_sq + grad_sq) / (2.0 * std::sqrt(M_PI));
    return InequalityReport::make("log_holder", lhs, rhs,
                                  "|y|=" + std::to_string(ynorm) +
                                      " n=" + std::to_string(g.points_per_axis));
}

// ---- cutoff sequences (Lemma on removable sets) --------------------------------------

// profile g: smooth monotone 1 -> 0 on [0,1], built from the normalized integral of the
// bump b(t) = exp(-1/(t(1-t)))
struct CutoffProfile {
    double bump_integral = 0;   // int_0^1 b
    double int_g1_sq = 0;       // int_0^1 g'^2
    double int_g2_sq = 0;       // int_0^1 g''^2

    static double bump(double t) {
        if (t <= 0 || t >= 1) return 0;
        return std::exp(-1.0 / (t * (1.0 - t)));
    }
    static double bump_d1(double t) {
        if (t <= 0 || t >= 1) return 0;
        const double s = t * (1.0 - t);
        return bump(t) * (1.0 - 2.0 * t) / (s * s);
    }

    double value(double s) const {
        if (s <= 0) return 1.0;
        if (s >= 1) return 0.0;
        return 1.0 - integrate([](double t) { return bump(t); }, 0, s, 1e-12) / bump_integral;
    }
    double d1(double s) const {
        if (s <= 0 || s >= 1) return 0;
        return -bump(s) / bump_integral;
    }
    double d2(double s) const {
        if (s <= 0 || s >= 1) return 0;
        return -bump_d1(s) / bump_integral;
    }
};

inline const CutoffProfile& builtin_profile() {
    static const CutoffProfile p = [] {
        CutoffProfile q;
        q.bump_integral = integrate([](double t) { return CutoffProfile::bump(t); }, 0, 1, 1e-13);
        CutoffProfile withb = q;
        q.int_g1_sq =
            integrate([&](double s) { const double d = withb.d1(s); return d * d; }, 0, 1, 1e-12);
        q.int_g2_sq =
            integrate([&](double s) { const double d = withb.d2(s); return d * d; }, 0, 1, 1e-12);
        return q;
    }();
    return p;
}

// u_n: radial cutoff equal to 1 near the origin with shrinking support.
// d >= 3: u_n(x) = g(n|x| - 1), support |x| <= 2/n.
// d = 2:  u_n(x) = g(log(n|x|)/log log n), support |x| <= (log n)/n, and the gradient /
// weighted-Laplacian integrals obey the exact log log n laws.
struct CutoffSequence {
    int d = 2;
    double n = 16;
    const CutoffProfile* profile = &builtin_profile();

    double inner_radius() const { return 1.0 / n; }
    double outer_radius() const { return d == 2 ? std::log(n) / n : 2.0 / n; }

    double s_of(double r) const {
        return d == 2 ? std::log(n * r) / std::log(std::log(n)) : n * r - 1.0;
    }
    double value(double r) const { return profile->value(s_of(r)); }
    double d1(double r) const {
        const double lam = d == 2 ? std::log(std::log(n)) : 1.0;
        return d == 2 ? profile->d1(s_of(r)) / (lam * r) : n * profile->d1(s_of(r));
    }
    double d2(double r) const {
        if (d == 2) {
            const double lam = std::log(std::log(n));
            const double s = s_of(r);
            return profile->d2(s) / (lam * lam * r * r) - profile->d1(s) / (lam * r * r);
        }
        return n * n * profile->d2(s_of(r));
    }
};

inline CutoffSequence cutoff_sequence(int d, double n) {
    if (d < 2 || d > 3) throw std::invalid_argument("cutoff_sequence: d must be 2 or 3");
    if (n < 16) throw std::invalid_argument("cutoff_sequence: n must be >= 16");
    return CutoffSequence{d, n, &builtin_profile()};
}

struct CutoffIntegrals {
    double grad_sq = 0;          // int |grad u_n|^2
    double weighted_lap_sq = 0;  // int |x|^2 |Lap u_n|^2
    double grad_sq_predicted = 0;         // d = 2 closed form, else 0
    double weighted_lap_sq_predicted = 0;
};

inline CutoffIntegrals cutoff_integrals(const CutoffSequence& seq) {
    const int d = seq.d;
    const double area = detail::sphere_area(d);
    CutoffIntegrals out;
    const double a = seq.inner_radius(), b = seq.outer_radius();
    out.grad_sq = area * integrate([&](double r) {
        const double du = seq.d1(r);
        return du * du * std::pow(r, d - 1);
    }, a, b, 1e-10);
    out.weighted_lap_sq = area * integrate([&](double r) {
        const double lap = seq.d2(r) + (d - 1) * seq.d1(r) / r;
        return r * r * lap * lap * std::pow(r, d - 1);
    }, a, b, 1e-10);
    if (d == 2) {
        const double lam = std::log(std::log(seq.n));
        out.grad_sq_predicted = 2.0 * M_PI * seq.profile->int_g1_sq / lam;
        out.weighted_lap_sq_predicted = 2.0 * M_PI * seq.profile->int_g2_sq / (lam * lam * lam);
    }
    return out;
}

// ---- Vandermonde trace (the d = 1 counterexample) ------------------------------------

// psi = e^{-|x|^2} prod_{i<j} (x_j - x_i) in d = 1; its trace on {x_1 = x_2} vanishes but
// the trace of d psi / d x_1 does not.
inline double vandermonde_psi(int N, const double* x) {
    double v = 1.0, r2 = 0;
    for (int i = 0; i < N; ++i) {
        r2 += x[i] * x[i];
        for (int j = i + 1; j < N; ++j) v *= x[j] - x[i];
    }
    return std::exp(-r2) * v;
}

// analytic restriction of d psi / d x_1 to x_1 = x_2 = t, remaining coordinates in rest
inline double vandermonde_restriction(int N, double t, const double* rest) {
    double r2 = 2.0 * t * t, v = 1.0;
    for (int j = 0; j < N - 2; ++j) {
        r2 += rest[j] * rest[j];
        const double dj = rest[j] - t;
        v *= dj * dj; // (x_j - x_1)(x_j - x_2) at x_1 = x_2
        for (int i = j + 1; i < N - 2; ++i) v *= rest[i] - rest[j];
    }
    return -std::exp(-r2) * v;
}

// L^2 norm of the restricted derivative over the hyperplane, by tensor quadrature
inline double vandermonde_trace_check(int N, double box = 5.0) {
    if (N < 2 || N > 4) throw std::invalid_argument("vandermonde_trace_check: N must be 2..4");
    const int rest_dims = N - 2;
    const GaussRule& rule = gauss_legendre();
    const int panels = 24;
    std::vector<double> nodes, weights;
    const double hw = 2.0 * box / panels;
    for (int p = 0; p < panels; ++p)
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            nodes.push_back(-box + hw * (p + 0.5 * (rule.nodes[q] + 1.0)));
            weights.push_back(0.5 * hw * rule.weights[q]);
        }
    const std::size_t m = nodes.size();
    double sum = 0;
    std::vector<double> rest(std::max(rest_dims, 1));
    std::vector<std::size_t> idx(std::max(rest_dims, 1), 0);
    for (std::size_t it = 0; it < m; ++it) { // t = x_1 = x_2
        const double t = nodes[it];
        double inner_sum = 0;
        if (rest_dims == 0) {
            const double f = vandermonde_restriction(N, t, nullptr);
            inner_sum = f * f;
        } else {
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                double w = 1;
                for (int a = 0; a < rest_dims; ++a) {
                    rest[a] = nodes[idx[a]];
                    w *= weights[idx[a]];
                }
                const double f = vandermonde_restriction(N, t, rest.data());
                inner_sum += w * f * f;
                int a = 0;
                for (; a < rest_dims; ++a) {
                    if (++idx[a] < m) break;
                    idx[a] = 0;
                }
                if (a == rest_dims) break;
            }
        }
        sum += weights[it] * inner_sum;
    }
    return std::sqrt(sum);
}

// ---- strong-convergence criterion ----------------------------------------------------

// smooth collar: 0 within distance rho of the diagonal, 1 beyond 2 rho
inline double collar_value(double r, double rho) {
    return 1.0 - builtin_profile().value((r - rho) / rho);
}

// antisymmetric N = 2 field vanishing within distance rho of {x_1 = x_2}
inline Field make_collar_field(const Grid& g, double rho, std::uint64_t seed = 31) {
    if (g.num_particles != 2) throw std::invalid_argument("make_collar_field: needs N = 2");
    const int d = g.dim_per_particle;
    Field f = antisymmetrize(random_smooth_field(g, seed), 2, d);
    const double L = g.box_half_length, h = g.spacing();
    std::vector<int> j(g.ndim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        decode_index(g, i, j.data());
        double r2 = 0;
        for (int a = 0; a < d; ++a) {
            const double ra = detail::wrap_to_box((j[a] - j[d + a]) * h, L);
            r2 += ra * ra;
        }
        f.values[i] *= collar_value(std::sqrt(r2), rho);
    }
    return f;
}

struct StrongConvRow {
    double eps = 0;
    double lambda = 0;
    double value = 0; // lambda_eps * || V_{eps,12} phi ||
};

inline std::vector<StrongConvRow> strong_conv_check(const Field& phi, const PotentialSpec& spec,
                                                    const CouplingSchedule& schedule,
                                                    const std::vector<double>& eps_list) {
    const Grid& g = phi.grid;
    if (g.num_particles != 2) throw std::invalid_argument("strong_conv_check: needs N = 2");
    const int d = g.dim_per_particle;
    const double L = g.box_half_length, h = g.spacing();
    std::vector<StrongConvRow> rows;
    std::vector<int> j(g.ndim());
    for (double eps : eps_list) {
        StrongConvRow row;
        row.eps = eps;
        row.lambda = coupling_at(schedule, eps);
        double s = 0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double a2 = std::norm(phi.values[i]);
            if (a2 == 0) continue;
            decode_index(g, i, j.data());
            double r2 = 0;
            for (int a = 0; a < d; ++a) {
                const double ra = detail::wrap_to_box((j[a] - j[d + a]) * h, L);
                r2 += ra * ra;
            }
            const double v = evaluate_radial_capped(spec, std::sqrt(r2) / eps) / (eps * eps);
            s += v * v * a2;
        }
        row.value = row.lambda * std::sqrt(s * g.cell_volume());
        rows.push_back(row);
    }
    return rows;
}

} // namespace fewbody
