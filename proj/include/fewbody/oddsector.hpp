#pragma once

#include "fewbody/lattice.hpp"
#include "fewbody/potentials.hpp"
#include "fewbody/quadrature.hpp"

namespace fewbody {

// f |-> v_eps R_0(z) P_odd f on a single d-dimensional block, with
// v_eps(x) = eps^{-d/2} |V(x/eps)|^{1/2}. Vanishes on even inputs by construction.
struct OddSectorOperator {
    Grid grid;
    PotentialSpec spec;
    double eps = 1.0;
    double z = 1.0;

    Field weight_field() const {
        const int d = grid.dim_per_particle;
        const double pref = std::pow(eps, -0.5 * d);
        return sample(grid, [&](const double* x) {
            double r2 = 0;
            for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
            return pref * std::sqrt(std::abs(evaluate_radial_capped(spec, std::sqrt(r2) / eps)));
        });
    }

    LinearMap to_map() const { return make_map(weight_field()); }

    // shared with the truncated variant: v R_0(z) P_odd for a given weight
    LinearMap make_map(Field v) const {
        const Grid g = grid;
        const double zz = z;
        auto resolvent = [g, zz](const Field& f) {
            return apply_multiplier(f, [&](const double* k) {
                double k2 = 0;
                for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
                return 1.0 / (k2 + zz);
            });
        };
        LinearMap m;
        m.descriptor = "v_eps R0(z) P_odd";
        m.apply = [v, resolvent](const Field& f) {
            Field out = resolvent(parity_project_odd(f, 0));
            for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= v.values[i];
            return out;
        };
        m.adjoint_apply = [v, resolvent](const Field& f) {
            Field out = f;
            for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= v.values[i];
            return parity_project_odd(resolvent(out), 0);
        };
        return m;
    }
};

inline double odd_norm(const PotentialSpec& spec, double eps, double z, const Grid& grid,
                       double tol = 1e-6) {
    if (z <= 0) throw std::invalid_argument("odd_norm: z must be positive");
    OddSectorOperator op{grid, spec, eps, z};
    LinearMap m = op.to_map();
    return operator_norm(m, grid, tol).value;
}

// Continuum radial evaluation of the same norm in d = 3. With T = v_eps R_0(z) P_odd,
// T T* = v_eps R_0^2 P_odd v_eps has the bounded kernel
//   v_eps(x) [g2(|x-y|) - g2(|x+y|)] v_eps(y) / 2,   g2(r) = e^{-sqrt(z) r} / (8 pi sqrt(z)),
// which in the scaled variable u = x/eps decomposes over odd spherical harmonics into
// smooth radial integral operators. No box, no grid cap: this reaches eps values the
// periodic grids cannot resolve, and is cross-checked against odd_norm at moderate eps.
inline double odd_norm_radial3(const PotentialSpec& spec, double eps, double z,
                               int points = 240, int lmax = 5) {
    if (z <= 0) throw std::invalid_argument("odd_norm_radial3: z must be positive");
    if (eps <= 0) throw std::invalid_argument("odd_norm_radial3: eps must be positive");
    if (points < 16) throw std::invalid_argument("odd_norm_radial3: too few radial points");
    const double a = eps * std::sqrt(z);
    // |V|^{1/2} decays at half the rate of V, so double its quadrature radius
    const double umax = 2.0 * spec.quadrature_radius();
    const double h = umax / points;
    std::vector<double> r(points), vr(points);
    for (int i = 0; i < points; ++i) {
        r[i] = (i + 0.5) * h;
        vr[i] = std::sqrt(std::abs(evaluate_radial(spec, r[i])));
    }
    const GaussRule& rule = gauss_legendre(48);
    const double pref = 1.0 / (16.0 * M_PI * std::sqrt(z));
    double best = 0;
    Eigen::MatrixXd A(points, points);
    std::vector<double> pl(lmax + 1);
    for (int l = 1; l <= lmax; l += 2) {
        for (int i = 0; i < points; ++i)
            for (int j = i; j < points; ++j) {
                // F_l(r, rho) = 2 pi int_{-1}^{1} P_l(t) g(sqrt(r^2 + rho^2 - 2 r rho t)) dt
                double fl = 0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    const double t = rule.nodes[q];
                    const double s = std::sqrt(std::max(0.0, r[i] * r[i] + r[j] * r[j] -
                                                                 2.0 * r[i] * r[j] * t));
                    pl[0] = 1.0;
                    pl[1] = t;
                    for (int k = 2; k <= l; ++k)
                        pl[k] = ((2 * k - 1) * t * pl[k - 1] - (k - 1) * pl[k - 2]) / k;
                    fl += rule.weights[q] * pl[l] * std::exp(-a * s);
                }
                fl *= 2.0 * M_PI * pref;
                // odd-parity combination doubles the odd-l term; symmetrized weight r rho h
                A(i, j) = A(j, i) = 2.0 * vr[i] * fl * vr[j] * r[i] * r[j] * h;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        best = std::max(best, es.eigenvalues().maxCoeff());
    }
    return std::sqrt(std::max(0.0, best));
}

// ---- epsilon sweeps ---------------------------------------------------------------

// Box fixed; n grows with 1/eps so the scaled potential stays resolved
// (>= min_nodes_across grid nodes across eps * width). Rows that would exceed
// max_points are flagged under-resolved, never silently included.
struct GridPolicy {
    double box_half_length = 8.0;
    int max_points = 4096;
    int min_nodes_across = 8;
};

struct NormSweepRow {
    double eps = 0;
    double z = 0;
    double norm = 0;
    double near_k = 0;   // filled by truncated sweeps
    double far_k = 0;
    int grid_n = 0;
    bool resolved = true;
    double refine_change = 0;  // relative change under n -> 2n, when affordable
};

struct NormSweepResult {
    double z = 0;
    std::vector<NormSweepRow> rows;
};

namespace detail {

inline int even_points_for(const GridPolicy& policy, double scaled_width) {
    const double h_needed = scaled_width / policy.min_nodes_across;
    int n = 2;
    while (2 * n <= policy.max_points && n * h_needed < 2.0 * policy.box_half_length) n *= 2;
    return n;
}

} // namespace detail

inline NormSweepResult sweep_odd_norm(const PotentialSpec& spec, int d,
                                      const std::vector<double>& eps_list, double z,
                                      const GridPolicy& policy, double tol = 1e-6) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (eps_list[i] >= eps_list[i - 1])
            throw std::invalid_argument("sweep_odd_norm: eps list must be decreasing");
    NormSweepResult out;
    out.z = z;
    for (double eps : eps_list) {
        NormSweepRow row;
        row.eps = eps;
        row.z = z;
        const double sw = eps * spec.width_scale();
        const int n = detail::even_points_for(policy, sw);
        row.grid_n = n;
        Grid g = make_grid(d, 1, policy.box_half_length, n);
        row.resolved = sw / g.spacing() >= static_cast<double>(policy.min_nodes_across) - 1e-12;
        row.norm = odd_norm(spec, eps, z, g, tol);
        if (2 * n <= policy.max_points) {
            Grid g2 = make_grid(d, 1, policy.box_half_length, 2 * n);
            const double n2 = odd_norm(spec, eps, z, g2, tol);
            row.refine_change = row.norm > 0 ? std::abs(n2 - row.norm) / row.norm : 0.0;
        }
        out.rows.push_back(row);
    }
    return out;
}

// ---- truncation splitting ----------------------------------------------------------

// near = ||(v chi_k)_eps R_0(z)||_odd with chi_k the indicator of |x| <= k in the
// unscaled variable; far = the Hilbert-Schmidt bound || (v - v chi_k)_eps ||_L2 *
// ||G_z||_L2 dominating the tail operator norm.
struct SplitNorms {
    double near = 0;
    double far = 0;
};

inline SplitNorms truncated_split_norms(const PotentialSpec& spec, int d, double eps, double z,
                                        double k, const Grid& grid, double tol = 1e-6) {
    if (k <= 0) throw std::invalid_argument("truncated_split_norms: k must be positive");
    if (z <= 0) throw std::invalid_argument("truncated_split_norms: z must be positive");
    OddSectorOperator op{grid, spec, eps, z};
    Field v = op.weight_field();
    Field vin = v, vout = v;
    std::vector<int> idx(grid.ndim());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double r2 = 0;
        decode_index(grid, i, idx.data());
        for (int a = 0; a < d; ++a) {
            const double x = grid.coord(idx[a]);
            r2 += x * x;
        }
        const bool inside = std::sqrt(r2) <= k * eps; // |x/eps| <= k
        (inside ? vout : vin).values[i] = 0;
    }
    SplitNorms s;
    LinearMap mnear = op.make_map(vin);
    s.near = operator_norm(mnear, grid, tol).value;
    // HS tail bound: ||w||_L2 * sqrt(Vol^{-1} sum_k (|k|^2+z)^{-2})
    double g2 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        decode_index(grid, i, idx.data());
        double k2 = 0;
        for (int a = 0; a < grid.ndim(); ++a) {
            const double kv = grid.wavenumber(idx[a]);
            k2 += kv * kv;
        }
        g2 += 1.0 / ((k2 + z) * (k2 + z));
    }
    g2 /= std::pow(2.0 * grid.box_half_length, grid.ndim());
    s.far = norm(vout) * std::sqrt(g2);
    return s;
}

} // namespace fewbody
