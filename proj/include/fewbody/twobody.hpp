#pragma once

// Relative-coordinate two-body problem: ground states of h = -2*Lap - lambda*V_eps,
// coupling calibration against a target binding energy, Birman-Schwinger spectra
// and the zero-energy resonance diagnostics.

#include <Eigen/Dense>

#include "fewbody/lattice.hpp"
#include "fewbody/potentials.hpp"

namespace fewbody {

struct RelativeHamiltonian {
    Grid grid;            // m = 1 block of dimension d
    PotentialSpec spec;
    double eps = 1.0;
    double lambda = 1.0;
    double mass_factor = 2.0;

    Field potential_field() const {
        // capped radial evaluation so offset-0 grids (which contain r = 0) are safe
        // for the coulombic cutoff; odd-sector fields vanish at that node anyway
        const int d = grid.dim_per_particle;
        return sample(grid, [&](const double* x) {
            double r2 = 0;
            for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
            return evaluate_radial_capped(spec, std::sqrt(r2) / eps) / (eps * eps);
        });
    }
    LinearMap to_map() const {
        Field v = potential_field();
        const Grid g = grid;
        const double mf = mass_factor, lam = lambda;
        return self_adjoint_map(
            [g, mf, lam, v](const Field& f) {
                Field out = apply_multiplier(f, [&](const double* k) {
                    double k2 = 0;
                    for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
                    return mf * k2;
                });
                for (std::size_t i = 0; i < out.size(); ++i)
                    out.values[i] -= lam * v.values[i] * f.values[i];
                return out;
            },
            "h(eps=" + std::to_string(eps) + ",lambda=" + std::to_string(lambda) + ")");
    }
};

struct GroundStateResult {
    double energy = 0;
    Field vector;
    double residual = 0;
};

// Smallest eigenvalue of a self-adjoint map that is a Fourier-diagonal kinetic
// part plus a bounded perturbation, by shift-invert Lanczos with a free-resolvent
// preconditioned CG inner solve. `project` optionally restricts to an invariant
// subspace (odd sector, antisymmetric subspace).
inline GroundStateResult ground_state_of_map(const LinearMap& map, const Grid& grid, double mass_factor,
                                             double tol = 1e-8, const LinearMap* project = nullptr,
                                             std::uint64_t seed = 13) {
    double sigma = 1.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            LinearMap precond = resolvent_map(grid, mass_factor, sigma);
            LinearMap inv = self_adjoint_map(
                [&map, &precond, sigma, project](const Field& f) {
                    Field rhs = project ? project->apply(f) : f;
                    Field sol = solve_shifted(map, sigma, rhs, 1e-12, 5000, &precond);
                    return project ? project->apply(sol) : sol;
                },
                "shift-invert");
            LanczosResult lz = lanczos_extreme(inv, grid, /*want_smallest=*/false, tol * 1e-2, 300, seed, project);
            GroundStateResult gs;
            gs.energy = 1.0 / lz.eigenvalue - sigma;
            gs.vector = lz.vector;
            auto residual_of = [&](GroundStateResult& s) {
                Field r = map.apply(s.vector);
                if (project) r = project->apply(r);
                axpy(cplx{-s.energy, 0}, s.vector, r);
                s.residual = norm(r) / norm(s.vector);
            };
            residual_of(gs);
            // polish by inverse iteration until the true eigen-residual meets tol
            const double scale = std::abs(gs.energy) + sigma;
            for (int it = 0; it < 60 && gs.residual > tol * scale; ++it) {
                Field y = inv.apply(gs.vector);
                y *= cplx{1.0 / norm(y), 0};
                gs.vector = y;
                Field hy = map.apply(y);
                if (project) hy = project->apply(hy);
                gs.energy = std::real(inner(y, hy));
                residual_of(gs);
            }
            return gs;
        } catch (const SolveError&) {
            sigma *= 4.0; // map + sigma not yet positive definite
        }
    }
    throw std::runtime_error("ground_state: could not find a positive-definite shift");
}

inline GroundStateResult ground_state(const RelativeHamiltonian& h, double tol = 1e-8,
                                      const LinearMap* project = nullptr, std::uint64_t seed = 13) {
    LinearMap map = h.to_map();
    return ground_state_of_map(map, h.grid, h.mass_factor, tol, project, seed);
}

// ---- coupling calibration ------------------------------------------------------

struct CalibrationResult {
    std::vector<double> eps;
    std::vector<double> lambda;
    std::vector<double> energy;
    std::vector<double> residual;
    double target = 0;
};

struct CalibrationError : std::runtime_error {
    double energy_at_zero, energy_at_hi;
    CalibrationError(const std::string& what, double e0, double ehi)
        : std::runtime_error(what), energy_at_zero(e0), energy_at_hi(ehi) {}
};

// Bisection on lambda using monotone decrease of E(lambda) for V >= 0.
inline double calibrate_coupling(const Grid& grid, const PotentialSpec& spec, double eps, double E_target,
                                 double tol = 1e-8) {
    if (spec.sign_class != SignClass::nonnegative)
        throw std::invalid_argument("calibrate_coupling: requires a nonnegative potential");
    if (E_target >= 0) throw std::invalid_argument("calibrate_coupling: E_target must be negative");
    auto energy_at = [&](double lambda) {
        RelativeHamiltonian h{grid, spec, eps, lambda};
        return ground_state(h, std::min(tol * 1e-2, 1e-9)).energy;
    };
    const double cv = compute_CV(spec);
    const int d = grid.dim_per_particle;
    double hi = 4.0 * lambda_max_lower_bound(cv, 2, d);
    double e_hi = energy_at(hi);
    int doublings = 0;
    while (e_hi > E_target && doublings < 6) {
        hi *= 2.0;
        e_hi = energy_at(hi);
        ++doublings;
    }
    if (e_hi > E_target)
        throw CalibrationError("calibrate_coupling: bracket failure, E_target not reachable", energy_at(0.0), e_hi);
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double e = energy_at(mid);
        if (std::abs(e - E_target) <= tol) return mid;
        (e > E_target ? lo : hi) = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi)) return mid;
    }
    return 0.5 * (lo + hi);
}

// ---- Birman-Schwinger spectra ----------------------------------------------------

// Largest eigenvalue of v (mu*(-Lap) + z)^{-1} v with v = |V|^{1/2}, on the grid.
// z = 0 is handled by omitting the zero Fourier mode.
inline double bs_max_eigenvalue(const PotentialSpec& spec, const Grid& grid, double z, double mu,
                                double tol = 1e-6, std::uint64_t seed = 17) {
    if (z < 0) throw std::invalid_argument("bs_max_eigenvalue: z must be nonnegative");
    Field v = sample(grid, [&](const double* x) {
        return std::sqrt(std::abs(evaluate(spec, x, grid.dim_per_particle)));
    });
    const Grid g = grid;
    LinearMap T = self_adjoint_map(
        [g, v, z, mu](const Field& f) {
            Field vf = f;
            for (std::size_t i = 0; i < vf.size(); ++i) vf.values[i] *= v.values[i];
            Field rf = apply_multiplier(vf, [&](const double* k) {
                double k2 = 0;
                for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
                const double denom = mu * k2 + z;
                return denom == 0 ? 0.0 : 1.0 / denom;
            });
            for (std::size_t i = 0; i < rf.size(); ++i) rf.values[i] *= v.values[i];
            return rf;
        },
        "BS(z=" + std::to_string(z) + ")");
    return operator_norm(T, grid, tol, 3000, seed).value;
}

/// d = 3 s-wave reduction for radial potentials: on u(r) = r f(r) the operator
// has the kernel v(r) g_kappa(r,r') v(r'), g_kappa(r,r') = e^{-kappa r>} sinh(kappa r<)/(mu kappa),
// kappa = sqrt(z/mu); at z = 0 the kernel degenerates to r< / mu. Free of box
// truncation, quadrature-exact up to panel refinement.
inline double bs_max_eigenvalue_radial(const PotentialSpec& spec, double z, double mu, int levels = 28) {
    if (z < 0) throw std::invalid_argument("bs_max_eigenvalue_radial: z must be nonnegative");
    const double R = spec.quadrature_radius();
    const double kappa = std::sqrt(z / mu);
    // graded Gauss-Legendre nodes towards the origin
    const GaussRule& rule = gauss_legendre();
    std::vector<double> r, w;
    double hi = R;
    for (int l = 0; l < levels; ++l) {
        const double lo = hi * 0.5;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            r.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i]);
            w.push_back(0.5 * (hi - lo) * rule.weights[i]);
        }
        hi = lo;
    }
    const int m = static_cast<int>(r.size());
    Eigen::MatrixXd K(m, m);
    std::vector<double> vs(m);
    for (int i = 0; i < m; ++i) vs[i] = std::sqrt(std::abs(evaluate_radial(spec, r[i])));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double rmin = std::min(r[i], r[j]), rmax = std::max(r[i], r[j]);
            const double gk = (kappa == 0) ? rmin / mu
                                           : std::exp(-kappa * rmax) * std::sinh(kappa * rmin) / (mu * kappa);
            const double val = std::sqrt(w[i] * w[j]) * vs[i] * vs[j] * gk;
            K(i, j) = val;
            K(j, i) = val;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// z -> 0 limit by least-squares extrapolation of beta(z) = beta0 - a*sqrt(z) + b*z
// over the given z list (near a 3d resonance beta has a sqrt(z) expansion).
inline double bs_extrapolate_zero(const std::vector<double>& zs, const std::vector<double>& betas) {
    if (zs.size() < 3) throw std::invalid_argument("bs_extrapolate_zero: need at least 3 points");
    const int m = static_cast<int>(zs.size());
    Eigen::MatrixXd X(m, 3);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = std::sqrt(zs[i]);
        X(i, 2) = zs[i];
        y(i) = betas[i];
    }
    Eigen::Vector3d coef = X.colPivHouseholderQr().solve(y);
    return coef(0);
}

// ---- zero-energy resonance function ----------------------------------------------

// psi(x) = e^{-|x|} for |x| <= 1, e^{-1}/|x| for |x| > 1; solves (-Lap - V)psi = 0
// for the coulombic cutoff potential.
inline double resonance_function(const double* x, int d) {
    double t2 = 0;
    for (int a = 0; a < d; ++a) t2 += x[a] * x[a];
    const double t = std::sqrt(t2);
    return t <= 1.0 ? std::exp(-t) : std::exp(-1.0) / t;
}

struct ResonanceReport {
    double residual = 0;      // ||(-Lap - V) psi|| / ||grad psi||
    double psi_norm_sq = 0;   // discrete ||psi||^2 (grows with L: not square integrable)
    bool truncation_ok = true;
    int grid_n = 0;
    double grid_L = 0;
};

// Radial s-wave residual of the resonance equation: u(r) = r psi(r) solves
// -u'' - V u = 0 with u(0) = 0 and u' = 0 beyond the support. The defect of the
// sampled u under the finite-difference Laplacian is measured in the discrete
// H^{-1} norm (solve (A + 1) w = d, value sqrt(<d, w>)), normalized by ||u'||.
// The only defect source is the u'' jump at r = 1, an O(h) mass, so the
// residual halves under grid doubling; an L2 measure would stall on it.
inline double resonance_residual_radial(int points, double R = 8.0) {
    if (points < 8) throw std::invalid_argument("resonance_residual_radial: too few points");
    const int M = points;
    const double h = R / M;
    auto Vr = [](double r) { return r <= 1.0 ? 2.0 / r - 1.0 : 0.0; };
    auto ur = [](double r) { return r <= 1.0 ? r * std::exp(-r) : std::exp(-1.0); };
    const int n = M - 1;
    std::vector<double> d(n);
    for (int j = 1; j < M; ++j) {
        const double r = j * h;
        d[j - 1] = -(ur(r + h) - 2.0 * ur(r) + ur(r - h)) / (h * h) - Vr(r) * ur(r);
    }
    // Thomas solve of the tridiagonal (A + 1) w = d, Dirichlet ends
    const double diag = 2.0 / (h * h) + 1.0, off = -1.0 / (h * h);
    std::vector<double> cp(n), dp(n), w(n);
    cp[0] = off / diag;
    dp[0] = d[0] / diag;
    for (int i = 1; i < n; ++i) {
        const double m = diag - off * cp[i - 1];
        cp[i] = off / m;
        dp[i] = (d[i] - off * dp[i - 1]) / m;
    }
    w[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) w[i] = dp[i] - cp[i] * w[i + 1];
    double s = 0;
    for (int i = 0; i < n; ++i) s += d[i] * w[i] * h;
    double grad = 0;
    for (int j = 0; j < M; ++j) {
        const double du = (ur((j + 1) * h) - ur(j * h)) / h;
        grad += du * du * h;
    }
    return std::sqrt(s / grad);
}

inline ResonanceReport resonance_residual(const Grid& grid) {
    if (grid.dim_per_particle != 3 || grid.num_particles != 1)
        throw std::invalid_argument("resonance_residual: needs a single d=3 block");
    const PotentialSpec coul = PotentialSpec::coulombic_cutoff_spec();
    Field psi = sample(grid, [&](const double* x) { return resonance_function(x, 3); });
    Field vpsi = sample(grid, [&](const double* x) { return evaluate(coul, x, 3); });
    for (std::size_t i = 0; i < vpsi.size(); ++i) vpsi.values[i] *= psi.values[i];
    LinearMap lap = build_laplacian(grid, 1.0);
    Field res = lap.apply(psi);
    res -= vpsi;
    const double grad_sq = std::real(inner(psi, lap.apply(psi)));
    ResonanceReport rep;
    rep.residual = norm(res) / std::sqrt(grad_sq);
    rep.psi_norm_sq = std::real(inner(psi, psi));
    rep.truncation_ok = std::exp(-1.0) / grid.box_half_length < 1e-3;
    rep.grid_n = grid.points_per_axis;
    rep.grid_L = grid.box_half_length;
    return rep;
}

} // namespace fewbody
