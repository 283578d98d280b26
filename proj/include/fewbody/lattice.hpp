#pragma once

// Discretization substrate: matrix-free linear maps, Fourier-spectral
// Laplacians and resolvents, parity/antisymmetry projectors, a conjugate
// gradient shifted solve, power-iteration operator norms and a Lanczos
// extreme-eigenvalue solver.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "fewbody/grid.hpp"

namespace fewbody {

struct LinearMap {
    std::function<Field(const Field&)> apply;
    std::function<Field(const Field&)> adjoint_apply;
    std::string descriptor;

    Field operator()(const Field& f) const { return apply(f); }
};

inline LinearMap self_adjoint_map(std::function<Field(const Field&)> apply, std::string descriptor) {
    LinearMap m;
    m.apply = apply;
    m.adjoint_apply = std::move(apply);
    m.descriptor = std::move(descriptor);
    return m;
}

inline LinearMap zero_map(std::string descriptor = "0") {
    return self_adjoint_map([](const Field& f) { return Field(f.grid); }, std::move(descriptor));
}

inline LinearMap multiplication_map(const Field& w, std::string descriptor = "mult") {
    // real weight assumed; adjoint equals apply
    return self_adjoint_map(
        [w](const Field& f) {
            Field out = f;
            for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= w.values[i];
            return out;
        },
        std::move(descriptor));
}

inline LinearMap compose(const LinearMap& outer, const LinearMap& inner, std::string descriptor = "") {
    LinearMap m;
    m.apply = [outer, inner](const Field& f) { return outer.apply(inner.apply(f)); };
    m.adjoint_apply = [outer, inner](const Field& f) { return inner.adjoint_apply(outer.adjoint_apply(f)); };
    m.descriptor = descriptor.empty() ? outer.descriptor + "*" + inner.descriptor : std::move(descriptor);
    return m;
}

// ---- Laplacian and free resolvent -------------------------------------------

// -(mass_factor) * Laplacian via the Fourier multiplier mass_factor * |k|^2.
inline LinearMap build_laplacian(const Grid& g, double mass_factor = 1.0) {
    if (mass_factor <= 0) throw std::invalid_argument("build_laplacian: mass_factor must be positive");
    const int nd = g.ndim();
    return self_adjoint_map(
        [g, nd, mass_factor](const Field& f) {
            return apply_multiplier(f, [&](const double* k) {
                double k2 = 0;
                for (int a = 0; a < nd; ++a) k2 += k[a] * k[a];
                return mass_factor * k2;
            });
        },
        "-" + std::to_string(mass_factor) + "*Lap");
}

// Exact resolvent (mass_factor*(-Lap) + z)^{-1} f in the Fourier basis.
inline Field apply_resolvent(const Grid& g, double mass_factor, double z, const Field& f) {
    if (z <= 0) throw std::invalid_argument("apply_resolvent: z must be positive");
    const int nd = g.ndim();
    return apply_multiplier(f, [&](const double* k) {
        double k2 = 0;
        for (int a = 0; a < nd; ++a) k2 += k[a] * k[a];
        return 1.0 / (mass_factor * k2 + z);
    });
}

inline LinearMap resolvent_map(const Grid& g, double mass_factor, double z) {
    if (z <= 0) throw std::invalid_argument("resolvent_map: z must be positive");
    return self_adjoint_map([g, mass_factor, z](const Field& f) { return apply_resolvent(g, mass_factor, z, f); },
                            "R0(z=" + std::to_string(z) + ")");
}

// ---- shifted CG solve --------------------------------------------------------

struct SolveError : std::runtime_error {
    double residual;
    SolveError(const std::string& what, double res) : std::runtime_error(what), residual(res) {}
};

// Solve (map + z) g = f for self-adjoint map with map + z positive definite.
// Optionally preconditioned (precond approximates (map+z)^{-1} and must be
// self-adjoint positive definite, e.g. a free resolvent).
inline Field solve_shifted(const LinearMap& map, double z, const Field& f, double tol,
                           int max_iters = 2000, const LinearMap* precond = nullptr) {
    if (z <= 0) throw std::invalid_argument("solve_shifted: z must be positive");
    const double fnorm = norm(f);
    Field x(f.grid);
    if (fnorm == 0) return x;
    auto op = [&](const Field& v) {
        Field out = map.apply(v);
        axpy(z, v, out);
        return out;
    };
    Field r = f; // x = 0
    Field zv = precond ? precond->apply(r) : r;
    Field p = zv;
    cplx rz = inner(r, zv);
    for (int it = 0; it < max_iters; ++it) {
        Field Ap = op(p);
        const cplx pAp = inner(p, Ap);
        if (std::real(pAp) <= 0)
            throw SolveError("solve_shifted: operator not positive definite (z too small or coupling above threshold)",
                             norm(r) / fnorm);
        const cplx alpha = rz / pAp;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        if (norm(r) / fnorm <= tol) return x;
        zv = precond ? precond->apply(r) : r;
        const cplx rz_new = inner(r, zv);
        const cplx beta = rz_new / rz;
        rz = rz_new;
        Field pn = zv;
        axpy(beta, p, pn);
        p = std::move(pn);
    }
    throw SolveError("solve_shifted: iteration cap exceeded", norm(r) / fnorm);
}

// ---- parity and antisymmetry projectors --------------------------------------

// (f(r) - f(-r))/2 in the d coordinates of particle block `block`.
// Requires offsets 0 or 1/2, where reflection is node-preserving.
inline Field parity_project_odd(const Field& f, int block = 0) {
    const Grid& g = f.grid;
    const int n = g.points_per_axis;
    const int d = g.dim_per_particle;
    if (block < 0 || block >= g.num_particles) throw std::invalid_argument("parity_project_odd: bad block");
    const bool half = std::abs(g.offset - 0.5) < 1e-14;
    const bool zero = g.offset == 0.0;
    if (!half && !zero)
        throw std::invalid_argument("parity_project_odd: reflection not node-preserving for this grid offset");
    Field out(g);
    std::vector<int> j(g.ndim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        decode_index(g, i, j.data());
        for (int a = block * d; a < (block + 1) * d; ++a)
            j[a] = half ? (n - 1 - j[a]) : ((n - j[a]) % n);
        const std::size_t ir = encode_index(g, j.data());
        out.values[i] = 0.5 * (f.values[i] - f.values[ir]);
    }
    return out;
}

inline LinearMap odd_projector_map(const Grid& g, int block = 0) {
    return self_adjoint_map([block](const Field& f) { return parity_project_odd(f, block); }, "P_odd");
}

// (1/N!) sum_sigma sgn(sigma) sigma over particle-coordinate permutations.
inline Field antisymmetrize(const Field& f, int N, int d) {
    const Grid& g = f.grid;
    if (g.num_particles != N || g.dim_per_particle != d)
        throw std::invalid_argument("antisymmetrize: grid does not represent N blocks of dimension d");
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    Field out(g);
    std::vector<int> j(g.ndim()), jp(g.ndim());
    double fact = 1;
    for (int i = 2; i <= N; ++i) fact *= i;
    do {
        // permutation sign by counting inversions
        int inv = 0;
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b)
                if (perm[a] > perm[b]) ++inv;
        const double sgn = (inv % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            decode_index(g, i, j.data());
            for (int p = 0; p < N; ++p)
                for (int a = 0; a < d; ++a) jp[p * d + a] = j[perm[p] * d + a];
            out.values[i] += sgn / fact * f.values[encode_index(g, jp.data())];
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

inline LinearMap antisymmetrizer_map(const Grid& g) {
    const int N = g.num_particles, d = g.dim_per_particle;
    return self_adjoint_map([N, d](const Field& f) { return antisymmetrize(f, N, d); }, "P_antisym");
}

// ---- operator norm -----------------------------------------------------------

struct OperatorNormResult {
    double value = 0;
    bool converged = false;
    int iterations = 0;
};

// Largest singular value by power iteration on map*map^*, three independent
// random restarts, max taken.
inline OperatorNormResult operator_norm(const LinearMap& map, const Grid& g, double tol = 1e-6,
                                        int max_iters = 300, std::uint64_t seed = 7, int restarts = 3) {
    OperatorNormResult best;
    for (int r = 0; r < restarts; ++r) {
        Field v = random_field(g, seed + 1000003ull * r);
        double vn = norm(v);
        if (vn == 0) continue;
        v *= cplx{1.0 / vn, 0};
        double sigma = 0;
        bool conv = false;
        int it = 0;
        for (; it < max_iters; ++it) {
            Field w = map.apply(v);
            const double sig_new = norm(w);
            if (sig_new == 0) {
                sigma = 0;
                conv = true;
                break;
            }
            Field u = map.adjoint_apply(w);
            const double un = norm(u);
            if (un == 0) {
                sigma = sig_new;
                conv = true;
                break;
            }
            u *= cplx{1.0 / un, 0};
            v = std::move(u);
            if (std::abs(sig_new - sigma) <= tol * std::max(sig_new, 1e-300)) {
                sigma = sig_new;
                conv = true;
                break;
            }
            sigma = sig_new;
        }
        if (sigma > best.value || r == 0) {
            best.value = std::max(best.value, sigma);
            best.iterations = std::max(best.iterations, it);
        }
        best.converged = (r == 0) ? conv : (best.converged && conv);
    }
    return best;
}

// ---- Lanczos -----------------------------------------------------------------

struct LanczosResult {
    double eigenvalue = 0;
    Field vector;
    double residual = 0;
    int iterations = 0;
};

namespace detail {

// Eigendecomposition of the Lanczos tridiagonal; vecs[i][b] is the i-th
// component of the b-th eigenvector.
inline void tridiag_eigen(std::vector<double>& diag, const std::vector<double>& off,
                          std::vector<std::vector<double>>* vecs = nullptr) {
    const int m = static_cast<int>(diag.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = diag[i];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, vecs ? Eigen::ComputeEigenvectors
                                                              : Eigen::EigenvaluesOnly);
    for (int i = 0; i < m; ++i) diag[i] = es.eigenvalues()(i);
    if (vecs) {
        vecs->assign(m, std::vector<double>(m));
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < m; ++b) (*vecs)[i][b] = es.eigenvectors()(i, b);
    }
}

} // namespace detail

// Smallest (want_smallest) or largest eigenvalue of a self-adjoint map by
// Lanczos with full reorthogonalization. `project` (if given) restricts the
// iteration to an invariant subspace; the start vector is projected and the
// basis re-projected each step to suppress drift.
inline LanczosResult lanczos_extreme(const LinearMap& map, const Grid& g, bool want_smallest,
                                     double tol = 1e-10, int max_iters = 400, std::uint64_t seed = 11,
                                     const LinearMap* project = nullptr) {
    for (int attempt = 0; attempt < 3; ++attempt) {
        Field q = random_field(g, seed + 7919ull * attempt);
        if (project) q = project->apply(q);
        double qn = norm(q);
        if (qn == 0) continue;
        q *= cplx{1.0 / qn, 0};
        std::vector<Field> basis;
        std::vector<double> alpha, beta;
        Field q_prev(g);
        double prev_theta = want_smallest ? 1e300 : -1e300;
        for (int it = 0; it < max_iters; ++it) {
            basis.push_back(q);
            Field w = map.apply(q);
            if (project) w = project->apply(w);
            const double a = std::real(inner(q, w));
            alpha.push_back(a);
            axpy(cplx{-a, 0}, q, w);
            if (!beta.empty()) axpy(cplx{-beta.back(), 0}, q_prev, w);
            // full reorthogonalization
            for (const auto& b : basis) axpy(-inner(b, w), b, w);
            const double bnorm = norm(w);
            // Ritz values of the current tridiagonal
            std::vector<double> dg = alpha, off = beta;
            std::vector<std::vector<double>> vecs;
            detail::tridiag_eigen(dg, off, &vecs);
            int best = 0;
            for (std::size_t i = 1; i < dg.size(); ++i)
                if (want_smallest ? dg[i] < dg[best] : dg[i] > dg[best]) best = static_cast<int>(i);
            const double theta = dg[best];
            const bool ritz_conv = std::abs(theta - prev_theta) <= tol * std::max(1.0, std::abs(theta));
            prev_theta = theta;
            if (ritz_conv || bnorm <= 1e-14 || it == max_iters - 1) {
                if (!ritz_conv && bnorm > 1e-14 && it == max_iters - 1 && attempt < 2) break; // restart
                LanczosResult res;
                res.eigenvalue = theta;
                res.iterations = it + 1;
                res.vector = Field(g);
                for (std::size_t i = 0; i < basis.size(); ++i)
                    axpy(cplx{vecs[i][best], 0}, basis[i], res.vector);
                const double vn = norm(res.vector);
                if (vn > 0) res.vector *= cplx{1.0 / vn, 0};
                Field r = map.apply(res.vector);
                if (project) r = project->apply(r);
                axpy(cplx{-theta, 0}, res.vector, r);
                res.residual = norm(r);
                return res;
            }
            beta.push_back(bnorm);
            q_prev = basis.back();
            q = std::move(w);
            q *= cplx{1.0 / bnorm, 0};
        }
    }
    throw std::runtime_error("lanczos_extreme: breakdown after 3 restarts");
}

} // namespace fewbody
