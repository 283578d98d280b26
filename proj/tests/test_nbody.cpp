#include <catch2/catch_amalgamated.hpp>

#include "fewbody/nbody.hpp"

using namespace fewbody;

namespace {

FermionicHamiltonian coarse_pair(double lambda = 0.5, double eps = 0.5, int n = 32) {
    Grid g = make_grid(1, 2, 6.0, n);
    return build_hamiltonian(2, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), eps, lambda);
}

} // namespace

TEST_CASE("hamiltonian construction and basic structure") {
    SECTION("grid shape must match (N, d)") {
        Grid g = make_grid(1, 2, 6.0, 16);
        CHECK_THROWS_AS(build_hamiltonian(3, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 1.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_hamiltonian(2, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 1.0, -1.0),
                        std::invalid_argument);
    }
    SECTION("lambda = 0 is the free Laplacian with ground state 0") {
        FermionicHamiltonian H = coarse_pair(0.0);
        GroundStateResult gs = ground_state_of_map(H.to_map(), H.grid, 1.0);
        CHECK(gs.energy == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("hermiticity and commutation with the antisymmetrizer") {
        FermionicHamiltonian H = coarse_pair();
        LinearMap h = H.to_map();
        LinearMap P = H.projector();
        Field f = random_field(H.grid, 5), g = random_field(H.grid, 6);
        CHECK(std::abs(inner(g, h.apply(f)) - inner(h.apply(g), f)) <= 1e-10);
        Field c1 = P.apply(h.apply(f)), c2 = h.apply(P.apply(f));
        axpy(cplx{-1.0, 0}, c2, c1);
        CHECK(norm(c1) <= 1e-10 * norm(f));
    }
}

TEST_CASE("coordinate map is an exact isometry") {
    Grid g = make_grid(1, 3, 4.0, 8);
    Field f = random_field(g, 9);
    Field kf = kk_coordinate_map(f, 1, false);
    // pure index permutation: the value multisets coincide bitwise
    auto key = [](const Field& x) {
        std::vector<std::pair<double, double>> v;
        for (cplx c : x.values) v.emplace_back(c.real(), c.imag());
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(key(kf) == key(f));
    Field back = kk_coordinate_map(kf, 1, true);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(back.values[i] == f.values[i]);
}

TEST_CASE("factorization reproduces the interaction: <phi, W psi> = <A phi, B psi>") {
    for (int N : {2, 3}) {
        Grid g = make_grid(1, N, 4.0, N == 2 ? 16 : 8);
        FermionicHamiltonian H =
            build_hamiltonian(N, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.7, 0.9);
        KKFactorization kk = make_kk(H);
        LinearMap h = H.to_map();
        Field phi = random_field(g, 21), psi = random_field(g, 22);
        // W psi = H0 psi - H psi
        Field w = apply_multiplier(psi, [&](const double* k) {
            double k2 = 0;
            for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
            return k2;
        });
        axpy(cplx{-1.0, 0}, h.apply(psi), w);
        const cplx lhs = inner(phi, w);
        const cplx rhs = inner(kk.A.apply(phi), kk.B.apply(psi));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
        // adjoint consistency of A and B
        Field x = random_field(g, 23), y = random_field(g, 24);
        CHECK(std::abs(inner(y, kk.A.apply(x)) - inner(kk.A.adjoint_apply(y), x)) <= 1e-10);
        CHECK(std::abs(inner(y, kk.B.apply(x)) - inner(kk.B.adjoint_apply(y), x)) <= 1e-10);
    }
}

TEST_CASE("Konno-Kuroda identity holds to solver precision") {
    SECTION("lambda = 0 reduces to the free resolvent") {
        FermionicHamiltonian H = coarse_pair(0.0, 0.5, 16);
        CHECK(kk_identity_residual(H, 1.0) <= 1e-12);
    }
    SECTION("N = 2, d = 1, gaussian") {
        FermionicHamiltonian H = coarse_pair(0.5, 0.5, 32);
        CHECK(kk_identity_residual(H, 1.0) <= 1e-8);
    }
    SECTION("N = 3, d = 1") {
        Grid g = make_grid(1, 3, 4.0, 16);
        FermionicHamiltonian H =
            build_hamiltonian(3, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.6, 0.8);
        CHECK(kk_identity_residual(H, 1.0) <= 1e-8);
    }
    SECTION("grids beyond the dense cap are rejected") {
        FermionicHamiltonian H = coarse_pair(0.5, 0.5, 128);
        CHECK_THROWS_AS(kk_identity_residual(H, 1.0), std::length_error);
    }
}

TEST_CASE("S(z) norm bounds of the factorized resolvent identity") {
    Grid g = make_grid(1, 2, 6.0, 32);
    SECTION("V <= 0 (repulsive interaction term): norm <= 2") {
        FermionicHamiltonian H =
            build_hamiltonian(2, 1, g, PotentialSpec::gaussian_spec(-1.0, 1.0), 0.5, 0.8);
        KKFactorization kk = make_kk(H);
        SNormReport rep = s_norm_check(H, kk, 1.0);
        CHECK(rep.sign == SignClass::nonpositive);
        CHECK(rep.bound == 2.0);
        CHECK(rep.bound_claimed);
        CHECK(rep.norm <= rep.bound + 1e-6);
    }
    SECTION("V >= 0 below threshold: delta = 1 verified, norm <= 2") {
        FermionicHamiltonian H =
            build_hamiltonian(2, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.5, 0.2);
        KKFactorization kk = make_kk(H);
        SNormReport rep = s_norm_check(H, kk, 1.0);
        CHECK(rep.bound_claimed);
        CHECK(rep.delta == 1.0);
        CHECK(rep.bound == 2.0);
        CHECK(rep.norm <= rep.bound + 1e-6);
    }
    SECTION("lambda -> 0 drives S(z) to the identity") {
        FermionicHamiltonian H =
            build_hamiltonian(2, 1, g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.5, 1e-6);
        KKFactorization kk = make_kk(H);
        SNormReport rep = s_norm_check(H, kk, 1.0);
        CHECK(rep.norm == Catch::Approx(1.0).margin(1e-4));
    }
}

TEST_CASE("resolvent-difference norm") {
    SECTION("lambda = 0 gives zero") {
        FermionicHamiltonian H = coarse_pair(0.0, 0.5, 16);
        CHECK(resolvent_difference_norm(H, 1.0, 1e-8).value <= 1e-8);
    }
    SECTION("dense oracle on a coarse N = 2 grid") {
        FermionicHamiltonian H = coarse_pair(0.5, 0.5, 32);
        const double z = 1.0;
        Eigen::MatrixXcd Hm = detail::dense_of(H.to_map(), H.grid);
        Hm.diagonal().array() += z;
        Eigen::MatrixXcd R = Hm.llt().solve(Eigen::MatrixXcd::Identity(Hm.rows(), Hm.cols()));
        Eigen::MatrixXcd R0 = detail::dense_of(resolvent_map(H.grid, 1.0, z), H.grid);
        Eigen::MatrixXcd P = detail::dense_of(H.projector(), H.grid);
        Eigen::MatrixXcd D = P * (R - R0) * P;
        const double oracle = D.bdcSvd().singularValues()(0);
        const double measured = resolvent_difference_norm(H, z, 1e-8).value;
        CHECK(measured == Catch::Approx(oracle).epsilon(1e-6));
    }
    SECTION("N = 2 fast path matches the full two-particle grid") {
        const double eps = 0.5, lambda = 0.5, z = 1.0, L = 6.0;
        const int n = 32;
        FermionicHamiltonian H = coarse_pair(lambda, eps, n);
        const double full = resolvent_difference_norm(H, z, 1e-8).value;
        Grid rel = make_grid(1, 1, L, n, /*offset=*/0.0);
        const double fast =
            resolvent_difference_norm_rel(rel, H.spec, eps, lambda, z, 1e-8).value;
        CHECK(fast == Catch::Approx(full).epsilon(1e-6));
    }
}

TEST_CASE("rate sweep: d = 1, lambda = g eps, norm drops like eps^2") {
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    CouplingSchedule sched = CouplingSchedule::linear_schedule(1.0);
    GridPolicy policy{8.0, 4096, 8};
    RateSweepResult r = rate_sweep(2, 1, V, sched, 1.0, {0.2, 0.1, 0.05}, policy, 1e-7);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK(row.lambda == row.eps); // linear schedule with g = 1
        CHECK(row.resolved);
    }
    CHECK(r.rows[0].norm / r.rows[1].norm == Catch::Approx(4.0).epsilon(0.2));
    CHECK(r.rows[1].norm / r.rows[2].norm == Catch::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Thomas scaling report") {
    SECTION("matched-grid scaling is exact and lambda = 0 is flat") {
        ThomasReport rep =
            thomas_scaling_check(PotentialSpec::gaussian_spec(1.0, 1.0), 0.0, 0.5, 6.0, 16);
        CHECK(rep.scaling_deviation <= 1e-12);
        CHECK(std::abs(rep.energy_distinguishable) <= 1e-8);
    }
    SECTION("coulombic cutoff at doubled coupling binds distinguishable pairs only") {
        ThomasReport rep =
            thomas_scaling_check(PotentialSpec::coulombic_cutoff_spec(), 2.0, 0.5, 6.0, 32);
        CHECK(rep.scaling_deviation <= 1e-12);
        CHECK(rep.energy_distinguishable < 0.0);
        CHECK(rep.energy_fermionic >= -1e-8);
    }
}
