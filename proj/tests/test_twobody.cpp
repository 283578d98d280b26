#include <catch2/catch_amalgamated.hpp>

#include "fewbody/twobody.hpp"

using namespace fewbody;

TEST_CASE("ground state of the free relative Hamiltonian") {
    Grid g = make_grid(1, 1, 6.0, 64);
    RelativeHamiltonian h{g, PotentialSpec::gaussian_spec(1.0, 1.0), 1.0, /*lambda=*/0.0};
    GroundStateResult gs = ground_state(h);
    CHECK(gs.energy == Catch::Approx(0.0).margin(1e-9));
    // eigenvector is the constant mode
    Field c = sample(g, [](const double*) { return 1.0; });
    c *= cplx{1.0 / norm(c), 0};
    CHECK(std::abs(std::abs(inner(c, gs.vector)) - 1.0) <= 1e-8);
}

TEST_CASE("binding certified by a variational oracle (d=1 gaussian)") {
    Grid g = make_grid(1, 1, 10.0, 256);
    const double lambda = 5.0;
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    // Rayleigh quotient of a gaussian trial function phi = e^{-x^2/2}:
    // <phi,-2 phi''> = 2 * int |phi'|^2 = 2 * (sqrt(pi)/2), <phi,phi> = sqrt(pi)
    const double kinetic = 2.0 * integrate([](double x) { return x * x * std::exp(-x * x); }, -8.0, 8.0, 1e-10);
    const double pot = integrate([&](double x) { return std::exp(-x * x) * evaluate_radial(V, x); }, -8.0, 8.0, 1e-10);
    const double nrm = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-10);
    const double rayleigh = (kinetic - lambda * pot) / nrm;
    REQUIRE(rayleigh < 0.0); // oracle certifies binding
    RelativeHamiltonian h{g, V, 1.0, lambda};
    GroundStateResult gs = ground_state(h);
    CHECK(gs.energy < 0.0);
    CHECK(gs.energy <= rayleigh + 1e-6);
    CHECK(gs.residual <= 1e-6);
}

TEST_CASE("delta-well limit: E_eps -> -g^2/8 for lambda = g*eps, int V = 1") {
    // 1d oracle: -2 psi'' - g delta psi = E psi has the single bound state E = -g^2/8
    Grid g = make_grid(1, 1, 24.0, 8192);
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0 / std::sqrt(M_PI), 1.0); // int V = 1
    const double gcoup = 1.0, eps = 0.05;
    RelativeHamiltonian h{g, V, eps, gcoup * eps};
    GroundStateResult gs = ground_state(h);
    CHECK(gs.energy == Catch::Approx(-1.0 / 8.0).epsilon(0.02));
}

TEST_CASE("unitary scaling: eps^2 h_eps on box eps*L matches -2 Lap - lambda V on box L") {
    const double eps = 0.5, lambda = 0.7, L = 6.0;
    const int n = 64;
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    Grid g1 = make_grid(1, 1, L, n);
    Grid ge = make_grid(1, 1, eps * L, n);
    RelativeHamiltonian h1{g1, V, 1.0, lambda};
    RelativeHamiltonian he{ge, V, eps, lambda};
    LinearMap m1 = h1.to_map(), me = he.to_map();
    Field f1 = random_field(g1, 3);
    Field fe{ge, f1.values}; // same index data on the rescaled grid
    Field a = m1.apply(f1);
    Field b = me.apply(fe);
    double maxdiff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        maxdiff = std::max(maxdiff, std::abs(eps * eps * b.values[i] - a.values[i]));
    CHECK(maxdiff <= 1e-10 * norm(a));
    // and the spectra agree: ground states match after eps^2 rescaling
    const double E1 = ground_state(h1).energy;
    const double Ee = ground_state(he).energy;
    CHECK(eps * eps * Ee == Catch::Approx(E1).margin(1e-8 * std::max(1.0, std::abs(E1))));
}

TEST_CASE("E(lambda) is concave nonincreasing for V >= 0") {
    Grid g = make_grid(1, 1, 8.0, 128);
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    std::vector<double> lam{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<double> E;
    for (double l : lam) E.push_back(ground_state(RelativeHamiltonian{g, V, 1.0, l}).energy);
    for (std::size_t i = 1; i < E.size(); ++i) CHECK(E[i] <= E[i - 1] + 1e-10);
    for (std::size_t i = 1; i + 1 < E.size(); ++i)
        CHECK(E[i] >= 0.5 * (E[i - 1] + E[i + 1]) - 1e-8); // midpoint concavity
}

TEST_CASE("coupling calibration") {
    Grid g = make_grid(1, 1, 10.0, 256);
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    SECTION("fixed point: recovers a known coupling's energy") {
        const double lambda_star = 2.0;
        const double E_star = ground_state(RelativeHamiltonian{g, V, 1.0, lambda_star}).energy;
        REQUIRE(E_star < 0);
        const double lam = calibrate_coupling(g, V, 1.0, E_star, 1e-8);
        const double E_back = ground_state(RelativeHamiltonian{g, V, 1.0, lam}).energy;
        CHECK(E_back == Catch::Approx(E_star).margin(1e-7));
    }
    SECTION("monotonicity: weaker target binding needs less coupling") {
        const double l1 = calibrate_coupling(g, V, 1.0, -0.5, 1e-7);
        const double l2 = calibrate_coupling(g, V, 1.0, -0.25, 1e-7);
        CHECK(l2 < l1);
    }
    SECTION("bracket failure reported with diagnostics") {
        CHECK_THROWS_AS(calibrate_coupling(g, V, 1.0, -1e6, 1e-7), CalibrationError);
    }
}

TEST_CASE("Birman-Schwinger eigenvalue on the grid") {
    Grid g = make_grid(1, 1, 8.0, 256);
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    SECTION("linearity in the potential amplitude") {
        const double b1 = bs_max_eigenvalue(V, g, 1.0, 1.0, 1e-9);
        const double b3 = bs_max_eigenvalue(PotentialSpec::gaussian_spec(3.0, 1.0), g, 1.0, 1.0, 1e-9);
        CHECK(b3 == Catch::Approx(3.0 * b1).epsilon(1e-6));
    }
    SECTION("decay for large z") {
        const double bsmall = bs_max_eigenvalue(V, g, 1.0, 1.0);
        const double bbig = bs_max_eigenvalue(V, g, 1e4, 1.0);
        CHECK(bbig < 1e-3 * bsmall);
    }
}

TEST_CASE("radial Birman-Schwinger: coulombic resonance at coupling 1") {
    PotentialSpec coul = PotentialSpec::coulombic_cutoff_spec();
    SECTION("exact z = 0 kernel") {
        CHECK(bs_max_eigenvalue_radial(coul, 0.0, 1.0) == Catch::Approx(1.0).margin(2e-4));
    }
    SECTION("z -> 0 extrapolation") {
        std::vector<double> zs{1e-2, 1e-3, 1e-4};
        std::vector<double> betas;
        for (double z : zs) betas.push_back(bs_max_eigenvalue_radial(coul, z, 1.0));
        CHECK(bs_extrapolate_zero(zs, betas) == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("BS principle: eigenvalue 1/lambda at z gives a bound state at -z (d=3 gaussian)") {
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    const double z = 0.5;
    const double lambda = 1.0 / bs_max_eigenvalue_radial(V, z, 2.0);
    Grid g = make_grid(3, 1, 8.0, 48);
    const double E = ground_state(RelativeHamiltonian{g, V, 1.0, lambda}, 1e-9).energy;
    CHECK(E == Catch::Approx(-z).epsilon(0.01));
}

TEST_CASE("resonance function diagnostics") {
    SECTION("far field value") {
        double x[3] = {2.0, 0.0, 0.0};
        CHECK(resonance_function(x, 3) == Catch::Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
    }
    SECTION("residual decreases under refinement") {
        ResonanceReport coarse = resonance_residual(make_grid(3, 1, 8.0, 32));
        ResonanceReport fine = resonance_residual(make_grid(3, 1, 8.0, 64));
        CHECK(fine.residual < coarse.residual);
        CHECK(coarse.truncation_ok == (std::exp(-1.0) / coarse.grid_L < 1e-3));
    }
    SECTION("radial H^{-1} residual is first order: halves under doubling") {
        const double r1 = resonance_residual_radial(256);
        const double r2 = resonance_residual_radial(512);
        const double r3 = resonance_residual_radial(1024);
        CHECK(r2 / r1 == Catch::Approx(0.5).margin(0.02));
        CHECK(r3 / r2 == Catch::Approx(0.5).margin(0.02));
        CHECK_THROWS_AS(resonance_residual_radial(4), std::invalid_argument);
    }
}
