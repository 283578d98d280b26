#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "fewbody/potentials.hpp"

using namespace fewbody;

TEST_CASE("built-in potential evaluation") {
    PotentialSpec coul = PotentialSpec::coulombic_cutoff_spec();
    double r1[3] = {1.0, 0.0, 0.0};
    double r2[3] = {0.0, 2.0, 0.0};
    CHECK(evaluate(coul, r1, 3) == Catch::Approx(1.0));
    CHECK(evaluate(coul, r2, 3) == 0.0);
    double r0[3] = {0, 0, 0};
    CHECK_THROWS_AS(evaluate(coul, r0, 3), std::domain_error);

    PotentialSpec gs = PotentialSpec::gaussian_spec(1.0, 1.0);
    CHECK(evaluate(gs, r0, 3) == Catch::Approx(1.0));
}

TEST_CASE("potentials are even by construction") {
    double pts[] = {0.17, 0.5, 0.93, 1.7};
    for (auto spec : {PotentialSpec::gaussian_spec(2.0, 0.7), PotentialSpec::smooth_bump_spec(1.0, 1.2),
                      PotentialSpec::square_well_spec(1.5, 0.8), PotentialSpec::coulombic_cutoff_spec()}) {
        for (double t : pts) {
            double rp[1] = {t}, rm[1] = {-t};
            CHECK(evaluate(spec, rp, 1) == evaluate(spec, rm, 1));
        }
    }
}

TEST_CASE("evaluate_scaled") {
    PotentialSpec gs = PotentialSpec::gaussian_spec(1.0, 1.0);
    SECTION("eps = 1 is the identity") {
        for (double t : {0.1, 0.6, 1.4}) CHECK(evaluate_scaled_radial(gs, 1.0, t) == evaluate_radial(gs, t));
    }
    SECTION("eps = 1/2 gives 4 V(2r)") {
        for (double t : {0.1, 0.3, 0.8})
            CHECK(evaluate_scaled_radial(gs, 0.5, t) == Catch::Approx(4.0 * evaluate_radial(gs, 2.0 * t)));
    }
    SECTION("scaling identity by quadrature, d=1, eps = 0.1") {
        // unit-integral gaussian: amplitude 1/sqrt(pi)
        PotentialSpec unit = PotentialSpec::gaussian_spec(1.0 / std::sqrt(M_PI), 1.0);
        const double full = integrate([&](double t) { return evaluate_scaled_radial(unit, 0.1, t); }, -3.0, 3.0, 1e-10);
        CHECK(full == Catch::Approx(10.0).epsilon(1e-6)); // eps^{d-2} * 1 = 10
    }
}

TEST_CASE("scaling identity for every built-in kind") {
    const double eps = 0.37;
    const int d = 1;
    for (auto spec : {PotentialSpec::gaussian_spec(1.3, 0.9), PotentialSpec::smooth_bump_spec(0.8, 1.1),
                      PotentialSpec::square_well_spec(2.0, 0.6)}) {
        const double base = compute_moment(spec, 0.0, d);
        const double R = spec.quadrature_radius();
        const double scaled = 2.0 * integrate_graded(
                                        [&](double t) { return std::abs(evaluate_scaled_radial(spec, eps, t)); },
                                        R * eps, 1e-10);
        CHECK(scaled == Catch::Approx(std::pow(eps, d - 2) * base).epsilon(1e-6));
    }
}

TEST_CASE("compute_CV") {
    SECTION("coulombic_cutoff: maximize 2t - t^2 on (0,1]") {
        CHECK(compute_CV(PotentialSpec::coulombic_cutoff_spec()) == Catch::Approx(1.0).epsilon(1e-6));
    }
    SECTION("square well of height 1, radius 1") {
        CHECK(compute_CV(PotentialSpec::square_well_spec(1.0, 1.0)) == Catch::Approx(1.0).epsilon(1e-6));
    }
    SECTION("gaussian: sup t^2 e^{-t^2} = 1/e") {
        CHECK(compute_CV(PotentialSpec::gaussian_spec(1.0, 1.0)) == Catch::Approx(std::exp(-1.0)).epsilon(1e-6));
    }
}

TEST_CASE("moments") {
    SECTION("moment(0) equals the L1 norm") {
        PotentialSpec gs = PotentialSpec::gaussian_spec(1.0, 1.0);
        CHECK(compute_moment(gs, 0.0, 1) == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-8));
        PotentialMoments m = compute_moments(gs, 1, {0.0});
        CHECK(m.moments[0].second == Catch::Approx(m.l1_norm).epsilon(1e-12));
    }
    SECTION("d=1 gaussian second moment: int r^2 e^{-r^2} = sqrt(pi)/2") {
        CHECK(compute_moment(PotentialSpec::gaussian_spec(1.0, 1.0), 1.0, 1) ==
              Catch::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-7));
    }
    SECTION("coulombic d=3, s=1/2: 4 pi int_0^1 (2t^2 - t^3) dt = 5 pi / 3") {
        CHECK(compute_moment(PotentialSpec::coulombic_cutoff_spec(), 0.5, 3) ==
              Catch::Approx(5.0 * M_PI / 3.0).epsilon(1e-7));
    }
    SECTION("d=2 log moment is finite for compact support") {
        CHECK(compute_log_moment(PotentialSpec::square_well_spec(1.0, 1.0)) > 0.0);
    }
}

TEST_CASE("lambda_max lower bound") {
    CHECK(lambda_max_lower_bound(1.0, 4, 3) == Catch::Approx(2.25));
    CHECK(lambda_max_lower_bound(1.0, 3, 3) == Catch::Approx(3.0));
    CHECK(lambda_max_lower_bound(1.0, 2, 1) == Catch::Approx(0.5));
    CHECK(lambda_max_lower_bound(1.0, 4, 3) > 2.0); // lambda_0 = 2 at N <= 4
}

TEST_CASE("coupling schedules") {
    CHECK(coupling_at(CouplingSchedule::linear_schedule(2.0), 0.1) == Catch::Approx(0.2));
    CHECK(coupling_at(CouplingSchedule::log_reciprocal_schedule(0.0), std::exp(-4.0 * M_PI)) ==
          Catch::Approx(1.0).epsilon(1e-12));
    CHECK(coupling_at(CouplingSchedule::constant_schedule(2.0), 0.37) == 2.0);
    CHECK_THROWS(coupling_at(CouplingSchedule::linear_schedule(2.0), 0.0));
    // very negative a drives the reciprocal negative near eps ~ 1
    CHECK_THROWS(coupling_at(CouplingSchedule::log_reciprocal_schedule(-100.0), 0.9));
    // monotone for built-in kinds
    double prev = 0;
    for (double eps : {0.01, 0.05, 0.1, 0.5}) {
        const double l = coupling_at(CouplingSchedule::log_reciprocal_schedule(0.5), eps);
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("table potential load and interpolation") {
    const char* path = "test_potential_table.txt";
    {
        std::ofstream out(path);
        out << "# radius value\n0.0 2.0\n1.0 1.0\n2.0 0.0\n";
    }
    PotentialSpec tab = load_table_potential(path);
    CHECK(evaluate_radial(tab, 0.5) == Catch::Approx(1.5));
    CHECK(evaluate_radial(tab, 1.5) == Catch::Approx(0.5));
    CHECK(evaluate_radial(tab, 3.0) == 0.0);
    CHECK(tab.sign_class == SignClass::nonnegative);
    std::remove(path);
}
