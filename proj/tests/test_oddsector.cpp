#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "fewbody/oddsector.hpp"

using namespace fewbody;

TEST_CASE("odd-sector operator basics") {
    Grid g = make_grid(1, 1, 8.0, 128);
    SECTION("zero potential gives zero norm") {
        CHECK(odd_norm(PotentialSpec::gaussian_spec(0.0, 1.0), 0.5, 1.0, g) == 0.0);
    }
    SECTION("annihilates even fields") {
        OddSectorOperator op{g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.5, 1.0};
        Field even = sample(g, [](const double* x) { return std::exp(-x[0] * x[0]); });
        Field out = op.to_map().apply(even);
        CHECK(norm(out) <= 1e-13 * norm(even));
    }
    SECTION("z <= 0 rejected") {
        CHECK_THROWS_AS(odd_norm(PotentialSpec::gaussian_spec(1.0, 1.0), 0.5, 0.0, g),
                        std::invalid_argument);
    }
}

TEST_CASE("odd norm agrees with a dense SVD oracle") {
    Grid g = make_grid(1, 1, 6.0, 48);
    OddSectorOperator op{g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.4, 1.0};
    LinearMap m = op.to_map();
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXcd M(n, n);
    for (int c = 0; c < n; ++c) {
        Field e(g);
        e.values[c] = 1.0;
        Field col = m.apply(e);
        for (int r = 0; r < n; ++r) M(r, c) = col.values[r];
    }
    const double svd_norm = M.jacobiSvd().singularValues()(0);
    CHECK(odd_norm(op.spec, op.eps, op.z, g, 1e-9) == Catch::Approx(svd_norm).epsilon(1e-6));
}

TEST_CASE("odd projector strictly lowers the norm for gaussian V") {
    Grid g = make_grid(1, 1, 8.0, 256);
    OddSectorOperator op{g, PotentialSpec::gaussian_spec(1.0, 1.0), 0.3, 1.0};
    const double with_proj = operator_norm(op.to_map(), g).value;
    // same weight, no parity projector: even functions see v_eps at the origin
    Field v = op.weight_field();
    LinearMap plain = compose(multiplication_map(v), resolvent_map(g, 1.0, 1.0));
    const double without = operator_norm(plain, g).value;
    CHECK(without > 1.2 * with_proj);
}

TEST_CASE("d=1 gaussian: halving eps halves the odd norm (s = 1)") {
    Grid g = make_grid(1, 1, 8.0, 4096);
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    const double n1 = odd_norm(V, 0.1, 1.0, g, 1e-8);
    const double n2 = odd_norm(V, 0.05, 1.0, g, 1e-8);
    CHECK(n1 / n2 == Catch::Approx(2.0).epsilon(0.1));
}

TEST_CASE("epsilon sweep") {
    PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
    GridPolicy policy{8.0, 2048, 8};
    SECTION("rejects non-decreasing eps lists") {
        CHECK_THROWS_AS(sweep_odd_norm(V, 1, {0.1, 0.2}, 1.0, policy), std::invalid_argument);
    }
    SECTION("zero potential sweeps to zeros") {
        NormSweepResult r = sweep_odd_norm(PotentialSpec::gaussian_spec(0.0, 1.0), 1,
                                           {0.4, 0.2, 0.1}, 1.0, policy);
        for (const auto& row : r.rows) CHECK(row.norm == 0.0);
    }
    SECTION("resolution policy flags and refinement stability") {
        NormSweepResult r = sweep_odd_norm(V, 1, {0.4, 0.2, 0.0625, 0.01}, 1.0, policy);
        REQUIRE(r.rows.size() == 4);
        CHECK(r.rows[0].resolved);
        CHECK(r.rows[1].resolved);
        CHECK(r.rows[2].resolved);       // needs exactly n = 2048 = cap
        CHECK_FALSE(r.rows[3].resolved); // would need n > cap
        for (const auto& row : r.rows) {
            CHECK(row.norm >= 0.0);
            if (row.resolved && 2 * row.grid_n <= policy.max_points)
                CHECK(row.refine_change <= 0.02);
        }
        // norms decrease along the sweep
        CHECK(r.rows[0].norm > r.rows[1].norm);
        CHECK(r.rows[1].norm > r.rows[2].norm);
    }
}

TEST_CASE("truncation splitting") {
    Grid g = make_grid(1, 1, 8.0, 1024);
    SECTION("k beyond compact support kills the far part exactly") {
        PotentialSpec well = PotentialSpec::square_well_spec(1.0, 1.0); // support |x| <= 1
        SplitNorms s = truncated_split_norms(well, 1, 0.3, 1.0, 1.5, g);
        CHECK(s.far == 0.0);
        CHECK(s.near > 0.0);
    }
    SECTION("near part at fixed k scales like eps^s, s = 1") {
        PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
        SplitNorms a = truncated_split_norms(V, 1, 0.2, 1.0, 2.0, g);
        SplitNorms b = truncated_split_norms(V, 1, 0.1, 1.0, 2.0, g);
        CHECK(a.near / b.near == Catch::Approx(2.0).epsilon(0.2));
    }
    SECTION("far part monotone nonincreasing in k; near + far dominates the norm") {
        PotentialSpec V = PotentialSpec::gaussian_spec(1.0, 1.0);
        const double eps = 0.25;
        double prev = std::numeric_limits<double>::infinity();
        for (double k : {0.5, 1.0, 2.0, 3.0}) {
            SplitNorms s = truncated_split_norms(V, 1, eps, 1.0, k, g);
            CHECK(s.far <= prev + 1e-14);
            prev = s.far;
            const double total = odd_norm(V, eps, 1.0, g);
            CHECK(total <= s.near + s.far + 1e-9);
        }
    }
    SECTION("k <= 0 rejected") {
        CHECK_THROWS_AS(truncated_split_norms(PotentialSpec::gaussian_spec(1.0, 1.0), 1, 0.3, 1.0,
                                              0.0, g),
                        std::invalid_argument);
    }
}
