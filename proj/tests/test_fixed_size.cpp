#include <doctest.h>

#include <cmath>

#include "seqsize/fixed_size.hpp"
#include "seqsize/errors.hpp"

using namespace seqsize;

TEST_SUITE_BEGIN("fixed_size");

TEST_CASE("overall risk criterion") {
    CHECK(criterion_overall_risk(0.173, 0.05) == 220);
    CHECK(criterion_overall_risk(0.5, 0.05) == 385);  // 3.8416*0.25/0.0025 = 384.16

    // halving the margin quadruples the raw requirement
    const double raw_wide = 1.96 * 1.96 * 0.173 * 0.827 / (0.05 * 0.05);
    const double raw_narrow = 1.96 * 1.96 * 0.173 * 0.827 / (0.025 * 0.025);
    CHECK(raw_narrow == doctest::Approx(4.0 * raw_wide).epsilon(1e-12));
    CHECK(criterion_overall_risk(0.173, 0.025) == static_cast<long>(std::ceil(raw_narrow)));
}

TEST_CASE("no discrimination converts to a near-zero R2") {
    const double r2 = cstat_to_r2cs(0.5, 0.173, 200000, 54);
    CHECK(std::abs(r2) < 0.002);
}

TEST_CASE("conversion is deterministic and monotone in c") {
    const double a = cstat_to_r2cs(0.67, 0.173, 200000, 54);
    const double b = cstat_to_r2cs(0.67, 0.173, 200000, 54);
    CHECK(a == b);
    const double higher = cstat_to_r2cs(0.78, 0.173, 200000, 54);
    CHECK(higher > a);
}

TEST_CASE("anchor: c 0.78, prevalence 0.173, p 6 gives n 342 with 60 events") {
    FixedSizeInputs in;  // defaults: 0.173 / 0.78 / 6, pinned seed
    const FixedSizeResult r = riley_minimum(in);
    CHECK(r.n_total == 342);
    CHECK(r.events == 60);
    CHECK(r.n_shrinkage == 342);           // criterion (i) dominates
    CHECK(r.n_overall_risk == 220);
    CHECK(r.n_optimism < r.n_shrinkage);
    CHECK(r.n_total == std::max({r.n_shrinkage, r.n_optimism, r.n_overall_risk}));
}

TEST_CASE("anchor: c 0.67 gives n 994 with 172 events") {
    FixedSizeInputs in;
    in.c_statistic = 0.67;
    const FixedSizeResult r = riley_minimum(in);
    CHECK(r.n_total == 994);
    CHECK(r.events == 172);
    CHECK(r.n_shrinkage == 994);
    CHECK(r.n_overall_risk == 220);
}

TEST_CASE("criterion (i) is linear in the parameter count") {
    FixedSizeInputs six;
    six.mc_draws = 200000;
    FixedSizeInputs twelve = six;
    twelve.parameters = 12;
    const FixedSizeResult a = riley_minimum(six);
    const FixedSizeResult b = riley_minimum(twelve);
    CHECK(b.raw_shrinkage == doctest::Approx(2.0 * a.raw_shrinkage).epsilon(1e-12));
    CHECK(b.r2_cs == a.r2_cs);  // same conversion either way
}

TEST_CASE("lower anticipated c demands more patients") {
    FixedSizeInputs optimistic;
    optimistic.mc_draws = 200000;
    FixedSizeInputs cautious = optimistic;
    cautious.c_statistic = 0.67;
    CHECK(riley_minimum(cautious).n_total > riley_minimum(optimistic).n_total);
}

TEST_CASE("R2 at or above the shrinkage target is rejected") {
    FixedSizeInputs in;
    in.mc_draws = 200000;
    in.c_statistic = 0.9;
    in.prevalence = 0.5;
    in.shrinkage_target = 0.3;  // conversion will exceed this
    CHECK_THROWS_AS(riley_minimum(in), InvalidR2);
}

TEST_CASE("input validation") {
    FixedSizeInputs in;
    in.prevalence = 0.0;
    CHECK_THROWS_AS(in.validate(), ConfigError);
    in = {};
    in.c_statistic = 1.0;
    CHECK_THROWS_AS(in.validate(), ConfigError);
    in = {};
    in.parameters = 0;
    CHECK_THROWS_AS(in.validate(), ConfigError);
}

TEST_SUITE_END();
